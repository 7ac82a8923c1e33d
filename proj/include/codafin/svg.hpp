#pragma once

#include "codafin/association.hpp"

#include <string>
#include <vector>

namespace codafin {

struct MosaicRect {
    int cluster;
    std::string level;
    double x, y, width, height;  // unit-square coordinates, y grows downwards
};

std::vector<MosaicRect> mosaic_rects(const MosaicGeometry& g);

std::string mosaic_svg(const MosaicGeometry& g, const std::string& title, const std::string& provenance);
std::string boxplot_svg(const std::vector<BoxplotSummary>& boxes, const std::string& title,
                        const std::string& provenance);

}  // namespace codafin
