#pragma once

#include "codafin/clustering.hpp"
#include "codafin/ratios.hpp"
#include "codafin/records.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace codafin {

// Cluster x category counts. Rows are cluster ids ascending, columns are
// category levels in lexicographic order.
struct ContingencyTable {
    std::vector<int> clusters;
    std::vector<std::string> levels;
    std::vector<std::vector<std::size_t>> counts;  // [cluster][level]
    std::vector<std::size_t> row_totals;
    std::vector<std::size_t> col_totals;
    std::size_t total = 0;
};

ContingencyTable crosstab(std::span<const int> assignments, std::span<const std::string> categories);

// Pearson chi-square of independence; informational only.
struct ChiSquare {
    double statistic = 0.0;
    std::size_t degrees_of_freedom = 0;
};
ChiSquare chi_square(const ContingencyTable& t);

// Mosaic plot layout: column width = cluster share, segment height =
// within-cluster share of each level. Clusters with no observations are
// dropped and listed in `warnings`.
struct MosaicGeometry {
    std::vector<int> clusters;
    std::vector<std::string> levels;
    std::vector<double> widths;
    std::vector<std::vector<double>> heights;  // [cluster][level]
    std::vector<std::string> warnings;
};

MosaicGeometry mosaic_geometry(const ContingencyTable& t);

struct ClusterProfile {
    int cluster = 0;
    std::size_t size = 0;
    double share = 0.0;
    CompositionalCenter center;
    RatioSet ratios;
};

// Rows must be strictly positive (imputed) statements aligned with the model.
std::vector<ClusterProfile> cluster_profiles(const ClusterModel& model,
                                             std::span<const FirmYearRecord> rows);

struct BoxplotSummary {
    int cluster = 0;
    std::size_t count = 0;
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
    double lower_whisker = 0.0;  // most extreme observation within Q1 - 1.5 IQR
    double upper_whisker = 0.0;  // most extreme observation within Q3 + 1.5 IQR
    std::vector<double> outliers;
};

// Quartiles by linear interpolation between order statistics.
std::vector<BoxplotSummary> numeric_summary(std::span<const double> values,
                                            std::span<const int> assignments);

// Category labels for the covariates that can be cross-tabulated.
enum class Covariate { nace, legal_form, year, importer, exporter };
std::string_view to_string(Covariate c);
Covariate parse_covariate(std::string_view text);  // throws ConfigError
std::vector<std::string> covariate_levels(std::span<const FirmYearRecord> rows, Covariate c);

}  // namespace codafin
