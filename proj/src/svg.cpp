#include "codafin/svg.hpp"

#include "codafin/report.hpp"

#include <algorithm>
#include <sstream>

namespace codafin {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;
constexpr double kGap = 4.0;

constexpr const char* kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                                    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};

std::string px(double v) { return format_fixed(v, 2); }

std::string escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

// "--" is not allowed inside XML comments.
std::string comment_safe(std::string s) {
    std::size_t pos;
    while ((pos = s.find("--")) != std::string::npos) s.replace(pos, 2, "- -");
    return s;
}

void open_svg(std::ostringstream& os, const std::string& title, const std::string& provenance) {
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(kWidth) << "\" height=\""
       << px(kHeight) << "\" viewBox=\"0 0 " << px(kWidth) << ' ' << px(kHeight) << "\">\n"
       << "<!-- " << comment_safe(provenance) << " -->\n"
       << "<rect x=\"0\" y=\"0\" width=\"" << px(kWidth) << "\" height=\"" << px(kHeight)
       << "\" fill=\"white\"/>\n"
       << "<text x=\"" << px(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       << "font-size=\"16\">" << escape(title) << "</text>\n";
}

}  // namespace

std::vector<MosaicRect> mosaic_rects(const MosaicGeometry& g) {
    std::vector<MosaicRect> out;
    double x = 0.0;
    for (std::size_t c = 0; c < g.clusters.size(); ++c) {
        double y = 0.0;
        for (std::size_t l = 0; l < g.levels.size(); ++l) {
            out.push_back(MosaicRect{g.clusters[c], g.levels[l], x, y, g.widths[c], g.heights[c][l]});
            y += g.heights[c][l];
        }
        x += g.widths[c];
    }
    return out;
}

std::string mosaic_svg(const MosaicGeometry& g, const std::string& title, const std::string& provenance) {
    std::ostringstream os;
    open_svg(os, title, provenance);
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    const double gaps = kGap * static_cast<double>(g.clusters.empty() ? 0 : g.clusters.size() - 1);
    const double usable = plot_w - gaps;
    double x0 = kLeft;
    for (std::size_t c = 0; c < g.clusters.size(); ++c) {
        const double w = usable * g.widths[c];
        double y0 = kTop;
        for (std::size_t l = 0; l < g.levels.size(); ++l) {
            const double h = plot_h * g.heights[c][l];
            if (h > 0.0) {
                os << "<rect x=\"" << px(x0) << "\" y=\"" << px(y0) << "\" width=\"" << px(w)
                   << "\" height=\"" << px(h) << "\" fill=\"" << kPalette[l % std::size(kPalette)]
                   << "\" stroke=\"white\" stroke-width=\"1\"/>\n";
            }
            y0 += h;
        }
        os << "<text x=\"" << px(x0 + w / 2) << "\" y=\"" << px(kTop + plot_h + 20)
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">Cluster "
           << g.clusters[c] << " (" << format_fixed(100.0 * g.widths[c], 1) << "%)</text>\n";
        x0 += w + kGap;
    }
    for (std::size_t l = 0; l < g.levels.size(); ++l) {
        const double y = kTop + 20.0 * static_cast<double>(l);
        os << "<rect x=\"" << px(kWidth - kRight + 15) << "\" y=\"" << px(y) << "\" width=\"12\" height=\"12\" fill=\""
           << kPalette[l % std::size(kPalette)] << "\"/>\n"
           << "<text x=\"" << px(kWidth - kRight + 32) << "\" y=\"" << px(y + 10)
           << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(g.levels[l]) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string boxplot_svg(const std::vector<BoxplotSummary>& boxes, const std::string& title,
                        const std::string& provenance) {
    std::ostringstream os;
    open_svg(os, title, provenance);
    const double plot_w = kWidth - kLeft - 40.0;
    const double plot_h = kHeight - kTop - kBottom;
    double lo = 0.0, hi = 1.0;
    if (!boxes.empty()) {
        lo = boxes.front().min;
        hi = boxes.front().max;
        for (const auto& b : boxes) {
            lo = std::min(lo, b.min);
            hi = std::max(hi, b.max);
        }
    }
    if (hi <= lo) hi = lo + 1.0;
    auto sy = [&](double v) { return kTop + plot_h * (1.0 - (v - lo) / (hi - lo)); };

    os << "<line x1=\"" << px(kLeft) << "\" y1=\"" << px(kTop) << "\" x2=\"" << px(kLeft) << "\" y2=\""
       << px(kTop + plot_h) << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double v = lo + (hi - lo) * t / 4.0;
        os << "<text x=\"" << px(kLeft - 6) << "\" y=\"" << px(sy(v) + 4)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << format_fixed(v, 0)
           << "</text>\n";
    }
    const double slot = boxes.empty() ? plot_w : plot_w / static_cast<double>(boxes.size());
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const auto& b = boxes[i];
        const double cx = kLeft + slot * (static_cast<double>(i) + 0.5);
        const double half = std::min(40.0, slot * 0.3);
        const char* color = kPalette[i % std::size(kPalette)];
        os << "<line x1=\"" << px(cx) << "\" y1=\"" << px(sy(b.upper_whisker)) << "\" x2=\"" << px(cx)
           << "\" y2=\"" << px(sy(b.q3)) << "\" stroke=\"black\"/>\n"
           << "<line x1=\"" << px(cx) << "\" y1=\"" << px(sy(b.q1)) << "\" x2=\"" << px(cx) << "\" y2=\""
           << px(sy(b.lower_whisker)) << "\" stroke=\"black\"/>\n"
           << "<rect x=\"" << px(cx - half) << "\" y=\"" << px(sy(b.q3)) << "\" width=\"" << px(2 * half)
           << "\" height=\"" << px(sy(b.q1) - sy(b.q3)) << "\" fill=\"" << color
           << "\" stroke=\"black\"/>\n"
           << "<line x1=\"" << px(cx - half) << "\" y1=\"" << px(sy(b.median)) << "\" x2=\"" << px(cx + half)
           << "\" y2=\"" << px(sy(b.median)) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
        for (double o : b.outliers) {
            os << "<circle cx=\"" << px(cx) << "\" cy=\"" << px(sy(o)) << "\" r=\"2.5\" fill=\"none\" stroke=\"black\"/>\n";
        }
        os << "<text x=\"" << px(cx) << "\" y=\"" << px(kTop + plot_h + 20)
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">Cluster " << b.cluster
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace codafin
