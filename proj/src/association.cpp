#include "codafin/association.hpp"

#include "codafin/errors.hpp"
#include "codafin/imputation.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace codafin {

ContingencyTable crosstab(std::span<const int> assignments, std::span<const std::string> categories) {
    if (assignments.size() != categories.size()) {
        throw DimensionMismatch("crosstab: " + std::to_string(assignments.size()) +
                                " assignments vs " + std::to_string(categories.size()) +
                                " categories");
    }
    ContingencyTable t;
    std::map<int, std::size_t> row_index;
    std::map<std::string, std::size_t> col_index;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        row_index.emplace(assignments[i], 0);
        col_index.emplace(categories[i], 0);
    }
    for (auto& [id, idx] : row_index) {
        idx = t.clusters.size();
        t.clusters.push_back(id);
    }
    for (auto& [level, idx] : col_index) {
        idx = t.levels.size();
        t.levels.push_back(level);
    }
    t.counts.assign(t.clusters.size(), std::vector<std::size_t>(t.levels.size(), 0));
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        ++t.counts[row_index[assignments[i]]][col_index[categories[i]]];
    }
    t.row_totals.assign(t.clusters.size(), 0);
    t.col_totals.assign(t.levels.size(), 0);
    for (std::size_t r = 0; r < t.clusters.size(); ++r) {
        for (std::size_t c = 0; c < t.levels.size(); ++c) {
            t.row_totals[r] += t.counts[r][c];
            t.col_totals[c] += t.counts[r][c];
        }
    }
    t.total = assignments.size();
    return t;
}

ChiSquare chi_square(const ContingencyTable& t) {
    ChiSquare out;
    if (t.total == 0) return out;
    const auto total = static_cast<double>(t.total);
    std::size_t live_rows = 0, live_cols = 0;
    for (auto r : t.row_totals) live_rows += r > 0;
    for (auto c : t.col_totals) live_cols += c > 0;
    for (std::size_t r = 0; r < t.clusters.size(); ++r) {
        for (std::size_t c = 0; c < t.levels.size(); ++c) {
            const double expected =
                static_cast<double>(t.row_totals[r]) * static_cast<double>(t.col_totals[c]) / total;
            if (expected <= 0.0) continue;
            const double diff = static_cast<double>(t.counts[r][c]) - expected;
            out.statistic += diff * diff / expected;
        }
    }
    out.degrees_of_freedom = (live_rows > 0 && live_cols > 0) ? (live_rows - 1) * (live_cols - 1) : 0;
    return out;
}

MosaicGeometry mosaic_geometry(const ContingencyTable& t) {
    if (t.total == 0) throw DataError("mosaic geometry of an all-zero table");
    MosaicGeometry g;
    g.levels = t.levels;
    const auto total = static_cast<double>(t.total);
    for (std::size_t r = 0; r < t.clusters.size(); ++r) {
        if (t.row_totals[r] == 0) {
            g.warnings.push_back("cluster " + std::to_string(t.clusters[r]) +
                                 " has no observations and is omitted");
            continue;
        }
        const auto row_total = static_cast<double>(t.row_totals[r]);
        g.clusters.push_back(t.clusters[r]);
        g.widths.push_back(row_total / total);
        std::vector<double> h(t.levels.size());
        for (std::size_t c = 0; c < t.levels.size(); ++c) {
            h[c] = static_cast<double>(t.counts[r][c]) / row_total;
        }
        g.heights.push_back(std::move(h));
    }
    return g;
}

std::vector<ClusterProfile> cluster_profiles(const ClusterModel& model,
                                             std::span<const FirmYearRecord> rows) {
    if (model.assignments.size() != rows.size()) {
        throw DimensionMismatch("cluster_profiles: assignments do not align with rows");
    }
    const auto groups = grouped_center_ratios(rows, GroupKey::cluster, model.assignments);
    std::vector<ClusterProfile> out;
    out.reserve(groups.size());
    for (const auto& g : groups) {
        out.push_back(ClusterProfile{*g.label.cluster, g.size,
                                     static_cast<double>(g.size) / static_cast<double>(rows.size()),
                                     g.center, g.ratios});
    }
    return out;
}

std::vector<BoxplotSummary> numeric_summary(std::span<const double> values,
                                            std::span<const int> assignments) {
    if (values.size() != assignments.size()) {
        throw DimensionMismatch("numeric_summary: values and assignments differ in length");
    }
    std::map<int, std::vector<double>> groups;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) throw DataError("numeric_summary: non-finite value");
        groups[assignments[i]].push_back(values[i]);
    }
    std::vector<BoxplotSummary> out;
    for (auto& [cluster, v] : groups) {
        std::sort(v.begin(), v.end());
        BoxplotSummary s;
        s.cluster = cluster;
        s.count = v.size();
        s.min = v.front();
        s.max = v.back();
        s.q1 = percentile_linear(v, 25.0);
        s.median = percentile_linear(v, 50.0);
        s.q3 = percentile_linear(v, 75.0);
        const double iqr = s.q3 - s.q1;
        const double lo_fence = s.q1 - 1.5 * iqr;
        const double hi_fence = s.q3 + 1.5 * iqr;
        s.lower_whisker = s.max;
        s.upper_whisker = s.min;
        for (double x : v) {
            if (x < lo_fence || x > hi_fence) {
                s.outliers.push_back(x);
            } else {
                s.lower_whisker = std::min(s.lower_whisker, x);
                s.upper_whisker = std::max(s.upper_whisker, x);
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::string_view to_string(Covariate c) {
    switch (c) {
        case Covariate::nace: return "nace";
        case Covariate::legal_form: return "legal_form";
        case Covariate::year: return "year";
        case Covariate::importer: return "importer";
        case Covariate::exporter: return "exporter";
    }
    return "nace";
}

Covariate parse_covariate(std::string_view text) {
    if (text == "nace") return Covariate::nace;
    if (text == "legal_form") return Covariate::legal_form;
    if (text == "year") return Covariate::year;
    if (text == "importer") return Covariate::importer;
    if (text == "exporter") return Covariate::exporter;
    throw ConfigError("unknown covariate '" + std::string(text) +
                      "' (expected nace, legal_form, year, importer or exporter)");
}

std::vector<std::string> covariate_levels(std::span<const FirmYearRecord> rows, Covariate c) {
    std::vector<std::string> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        switch (c) {
            case Covariate::nace: out.push_back(r.nace); break;
            case Covariate::legal_form: out.emplace_back(to_string(r.legal_form)); break;
            case Covariate::year: out.push_back(std::to_string(r.year)); break;
            case Covariate::importer: out.push_back(r.importer ? "true" : "false"); break;
            case Covariate::exporter: out.push_back(r.exporter ? "true" : "false"); break;
        }
    }
    return out;
}

}  // namespace codafin
