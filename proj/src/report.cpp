#include "codafin/report.hpp"

#include "codafin/svg.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace codafin {

std::string format_fixed(double v, int decimals) {
    char buf[128];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
    if (ec != std::errc{}) return format_double(v);
    std::string s(buf, ptr);
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

namespace {

namespace fs = std::filesystem;

constexpr const char* kPartNames[] = {"x1", "x2", "x3", "x4", "x5", "x6"};
constexpr const char* kPartLabels[] = {"x1 Non-current assets",      "x2 Current assets",
                                       "x3 Non-current liabilities", "x4 Current liabilities",
                                       "x5 Revenue",                 "x6 Expenses"};
constexpr const char* kRatioLabels[] = {"Turnover ratio",
                                        "Current-asset turnover ratio",
                                        "Profit margin ratio",
                                        "Leverage ratio",
                                        "ROA",
                                        "ROE",
                                        "Debt ratio",
                                        "Short-term debt ratio",
                                        "Long-term solvency ratio",
                                        "Short-term solvency ratio",
                                        "Asset tangibility ratio",
                                        "Debt maturity ratio"};

std::string config_line(const RunConfig& cfg) {
    std::string out;
    for (const auto& [k, v] : cfg.echo()) {
        if (!out.empty()) out += ';';
        out += k + "=" + v;
    }
    return out;
}

std::string provenance(const RunResult& r) {
    return "input_sha256=" + r.input_sha256 +
           " seed=" + (r.config.seed ? std::to_string(*r.config.seed) : std::string("none")) +
           " config: " + config_line(r.config);
}

std::string table_header(const RunResult& r, const std::string& name) {
    std::ostringstream os;
    os << "# " << name << '\n'
       << "# input_sha256=" << r.input_sha256 << '\n'
       << "# seed=" << (r.config.seed ? std::to_string(*r.config.seed) : std::string("none")) << '\n'
       << "# config: " << config_line(r.config) << '\n';
    return os.str();
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

std::string opt_value(const std::optional<double>& v) { return v ? format_double(*v) : "NA"; }
std::string opt_fixed(const std::optional<double>& v) { return v ? format_fixed(*v, 3) : "NA"; }

class Writer {
public:
    explicit Writer(fs::path dir) : dir_(std::move(dir)) {}

    void write(const std::string& name, const std::string& body) {
        const fs::path path = dir_ / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + path.string());
        out << body;
        out.close();
        if (!out) throw DataError("failed writing " + path.string());
        written_.push_back(name);
    }

    std::vector<std::string> written() && { return std::move(written_); }

private:
    fs::path dir_;
    std::vector<std::string> written_;
};

std::vector<std::string> label_columns(GroupKey key) {
    switch (key) {
        case GroupKey::year: return {"year"};
        case GroupKey::nace: return {"nace"};
        case GroupKey::cluster: return {"cluster"};
        case GroupKey::year_nace: return {"year", "nace"};
    }
    return {};
}

std::vector<std::string> label_values(const GroupLabel& g, GroupKey key) {
    switch (key) {
        case GroupKey::year: return {std::to_string(*g.year)};
        case GroupKey::nace: return {*g.nace};
        case GroupKey::cluster: return {std::to_string(*g.cluster)};
        case GroupKey::year_nace: return {std::to_string(*g.year), *g.nace};
    }
    return {};
}

std::string column_title(const GroupLabel& g, GroupKey key) {
    if (key == GroupKey::cluster) return "Cluster " + std::to_string(*g.cluster);
    if (key == GroupKey::nace) return "Code " + *g.nace;
    return g.display();
}

// Rows are items, columns are groups (the layout of an annual ratio table).
std::string human_table(const std::string& header, const std::vector<std::string>& columns,
                        const std::vector<std::string>& row_labels,
                        const std::vector<std::vector<std::string>>& cells) {
    std::size_t label_w = 0;
    for (const auto& l : row_labels) label_w = std::max(label_w, l.size());
    label_w = std::max<std::size_t>(label_w, 5);
    std::size_t col_w = 6;
    for (const auto& c : columns) col_w = std::max(col_w, c.size());
    for (const auto& row : cells)
        for (const auto& c : row) col_w = std::max(col_w, c.size());
    auto pad_left = [](const std::string& s, std::size_t w) { return std::string(w - std::min(w, s.size()), ' ') + s; };
    auto pad_right = [](const std::string& s, std::size_t w) { return s + std::string(w - std::min(w, s.size()), ' '); };
    std::ostringstream os;
    os << header << pad_right("", label_w);
    for (const auto& c : columns) os << "  " << pad_left(c, col_w);
    os << '\n';
    for (std::size_t i = 0; i < row_labels.size(); ++i) {
        os << pad_right(row_labels[i], label_w);
        for (const auto& c : cells[i]) os << "  " << pad_left(c, col_w);
        os << '\n';
    }
    return os.str();
}

void emit_grouped(Writer& w, const RunResult& r, const GroupedTable& t) {
    const std::string key(to_string(t.key));
    const auto cols = label_columns(t.key);
    const auto total = static_cast<double>(r.records.size());

    std::ostringstream center_csv, ratios_csv;
    center_csv << table_header(r, "center_by_" + key + ".csv");
    ratios_csv << table_header(r, "ratios_by_" + key + ".csv");
    for (const auto& c : cols) {
        center_csv << c << ',';
        ratios_csv << c << ',';
    }
    center_csv << "n,share";
    ratios_csv << "n,share";
    for (const char* p : kPartNames) center_csv << ',' << p;
    for (auto name : ratio_names()) ratios_csv << ',' << name;
    center_csv << '\n';
    ratios_csv << '\n';

    std::vector<std::string> titles;
    std::vector<std::vector<std::string>> center_cells(kStatementParts), ratio_cells(RatioSet::count);
    for (const auto& g : t.groups) {
        const auto values = label_values(g.label, t.key);
        const std::string share = format_double(static_cast<double>(g.size) / total);
        for (const auto& v : values) {
            center_csv << csv_field(v) << ',';
            ratios_csv << csv_field(v) << ',';
        }
        center_csv << g.size << ',' << share;
        ratios_csv << g.size << ',' << share;
        for (std::size_t j = 0; j < kStatementParts; ++j) {
            center_csv << ',' << format_double(g.center[j]);
            center_cells[j].push_back(format_fixed(g.center[j], 3));
        }
        const auto rv = g.ratios.values();
        for (std::size_t j = 0; j < RatioSet::count; ++j) {
            ratios_csv << ',' << opt_value(rv[j]);
            ratio_cells[j].push_back(opt_fixed(rv[j]));
        }
        center_csv << '\n';
        ratios_csv << '\n';
        titles.push_back(column_title(g.label, t.key));
    }
    w.write("center_by_" + key + ".csv", center_csv.str());
    w.write("ratios_by_" + key + ".csv", ratios_csv.str());

    const std::vector<std::string> part_labels(std::begin(kPartLabels), std::end(kPartLabels));
    const std::vector<std::string> ratio_labels(std::begin(kRatioLabels), std::end(kRatioLabels));
    w.write("center_by_" + key + ".txt",
            human_table(table_header(r, "center_by_" + key + ".txt") +
                            "# Compositional center (geometric means closed to unit sum)\n",
                        titles, part_labels, center_cells));
    w.write("ratios_by_" + key + ".txt",
            human_table(table_header(r, "ratios_by_" + key + ".txt") +
                            "# Mean financial ratios from compositional centers\n",
                        titles, ratio_labels, ratio_cells));
}

std::string run_report(const RunResult& r) {
    std::ostringstream os;
    os << "# run_report\n[run]\n"
       << "input_sha256=" << r.input_sha256 << '\n'
       << "rows_ingested=" << r.ingested << '\n'
       << "rows_kept=" << r.records.size() << '\n'
       << "rows_excluded=" << r.excluded.size() << '\n';
    os << "[config]\n";
    for (const auto& [k, v] : r.config.echo()) os << k << '=' << v << '\n';

    const auto& imp = r.imputation;
    os << "[imputation]\nmethod=" << to_string(imp.method) << '\n';
    for (std::size_t j = 0; j < imp.pattern.zero_counts.size(); ++j) {
        os << "zeros_" << kPartNames[j] << '=' << imp.pattern.zero_counts[j] << " ("
           << format_double(imp.pattern.zero_fractions[j]) << ")\n";
    }
    for (std::size_t j = 0; j < imp.limits.limits.size(); ++j) {
        os << "detection_limit_" << kPartNames[j] << '=' << format_double(imp.limits.limits[j]) << '\n';
    }
    os << "em_iterations=" << imp.em.iterations << '\n'
       << "em_converged=" << (imp.em.converged ? "true" : "false") << '\n'
       << "em_final_change=" << format_double(imp.em.final_change) << '\n'
       << "imputed_cells=" << imp.em.imputed_cells << '\n';

    if (r.model) {
        os << "[clustering]\n";
        if (r.selection) {
            os << "recommended_k_silhouette=" << r.selection->best_k_silhouette << '\n'
               << "recommended_k_calinski_harabasz=" << r.selection->best_k_ch << '\n'
               << "indices_agree=" << (r.selection->indices_agree ? "true" : "false") << '\n';
        }
        os << "k=" << r.model->k << '\n'
           << "wcss=" << format_double(r.model->wcss) << '\n'
           << "best_restart=" << r.model->best_restart << '\n'
           << "lloyd_iterations=" << r.model->iterations << '\n'
           << "average_silhouette=" << format_double(r.silhouette->average) << '\n'
           << "calinski_harabasz="
           << (r.calinski_harabasz->infinite ? std::string("inf") : format_double(r.calinski_harabasz->value))
           << '\n';
        const auto sizes = r.model->cluster_sizes();
        for (std::size_t c = 0; c < sizes.size(); ++c) {
            os << "cluster_" << c + 1 << "_size=" << sizes[c] << " (share "
               << format_double(static_cast<double>(sizes[c]) / static_cast<double>(r.records.size()))
               << ")\n";
        }
    }
    if (!r.associations.empty()) {
        os << "[association]\n";
        for (const auto& a : r.associations) {
            os << "chi_square_informational_" << to_string(a.covariate) << '='
               << format_double(a.chi_square.statistic) << " (df " << a.chi_square.degrees_of_freedom
               << "; informational only, not a significance test)\n";
        }
    }
    os << "[notes]\n";
    for (const auto& n : r.notes) os << n << '\n';
    os << "[warnings]\n";
    for (const auto& w : r.warnings) os << w << '\n';
    return os.str();
}

}  // namespace

std::vector<std::string> emit_reports(const RunResult& r, const fs::path& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) {
        throw DataError("cannot create output directory " + out_dir.string());
    }
    Writer w(out_dir);
    w.write("run_report.txt", run_report(r));

    {
        std::ostringstream os;
        os << table_header(r, "excluded_rows.csv") << "line,firm_id,year,reason\n";
        for (const auto& e : r.excluded) {
            os << e.line << ',' << csv_field(e.firm_id) << ',' << e.year << ',' << e.reason << '\n';
        }
        w.write("excluded_rows.csv", os.str());
    }

    if (r.selection) {
        std::ostringstream os;
        os << table_header(r, "kselection.csv") << "k,silhouette,calinski_harabasz,ch_infinite,wcss\n";
        for (const auto& row : r.selection->rows) {
            os << row.k << ',' << format_double(row.silhouette) << ','
               << (row.ch.infinite ? std::string("inf") : format_double(row.ch.value)) << ','
               << (row.ch.infinite ? "true" : "false") << ',' << format_double(row.wcss) << '\n';
        }
        w.write("kselection.csv", os.str());
    }

    if (r.model) {
        std::ostringstream os;
        os << table_header(r, "assignments.csv") << "firm_id,year,cluster\n";
        for (std::size_t i = 0; i < r.records.size(); ++i) {
            os << csv_field(r.records[i].firm_id) << ',' << r.records[i].year << ','
               << r.cluster_labels[i] << '\n';
        }
        w.write("assignments.csv", os.str());
    }

    for (const auto& t : r.grouped) emit_grouped(w, r, t);

    for (const auto& a : r.associations) {
        const std::string cov(to_string(a.covariate));
        std::ostringstream tab;
        tab << table_header(r, "crosstab_" + cov + ".csv") << "cluster";
        for (const auto& l : a.table.levels) tab << ',' << csv_field(l);
        tab << ",total\n";
        for (std::size_t c = 0; c < a.table.clusters.size(); ++c) {
            tab << a.table.clusters[c];
            for (auto n : a.table.counts[c]) tab << ',' << n;
            tab << ',' << a.table.row_totals[c] << '\n';
        }
        tab << "total";
        for (auto n : a.table.col_totals) tab << ',' << n;
        tab << ',' << a.table.total << '\n';
        w.write("crosstab_" + cov + ".csv", tab.str());

        std::ostringstream geo;
        geo << table_header(r, "mosaic_" + cov + ".geometry")
            << "cluster,level,x,y,width,height\n";
        for (const auto& rect : mosaic_rects(a.mosaic)) {
            geo << rect.cluster << ',' << csv_field(rect.level) << ',' << format_double(rect.x) << ','
                << format_double(rect.y) << ',' << format_double(rect.width) << ','
                << format_double(rect.height) << '\n';
        }
        w.write("mosaic_" + cov + ".geometry", geo.str());
        w.write("mosaic_" + cov + ".svg",
                mosaic_svg(a.mosaic, "Mosaic plot: cluster vs " + cov, provenance(r)));
    }

    if (r.employees_requested) {
        std::ostringstream os;
        os << table_header(r, "boxplot_employees.summary")
           << "cluster,count,min,q1,median,q3,max,lower_whisker,upper_whisker,outliers\n";
        for (const auto& b : r.employees) {
            os << b.cluster << ',' << b.count << ',' << format_double(b.min) << ',' << format_double(b.q1)
               << ',' << format_double(b.median) << ',' << format_double(b.q3) << ','
               << format_double(b.max) << ',' << format_double(b.lower_whisker) << ','
               << format_double(b.upper_whisker) << ',';
            for (std::size_t i = 0; i < b.outliers.size(); ++i) {
                if (i) os << ';';
                os << format_double(b.outliers[i]);
            }
            os << '\n';
        }
        w.write("boxplot_employees.summary", os.str());
        w.write("boxplot_employees.svg", boxplot_svg(r.employees, "Employees by cluster", provenance(r)));
    }
    return std::move(w).written();
}

}  // namespace codafin
