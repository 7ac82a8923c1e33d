// codafin: compositional financial-statement analysis.
//
//   codafin validate  <input.csv> [--out DIR]
//   codafin impute    <input.csv> --out DIR
//   codafin cluster   <input.csv> --seed N --out DIR
//   codafin ratios    <input.csv> --out DIR [--group-by year,nace]
//   codafin associate <input.csv> --seed N --out DIR
//   codafin run       <input.csv> --seed N --out DIR
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include "codafin/ingest.hpp"
#include "codafin/pipeline.hpp"
#include "codafin/report.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>

namespace {

using namespace codafin;

struct Options {
    std::string input;
    std::string out_dir;
    std::string config_file;
    std::map<std::string, std::string> overrides;
};

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::usage: return 1;
        case ErrorKind::data: return 2;
        case ErrorKind::numerical: return 3;
    }
    return 3;
}

// Registers flags that mirror RunConfig keys; values are applied after the config file.
void add_config_flags(CLI::App* cmd, Options& opt) {
    static const std::pair<const char*, const char*> kFlags[] = {
        {"dl-percentile", "Detection-limit percentile of non-zero values (default 5)"},
        {"em-tol", "EM relative parameter-change tolerance (default 1e-6)"},
        {"em-max-iter", "EM iteration cap (default 200)"},
        {"delta-fraction", "Fallback replacement as a fraction of DL (default 0.65)"},
        {"k-min", "Smallest cluster count scanned (default 2)"},
        {"k-max", "Largest cluster count scanned (default 10)"},
        {"k", "Force the final cluster count"},
        {"restarts", "k-means restarts per k (default 50)"},
        {"seed", "Random seed (required for clustering)"},
        {"employee-threshold", "Minimum employees to keep a row (default 10)"},
        {"group-by", "Grouping keys for ratio tables: year,nace,cluster,year_nace"},
        {"associate", "Covariates to relate to clusters (comma list, may be empty)"},
        {"threads", "Worker threads for k-means restarts (results do not depend on it)"},
    };
    cmd->add_option("input", opt.input, "Input CSV file")->required();
    cmd->add_option("-c,--config", opt.config_file, "key=value config file");
    for (const auto& [name, help] : kFlags) {
        std::string key = name;
        cmd->add_option_function<std::string>(
            "--" + key, [&opt, key](const std::string& v) { opt.overrides[key] = v; }, help);
    }
}

RunConfig build_config(const Options& opt) {
    RunConfig cfg;
    if (!opt.config_file.empty()) cfg = load_config(opt.config_file, cfg);
    for (const auto& [k, v] : opt.overrides) cfg.set(k, v);
    cfg.validate();
    return cfg;
}

void print_summary(const Dataset& ds) {
    std::cout << "rows ingested: " << ds.ingested << "\nrows kept: " << ds.records.size()
              << "\nrows excluded: " << ds.excluded.size() << '\n';
    for (const auto& e : ds.excluded) {
        std::cout << "  line " << e.line << " (" << e.firm_id << ", " << e.year << "): " << e.reason << '\n';
    }
    for (const auto& w : ds.warnings) std::cerr << "warning: " << w << '\n';
}

int run_command(const std::string& name, const Options& opt) {
    const RunConfig cfg = build_config(opt);
    const bool needs_seed = name == "cluster" || name == "associate" || name == "run";
    if (needs_seed && !cfg.seed) throw ConfigError("--seed is required for " + name);
    if (name != "validate" && opt.out_dir.empty()) throw ConfigError("--out is required for " + name);

    const Dataset ds = ingest(opt.input, cfg);
    if (name == "validate") {
        print_summary(ds);
        if (!opt.out_dir.empty()) {
            RunResult r;
            r.config = cfg;
            r.input_sha256 = ds.input_sha256;
            r.ingested = ds.ingested;
            r.excluded = ds.excluded;
            r.warnings = ds.warnings;
            r.records = ds.records;
            emit_reports(r, opt.out_dir);
        }
        return 0;
    }

    PipelineStages stages;
    if (name == "impute") {
        stages = {false, false, false};
    } else if (name == "cluster") {
        stages = {true, false, false};
    } else if (name == "ratios") {
        bool wants_cluster = false;
        for (auto k : cfg.group_keys) wants_cluster |= k == GroupKey::cluster;
        if (wants_cluster && !cfg.seed) {
            throw ConfigError("ratios by cluster need --seed (or drop 'cluster' from --group-by)");
        }
        stages = {wants_cluster, true, false};
    } else if (name == "associate") {
        stages = {true, false, true};
    }

    const RunResult result = run_pipeline(ds, cfg, stages);
    const auto files = emit_reports(result, opt.out_dir);
    if (name == "impute") {
        const std::string path = opt.out_dir + "/imputed.csv";
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + path);
        write_records_csv(out, result.records);
    }
    for (const auto& n : result.notes) std::cerr << "note: " << n << '\n';
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << "wrote " << files.size() + (name == "impute" ? 1 : 0) << " files to " << opt.out_dir << '\n';
    if (result.model) std::cout << "clusters: " << result.model->k << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compositional financial-statement analysis"};
    app.require_subcommand(1);
    static const std::pair<const char*, const char*> kCommands[] = {
        {"validate", "Parse and filter the input, report exclusions"},
        {"impute", "Replace zero parts and write imputed.csv"},
        {"cluster", "Select k and cluster firm-years in CLR space"},
        {"ratios", "Compositional centers and mean ratios by group"},
        {"associate", "Cluster vs covariate tables, mosaics and boxplots"},
        {"run", "Full pipeline"},
    };
    std::map<std::string, Options> options;
    for (const auto& [name, help] : kCommands) {
        auto* cmd = app.add_subcommand(name, help);
        Options& opt = options[name];
        add_config_flags(cmd, opt);
        cmd->add_option("-o,--out", opt.out_dir, "Output directory");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    for (auto* sub : app.get_subcommands()) {
        const std::string name = sub->get_name();
        try {
            return run_command(name, options[name]);
        } catch (const Error& e) {
            std::cerr << "error: " << e.what() << '\n';
            return exit_code(e.kind());
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 3;
        }
    }
    return 1;
}
