#include "codafin/pipeline.hpp"

#include <algorithm>

namespace codafin {

std::string_view to_string(ImputationMethod m) {
    switch (m) {
        case ImputationMethod::none: return "none";
        case ImputationMethod::em: return "em";
        case ImputationMethod::multiplicative_fallback: return "multiplicative-fallback";
    }
    return "none";
}

namespace {

template <typename F>
auto stage(const char* name, F&& body) {
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(name, e);
    }
}

void impute(RunResult& r) {
    const RunConfig& cfg = r.config;
    const PartRows rows = part_rows(r.records);
    r.imputation.pattern = zero_pattern(rows);
    r.imputation.limits = detection_limits(rows, cfg.dl_percentile);
    if (!r.imputation.pattern.any_zero()) {
        r.imputation.em.converged = true;
        return;
    }
    EmOptions opt;
    opt.tol = cfg.em_tol;
    opt.max_iter = cfg.em_max_iter;
    EmResult em = em_impute(rows, r.imputation.limits, opt);
    r.imputation.em = em.report;
    PartRows imputed;
    if (em.report.converged) {
        r.imputation.method = ImputationMethod::em;
        imputed = std::move(em.rows);
    } else {
        r.imputation.method = ImputationMethod::multiplicative_fallback;
        r.notes.push_back("EM did not converge after " + std::to_string(em.report.iterations) +
                          " iterations; zeros replaced by " + format_double(cfg.delta_fraction) +
                          " x detection limit");
        imputed = multiplicative_replace(rows, r.imputation.limits, cfg.delta_fraction);
    }
    for (std::size_t i = 0; i < r.records.size(); ++i) {
        std::copy(imputed[i].begin(), imputed[i].end(), r.records[i].parts.begin());
    }
}

void cluster(RunResult& r) {
    const RunConfig& cfg = r.config;
    if (!cfg.seed) throw ConfigError("clustering needs a seed");
    const std::size_t n = r.records.size();
    std::vector<std::string> ids;
    ids.reserve(n);
    for (const auto& rec : r.records) ids.push_back(rec.firm_id + "/" + std::to_string(rec.year));
    r.clr = stage("clr", [&] { return ClrMatrix::from_parts(part_rows(r.records), std::move(ids)); });

    KMeansOptions opt;
    opt.threads = cfg.threads;
    const std::size_t k_max = std::min(cfg.k_max, n > 0 ? n - 1 : 0);
    if (k_max < cfg.k_max) {
        r.notes.push_back("k_max reduced from " + std::to_string(cfg.k_max) + " to " +
                          std::to_string(k_max) + " (n = " + std::to_string(n) + ")");
    }
    if (cfg.k_min <= k_max) {
        r.selection = stage("select_k", [&] {
            return select_k(*r.clr, cfg.k_min, k_max, cfg.restarts, *cfg.seed, opt);
        });
    } else if (!cfg.k) {
        throw StageError("select_k", DataError("no admissible k in [" + std::to_string(cfg.k_min) +
                                               ", " + std::to_string(k_max) + "]"));
    } else {
        r.notes.push_back("cluster-count selection skipped: too few rows for the k range");
    }

    std::size_t k = 0;
    if (cfg.k) {
        k = *cfg.k;
    } else {
        k = r.selection->best_k_silhouette;
        if (!r.selection->indices_agree) {
            r.notes.push_back("silhouette picks k=" + std::to_string(r.selection->best_k_silhouette) +
                              ", Calinski-Harabasz picks k=" + std::to_string(r.selection->best_k_ch) +
                              "; using the silhouette choice");
        }
    }

    r.model = stage("kmeans", [&] {
        if (r.selection) {
            for (const auto& m : r.selection->models) {
                if (m.k == k) return m;
            }
        }
        return kmeans_fit(*r.clr, k, cfg.restarts, *cfg.seed, opt);
    });
    r.cluster_labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) r.cluster_labels[i] = r.model->assignments[i] + 1;
    stage("cluster_indices", [&] {
        r.silhouette = silhouette(*r.clr, r.model->assignments);
        r.calinski_harabasz = calinski_harabasz(*r.clr, r.model->assignments);
        return 0;
    });
}

void ratios(RunResult& r) {
    for (GroupKey key : r.config.group_keys) {
        if (key == GroupKey::cluster && !r.model) {
            r.notes.push_back("ratios by cluster skipped: clustering was not run");
            continue;
        }
        r.grouped.push_back(GroupedTable{
            key, grouped_center_ratios(r.records, key, r.cluster_labels)});
    }
}

void associate(RunResult& r) {
    if (!r.model) throw ConfigError("associations need a clustering");
    // Profiles use 1-based labels so ids match the other reports.
    ClusterModel labelled = *r.model;
    labelled.assignments = r.cluster_labels;
    r.profiles = cluster_profiles(labelled, r.records);
    for (const auto& name : r.config.associate) {
        if (name == "employees") {
            std::vector<double> values;
            values.reserve(r.records.size());
            for (const auto& rec : r.records) values.push_back(static_cast<double>(rec.employees));
            r.employees = numeric_summary(values, r.cluster_labels);
            r.employees_requested = true;
            continue;
        }
        const Covariate cov = parse_covariate(name);
        const auto levels = covariate_levels(r.records, cov);
        CovariateAssociation a{cov, crosstab(r.cluster_labels, levels), {}, {}};
        a.chi_square = chi_square(a.table);
        a.mosaic = mosaic_geometry(a.table);
        for (const auto& w : a.mosaic.warnings) r.warnings.push_back(std::string(name) + ": " + w);
        r.associations.push_back(std::move(a));
    }
}

}  // namespace

RunResult run_pipeline(const Dataset& dataset, const RunConfig& config, const PipelineStages& stages) {
    RunResult r;
    stage("config", [&] {
        config.validate();
        return 0;
    });
    r.config = config;
    r.input_sha256 = dataset.input_sha256;
    r.ingested = dataset.ingested;
    r.excluded = dataset.excluded;
    r.warnings = dataset.warnings;
    r.records = dataset.records;
    if (r.records.empty()) {
        throw StageError("ingest", DataError("no rows left after filtering"));
    }

    stage("impute", [&] {
        impute(r);
        return 0;
    });
    if (stages.cluster || stages.associate) stage("cluster", [&] {
        cluster(r);
        return 0;
    });
    if (stages.ratios) stage("ratios", [&] {
        ratios(r);
        return 0;
    });
    if (stages.associate) stage("associate", [&] {
        associate(r);
        return 0;
    });
    return r;
}

}  // namespace codafin
