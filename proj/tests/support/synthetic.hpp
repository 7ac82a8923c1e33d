#pragma once

// Seeded synthetic data for tests. Generators know their ground truth.

#include "codafin/records.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace codafin::testing {

std::vector<double> random_parts(std::mt19937_64& gen, std::size_t d, double log_sd = 1.5);

struct ClusteredPanel {
    std::vector<FirmYearRecord> records;
    std::vector<int> truth;  // 0-based generator cluster
    double spread = 0.0;     // RMS distance of members to their cluster mean (population)
    double min_separation = 0.0;
};

// Three clusters in CLR space; centroid separation = separation_ratio * spread.
ClusteredPanel three_cluster_panel(std::uint64_t seed, std::size_t n = 300,
                                   double separation_ratio = 8.0);

struct CensoredPanel {
    std::vector<std::vector<double>> observed;  // censored cells set to 0
    std::vector<std::vector<double>> truth;
    std::vector<bool> censored;  // per row, for the censored part
    std::size_t part = 2;
    double threshold = 0.0;  // censoring point (true quantile of the part)
};

// Correlated 6-part lognormal panel; `part` is censored below its
// `quantile` sample quantile.
CensoredPanel censored_lognormal_panel(std::uint64_t seed, std::size_t n = 500, std::size_t part = 2,
                                       double quantile = 0.10);

std::string to_csv(const std::vector<FirmYearRecord>& records);

}  // namespace codafin::testing
