#pragma once

#include "codafin/ratios.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace codafin {

struct RunConfig {
    double dl_percentile = 5.0;
    double em_tol = 1e-6;
    std::size_t em_max_iter = 200;
    double delta_fraction = 0.65;
    std::size_t k_min = 2;
    std::size_t k_max = 10;
    std::optional<std::size_t> k;  // forces the final cluster count
    std::size_t restarts = 50;
    std::optional<std::uint64_t> seed;
    std::int64_t employee_threshold = 10;
    std::vector<GroupKey> group_keys{GroupKey::year, GroupKey::nace, GroupKey::cluster};
    // Categorical covariates plus "employees" for the boxplot summary.
    std::vector<std::string> associate{"nace", "legal_form", "year", "importer", "exporter",
                                       "employees"};
    // Execution only; never changes results and is not echoed into reports.
    std::size_t threads = 1;

    // Throws ConfigError for unknown keys or unparsable values.
    void set(const std::string& key, const std::string& value);
    // Throws ConfigError when a setting is outside its documented range.
    void validate() const;
    // Canonical key=value echo, in a fixed key order.
    std::vector<std::pair<std::string, std::string>> echo() const;
};

// Parses "key = value" lines; '#' starts a comment; blank lines are ignored.
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

std::string format_double(double v);  // shortest round-trip representation

}  // namespace codafin
