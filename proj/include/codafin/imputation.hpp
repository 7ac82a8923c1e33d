#pragma once

// Zero replacement for rounded zeros in accounting parts.
//
// A recorded zero is read as an unobserved positive value below a per-part
// detection limit DL_j. em_impute() treats such cells as left-censored
// observations of a multivariate normal in additive log-ratio coordinates
// and replaces them by truncated conditional means; multiplicative_replace()
// is the simple fallback (zero -> delta * DL_j).

#include <cstddef>
#include <vector>

namespace codafin {

using PartRows = std::vector<std::vector<double>>;

struct ZeroPattern {
    std::vector<std::size_t> zero_counts;
    std::vector<double> zero_fractions;
    std::size_t row_count = 0;

    bool any_zero() const;
};

struct DetectionLimits {
    std::vector<double> limits;  // same units as the parts
    double percentile = 5.0;
};

// Throws DataError on empty input, ragged rows, negative or non-finite parts.
ZeroPattern zero_pattern(const PartRows& rows);

// Linear-interpolation percentile of sorted data (order statistics x_0..x_{n-1}):
// h = (n - 1) * p / 100, q = x_floor(h) + (h - floor(h)) * (x_floor(h)+1 - x_floor(h)).
double percentile_linear(std::vector<double> values, double percentile);

// DL_j = percentile of the non-zero values of part j. Parts without zeros
// still get a limit. Throws UnimputablePart if a part is entirely zero.
DetectionLimits detection_limits(const PartRows& rows, double percentile = 5.0);

struct EmOptions {
    double tol = 1e-6;
    std::size_t max_iter = 200;
    std::size_t reference_part = 4;  // x5, revenue
};

struct EmReport {
    bool converged = false;
    std::size_t iterations = 0;
    double final_change = 0.0;
    std::vector<double> change_history;  // relative parameter change per iteration
    std::size_t imputed_cells = 0;
};

struct EmResult {
    PartRows rows;
    EmReport report;
};

// Non-convergence is reported, not thrown; the caller picks a fallback.
// Throws DataError if the reference part has zeros, UnimputablePart if a
// part has no positive value.
EmResult em_impute(const PartRows& rows, const DetectionLimits& dl, const EmOptions& options = {});

// Zero cells become delta_fraction * DL_j; other cells are untouched.
PartRows multiplicative_replace(const PartRows& rows, const DetectionLimits& dl,
                                double delta_fraction = 0.65);

// Upper-truncated standard normal moments for Y ~ N(mu, sigma^2) given Y < bound.
struct TruncatedMoments {
    double mean;
    double variance;
};
TruncatedMoments upper_truncated_normal(double mu, double sigma, double bound);

}  // namespace codafin
