#include "codafin/imputation.hpp"

#include "codafin/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>

namespace codafin {

bool ZeroPattern::any_zero() const {
    return std::any_of(zero_counts.begin(), zero_counts.end(), [](std::size_t c) { return c > 0; });
}

namespace {

std::size_t checked_width(const PartRows& rows) {
    if (rows.empty()) throw DataError("no rows to inspect");
    const std::size_t d = rows.front().size();
    if (d < 2) throw DataError("rows need at least 2 parts");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != d) {
            throw DataError("row " + std::to_string(i + 1) + " has " +
                            std::to_string(rows[i].size()) + " parts, expected " +
                            std::to_string(d));
        }
        for (std::size_t j = 0; j < d; ++j) {
            const double v = rows[i][j];
            if (!std::isfinite(v)) {
                throw DataError("row " + std::to_string(i + 1) + " part " + std::to_string(j + 1) +
                                " is not finite");
            }
            if (v < 0.0) {
                throw DataError("row " + std::to_string(i + 1) + " part " + std::to_string(j + 1) +
                                " is negative; negative parts are not allowed");
            }
        }
    }
    return d;
}

}  // namespace

ZeroPattern zero_pattern(const PartRows& rows) {
    const std::size_t d = checked_width(rows);
    ZeroPattern zp;
    zp.row_count = rows.size();
    zp.zero_counts.assign(d, 0);
    for (const auto& row : rows) {
        for (std::size_t j = 0; j < d; ++j) {
            if (row[j] == 0.0) ++zp.zero_counts[j];
        }
    }
    zp.zero_fractions.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        zp.zero_fractions[j] =
            static_cast<double>(zp.zero_counts[j]) / static_cast<double>(zp.row_count);
    }
    return zp;
}

double percentile_linear(std::vector<double> values, double percentile) {
    if (values.empty()) throw DataError("percentile of an empty sample");
    if (!(percentile >= 0.0 && percentile <= 100.0)) {
        throw DataError("percentile must lie in [0, 100]");
    }
    std::sort(values.begin(), values.end());
    const double h = static_cast<double>(values.size() - 1) * percentile / 100.0;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

DetectionLimits detection_limits(const PartRows& rows, double percentile) {
    if (!(percentile > 0.0 && percentile < 100.0)) {
        throw DataError("detection-limit percentile must lie in (0, 100), got " +
                        std::to_string(percentile));
    }
    const std::size_t d = checked_width(rows);
    DetectionLimits dl;
    dl.percentile = percentile;
    dl.limits.resize(d);
    std::vector<double> nonzero;
    nonzero.reserve(rows.size());
    for (std::size_t j = 0; j < d; ++j) {
        nonzero.clear();
        for (const auto& row : rows) {
            if (row[j] > 0.0) nonzero.push_back(row[j]);
        }
        if (nonzero.empty()) {
            throw UnimputablePart("part " + std::to_string(j + 1) +
                                  " is zero in every row and cannot be imputed");
        }
        dl.limits[j] = percentile_linear(nonzero, percentile);
    }
    return dl;
}

TruncatedMoments upper_truncated_normal(double mu, double sigma, double bound) {
    constexpr double kClamp = 8.0;
    if (!(sigma > 1e-12)) {
        return {std::min(mu, bound), 0.0};
    }
    const double z = (bound - mu) / sigma;
    const double zc = std::clamp(z, -kClamp, kClamp);
    const double pdf = std::exp(-0.5 * zc * zc) / std::sqrt(2.0 * std::numbers::pi);
    const double cdf = 0.5 * std::erfc(-zc / std::numbers::sqrt2);
    const double mills = pdf / cdf;
    const double var = std::max(0.0, sigma * sigma * (1.0 - zc * mills - mills * mills));
    if (z < -kClamp) {
        // Deep tail: place the mean just below the bound rather than near mu.
        return {bound - sigma * (zc + mills), var};
    }
    return {mu - sigma * mills, var};
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Conditional law of the censored block given the observed block, per pattern.
struct PatternLaw {
    std::vector<int> censored;
    std::vector<int> observed;
    MatrixXd gain;      // Sigma_CO * Sigma_OO^-1
    MatrixXd cond_cov;  // Sigma_CC - gain * Sigma_OC
};

PatternLaw pattern_law(const std::vector<bool>& mask, const MatrixXd& sigma) {
    PatternLaw law;
    const int q = static_cast<int>(mask.size());
    for (int j = 0; j < q; ++j) (mask[j] ? law.censored : law.observed).push_back(j);
    const int nc = static_cast<int>(law.censored.size());
    const int no = static_cast<int>(law.observed.size());
    MatrixXd scc(nc, nc), sco(nc, no), soo(no, no);
    for (int a = 0; a < nc; ++a) {
        for (int b = 0; b < nc; ++b) scc(a, b) = sigma(law.censored[a], law.censored[b]);
        for (int b = 0; b < no; ++b) sco(a, b) = sigma(law.censored[a], law.observed[b]);
    }
    for (int a = 0; a < no; ++a)
        for (int b = 0; b < no; ++b) soo(a, b) = sigma(law.observed[a], law.observed[b]);
    if (no == 0) {
        law.gain = MatrixXd::Zero(nc, 0);
        law.cond_cov = scc;
        return law;
    }
    const double ridge = 1e-10 * std::max(1.0, soo.trace() / no);
    soo.diagonal().array() += ridge;
    Eigen::LDLT<MatrixXd> ldlt(soo);
    law.gain = ldlt.solve(sco.transpose()).transpose();
    law.cond_cov = scc - law.gain * sco.transpose();
    return law;
}

double param_norm(const VectorXd& mu, const MatrixXd& sigma) {
    return std::sqrt(mu.squaredNorm() + sigma.squaredNorm());
}

}  // namespace

EmResult em_impute(const PartRows& rows, const DetectionLimits& dl, const EmOptions& options) {
    const std::size_t d = checked_width(rows);
    if (dl.limits.size() != d) throw DimensionMismatch("detection limits do not match part count");
    if (options.reference_part >= d) throw DataError("reference part index out of range");
    if (options.max_iter == 0 || !(options.tol > 0.0)) {
        throw DataError("EM needs tol > 0 and max_iter >= 1");
    }
    const std::size_t ref = options.reference_part;

    EmResult result{rows, {}};
    const ZeroPattern zp = zero_pattern(rows);
    if (zp.zero_counts[ref] > 0) {
        throw DataError("EM reference part " + std::to_string(ref + 1) + " contains zeros");
    }
    if (!zp.any_zero()) {
        result.report.converged = true;
        return result;
    }
    for (std::size_t j = 0; j < d; ++j) {
        if (zp.zero_counts[j] == zp.row_count) {
            throw UnimputablePart("part " + std::to_string(j + 1) + " is zero in every row");
        }
        if (zp.zero_counts[j] > 0 && !(dl.limits[j] > 0.0 && std::isfinite(dl.limits[j]))) {
            throw UnimputablePart("part " + std::to_string(j + 1) + " has no positive detection limit");
        }
    }

    const int n = static_cast<int>(rows.size());
    const int q = static_cast<int>(d - 1);
    std::vector<std::size_t> part_of(q);
    for (std::size_t j = 0, c = 0; j < d; ++j) {
        if (j != ref) part_of[c++] = j;
    }

    // Log-ratio coordinates y_ic = log(x_i,part / x_i,ref); censored cells
    // satisfy y < log(DL / x_ref) and start at log(0.65 DL / x_ref).
    MatrixXd y(n, q);
    MatrixXd bound = MatrixXd::Zero(n, q);
    std::map<std::vector<bool>, std::vector<int>> patterns;
    for (int i = 0; i < n; ++i) {
        const double lref = std::log(rows[i][ref]);
        std::vector<bool> mask(q, false);
        bool any = false;
        for (int c = 0; c < q; ++c) {
            const double x = rows[i][part_of[c]];
            if (x == 0.0) {
                mask[c] = true;
                any = true;
                bound(i, c) = std::log(dl.limits[part_of[c]]) - lref;
                y(i, c) = std::log(0.65) + bound(i, c);
                ++result.report.imputed_cells;
            } else {
                y(i, c) = std::log(x) - lref;
            }
        }
        if (any) patterns[mask].push_back(i);
    }

    auto moments = [&](const MatrixXd& correction, VectorXd& mu, MatrixXd& sigma) {
        mu = y.colwise().mean();
        const MatrixXd centered = y.rowwise() - mu.transpose();
        sigma = (centered.transpose() * centered + correction) / static_cast<double>(n);
    };

    VectorXd mu;
    MatrixXd sigma;
    moments(MatrixXd::Zero(q, q), mu, sigma);

    EmReport& report = result.report;
    for (std::size_t iter = 1; iter <= options.max_iter; ++iter) {
        MatrixXd correction = MatrixXd::Zero(q, q);
        for (const auto& [mask, members] : patterns) {
            const PatternLaw law = pattern_law(mask, sigma);
            const int nc = static_cast<int>(law.censored.size());
            const int no = static_cast<int>(law.observed.size());
            for (int i : members) {
                VectorXd dev(no);
                for (int b = 0; b < no; ++b) dev(b) = y(i, law.observed[b]) - mu(law.observed[b]);
                const VectorXd cond_mean =
                    (no > 0 ? VectorXd(law.gain * dev) : VectorXd::Zero(nc)) +
                    mu(law.censored);
                MatrixXd cov = law.cond_cov;
                for (int a = 0; a < nc; ++a) {
                    const int c = law.censored[a];
                    const double s = std::sqrt(std::max(0.0, cov(a, a)));
                    const TruncatedMoments tm = upper_truncated_normal(cond_mean(a), s, bound(i, c));
                    y(i, c) = tm.mean;
                    cov(a, a) = tm.variance;
                }
                for (int a = 0; a < nc; ++a)
                    for (int b = 0; b < nc; ++b)
                        correction(law.censored[a], law.censored[b]) += cov(a, b);
            }
        }
        VectorXd mu_new;
        MatrixXd sigma_new;
        moments(correction, mu_new, sigma_new);
        const double delta = param_norm(mu_new - mu, sigma_new - sigma);
        const double change = delta / std::max(param_norm(mu, sigma), 1e-300);
        mu = std::move(mu_new);
        sigma = std::move(sigma_new);
        report.iterations = iter;
        report.final_change = change;
        report.change_history.push_back(change);
        if (!std::isfinite(change)) break;
        if (change < options.tol) {
            report.converged = true;
            break;
        }
    }

    for (const auto& [mask, members] : patterns) {
        for (int i : members) {
            for (int c = 0; c < q; ++c) {
                if (!mask[c]) continue;
                const std::size_t j = part_of[c];
                double v = rows[i][ref] * std::exp(y(i, c));
                v = std::min(v, dl.limits[j]);
                if (!(v > 0.0)) v = std::numeric_limits<double>::min();
                result.rows[i][j] = v;
            }
        }
    }
    return result;
}

PartRows multiplicative_replace(const PartRows& rows, const DetectionLimits& dl,
                                double delta_fraction) {
    const std::size_t d = checked_width(rows);
    if (dl.limits.size() != d) throw DimensionMismatch("detection limits do not match part count");
    if (!(delta_fraction > 0.0 && delta_fraction < 1.0)) {
        throw DataError("delta fraction must lie in (0, 1)");
    }
    PartRows out(rows);
    for (auto& row : out) {
        for (std::size_t j = 0; j < d; ++j) {
            if (row[j] != 0.0) continue;
            if (!(dl.limits[j] > 0.0)) {
                throw UnimputablePart("part " + std::to_string(j + 1) + " has no positive detection limit");
            }
            row[j] = delta_fraction * dl.limits[j];
        }
    }
    return out;
}

}  // namespace codafin
