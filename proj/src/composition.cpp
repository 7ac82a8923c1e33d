#include "codafin/composition.hpp"

#include "codafin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace codafin {

void validate_parts(std::span<const double> parts) {
    if (parts.size() < 2) {
        throw InvalidComposition("composition needs at least 2 parts, got " +
                                 std::to_string(parts.size()));
    }
    for (std::size_t j = 0; j < parts.size(); ++j) {
        if (!std::isfinite(parts[j]) || parts[j] <= 0.0) {
            throw InvalidComposition("part " + std::to_string(j + 1) +
                                     " must be finite and > 0, got " + std::to_string(parts[j]));
        }
    }
}

Composition::Composition(std::vector<double> parts) : parts_(std::move(parts)) {
    validate_parts(parts_);
}

Composition Composition::scaled(double factor) const {
    std::vector<double> out(parts_);
    for (double& x : out) x *= factor;
    return Composition(std::move(out));
}

ClrVector::ClrVector(std::vector<double> coords) : coords_(std::move(coords)) {
    if (coords_.size() < 2) throw InvalidComposition("clr vector needs at least 2 coordinates");
    double sum = 0.0;
    for (double v : coords_) {
        if (!std::isfinite(v)) throw InvalidComposition("clr coordinate is not finite");
        sum += v;
    }
    const double tol = kClrSumTolerancePerPart * static_cast<double>(coords_.size());
    if (std::abs(sum) > tol) {
        throw InvalidComposition("clr coordinates must sum to zero, sum = " + std::to_string(sum));
    }
}

CompositionalCenter::CompositionalCenter(std::vector<double> parts) : parts_(std::move(parts)) {
    validate_parts(parts_);
    const double sum = std::accumulate(parts_.begin(), parts_.end(), 0.0);
    if (std::abs(sum - 1.0) > kCenterSumTolerance) {
        throw InvalidComposition("compositional center must sum to one, sum = " +
                                 std::to_string(sum));
    }
}

namespace {

std::vector<double> close_parts(std::span<const double> parts) {
    const double sum = std::accumulate(parts.begin(), parts.end(), 0.0);
    std::vector<double> out(parts.begin(), parts.end());
    for (double& x : out) x /= sum;
    return out;
}

}  // namespace

Composition closure(const Composition& c) { return Composition(close_parts(c.parts())); }

void clr_into(std::span<const double> parts, std::span<double> out) {
    validate_parts(parts);
    if (out.size() != parts.size()) throw DimensionMismatch("clr output size mismatch");
    double mean_log = 0.0;
    for (std::size_t j = 0; j < parts.size(); ++j) {
        out[j] = std::log(parts[j]);
        mean_log += out[j];
    }
    mean_log /= static_cast<double>(parts.size());
    for (double& v : out) v -= mean_log;
}

ClrVector clr(const Composition& c) {
    std::vector<double> coords(c.size());
    clr_into(c.parts(), coords);
    return ClrVector(std::move(coords));
}

Composition clr_inverse(const ClrVector& v) {
    // Shift by the max coordinate so exp() cannot overflow; closure removes the shift.
    const double shift = *std::max_element(v.coords().begin(), v.coords().end());
    std::vector<double> parts(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) parts[j] = std::exp(v[j] - shift);
    return Composition(close_parts(parts));
}

double aitchison_distance(const Composition& a, const Composition& b) {
    if (a.size() != b.size()) {
        throw DimensionMismatch("aitchison_distance: " + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + " parts");
    }
    const ClrVector ca = clr(a);
    const ClrVector cb = clr(b);
    double ss = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = ca[j] - cb[j];
        ss += d * d;
    }
    return std::sqrt(ss);
}

namespace {

CompositionalCenter center_from_log_means(std::vector<double> log_means) {
    const double shift = *std::max_element(log_means.begin(), log_means.end());
    for (double& v : log_means) v = std::exp(v - shift);
    return CompositionalCenter(close_parts(log_means));
}

}  // namespace

CompositionalCenter center(std::span<const Composition> cs) {
    if (cs.empty()) throw DataError("center of an empty collection");
    const std::size_t d = cs.front().size();
    std::vector<double> log_means(d, 0.0);
    for (const auto& c : cs) {
        if (c.size() != d) throw DimensionMismatch("center: compositions differ in part count");
        for (std::size_t j = 0; j < d; ++j) log_means[j] += std::log(c[j]);
    }
    for (double& v : log_means) v /= static_cast<double>(cs.size());
    return center_from_log_means(std::move(log_means));
}

CompositionalCenter center_of_rows(std::span<const std::vector<double>> rows) {
    if (rows.empty()) throw DataError("center of an empty collection");
    const std::size_t d = rows.front().size();
    std::vector<double> log_means(d, 0.0);
    for (const auto& row : rows) {
        if (row.size() != d) throw DimensionMismatch("center: rows differ in part count");
        validate_parts(row);
        for (std::size_t j = 0; j < d; ++j) log_means[j] += std::log(row[j]);
    }
    for (double& v : log_means) v /= static_cast<double>(rows.size());
    return center_from_log_means(std::move(log_means));
}

}  // namespace codafin
