#pragma once

// Composition algebra in Aitchison geometry.
//
// A composition is a vector of D >= 2 strictly positive parts where only the
// ratios between parts carry information. Compositions are not closed on
// construction; closure() is applied where a unit sum is required.
// All logarithms are natural logs.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace codafin {

class Composition {
public:
    // Throws InvalidComposition if D < 2 or any part is non-finite or <= 0.
    explicit Composition(std::vector<double> parts);
    Composition(std::initializer_list<double> parts) : Composition(std::vector<double>(parts)) {}

    std::size_t size() const noexcept { return parts_.size(); }
    double operator[](std::size_t j) const { return parts_[j]; }
    std::span<const double> parts() const noexcept { return parts_; }

    Composition scaled(double factor) const;

private:
    std::vector<double> parts_;
};

// Centered log-ratio coordinates. Coordinates sum to zero within 1e-10 * D.
class ClrVector {
public:
    explicit ClrVector(std::vector<double> coords);

    std::size_t size() const noexcept { return coords_.size(); }
    double operator[](std::size_t j) const { return coords_[j]; }
    std::span<const double> coords() const noexcept { return coords_; }

private:
    std::vector<double> coords_;
};

// Per-part geometric means over a sample, closed to unit sum.
class CompositionalCenter {
public:
    explicit CompositionalCenter(std::vector<double> parts);

    std::size_t size() const noexcept { return parts_.size(); }
    double operator[](std::size_t j) const { return parts_[j]; }
    std::span<const double> parts() const noexcept { return parts_; }
    Composition composition() const { return Composition(parts_); }

private:
    std::vector<double> parts_;
};

inline constexpr double kClrSumTolerancePerPart = 1e-10;
inline constexpr double kCenterSumTolerance = 1e-12;

// Throws InvalidComposition for invalid parts (D < 2, non-finite or non-positive).
void validate_parts(std::span<const double> parts);

Composition closure(const Composition& c);

// clr_j = log(x_j) - mean_k log(x_k)
ClrVector clr(const Composition& c);
// Writes clr coordinates of `parts` into `out`; parts are validated.
void clr_into(std::span<const double> parts, std::span<double> out);

// exp then closure.
Composition clr_inverse(const ClrVector& v);

// Euclidean distance between clr images. Throws DimensionMismatch.
double aitchison_distance(const Composition& a, const Composition& b);

CompositionalCenter center(std::span<const Composition> cs);
// Same as above over raw part rows (each row validated as a composition).
CompositionalCenter center_of_rows(std::span<const std::vector<double>> rows);

}  // namespace codafin
