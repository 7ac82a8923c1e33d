#include "codafin/composition.hpp"
#include "codafin/errors.hpp"
#include "codafin/imputation.hpp"
#include "support/synthetic.hpp"

#include <doctest.h>

#include <cmath>
#include <tuple>
#include <cstring>
#include <random>

using namespace codafin;
using codafin::testing::censored_lognormal_panel;

namespace {

PartRows positive_rows(std::mt19937_64& gen, std::size_t n) {
    PartRows rows;
    for (std::size_t i = 0; i < n; ++i) rows.push_back(codafin::testing::random_parts(gen, 6, 1.0));
    return rows;
}

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("zero pattern") {
    std::mt19937_64 gen(21);
    auto rows = positive_rows(gen, 1000);
    auto zp = zero_pattern(rows);
    CHECK(zp.row_count == 1000);
    for (double f : zp.zero_fractions) CHECK(f == 0.0);
    CHECK_FALSE(zp.any_zero());

    for (std::size_t i = 0; i < 149; ++i) rows[i * 6][2] = 0.0;
    zp = zero_pattern(rows);
    CHECK(zp.zero_counts[2] == 149);
    CHECK(zp.zero_fractions[2] == doctest::Approx(0.149));

    const PartRows one{{0, 1, 1, 1, 1, 1}};
    CHECK(zero_pattern(one).zero_counts[0] == 1);

    CHECK_THROWS_AS(zero_pattern(PartRows{{1, -1, 1}}), DataError);
    CHECK_THROWS_AS(zero_pattern(PartRows{}), DataError);
    CHECK_THROWS_AS(zero_pattern(PartRows{{1, 2, 3}, {1, 2}}), DataError);
}

TEST_CASE("detection limits use linear-interpolation percentiles") {
    // Non-zero values 10..100 plus zeros. Hand computation: h = (10 - 1) * 0.05
    // = 0.45, DL = 10 + 0.45 * (20 - 10) = 14.5.
    PartRows rows;
    for (int v = 10; v <= 100; v += 10) rows.push_back({static_cast<double>(v), 1.0});
    rows.push_back({0.0, 1.0});
    rows.push_back({0.0, 1.0});
    const auto dl = detection_limits(rows, 5.0);
    CHECK(dl.limits[0] == doctest::Approx(14.5).epsilon(1e-14));
    CHECK(dl.limits[1] == 1.0);  // no zeros: reported but unused
    CHECK(dl.percentile == 5.0);

    const auto single = detection_limits(PartRows{{7.0, 1.0}, {0.0, 2.0}}, 5.0);
    CHECK(single.limits[0] == 7.0);

    CHECK_THROWS_AS(detection_limits(PartRows{{0.0, 1.0}, {0.0, 2.0}}), UnimputablePart);
    CHECK_THROWS_AS(detection_limits(rows, 0.0), DataError);
    CHECK_THROWS_AS(detection_limits(rows, 100.0), DataError);

    CHECK(percentile_linear({1, 2, 3, 4, 5}, 25.0) == 2.0);
    CHECK(percentile_linear({5, 1, 3}, 50.0) == 3.0);
    CHECK(percentile_linear({1, 2}, 50.0) == 1.5);
}

TEST_CASE("upper truncated normal moments agree with quadrature") {
    // Midpoint-rule integration of the truncated density on [mu - 12 sigma, bound].
    auto oracle = [](double mu, double sigma, double bound) {
        const int steps = 200000;
        const double lo = mu - 12.0 * sigma;
        const double h = (bound - lo) / steps;
        double z0 = 0.0, z1 = 0.0, z2 = 0.0;
        for (int i = 0; i < steps; ++i) {
            const double y = lo + (i + 0.5) * h;
            const double w = std::exp(-0.5 * std::pow((y - mu) / sigma, 2));
            z0 += w;
            z1 += w * y;
            z2 += w * y * y;
        }
        const double m = z1 / z0;
        return std::pair{m, z2 / z0 - m * m};
    };
    for (auto [mu, sigma, bound] : {std::tuple{0.0, 1.0, 0.0}, std::tuple{1.0, 2.0, -1.0},
                                    std::tuple{-3.0, 0.5, -2.0}, std::tuple{0.0, 1.0, -4.0},
                                    std::tuple{2.0, 1.5, 3.0}}) {
        const auto tm = upper_truncated_normal(mu, sigma, bound);
        const auto [m, v] = oracle(mu, sigma, bound);
        CHECK(tm.mean == doctest::Approx(m).epsilon(1e-6));
        CHECK(tm.variance == doctest::Approx(v).epsilon(1e-4));
        CHECK(tm.mean < bound);
    }
    // Deep tail beyond the clamp still lands below the bound.
    const auto deep = upper_truncated_normal(0.0, 1.0, -20.0);
    CHECK(deep.mean < -20.0);
    CHECK(deep.mean > -21.0);
    const auto degenerate = upper_truncated_normal(2.0, 0.0, 1.0);
    CHECK(degenerate.mean == 1.0);
}

TEST_CASE("em_impute on data without zeros is the identity") {
    std::mt19937_64 gen(22);
    const auto rows = positive_rows(gen, 50);
    const auto dl = detection_limits(rows);
    const auto res = em_impute(rows, dl);
    CHECK(res.report.iterations == 0);
    CHECK(res.report.converged);
    CHECK(res.rows == rows);
}

TEST_CASE("em_impute recovers censored log-means on a lognormal benchmark") {
    const auto panel = censored_lognormal_panel(2024, 500, 2, 0.10);
    DetectionLimits dl = detection_limits(panel.observed, 5.0);
    dl.limits[2] = panel.threshold;
    const auto res = em_impute(panel.observed, dl);
    REQUIRE(res.report.converged);

    double imputed = 0.0, truth = 0.0;
    std::size_t cells = 0;
    for (std::size_t i = 0; i < panel.observed.size(); ++i) {
        if (!panel.censored[i]) continue;
        imputed += std::log(res.rows[i][2]);
        truth += std::log(panel.truth[i][2]);
        ++cells;
    }
    REQUIRE(cells > 40);
    CHECK(res.report.imputed_cells == cells);
    CHECK(std::abs(imputed / cells - truth / cells) < 0.1);
}

TEST_CASE("em_impute containment and non-interference over random panels") {
    std::size_t converged = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto panel = censored_lognormal_panel(1000 + seed, 120, 2, 0.15);
        // Also a single zero in another part of one row.
        std::mt19937_64 gen(seed);
        const std::size_t row = gen() % panel.observed.size();
        panel.observed[row][0] = 0.0;
        const auto dl = detection_limits(panel.observed, 5.0);
        const auto res = em_impute(panel.observed, dl);
        converged += res.report.converged;
        for (std::size_t i = 0; i < panel.observed.size(); ++i) {
            for (std::size_t j = 0; j < 6; ++j) {
                if (panel.observed[i][j] == 0.0) {
                    CHECK(res.rows[i][j] > 0.0);
                    CHECK(res.rows[i][j] <= dl.limits[j]);
                } else {
                    CHECK(bit_equal(res.rows[i][j], panel.observed[i][j]));
                }
            }
        }
        if (res.report.converged && res.report.change_history.size() >= 3) {
            const auto& h = res.report.change_history;
            const std::size_t m = h.size();
            CHECK(h[m - 1] <= h[m - 2]);
            CHECK(h[m - 2] <= h[m - 3]);
        }
    }
    CHECK(converged >= 95);
}

TEST_CASE("em_impute is deterministic and validates its input") {
    const auto panel = censored_lognormal_panel(7, 200);
    const auto dl = detection_limits(panel.observed);
    const auto a = em_impute(panel.observed, dl);
    const auto b = em_impute(panel.observed, dl);
    CHECK(a.rows == b.rows);
    CHECK(a.report.iterations == b.report.iterations);

    auto bad = panel.observed;
    bad[0][4] = 0.0;  // reference part
    CHECK_THROWS_AS(em_impute(bad, detection_limits(bad)), DataError);

    EmOptions tight;
    tight.max_iter = 1;
    tight.tol = 1e-15;
    const auto capped = em_impute(panel.observed, dl, tight);
    CHECK_FALSE(capped.report.converged);
    CHECK(capped.report.iterations == 1);
}

TEST_CASE("multiplicative replacement") {
    std::mt19937_64 gen(23);
    const auto rows = positive_rows(gen, 20);
    CHECK(multiplicative_replace(rows, detection_limits(rows)) == rows);

    DetectionLimits dl;
    dl.limits = {10.0, 1.0};
    const auto out = multiplicative_replace(PartRows{{0.0, 3.0}}, dl, 0.65);
    CHECK(out[0][0] == doctest::Approx(6.5));
    CHECK(out[0][1] == 3.0);
    CHECK_THROWS_AS(multiplicative_replace(rows, detection_limits(rows), 1.0), DataError);

    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto panel = censored_lognormal_panel(500 + seed, 60, 2, 0.2);
        const auto dl2 = detection_limits(panel.observed);
        const auto rep = multiplicative_replace(panel.observed, dl2);
        for (const auto& row : rep) CHECK_NOTHROW(clr(Composition(row)));
    }
}
