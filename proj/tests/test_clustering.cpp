#include "codafin/clustering.hpp"
#include "codafin/errors.hpp"
#include "oracles/cluster_oracles.hpp"
#include "support/synthetic.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace codafin;

namespace {

ClrMatrix random_clr(std::mt19937_64& gen, std::size_t n, std::size_t d = 6) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < n; ++i) rows.push_back(codafin::testing::random_parts(gen, d));
    return ClrMatrix::from_parts(rows);
}

ClrMatrix panel_clr(const codafin::testing::ClusteredPanel& p, double scale = 1.0) {
    std::vector<std::vector<double>> rows;
    for (const auto& r : p.records) {
        std::vector<double> v(r.parts.begin(), r.parts.end());
        for (double& x : v) x *= scale;
        rows.push_back(v);
    }
    return ClrMatrix::from_parts(rows);
}

}  // namespace

TEST_CASE("clr matrix validation") {
    CHECK_THROWS_AS(ClrMatrix(3, {1.0, 0.0, 0.0}), InvalidComposition);
    CHECK_THROWS_AS(ClrMatrix(3, {1.0, -1.0}), DimensionMismatch);
    CHECK_THROWS_AS(ClrMatrix(2, {1.0, -1.0}, {"a", "b"}), DimensionMismatch);
    CHECK_NOTHROW(ClrMatrix(2, {1.0, -1.0, 0.5, -0.5}, {"a", "b"}));
}

TEST_CASE("two far-apart pairs are recovered") {
    const ClrMatrix m(2, {0.0, 0.0, 0.2, -0.2, 10.0, -10.0, 10.1, -10.1});
    const auto model = kmeans_fit(m, 2, 10, 1);
    CHECK(model.assignments[0] == model.assignments[1]);
    CHECK(model.assignments[2] == model.assignments[3]);
    CHECK(model.assignments[0] != model.assignments[2]);
    // Each pair contributes 2 * (half distance)^2.
    const double d01 = squared_distance(m.row(0), m.row(1));
    const double d23 = squared_distance(m.row(2), m.row(3));
    CHECK(model.wcss == doctest::Approx(d01 / 2.0 + d23 / 2.0).epsilon(1e-12));
}

TEST_CASE("best-of-restarts matches the exhaustive optimum") {
    std::mt19937_64 gen(41);
    int hits = 0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 6 + t % 5;
        const std::size_t k = 2 + t % 2;
        const ClrMatrix m = random_clr(gen, n);
        const auto model = kmeans_fit(m, k, 200, static_cast<std::uint64_t>(t));
        const double opt = oracle::exhaustive_wcss(m, k);
        CHECK(model.wcss >= opt - 1e-9);
        hits += std::abs(model.wcss - opt) <= 1e-9 * std::max(1.0, opt);
    }
    CHECK(hits >= 95);
}

TEST_CASE("model invariants") {
    std::mt19937_64 gen(42);
    const ClrMatrix m = random_clr(gen, 80);
    const auto model = kmeans_fit(m, 4, 10, 9);
    REQUIRE_FALSE(model.hit_iteration_cap);
    const auto sizes = model.cluster_sizes();
    for (auto s : sizes) CHECK(s > 0);
    for (std::size_t c = 0; c < model.k; ++c) {
        for (std::size_t j = 0; j < m.dims(); ++j) {
            double mean = 0.0;
            for (std::size_t i = 0; i < m.rows(); ++i)
                if (model.assignments[i] == static_cast<int>(c)) mean += m.row(i)[j];
            mean /= static_cast<double>(sizes[c]);
            CHECK(std::abs(model.centroid(c)[j] - mean) <= 1e-9);
        }
    }
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double own = squared_distance(m.row(i), model.centroid(model.assignments[i]));
        for (std::size_t c = 0; c < model.k; ++c) CHECK(own <= squared_distance(m.row(i), model.centroid(c)));
    }
    double wcss = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        wcss += squared_distance(m.row(i), model.centroid(model.assignments[i]));
    CHECK(model.wcss == doctest::Approx(wcss).epsilon(1e-12));
}

TEST_CASE("k-means determinism does not depend on threads") {
    std::mt19937_64 gen(43);
    const ClrMatrix m = random_clr(gen, 200);
    KMeansOptions one, four;
    four.threads = 4;
    const auto a = kmeans_fit(m, 5, 24, 77, one);
    const auto b = kmeans_fit(m, 5, 24, 77, four);
    CHECK(a.assignments == b.assignments);
    CHECK(a.centroids == b.centroids);
    CHECK(a.best_restart == b.best_restart);
    const auto c = kmeans_fit(m, 5, 24, 78, one);
    CHECK(c.seed == 78);
}

TEST_CASE("duplicate points and empty-cluster repair") {
    // Three distinct locations, heavily duplicated, k equal to the number of locations.
    std::vector<double> data;
    for (int i = 0; i < 10; ++i) data.insert(data.end(), {1.0, -1.0});
    data.insert(data.end(), {0.0, 0.0});
    data.insert(data.end(), {-3.0, 3.0});
    const ClrMatrix m(2, data);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto model = kmeans_fit(m, 3, 3, seed);
        for (auto s : model.cluster_sizes()) CHECK(s > 0);
        CHECK(model.wcss == doctest::Approx(0.0));
    }
    // All points identical: repair keeps every cluster populated.
    const ClrMatrix same(2, std::vector<double>(12, 0.0));
    const auto model = kmeans_fit(same, 3, 2, 5);
    for (auto s : model.cluster_sizes()) CHECK(s > 0);
}

TEST_CASE("k-means argument errors") {
    std::mt19937_64 gen(44);
    const ClrMatrix m = random_clr(gen, 5);
    CHECK_THROWS_AS(kmeans_fit(m, 1, 5, 0), DataError);
    CHECK_THROWS_AS(kmeans_fit(m, 6, 5, 0), DataError);
    CHECK_THROWS_AS(kmeans_fit(m, 2, 0, 0), DataError);
    CHECK_NOTHROW(kmeans_fit(m, 5, 1, 0));
}

TEST_CASE("silhouette and CH match the naive references") {
    std::mt19937_64 gen(45);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 6 + t % 5;
        const std::size_t k = 2 + t % 2;
        const ClrMatrix m = random_clr(gen, n);
        const auto model = kmeans_fit(m, k, 20, static_cast<std::uint64_t>(t));
        const auto s = silhouette(m, model.assignments);
        CHECK(std::abs(s.average - oracle::silhouette(m, model.assignments)) <= 1e-9);
        const auto ch = calinski_harabasz(m, model.assignments);
        REQUIRE_FALSE(ch.infinite);
        const double ref = oracle::calinski_harabasz(m, model.assignments);
        CHECK(std::abs(ch.value - ref) <= 1e-9 * std::max(1.0, ref));
        const auto disp = oracle::dispersion(m, model.assignments);
        CHECK(std::abs(ch.between + ch.within - disp.total) <= 1e-9 * std::max(1.0, disp.total));
    }
}

TEST_CASE("silhouette conventions") {
    // Two tight far clusters.
    const ClrMatrix far(2, {0.0, 0.0, 0.01, -0.01, 0.02, -0.02, 10.0, -10.0, 10.01, -10.01, 10.02, -10.02});
    const std::vector<int> labels{0, 0, 0, 1, 1, 1};
    CHECK(silhouette(far, labels).average > 0.9);

    // Singleton cluster contributes 0.
    const ClrMatrix three(2, {0.0, 0.0, 0.1, -0.1, 5.0, -5.0});
    const auto s = silhouette(three, std::vector<int>{0, 0, 1});
    CHECK(s.widths[2] == 0.0);

    // A point midway between two mirror-image clusters: a == b.
    const ClrMatrix mid(2, {-2.0, 2.0, -2.2, 2.2, 2.0, -2.0, 2.2, -2.2, 0.0, 0.0});
    const auto sm = silhouette(mid, std::vector<int>{0, 0, 1, 1, 0});
    CHECK(std::abs(sm.widths[4]) < 0.05);

    CHECK_THROWS_AS(silhouette(three, std::vector<int>{0, 0, 0}), DataError);
    CHECK_THROWS_AS(silhouette(three, std::vector<int>{0, 2, 2}), DataError);
    CHECK_THROWS_AS(silhouette(three, std::vector<int>{0, 1}), DimensionMismatch);
}

TEST_CASE("Calinski-Harabasz properties") {
    const auto p = codafin::testing::three_cluster_panel(46, 90);
    const ClrMatrix m = panel_clr(p);
    std::vector<int> shuffled = p.truth;
    std::mt19937_64 gen(46);
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    CHECK(calinski_harabasz(m, p.truth).value > calinski_harabasz(m, shuffled).value);

    // Identical points within each cluster -> W = 0 -> infinite sentinel.
    const ClrMatrix dup(2, {0.1, -0.1, 0.1, -0.1, 0.3, -0.3, 0.3, -0.3, 0.3, -0.3});
    const auto ch = calinski_harabasz(dup, std::vector<int>{0, 0, 1, 1, 1});
    CHECK(ch.infinite);
    CHECK(std::isinf(ch.value));
    // k = n
    const ClrMatrix two(2, {0.1, -0.1, 0.3, -0.3});
    CHECK(calinski_harabasz(two, std::vector<int>{0, 1}).infinite);
}

TEST_CASE("indices are invariant to cluster relabeling") {
    std::mt19937_64 gen(47);
    const ClrMatrix m = random_clr(gen, 40);
    const auto model = kmeans_fit(m, 3, 10, 1);
    std::vector<int> relabeled = model.assignments;
    for (int& a : relabeled) a = (a + 1) % 3;
    CHECK(silhouette(m, relabeled).average == doctest::Approx(silhouette(m, model.assignments).average).epsilon(1e-14));
    CHECK(calinski_harabasz(m, relabeled).value ==
          doctest::Approx(calinski_harabasz(m, model.assignments).value).epsilon(1e-12));
    CHECK(adjusted_rand_index(relabeled, model.assignments) == doctest::Approx(1.0));
}

TEST_CASE("select_k on separated synthetic clusters") {
    const auto p = codafin::testing::three_cluster_panel(48, 300, 6.0);
    CHECK(p.min_separation >= 5.0 * p.spread);
    const ClrMatrix m = panel_clr(p);
    const auto rep = select_k(m, 2, 10, 20, 123);
    CHECK(rep.best_k_silhouette == 3);
    CHECK(rep.best_k_ch == 3);
    CHECK(rep.indices_agree);
    REQUIRE(rep.rows.size() == 9);
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
        CHECK(rep.rows[i].wcss <= rep.rows[i - 1].wcss * (1.0 + 1e-9));
    }
    const auto& m3 = rep.models[1];
    CHECK(m3.k == 3);
    CHECK(adjusted_rand_index(m3.assignments, p.truth) >= 0.99);

    // Scale invariance: multiplying every composition by a constant changes nothing.
    const auto scaled = kmeans_fit(panel_clr(p, 1e4), 3, 20, 123);
    CHECK(adjusted_rand_index(scaled.assignments, m3.assignments) == doctest::Approx(1.0));

    const auto single = select_k(m, 2, 2, 5, 1);
    CHECK(single.rows.size() == 1);
    CHECK(single.best_k_silhouette == 2);

    CHECK_THROWS_AS(select_k(m, 1, 3, 5, 1), DataError);
    CHECK_THROWS_AS(select_k(m, 4, 3, 5, 1), DataError);
    CHECK_THROWS_AS(select_k(m, 2, 300, 5, 1), DataError);
}

TEST_CASE("adjusted rand index") {
    CHECK(adjusted_rand_index(std::vector<int>{0, 0, 1, 1}, std::vector<int>{5, 5, 7, 7}) == 1.0);
    // Hand count: contingency [[1,1],[1,1]]; index 0, expected 2*2/6 = 2/3, max 2 -> -0.5.
    CHECK(adjusted_rand_index(std::vector<int>{0, 0, 1, 1}, std::vector<int>{0, 1, 0, 1}) ==
          doctest::Approx(-0.5));
    CHECK_THROWS_AS(adjusted_rand_index(std::vector<int>{0}, std::vector<int>{0, 1}), DimensionMismatch);
}
