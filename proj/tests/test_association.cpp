#include "codafin/association.hpp"
#include "codafin/errors.hpp"
#include "codafin/svg.hpp"
#include "support/synthetic.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

using namespace codafin;

TEST_CASE("crosstab counts") {
    const std::vector<int> one(7, 1);
    const std::vector<std::string> lvl(7, "a");
    const auto t1 = crosstab(one, lvl);
    REQUIRE(t1.counts.size() == 1);
    CHECK(t1.counts[0][0] == 7);
    CHECK(t1.total == 7);

    const auto t = crosstab(std::vector<int>{1, 1, 2}, std::vector<std::string>{"a", "b", "a"});
    CHECK(t.clusters == std::vector<int>{1, 2});
    CHECK(t.levels == std::vector<std::string>{"a", "b"});
    CHECK(t.counts[0] == std::vector<std::size_t>{1, 1});
    CHECK(t.counts[1] == std::vector<std::size_t>{1, 0});
    CHECK(t.row_totals == std::vector<std::size_t>{2, 1});
    CHECK(t.col_totals == std::vector<std::size_t>{2, 1});

    CHECK_THROWS_AS(crosstab(std::vector<int>{1}, std::vector<std::string>{"a", "b"}), DimensionMismatch);
}

TEST_CASE("crosstab and mosaic on random panels match an independent tally") {
    std::mt19937_64 gen(51);
    const std::vector<std::string> names{"0111", "104", "106", "107"};
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = 50 + gen() % 200;
        std::vector<int> a(n);
        std::vector<std::string> c(n);
        std::map<std::pair<int, std::string>, std::size_t> tally;
        std::map<int, std::size_t> rows;
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = 1 + static_cast<int>(gen() % 3);
            c[i] = names[gen() % names.size()];
            ++tally[{a[i], c[i]}];
            ++rows[a[i]];
        }
        const auto tab = crosstab(a, c);
        std::size_t sum = 0;
        for (std::size_t r = 0; r < tab.clusters.size(); ++r) {
            for (std::size_t l = 0; l < tab.levels.size(); ++l) {
                CHECK(tab.counts[r][l] == tally[{tab.clusters[r], tab.levels[l]}]);
                sum += tab.counts[r][l];
            }
        }
        CHECK(sum == n);

        const auto g = mosaic_geometry(tab);
        double wsum = 0.0;
        for (std::size_t r = 0; r < g.clusters.size(); ++r) {
            CHECK(g.widths[r] == doctest::Approx(static_cast<double>(rows[g.clusters[r]]) / n).epsilon(1e-15));
            wsum += g.widths[r];
            double hsum = 0.0;
            for (std::size_t l = 0; l < g.levels.size(); ++l) {
                const double expect = static_cast<double>(tally[{g.clusters[r], g.levels[l]}]) /
                                      static_cast<double>(rows[g.clusters[r]]);
                CHECK(g.heights[r][l] == doctest::Approx(expect).epsilon(1e-15));
                hsum += g.heights[r][l];
            }
            CHECK(std::abs(hsum - 1.0) <= 1e-12);
        }
        CHECK(std::abs(wsum - 1.0) <= 1e-12);

        // Row-order permutation leaves the table unchanged.
        std::vector<std::size_t> perm(n);
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), gen);
        std::vector<int> pa(n);
        std::vector<std::string> pc(n);
        for (std::size_t i = 0; i < n; ++i) {
            pa[i] = a[perm[i]];
            pc[i] = c[perm[i]];
        }
        CHECK(crosstab(pa, pc).counts == tab.counts);
    }
}

TEST_CASE("mosaic geometry") {
    ContingencyTable t = crosstab(std::vector<int>{1, 1, 2, 2}, std::vector<std::string>{"a", "b", "a", "b"});
    const auto g = mosaic_geometry(t);
    CHECK(g.widths == std::vector<double>{0.5, 0.5});
    for (const auto& h : g.heights) CHECK(h == std::vector<double>{0.5, 0.5});

    // 34/42/24 shares.
    std::vector<int> a;
    for (int i = 0; i < 34; ++i) a.push_back(1);
    for (int i = 0; i < 42; ++i) a.push_back(2);
    for (int i = 0; i < 24; ++i) a.push_back(3);
    const auto shares = mosaic_geometry(crosstab(a, std::vector<std::string>(100, "x")));
    CHECK(shares.widths[0] == doctest::Approx(0.34));
    CHECK(shares.widths[1] == doctest::Approx(0.42));
    CHECK(shares.widths[2] == doctest::Approx(0.24));

    // A hand-built table with an empty row drops it with a warning.
    t.clusters.push_back(3);
    t.counts.push_back({0, 0});
    t.row_totals.push_back(0);
    const auto g2 = mosaic_geometry(t);
    CHECK(g2.clusters == std::vector<int>{1, 2});
    CHECK(g2.warnings.size() == 1);

    ContingencyTable empty;
    CHECK_THROWS_AS(mosaic_geometry(empty), DataError);

    const auto rects = mosaic_rects(g);
    REQUIRE(rects.size() == 4);
    CHECK(rects[3].x == 0.5);
    CHECK(rects[3].y == 0.5);
    const auto svg = mosaic_svg(g, "t", "p");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("Cluster 2") != std::string::npos);
}

TEST_CASE("chi square is informational and correct on a hand example") {
    // [[10, 20], [20, 10]]: expected 15 everywhere, chi2 = 4 * 25 / 15.
    std::vector<int> a;
    std::vector<std::string> c;
    auto add = [&](int cl, const char* l, int n) {
        for (int i = 0; i < n; ++i) {
            a.push_back(cl);
            c.push_back(l);
        }
    };
    add(1, "a", 10);
    add(1, "b", 20);
    add(2, "a", 20);
    add(2, "b", 10);
    const auto chi = chi_square(crosstab(a, c));
    CHECK(chi.statistic == doctest::Approx(100.0 / 15.0));
    CHECK(chi.degrees_of_freedom == 1);
}

TEST_CASE("cluster profiles") {
    std::mt19937_64 gen(52);
    std::vector<FirmYearRecord> rows;
    for (int i = 0; i < 30; ++i) {
        FirmYearRecord r;
        r.firm_id = "f" + std::to_string(i);
        const auto p = codafin::testing::random_parts(gen, 6, 1.0);
        std::copy(p.begin(), p.end(), r.parts.begin());
        rows.push_back(r);
    }
    ClusterModel single;
    single.k = 1;
    single.assignments.assign(rows.size(), 0);
    const auto one = cluster_profiles(single, rows);
    REQUIRE(one.size() == 1);
    CHECK(one[0].share == 1.0);
    CHECK(one[0].ratios.values() == center_ratios(center_of_rows(part_rows(rows))).values());

    // Two copies of the same firms split across two clusters.
    std::vector<FirmYearRecord> twin = rows;
    twin.insert(twin.end(), rows.begin(), rows.end());
    ClusterModel split;
    split.k = 2;
    for (std::size_t i = 0; i < twin.size(); ++i) split.assignments.push_back(i < rows.size() ? 0 : 1);
    const auto two = cluster_profiles(split, twin);
    REQUIRE(two.size() == 2);
    CHECK(two[0].ratios.values() == two[1].ratios.values());
    CHECK(two[0].share + two[1].share == doctest::Approx(1.0).epsilon(1e-12));

    // Filter-then-recompute oracle on a random 3-way split.
    ClusterModel three;
    three.k = 3;
    for (std::size_t i = 0; i < rows.size(); ++i) three.assignments.push_back(static_cast<int>(gen() % 3));
    const auto prof = cluster_profiles(three, rows);
    double share = 0.0;
    for (const auto& p : prof) {
        std::vector<std::vector<double>> members;
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (three.assignments[i] == p.cluster) members.emplace_back(rows[i].parts.begin(), rows[i].parts.end());
        const auto ref = center_ratios(center_of_rows(members));
        CHECK(p.size == members.size());
        CHECK(p.ratios.turnover == doctest::Approx(ref.turnover).epsilon(1e-14));
        CHECK(p.ratios.roa == doctest::Approx(p.ratios.profit_margin * p.ratios.turnover).epsilon(1e-10));
        share += p.share;
    }
    CHECK(std::abs(share - 1.0) <= 1e-12);
    CHECK_THROWS_AS(cluster_profiles(three, std::span(rows).first(5)), DimensionMismatch);
}

TEST_CASE("numeric summary") {
    const auto s = numeric_summary(std::vector<double>{3, 1, 5, 2, 4}, std::vector<int>{1, 1, 1, 1, 1});
    REQUIRE(s.size() == 1);
    CHECK(s[0].min == 1);
    CHECK(s[0].q1 == 2);
    CHECK(s[0].median == 3);
    CHECK(s[0].q3 == 4);
    CHECK(s[0].max == 5);
    CHECK(s[0].outliers.empty());
    CHECK(s[0].lower_whisker == 1);
    CHECK(s[0].upper_whisker == 5);

    const auto flat = numeric_summary(std::vector<double>(6, 12.0), std::vector<int>(6, 2));
    CHECK(flat[0].q1 == flat[0].q3);
    CHECK(flat[0].outliers.empty());

    // Outlier: fences from Q1=2, Q3=4 -> [-1, 7]; 100 is outside.
    const auto out = numeric_summary(std::vector<double>{1, 2, 3, 4, 5, 2, 3, 4, 100},
                                     std::vector<int>(9, 1));
    CHECK(out[0].outliers == std::vector<double>{100});
    CHECK(out[0].upper_whisker == 5);

    // Random values vs the type-7 quantile computed directly.
    std::mt19937_64 gen(53);
    std::vector<double> v(101);
    for (double& x : v) x = static_cast<double>(gen() % 1000);
    const auto r = numeric_summary(v, std::vector<int>(v.size(), 1));
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    CHECK(r[0].q1 == sorted[25]);
    CHECK(r[0].median == sorted[50]);
    CHECK(r[0].q3 == sorted[75]);
    CHECK(r[0].min <= r[0].q1);
    CHECK(r[0].q3 <= r[0].max);

    CHECK_THROWS_AS(numeric_summary(std::vector<double>{1}, std::vector<int>{}), DimensionMismatch);
    CHECK(boxplot_svg(r, "x", "y").find("<rect") != std::string::npos);
}

TEST_CASE("covariate parsing") {
    CHECK(parse_covariate("exporter") == Covariate::exporter);
    CHECK_THROWS_AS(parse_covariate("size"), ConfigError);
}
