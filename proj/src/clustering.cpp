#include "codafin/clustering.hpp"

#include "codafin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <thread>

namespace codafin {

ClrMatrix::ClrMatrix(std::size_t dims, std::vector<double> data, std::vector<std::string> ids)
    : dims_(dims), data_(std::move(data)), ids_(std::move(ids)) {
    if (dims_ < 2) throw InvalidComposition("clr matrix needs at least 2 columns");
    if (data_.size() % dims_ != 0) throw DimensionMismatch("clr matrix data is ragged");
    const std::size_t n = rows();
    if (!ids_.empty() && ids_.size() != n) {
        throw DimensionMismatch("clr matrix ids do not align with rows");
    }
    const double tol = kClrSumTolerancePerPart * static_cast<double>(dims_);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (double v : row(i)) {
            if (!std::isfinite(v)) throw InvalidComposition("clr matrix holds a non-finite value");
            sum += v;
        }
        if (std::abs(sum) > tol) {
            throw InvalidComposition("clr row " + std::to_string(i + 1) + " does not sum to zero");
        }
    }
}

ClrMatrix ClrMatrix::from_parts(std::span<const std::vector<double>> rows,
                                std::vector<std::string> ids) {
    if (rows.empty()) return ClrMatrix{};
    const std::size_t d = rows.front().size();
    std::vector<double> data(rows.size() * d);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != d) throw DimensionMismatch("rows differ in part count");
        clr_into(rows[i], std::span<double>(data.data() + i * d, d));
    }
    return ClrMatrix(d, std::move(data), std::move(ids));
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

std::vector<std::size_t> ClusterModel::cluster_sizes() const {
    std::vector<std::size_t> sizes(k, 0);
    for (int a : assignments) ++sizes[static_cast<std::size_t>(a)];
    return sizes;
}

namespace {

// Uniform double in [0, 1) from the top 53 bits; independent of the
// standard library's distribution implementations.
double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

std::mt19937_64 restart_generator(std::uint64_t seed, std::size_t restart) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(restart),
                      static_cast<std::uint32_t>(static_cast<std::uint64_t>(restart) >> 32)};
    return std::mt19937_64(seq);
}

struct LloydRun {
    std::vector<double> centroids;
    std::vector<int> assignments;
    double wcss = 0.0;
    std::size_t iterations = 0;
    bool hit_cap = false;
};

class Lloyd {
public:
    Lloyd(const ClrMatrix& m, std::size_t k) : m_(m), k_(k), n_(m.rows()), d_(m.dims()) {}

    LloydRun run(std::mt19937_64& gen, std::size_t max_iterations) {
        LloydRun out;
        out.centroids = seed_plus_plus(gen);
        out.assignments.assign(n_, 0);
        for (std::size_t i = 0; i < n_; ++i) {
            out.assignments[i] = static_cast<int>(nearest(out.centroids, i).first);
        }
        bool converged = false;
        while (out.iterations < max_iterations) {
            ++out.iterations;
            update_means(out);
            if (!reassign(out)) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            out.hit_cap = true;
            update_means(out);
        }
        out.wcss = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            out.wcss += squared_distance(m_.row(i), centroid(out.centroids, out.assignments[i]));
        }
        return out;
    }

private:
    std::span<const double> centroid(const std::vector<double>& c, std::size_t idx) const {
        return {c.data() + idx * d_, d_};
    }

    std::pair<std::size_t, double> nearest(const std::vector<double>& c, std::size_t i) const {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t cl = 0; cl < k_; ++cl) {
            const double dist = squared_distance(m_.row(i), centroid(c, cl));
            if (dist < best_d) {
                best_d = dist;
                best = cl;
            }
        }
        return {best, best_d};
    }

    // Probabilistic farthest-point seeding: each new centroid is drawn with
    // probability proportional to its squared distance to the chosen ones.
    std::vector<double> seed_plus_plus(std::mt19937_64& gen) const {
        std::vector<double> c(k_ * d_);
        std::vector<double> dist2(n_, std::numeric_limits<double>::infinity());
        auto place = [&](std::size_t slot, std::size_t point) {
            std::copy_n(m_.row(point).begin(), d_, c.begin() + static_cast<std::ptrdiff_t>(slot * d_));
            for (std::size_t i = 0; i < n_; ++i) {
                dist2[i] = std::min(dist2[i], squared_distance(m_.row(i), m_.row(point)));
            }
        };
        auto pick_uniform = [&] {
            return std::min(n_ - 1, static_cast<std::size_t>(uniform01(gen) * static_cast<double>(n_)));
        };
        place(0, pick_uniform());
        for (std::size_t slot = 1; slot < k_; ++slot) {
            double total = 0.0;
            for (double v : dist2) total += v;
            std::size_t chosen = n_ - 1;
            if (total > 0.0) {
                const double target = uniform01(gen) * total;
                double acc = 0.0;
                for (std::size_t i = 0; i < n_; ++i) {
                    acc += dist2[i];
                    if (acc > target && dist2[i] > 0.0) {
                        chosen = i;
                        break;
                    }
                }
                // Rounding can leave acc <= target; fall back to the last positive weight.
                if (acc <= target) {
                    for (std::size_t i = n_; i-- > 0;) {
                        if (dist2[i] > 0.0) {
                            chosen = i;
                            break;
                        }
                    }
                }
            } else {
                chosen = pick_uniform();
            }
            place(slot, chosen);
        }
        return c;
    }

    void compute_means(LloydRun& run, std::vector<std::size_t>& counts) const {
        std::fill(run.centroids.begin(), run.centroids.end(), 0.0);
        counts.assign(k_, 0);
        for (std::size_t i = 0; i < n_; ++i) {
            const auto cl = static_cast<std::size_t>(run.assignments[i]);
            ++counts[cl];
            const auto r = m_.row(i);
            for (std::size_t j = 0; j < d_; ++j) run.centroids[cl * d_ + j] += r[j];
        }
    }

    void update_means(LloydRun& run) const {
        std::vector<double> previous = run.centroids;
        std::vector<std::size_t> counts;
        compute_means(run, counts);
        // Empty cluster: re-seed it at the point farthest from its centroid
        // (taken from a cluster with more than one member).
        for (std::size_t cl = 0; cl < k_; ++cl) {
            if (counts[cl] != 0) continue;
            std::size_t far = n_;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n_; ++i) {
                const auto own = static_cast<std::size_t>(run.assignments[i]);
                if (counts[own] < 2) continue;
                const double dist = squared_distance(m_.row(i), centroid(previous, own));
                if (dist > far_d) {
                    far_d = dist;
                    far = i;
                }
            }
            if (far == n_) throw NumericalError("k-means: cannot repair an empty cluster");
            run.assignments[far] = static_cast<int>(cl);
            compute_means(run, counts);
        }
        for (std::size_t cl = 0; cl < k_; ++cl) {
            const double inv = 1.0 / static_cast<double>(counts[cl]);
            for (std::size_t j = 0; j < d_; ++j) run.centroids[cl * d_ + j] *= inv;
        }
    }

    // Moves a point only on strict improvement so ties never oscillate.
    bool reassign(LloydRun& run) const {
        bool changed = false;
        for (std::size_t i = 0; i < n_; ++i) {
            const auto own = static_cast<std::size_t>(run.assignments[i]);
            const double own_d = squared_distance(m_.row(i), centroid(run.centroids, own));
            const auto [best, best_d] = nearest(run.centroids, i);
            if (best != own && best_d < own_d) {
                run.assignments[i] = static_cast<int>(best);
                changed = true;
            }
        }
        return changed;
    }

    const ClrMatrix& m_;
    std::size_t k_, n_, d_;
};

}  // namespace

ClusterModel kmeans_fit(const ClrMatrix& m, std::size_t k, std::size_t restarts,
                        std::uint64_t seed, const KMeansOptions& options) {
    const std::size_t n = m.rows();
    if (k < 2) throw DataError("k-means needs k >= 2, got " + std::to_string(k));
    if (k > n) {
        throw DataError("k-means needs k <= n, got k=" + std::to_string(k) +
                        " n=" + std::to_string(n));
    }
    if (restarts < 1) throw DataError("k-means needs at least one restart");
    if (options.max_iterations < 1) throw DataError("k-means needs max_iterations >= 1");

    std::vector<LloydRun> runs(restarts);
    auto work = [&](std::size_t first, std::size_t stride) {
        Lloyd lloyd(m, k);
        for (std::size_t r = first; r < restarts; r += stride) {
            auto gen = restart_generator(seed, r);
            runs[r] = lloyd.run(gen, options.max_iterations);
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(options.threads, 1, restarts);
    if (threads == 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    }

    std::size_t best = 0;
    for (std::size_t r = 1; r < restarts; ++r) {
        if (runs[r].wcss < runs[best].wcss) best = r;
    }
    LloydRun& win = runs[best];
    ClusterModel model;
    model.k = k;
    model.dims = m.dims();
    model.centroids = std::move(win.centroids);
    model.assignments = std::move(win.assignments);
    model.wcss = win.wcss;
    model.seed = seed;
    model.restarts = restarts;
    model.best_restart = best;
    model.iterations = win.iterations;
    model.hit_iteration_cap = win.hit_cap;
    return model;
}

namespace {

std::size_t checked_cluster_count(const ClrMatrix& m, std::span<const int> assignments) {
    if (assignments.size() != m.rows()) {
        throw DimensionMismatch("assignments do not align with matrix rows");
    }
    if (assignments.empty()) throw DataError("no rows to evaluate");
    int max_id = -1;
    for (int a : assignments) {
        if (a < 0) throw DataError("negative cluster id");
        max_id = std::max(max_id, a);
    }
    const auto k = static_cast<std::size_t>(max_id) + 1;
    std::vector<std::size_t> counts(k, 0);
    for (int a : assignments) ++counts[static_cast<std::size_t>(a)];
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] == 0) throw DataError("cluster " + std::to_string(c) + " is empty");
    }
    return k;
}

}  // namespace

SilhouetteResult silhouette(const ClrMatrix& m, std::span<const int> assignments) {
    const std::size_t k = checked_cluster_count(m, assignments);
    if (k < 2) throw DataError("silhouette needs at least 2 clusters");
    const std::size_t n = m.rows();
    std::vector<std::size_t> counts(k, 0);
    for (int a : assignments) ++counts[static_cast<std::size_t>(a)];

    SilhouetteResult out;
    out.widths.assign(n, 0.0);
    std::vector<double> sums(k);
    for (std::size_t i = 0; i < n; ++i) {
        const auto own = static_cast<std::size_t>(assignments[i]);
        if (counts[own] == 1) continue;  // singleton convention: s = 0
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            sums[static_cast<std::size_t>(assignments[j])] +=
                std::sqrt(squared_distance(m.row(i), m.row(j)));
        }
        const double a = sums[own] / static_cast<double>(counts[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (c != own) b = std::min(b, sums[c] / static_cast<double>(counts[c]));
        }
        const double denom = std::max(a, b);
        out.widths[i] = denom > 0.0 ? (b - a) / denom : 0.0;
    }
    double total = 0.0;
    for (double w : out.widths) total += w;
    out.average = total / static_cast<double>(n);
    return out;
}

CalinskiHarabasz calinski_harabasz(const ClrMatrix& m, std::span<const int> assignments) {
    const std::size_t k = checked_cluster_count(m, assignments);
    if (k < 2) throw DataError("Calinski-Harabasz needs at least 2 clusters");
    const std::size_t n = m.rows();
    const std::size_t d = m.dims();

    std::vector<double> grand(d, 0.0);
    std::vector<double> means(k * d, 0.0);
    std::vector<std::size_t> counts(k, 0);
    std::vector<std::size_t> first(k, n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<std::size_t>(assignments[i]);
        ++counts[c];
        if (first[c] == n) first[c] = i;
        for (std::size_t j = 0; j < d; ++j) {
            grand[j] += m.row(i)[j];
            means[c * d + j] += m.row(i)[j];
        }
    }
    for (double& g : grand) g /= static_cast<double>(n);
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t j = 0; j < d; ++j) means[c * d + j] /= static_cast<double>(counts[c]);

    // Clusters whose members are all bitwise identical contribute exactly zero.
    std::vector<bool> degenerate(k, true);
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<std::size_t>(assignments[i]);
        const auto r = m.row(i);
        const auto f = m.row(first[c]);
        if (!std::equal(r.begin(), r.end(), f.begin())) degenerate[c] = false;
    }

    CalinskiHarabasz out;
    for (std::size_t c = 0; c < k; ++c) {
        out.between += static_cast<double>(counts[c]) *
                       squared_distance(std::span<const double>(means.data() + c * d, d), grand);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<std::size_t>(assignments[i]);
        if (degenerate[c]) continue;
        out.within += squared_distance(m.row(i), std::span<const double>(means.data() + c * d, d));
    }
    if (out.within == 0.0 || k >= n) {
        out.infinite = true;
        out.value = std::numeric_limits<double>::infinity();
        return out;
    }
    out.value = (out.between / static_cast<double>(k - 1)) /
                (out.within / static_cast<double>(n - k));
    return out;
}

KSelectionReport select_k(const ClrMatrix& m, std::size_t k_min, std::size_t k_max,
                          std::size_t restarts, std::uint64_t seed, const KMeansOptions& options) {
    const std::size_t n = m.rows();
    if (k_min < 2 || k_min > k_max || k_max + 1 > n) {
        throw DataError("k range must satisfy 2 <= k_min <= k_max <= n - 1 (k_min=" +
                        std::to_string(k_min) + ", k_max=" + std::to_string(k_max) +
                        ", n=" + std::to_string(n) + ")");
    }
    KSelectionReport report;
    double best_sil = -std::numeric_limits<double>::infinity();
    double best_ch = -std::numeric_limits<double>::infinity();
    for (std::size_t k = k_min; k <= k_max; ++k) {
        ClusterModel model = kmeans_fit(m, k, restarts, seed, options);
        KSelectionRow row;
        row.k = k;
        row.wcss = model.wcss;
        row.silhouette = silhouette(m, model.assignments).average;
        row.ch = calinski_harabasz(m, model.assignments);
        if (row.silhouette > best_sil) {
            best_sil = row.silhouette;
            report.best_k_silhouette = k;
        }
        if (row.ch.value > best_ch) {
            best_ch = row.ch.value;
            report.best_k_ch = k;
        }
        report.rows.push_back(row);
        report.models.push_back(std::move(model));
    }
    report.indices_agree = report.best_k_silhouette == report.best_k_ch;
    return report;
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) throw DimensionMismatch("label vectors differ in length");
    const std::size_t n = a.size();
    if (n < 2) return 1.0;
    std::map<std::pair<int, int>, double> joint;
    std::map<int, double> ra, rb;
    for (std::size_t i = 0; i < n; ++i) {
        joint[{a[i], b[i]}] += 1.0;
        ra[a[i]] += 1.0;
        rb[b[i]] += 1.0;
    }
    auto pairs = [](double x) { return x * (x - 1.0) / 2.0; };
    double index = 0.0, sum_a = 0.0, sum_b = 0.0;
    for (const auto& [key, c] : joint) index += pairs(c);
    for (const auto& [key, c] : ra) sum_a += pairs(c);
    for (const auto& [key, c] : rb) sum_b += pairs(c);
    const double expected = sum_a * sum_b / pairs(static_cast<double>(n));
    const double max_index = 0.5 * (sum_a + sum_b);
    if (max_index == expected) return 1.0;
    return (index - expected) / (max_index - expected);
}

}  // namespace codafin
