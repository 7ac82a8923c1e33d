#pragma once

// k-means in centered log-ratio space, where Euclidean distance is the
// Aitchison distance. CLR columns are used as-is: standardizing them would
// change the metric.

#include "codafin/composition.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace codafin {

// n x D row-major CLR coordinates with one identifier per row.
class ClrMatrix {
public:
    ClrMatrix() = default;
    // Throws if the data is ragged, rows do not sum to zero within 1e-10 * D,
    // or ids do not align with rows (ids may be empty).
    ClrMatrix(std::size_t dims, std::vector<double> data, std::vector<std::string> ids = {});

    static ClrMatrix from_parts(std::span<const std::vector<double>> rows,
                                std::vector<std::string> ids = {});

    std::size_t rows() const noexcept { return dims_ == 0 ? 0 : data_.size() / dims_; }
    std::size_t dims() const noexcept { return dims_; }
    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * dims_, dims_};
    }
    const std::vector<std::string>& ids() const noexcept { return ids_; }

private:
    std::size_t dims_ = 0;
    std::vector<double> data_;
    std::vector<std::string> ids_;
};

double squared_distance(std::span<const double> a, std::span<const double> b);

struct ClusterModel {
    std::size_t k = 0;
    std::size_t dims = 0;
    std::vector<double> centroids;  // k x dims row-major
    std::vector<int> assignments;   // 0-based cluster ids
    double wcss = 0.0;
    std::uint64_t seed = 0;
    std::size_t restarts = 0;
    std::size_t best_restart = 0;
    std::size_t iterations = 0;  // Lloyd iterations of the winning restart
    bool hit_iteration_cap = false;

    std::span<const double> centroid(std::size_t c) const {
        return {centroids.data() + c * dims, dims};
    }
    std::vector<std::size_t> cluster_sizes() const;
};

struct KMeansOptions {
    std::size_t max_iterations = 300;
    std::size_t threads = 1;  // restarts run concurrently; the result does not depend on this
};

// Best of `restarts` k-means++-seeded Lloyd runs by wcss, ties to the lowest
// restart index. Restart r draws from a generator seeded by (seed, r).
ClusterModel kmeans_fit(const ClrMatrix& m, std::size_t k, std::size_t restarts, std::uint64_t seed,
                        const KMeansOptions& options = {});

struct SilhouetteResult {
    double average = 0.0;
    std::vector<double> widths;
};

// Assignments are 0-based cluster ids; every id in [0, max] must be used.
SilhouetteResult silhouette(const ClrMatrix& m, std::span<const int> assignments);

struct CalinskiHarabasz {
    double value = 0.0;
    bool infinite = false;  // within-cluster dispersion is zero
    double between = 0.0;
    double within = 0.0;
};

CalinskiHarabasz calinski_harabasz(const ClrMatrix& m, std::span<const int> assignments);

struct KSelectionRow {
    std::size_t k = 0;
    double silhouette = 0.0;
    CalinskiHarabasz ch;
    double wcss = 0.0;
};

struct KSelectionReport {
    std::vector<KSelectionRow> rows;
    std::size_t best_k_silhouette = 0;
    std::size_t best_k_ch = 0;
    bool indices_agree = false;
    std::vector<ClusterModel> models;  // one fitted model per row
};

KSelectionReport select_k(const ClrMatrix& m, std::size_t k_min, std::size_t k_max,
                          std::size_t restarts, std::uint64_t seed,
                          const KMeansOptions& options = {});

double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

}  // namespace codafin
