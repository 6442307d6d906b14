#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "selinfl/data.hpp"
#include "selinfl/random.hpp"

namespace selinfl {

enum class ClusterMethod { kmeans, kmeans_pp, spectral };

const char* to_string(ClusterMethod method);
ClusterMethod parse_cluster_method(std::string_view name);

/// Two-way split of the rows into a suspect (smaller) and a clean (larger) part.
struct ClusterPartition {
  std::vector<int> labels;  // 1 = clean, 2 = suspect
  RowSubset suspect;
  RowSubset clean;
  ClusterMethod method = ClusterMethod::kmeans_pp;
  double inertia = 0.0;
  std::uint64_t seed = 0;
  /// Both clusters had equal size and the distance rule picked the suspect side.
  bool size_tie = false;
  /// Within-cluster sum of squares after each Lloyd assignment step of the winning restart.
  std::vector<double> inertia_trace;
};

struct SeedCenters {
  Matrix centers;  // k x d
  std::vector<std::size_t> rows;
  bool degenerate = false;  // fewer than k distinct centers could be drawn
};

/// k-means++ seeding: first center uniform over rows, each further center drawn with
/// probability proportional to the squared distance to the nearest chosen center.
SeedCenters kmeans_pp_init(const Matrix& points, std::size_t k, Rng& rng);

struct KmeansOptions {
  std::size_t restarts = 10;
  std::size_t max_iterations = 300;
  bool plus_plus = true;
  unsigned threads = 1;
};

/// Lloyd's algorithm with k = 2 on the given rows; the best inertia over restarts wins.
/// Points are processed in a row-order-independent way.
ClusterPartition kmeans(const Matrix& points, const KmeansOptions& options, std::uint64_t seed);

/// Normalized spectral clustering on a symmetrized k-nearest-neighbour graph.
ClusterPartition spectral_cluster(const Matrix& points, std::size_t n_neighbors, const KmeansOptions& options,
                                  std::uint64_t seed);

struct PartitionOptions {
  ClusterMethod method = ClusterMethod::kmeans_pp;
  std::size_t restarts = 10;
  std::size_t n_neighbors = 0;  // 0 = ceil(sqrt(n))
  bool include_response = true;
  bool standardize = false;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Clustering rows built from (y, X) (or X alone).
Matrix clustering_points(const Dataset& data, bool include_response, bool standardize);

ClusterPartition partition_rows(const Dataset& data, const PartitionOptions& options);

}  // namespace selinfl
