#include "selinfl/clustering.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "selinfl/error.hpp"
#include "selinfl/parallel.hpp"

namespace selinfl {

const char* to_string(ClusterMethod method) {
  switch (method) {
    case ClusterMethod::kmeans: return "kmeans";
    case ClusterMethod::kmeans_pp: return "kmeans++";
    case ClusterMethod::spectral: return "spectral";
  }
  return "unknown";
}

ClusterMethod parse_cluster_method(std::string_view name) {
  if (name == "kmeans") return ClusterMethod::kmeans;
  if (name == "kmeans++" || name == "kmeans_pp" || name == "kmeanspp") return ClusterMethod::kmeans_pp;
  if (name == "spectral") return ClusterMethod::spectral;
  throw Error(ErrorKind::invalid_spec, "unknown clustering method '" + std::string(name) + "'");
}

namespace {

constexpr std::size_t kClusters = 2;
constexpr int kEmptyClusterRetries = 5;

std::vector<std::size_t> canonical_row_order(const Matrix& points) {
  std::vector<std::size_t> order(static_cast<std::size_t>(points.rows()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
      const double va = points(static_cast<Eigen::Index>(a), j);
      const double vb = points(static_cast<Eigen::Index>(b), j);
      if (va != vb) return va < vb;
    }
    return false;
  });
  return order;
}

Matrix take_rows(const Matrix& points, const std::vector<std::size_t>& order) {
  Matrix out(static_cast<Eigen::Index>(order.size()), points.cols());
  for (std::size_t k = 0; k < order.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = points.row(static_cast<Eigen::Index>(order[k]));
  return out;
}

struct LloydRun {
  std::vector<std::size_t> assignment;
  double inertia = std::numeric_limits<double>::infinity();
  std::vector<double> trace;
  bool ok = false;
};

struct EmptyCluster {};

LloydRun lloyd(const Matrix& pts, Matrix centers, std::size_t max_iter) {
  const Eigen::Index n = pts.rows();
  const auto k = static_cast<Eigen::Index>(centers.rows());
  LloydRun run;
  run.assignment.assign(static_cast<std::size_t>(n), 0);
  std::vector<std::size_t> previous;
  for (std::size_t it = 0; it < max_iter; ++it) {
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      for (Eigen::Index c = 0; c < k; ++c) {
        const double d = (pts.row(i) - centers.row(c)).squaredNorm();
        if (d < best) {
          best = d;
          arg = static_cast<std::size_t>(c);
        }
      }
      run.assignment[static_cast<std::size_t>(i)] = arg;
      inertia += best;
    }
    if (!run.trace.empty() && inertia > run.trace.back() * (1.0 + 1e-12) + 1e-300)
      throw std::logic_error("k-means inertia increased across Lloyd iterations");
    run.trace.push_back(inertia);
    run.inertia = inertia;

    Matrix sums = Matrix::Zero(k, pts.cols());
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto c = run.assignment[static_cast<std::size_t>(i)];
      sums.row(static_cast<Eigen::Index>(c)) += pts.row(i);
      ++counts[c];
    }
    for (std::size_t c = 0; c < counts.size(); ++c)
      if (counts[c] == 0) throw EmptyCluster{};
    if (run.assignment == previous) break;
    previous = run.assignment;
    for (Eigen::Index c = 0; c < k; ++c) centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
  }
  // Inertia against the final means.
  double final_inertia = 0.0;
  Matrix means = Matrix::Zero(k, pts.cols());
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    means.row(static_cast<Eigen::Index>(run.assignment[static_cast<std::size_t>(i)])) += pts.row(i);
    ++counts[run.assignment[static_cast<std::size_t>(i)]];
  }
  for (Eigen::Index c = 0; c < k; ++c) means.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
  for (Eigen::Index i = 0; i < n; ++i)
    final_inertia += (pts.row(i) - means.row(static_cast<Eigen::Index>(run.assignment[static_cast<std::size_t>(i)]))).squaredNorm();
  run.inertia = final_inertia;
  run.ok = true;
  return run;
}

SeedCenters random_init(const Matrix& pts, std::size_t k, Rng& rng) {
  const auto n = static_cast<std::size_t>(pts.rows());
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + uniform_below(rng, n - i)]);
  SeedCenters s;
  s.centers.resize(static_cast<Eigen::Index>(k), pts.cols());
  for (std::size_t c = 0; c < k; ++c) {
    s.rows.push_back(idx[c]);
    s.centers.row(static_cast<Eigen::Index>(c)) = pts.row(static_cast<Eigen::Index>(idx[c]));
  }
  for (std::size_t c = 1; c < k; ++c)
    if (s.centers.row(static_cast<Eigen::Index>(c)) == s.centers.row(0)) s.degenerate = true;
  return s;
}

/// Runs restarts on canonically ordered points; assignment indexes the canonical order.
LloydRun best_of_restarts(const Matrix& pts, const KmeansOptions& opts, std::uint64_t seed) {
  if (pts.rows() < static_cast<Eigen::Index>(kClusters))
    throw Error(ErrorKind::invalid_spec, "k-means needs at least two rows");
  const std::size_t restarts = std::max<std::size_t>(1, opts.restarts);
  std::vector<LloydRun> runs(restarts);
  parallel_for(restarts, opts.threads, [&](std::size_t r) {
    for (int attempt = 0; attempt <= kEmptyClusterRetries; ++attempt) {
      Rng rng = make_rng(seed, {r, static_cast<std::uint64_t>(attempt)});
      const SeedCenters init = opts.plus_plus ? kmeans_pp_init(pts, kClusters, rng) : random_init(pts, kClusters, rng);
      try {
        runs[r] = lloyd(pts, init.centers, opts.max_iterations);
        return;
      } catch (const EmptyCluster&) {
      }
    }
  });
  std::size_t best = restarts;
  for (std::size_t r = 0; r < restarts; ++r)
    if (runs[r].ok && (best == restarts || runs[r].inertia < runs[best].inertia)) best = r;
  if (best == restarts)
    throw Error(ErrorKind::degenerate_cluster, "k-means produced an empty cluster on every restart");
  return runs[best];
}

ClusterPartition finish_partition(const Matrix& pts_canonical, const std::vector<std::size_t>& order,
                                  const LloydRun& run, ClusterMethod method, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(pts_canonical.rows());
  std::array<std::size_t, kClusters> size{};
  for (auto a : run.assignment) ++size[a];

  std::size_t suspect_label;
  bool tie = false;
  if (size[0] != size[1]) {
    suspect_label = size[0] < size[1] ? 0 : 1;
  } else {
    tie = true;
    const Eigen::RowVectorXd centroid = pts_canonical.colwise().mean();
    std::array<double, kClusters> dist{};
    for (std::size_t i = 0; i < n; ++i)
      dist[run.assignment[i]] += (pts_canonical.row(static_cast<Eigen::Index>(i)) - centroid).norm();
    if (dist[0] != dist[1]) {
      suspect_label = dist[0] > dist[1] ? 0 : 1;
    } else {
      // The cluster holding the first row in canonical order stays clean.
      suspect_label = run.assignment[0] == 0 ? 1 : 0;
    }
  }

  ClusterPartition out;
  out.method = method;
  out.seed = seed;
  out.inertia = run.inertia;
  out.size_tie = tie;
  out.inertia_trace = run.trace;
  out.labels.assign(n, 1);
  std::vector<std::size_t> suspect, clean;
  for (std::size_t k = 0; k < n; ++k) {
    const bool is_suspect = run.assignment[k] == suspect_label;
    out.labels[order[k]] = is_suspect ? 2 : 1;
    (is_suspect ? suspect : clean).push_back(order[k]);
  }
  out.suspect = RowSubset(std::move(suspect), n);
  out.clean = RowSubset(std::move(clean), n);
  return out;
}

std::size_t count_components(const std::vector<std::vector<std::size_t>>& adj) {
  const std::size_t n = adj.size();
  std::vector<char> seen(n, 0);
  std::size_t comps = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    ++comps;
    std::queue<std::size_t> q;
    q.push(s);
    seen[s] = 1;
    while (!q.empty()) {
      const auto u = q.front();
      q.pop();
      for (auto v : adj[u])
        if (!seen[v]) {
          seen[v] = 1;
          q.push(v);
        }
    }
  }
  return comps;
}

}  // namespace

SeedCenters kmeans_pp_init(const Matrix& points, std::size_t k, Rng& rng) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (k < 1 || n < k) throw Error(ErrorKind::invalid_spec, "k-means++ needs at least k rows");
  SeedCenters s;
  s.centers.resize(static_cast<Eigen::Index>(k), points.cols());
  std::size_t first = uniform_below(rng, n);
  s.rows.push_back(first);
  s.centers.row(0) = points.row(static_cast<Eigen::Index>(first));
  Vector d2(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    d2(static_cast<Eigen::Index>(i)) = (points.row(static_cast<Eigen::Index>(i)) - s.centers.row(0)).squaredNorm();
  for (std::size_t c = 1; c < k; ++c) {
    const double total = d2.sum();
    std::size_t pick;
    if (!(total > 0.0)) {
      s.degenerate = true;
      pick = s.rows.back();
    } else {
      const double u = uniform01(rng) * total;
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2(static_cast<Eigen::Index>(i));
        if (u < acc && d2(static_cast<Eigen::Index>(i)) > 0.0) {
          pick = i;
          break;
        }
      }
      while (d2(static_cast<Eigen::Index>(pick)) == 0.0 && pick > 0) --pick;
    }
    s.rows.push_back(pick);
    s.centers.row(static_cast<Eigen::Index>(c)) = points.row(static_cast<Eigen::Index>(pick));
    for (std::size_t i = 0; i < n; ++i)
      d2(static_cast<Eigen::Index>(i)) =
          std::min(d2(static_cast<Eigen::Index>(i)),
                   (points.row(static_cast<Eigen::Index>(i)) - s.centers.row(static_cast<Eigen::Index>(c))).squaredNorm());
  }
  return s;
}

ClusterPartition kmeans(const Matrix& points, const KmeansOptions& options, std::uint64_t seed) {
  const auto order = canonical_row_order(points);
  const Matrix pts = take_rows(points, order);
  const LloydRun run = best_of_restarts(pts, options, seed);
  return finish_partition(pts, order, run, options.plus_plus ? ClusterMethod::kmeans_pp : ClusterMethod::kmeans, seed);
}

ClusterPartition spectral_cluster(const Matrix& points, std::size_t n_neighbors, const KmeansOptions& options,
                                  std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (n < 4) throw Error(ErrorKind::invalid_spec, "spectral clustering needs at least four rows");
  if (n_neighbors < 1 || n_neighbors >= n)
    throw Error(ErrorKind::invalid_spec, "n_neighbors must lie in [1, n)");
  const auto order = canonical_row_order(points);
  const Matrix pts = take_rows(points, order);
  const auto ni = static_cast<Eigen::Index>(n);

  Matrix d2(ni, ni);
  for (Eigen::Index i = 0; i < ni; ++i) {
    d2(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < ni; ++j) d2(i, j) = d2(j, i) = (pts.row(i) - pts.row(j)).squaredNorm();
  }

  // Self-tuning scale: distance to the n_neighbors-th neighbour.
  std::vector<std::vector<std::size_t>> knn(n);
  Vector sigma(ni);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> others;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) others.push_back(j);
    std::stable_sort(others.begin(), others.end(), [&](std::size_t a, std::size_t b) {
      return d2(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a)) <
             d2(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b));
    });
    others.resize(n_neighbors);
    sigma(static_cast<Eigen::Index>(i)) =
        std::sqrt(d2(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(others.back())));
    knn[i] = std::move(others);
  }
  const double sigma_floor = std::max(sigma.maxCoeff() * 1e-12, std::numeric_limits<double>::min());

  Matrix w = Matrix::Zero(ni, ni);
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto j : knn[i]) {
      const auto a = static_cast<Eigen::Index>(i);
      const auto b = static_cast<Eigen::Index>(j);
      const double s = std::max(sigma(a), sigma_floor) * std::max(sigma(b), sigma_floor);
      const double v = std::exp(-d2(a, b) / s);
      if (w(a, b) == 0.0) {
        adj[i].push_back(j);
        adj[j].push_back(i);
      }
      w(a, b) = w(b, a) = std::max(v, std::numeric_limits<double>::min());
    }
  }
  const std::size_t comps = count_components(adj);
  if (comps > kClusters)
    throw Error(ErrorKind::ambiguous_embedding, "neighbour graph has " + std::to_string(comps) +
                                                    " components; increase n_neighbors");

  const Vector deg = w.rowwise().sum();
  const Vector dinv = deg.array().rsqrt();
  const Matrix lap = Matrix::Identity(ni, ni) - dinv.asDiagonal() * w * dinv.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(lap);
  if (eig.info() != Eigen::Success) throw Error(ErrorKind::degenerate_cluster, "Laplacian eigen-decomposition failed");
  Matrix embed = eig.eigenvectors().leftCols(static_cast<Eigen::Index>(kClusters));
  for (Eigen::Index i = 0; i < ni; ++i) {
    const double norm = embed.row(i).norm();
    if (norm > 0.0) embed.row(i) /= norm;
  }
  KmeansOptions inner = options;
  inner.plus_plus = true;
  const LloydRun run = best_of_restarts(embed, inner, seed);
  ClusterPartition out = finish_partition(pts, order, run, ClusterMethod::spectral, seed);
  return out;
}

Matrix clustering_points(const Dataset& data, bool include_response, bool standardize) {
  const Eigen::Index n = static_cast<Eigen::Index>(data.n());
  const Eigen::Index offset = include_response ? 1 : 0;
  Matrix pts(n, data.x().cols() + offset);
  if (include_response) pts.col(0) = data.y();
  pts.rightCols(data.x().cols()) = data.x();
  if (!standardize) return pts;
  const StandardizationInfo info = column_moments(pts);
  for (Eigen::Index j = 0; j < pts.cols(); ++j) {
    const double s = info.column_scales(j);
    pts.col(j).array() -= info.column_means(j);
    // Constant columns carry no clustering information and stay at zero.
    if (s > 0.0) pts.col(j) /= s;
  }
  return pts;
}

ClusterPartition partition_rows(const Dataset& data, const PartitionOptions& options) {
  const Matrix pts = clustering_points(data, options.include_response, options.standardize);
  KmeansOptions km;
  km.restarts = options.restarts;
  km.threads = options.threads;
  switch (options.method) {
    case ClusterMethod::kmeans:
      km.plus_plus = false;
      return kmeans(pts, km, options.seed);
    case ClusterMethod::kmeans_pp:
      return kmeans(pts, km, options.seed);
    case ClusterMethod::spectral: {
      const std::size_t nn = options.n_neighbors > 0
                                 ? options.n_neighbors
                                 : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(data.n()))));
      return spectral_cluster(pts, nn, km, options.seed);
    }
  }
  throw Error(ErrorKind::invalid_spec, "unknown clustering method");
}

}  // namespace selinfl
