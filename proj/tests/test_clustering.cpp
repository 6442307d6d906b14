#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "selinfl/clustering.hpp"
#include "selinfl/error.hpp"

using namespace selinfl;

namespace {

/// Rows 0..small-1 from a blob at `shift` along every axis, the rest at the origin.
Matrix two_blobs(std::size_t small, std::size_t large, std::size_t dim, double shift, std::uint64_t seed) {
  Rng rng(seed);
  Matrix pts = testing::gaussian_matrix(small + large, dim, rng);
  pts.topRows(static_cast<Eigen::Index>(small)).array() += shift / std::sqrt(static_cast<double>(dim));
  return pts;
}

/// Inner disc of radius 1 (small) and a ring of radius 5 (large) in the plane.
Matrix concentric(std::size_t inner, std::size_t outer, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  Matrix pts(static_cast<Eigen::Index>(inner + outer), 2);
  for (std::size_t i = 0; i < inner + outer; ++i) {
    const double angle = 2.0 * M_PI * uniform01(rng);
    const double radius = i < inner ? 0.8 * std::sqrt(uniform01(rng)) : 5.0 + 0.15 * z(rng);
    pts(static_cast<Eigen::Index>(i), 0) = radius * std::cos(angle);
    pts(static_cast<Eigen::Index>(i), 1) = radius * std::sin(angle);
  }
  return pts;
}

std::vector<std::size_t> iota(std::size_t from, std::size_t to) {
  std::vector<std::size_t> v;
  for (std::size_t i = from; i < to; ++i) v.push_back(i);
  return v;
}

}  // namespace

TEST_CASE("k-means++ seeding with two rows") {
  Matrix pts(2, 2);
  pts << 0, 0, 3, 4;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const SeedCenters s = kmeans_pp_init(pts, 2, rng);
    CHECK_FALSE(s.degenerate);
    CHECK(s.rows.size() == 2);
    CHECK(s.rows[0] != s.rows[1]);
  }
}

TEST_CASE("k-means++ seeding on identical rows") {
  const Matrix pts = Matrix::Constant(5, 3, 2.0);
  Rng rng(1);
  const SeedCenters s = kmeans_pp_init(pts, 2, rng);
  CHECK(s.degenerate);
  CHECK(s.centers.row(0) == s.centers.row(1));
  Rng rng2(1);
  CHECK_THROWS_AS(kmeans_pp_init(Matrix::Zero(1, 2), 2, rng2), Error);
}

TEST_CASE("k-means++ second center follows squared distance") {
  Matrix pts(3, 1);
  pts << 0, 1, 100;
  Rng rng(7);
  int first_zero = 0, far = 0;
  for (int t = 0; t < 20000; ++t) {
    const SeedCenters s = kmeans_pp_init(pts, 2, rng);
    if (s.rows[0] != 0) continue;
    ++first_zero;
    if (s.rows[1] == 2) ++far;
  }
  REQUIRE(first_zero > 5000);
  // Exact rate 10000/10001.
  CHECK(static_cast<double>(far) / first_zero >= 0.99);
}

TEST_CASE("k-means separates a small blob") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Matrix pts = two_blobs(20, 80, 5, 10.0, seed);
    for (bool pp : {true, false}) {
      KmeansOptions opts;
      opts.plus_plus = pp;
      const ClusterPartition part = kmeans(pts, opts, seed);
      CHECK(part.suspect.positions() == iota(0, 20));
      CHECK(part.clean.positions() == iota(20, 100));
      CHECK(part.suspect.size() < part.clean.size());
      for (std::size_t i = 0; i < 100; ++i) CHECK(part.labels[i] == (i < 20 ? 2 : 1));
    }
  }
}

TEST_CASE("inertia never increases") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Matrix pts = two_blobs(30, 70, 4, 2.0, seed);
    const ClusterPartition part = kmeans(pts, KmeansOptions{}, seed);
    REQUIRE_FALSE(part.inertia_trace.empty());
    for (std::size_t k = 1; k < part.inertia_trace.size(); ++k)
      CHECK(part.inertia_trace[k] <= part.inertia_trace[k - 1]);
    CHECK(part.inertia <= part.inertia_trace.back() * (1.0 + 1e-12));
  }
}

TEST_CASE("two rows give singletons and a tie") {
  Matrix pts(2, 2);
  pts << 0, 0, 1, 1;
  const ClusterPartition part = kmeans(pts, KmeansOptions{}, 3);
  CHECK(part.size_tie);
  CHECK(part.suspect.size() == 1);
  CHECK(part.clean.size() == 1);
}

TEST_CASE("exact size tie picks the spread-out cluster") {
  Matrix pts(6, 1);
  pts << 0, 0.1, 0.2, 50, 60, 70;
  const ClusterPartition part = kmeans(pts, KmeansOptions{}, 5);
  CHECK(part.size_tie);
  CHECK(part.suspect.positions() == std::vector<std::size_t>{3, 4, 5});
}

TEST_CASE("partition does not depend on row order") {
  const Dataset d = testing::sparse_linear(40, 6, 31);
  PartitionOptions opts;
  opts.seed = 12;
  const auto perm = testing::random_permutation(40, 8);
  for (ClusterMethod m : {ClusterMethod::kmeans, ClusterMethod::kmeans_pp, ClusterMethod::spectral}) {
    opts.method = m;
    const ClusterPartition a = partition_rows(d, opts);
    const ClusterPartition b = partition_rows(testing::permute_rows(d, perm), opts);
    for (std::size_t k = 0; k < 40; ++k) CHECK(b.labels[k] == a.labels[perm[k]]);
    CHECK(a.suspect.size() < a.clean.size() + (a.size_tie ? 1 : 0));
    CHECK(a.suspect.size() + a.clean.size() == 40);
  }
}

TEST_CASE("spectral clustering recovers cliques") {
  Matrix pts(12, 2);
  for (Eigen::Index i = 0; i < 12; ++i) {
    const bool first = i < 4;
    pts(i, 0) = (first ? 0.0 : 100.0) + 0.01 * static_cast<double>(i);
    pts(i, 1) = (first ? 0.0 : 100.0) - 0.02 * static_cast<double>(i % 3);
  }
  const ClusterPartition part = spectral_cluster(pts, 3, KmeansOptions{}, 4);
  CHECK(part.suspect.positions() == iota(0, 4));
  CHECK(part.method == ClusterMethod::spectral);
}

TEST_CASE("spectral clustering handles concentric data") {
  int spectral_hits = 0, kmeans_hits = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Matrix pts = concentric(30, 90, seed);
    const ClusterPartition sp = spectral_cluster(pts, 8, KmeansOptions{}, seed);
    if (sp.suspect.positions() == iota(0, 30)) ++spectral_hits;
    const ClusterPartition km = kmeans(pts, KmeansOptions{}, seed);
    if (km.suspect.positions() == iota(0, 30)) ++kmeans_hits;
  }
  CHECK(spectral_hits >= 18);
  CHECK(kmeans_hits < 18);
}

TEST_CASE("spectral clustering argument checks") {
  const Matrix pts = two_blobs(3, 5, 2, 1.0, 1);
  CHECK_THROWS_AS(spectral_cluster(pts, 8, KmeansOptions{}, 1), Error);
  CHECK_THROWS_AS(spectral_cluster(pts.topRows(3), 1, KmeansOptions{}, 1), Error);
  Matrix three(9, 1);
  three << 0, 0.1, 0.2, 50, 50.1, 50.2, 100, 100.1, 100.2;
  try {
    spectral_cluster(three, 2, KmeansOptions{}, 1);
    FAIL("expected ambiguous embedding");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ambiguous_embedding);
  }
}

TEST_CASE("clustering points") {
  const Dataset d = testing::sparse_linear(10, 3, 2);
  const Matrix joint = clustering_points(d, true, false);
  CHECK(joint.cols() == 4);
  CHECK(joint.col(0) == d.y());
  CHECK(clustering_points(d, false, false).cols() == 3);
  const Matrix st = clustering_points(d, true, true);
  CHECK(st.colwise().mean().cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("method names") {
  CHECK(parse_cluster_method("kmeans++") == ClusterMethod::kmeans_pp);
  CHECK(parse_cluster_method("spectral") == ClusterMethod::spectral);
  CHECK(std::string(to_string(ClusterMethod::kmeans)) == "kmeans");
  CHECK_THROWS_AS(parse_cluster_method("dbscan"), Error);
}
