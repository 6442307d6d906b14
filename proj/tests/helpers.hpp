#pragma once

#include <cstdint>
#include <random>

#include "selinfl/data.hpp"
#include "selinfl/random.hpp"

namespace testing {

inline selinfl::Matrix gaussian_matrix(std::size_t rows, std::size_t cols, selinfl::Rng& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  selinfl::Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = z(rng);
  return m;
}

/// y = 2 x1 + x2 + x3 + noise on iid Gaussian predictors.
inline selinfl::Dataset sparse_linear(std::size_t n, std::size_t p, std::uint64_t seed, double noise = 1.0) {
  selinfl::Rng rng(seed);
  selinfl::Matrix x = gaussian_matrix(n, p, rng);
  std::normal_distribution<double> z(0.0, noise);
  selinfl::Vector y(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    double v = 2.0 * x(i, 0);
    if (p > 1) v += x(i, 1);
    if (p > 2) v += x(i, 2);
    y(i) = v + z(rng);
  }
  return selinfl::Dataset(y, x);
}

/// The same rows in the order given by perm (perm[k] = source position of row k).
inline selinfl::Dataset permute_rows(const selinfl::Dataset& d, const std::vector<std::size_t>& perm) {
  return selinfl::reorder(d, perm);
}

inline std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  selinfl::Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[selinfl::uniform_below(rng, i)]);
  return perm;
}

}  // namespace testing
