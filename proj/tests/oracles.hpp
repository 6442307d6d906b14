#pragma once

#include <cmath>
#include <algorithm>
#include <optional>
#include <vector>

#include "selinfl/data.hpp"

namespace testing {

/// Column means and population standard deviations, computed directly.
struct Moments {
  selinfl::Vector mean, scale;
};

inline Moments moments(const selinfl::Matrix& x) {
  const auto n = static_cast<double>(x.rows());
  Moments m{selinfl::Vector(x.cols()), selinfl::Vector(x.cols())};
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) s += x(i, j);
    m.mean(j) = s / n;
    double ss = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) ss += (x(i, j) - m.mean(j)) * (x(i, j) - m.mean(j));
    m.scale(j) = std::sqrt(ss / n);
  }
  return m;
}

inline selinfl::Matrix standardized(const selinfl::Matrix& x) {
  const Moments m = moments(x);
  selinfl::Matrix s = x;
  for (Eigen::Index j = 0; j < x.cols(); ++j) s.col(j) = (x.col(j).array() - m.mean(j)) / m.scale(j);
  return s;
}

/// x_j' r / n on standardized columns for r = y - b0 - X beta.
inline selinfl::Vector kkt_gradient(const selinfl::Dataset& d, const selinfl::Vector& beta, double intercept) {
  const selinfl::Vector r = d.y() - d.x() * beta - selinfl::Vector::Constant(d.y().size(), intercept);
  return standardized(d.x()).transpose() * r / static_cast<double>(d.n());
}

struct ExactLasso {
  selinfl::Vector beta;  // original scale
  double intercept = 0.0;
};

/// LASSO on standardized columns with unpenalized intercept, solved by enumerating every
/// support and sign pattern and keeping the one that satisfies the optimality conditions.
/// Only for small p with a positive-definite Gram matrix.
inline std::optional<ExactLasso> exact_lasso(const selinfl::Dataset& d, double lambda) {
  const auto n = static_cast<double>(d.n());
  const auto p = static_cast<Eigen::Index>(d.p());
  const Moments m = moments(d.x());
  const selinfl::Matrix xs = standardized(d.x());
  const double ybar = d.y().mean();
  const selinfl::Vector yc = d.y().array() - ybar;
  const selinfl::Matrix g = xs.transpose() * xs / n;
  const selinfl::Vector c = xs.transpose() * yc / n;
  for (long mask = 0; mask < (1L << p); ++mask) {
    std::vector<Eigen::Index> s;
    for (Eigen::Index j = 0; j < p; ++j)
      if (mask & (1L << j)) s.push_back(j);
    const auto k = static_cast<Eigen::Index>(s.size());
    for (long signs = 0; signs < (1L << k); ++signs) {
      selinfl::Matrix gs(k, k);
      selinfl::Vector rhs(k);
      for (Eigen::Index a = 0; a < k; ++a) {
        const double sg = (signs & (1L << a)) ? -1.0 : 1.0;
        rhs(a) = c(s[a]) - lambda * sg;
        for (Eigen::Index b = 0; b < k; ++b) gs(a, b) = g(s[a], s[b]);
      }
      const selinfl::Vector b = k ? selinfl::Vector(gs.ldlt().solve(rhs)) : selinfl::Vector();
      bool ok = true;
      for (Eigen::Index a = 0; a < k && ok; ++a) {
        const double sg = (signs & (1L << a)) ? -1.0 : 1.0;
        ok = b(a) * sg > 0.0;
      }
      if (!ok) continue;
      selinfl::Vector full = selinfl::Vector::Zero(p);
      for (Eigen::Index a = 0; a < k; ++a) full(s[a]) = b(a);
      const selinfl::Vector grad = c - g * full;
      for (Eigen::Index j = 0; j < p && ok; ++j)
        if (full(j) == 0.0) ok = std::abs(grad(j)) <= lambda * (1.0 + 1e-12);
      if (!ok) continue;
      ExactLasso out;
      out.beta = full.array() / m.scale.array();
      out.intercept = ybar - m.mean.dot(out.beta);
      return out;
    }
  }
  return std::nullopt;
}

/// Standard normal upper tail by numerical integration of the density (Simpson's rule).
inline double normal_upper_tail(double z) {
  const double top = 40.0;
  const int steps = 200000;
  const double h = (top - z) / steps;
  auto f = [](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI); };
  double s = f(z) + f(top);
  for (int i = 1; i < steps; ++i) s += f(z + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace testing

namespace testing {

/// Leave-one-out correlation of y with column j, written out term by term. The means
/// divide the n-1 remaining values by `mean_divisor`; variances and the cross term use n-1.
inline double loo_correlation(const selinfl::Dataset& d, std::size_t j, long left_out, double mean_divisor) {
  const auto n = static_cast<long>(d.n());
  const auto col = static_cast<Eigen::Index>(j);
  double sx = 0.0, sy = 0.0;
  for (long k = 0; k < n; ++k) {
    if (k == left_out) continue;
    sx += d.x()(k, col);
    sy += d.y()(k);
  }
  const double mx = sx / mean_divisor, my = sy / mean_divisor;
  double cxy = 0.0, cxx = 0.0, cyy = 0.0;
  for (long k = 0; k < n; ++k) {
    if (k == left_out) continue;
    const double dx = d.x()(k, col) - mx, dy = d.y()(k) - my;
    cxy += dx * dy;
    cxx += dx * dx;
    cyy += dy * dy;
  }
  const double m1 = static_cast<double>(left_out >= 0 ? n - 1 : n) - 1.0;
  return (cxy / m1) / (std::sqrt(cxx / m1) * std::sqrt(cyy / m1));
}

/// D_i by the two-pass formula.
inline double him_direct(const selinfl::Dataset& d, std::size_t i, bool literal_n) {
  const auto n = static_cast<double>(d.n());
  double sum = 0.0;
  for (std::size_t j = 0; j < d.p(); ++j) {
    const double full = loo_correlation(d, j, -1, n);
    const double loo = loo_correlation(d, j, static_cast<long>(i), literal_n ? n : n - 1.0);
    sum += (full - loo) * (full - loo);
  }
  return sum / static_cast<double>(d.p());
}

/// Residual sum of squares of y on an intercept plus the given columns (normal equations).
inline double rss_normal_equations(const std::vector<std::vector<double>>& rows, const std::vector<double>& y,
                                   const std::vector<std::size_t>& cols) {
  const std::size_t k = cols.size() + 1;
  selinfl::Matrix a = selinfl::Matrix::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  selinfl::Vector b = selinfl::Vector::Zero(static_cast<Eigen::Index>(k));
  auto feature = [&](std::size_t r, std::size_t c) { return c == 0 ? 1.0 : rows[r][cols[c - 1]]; };
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t u = 0; u < k; ++u) {
      b(static_cast<Eigen::Index>(u)) += feature(r, u) * y[r];
      for (std::size_t v = 0; v < k; ++v)
        a(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) += feature(r, u) * feature(r, v);
    }
  const selinfl::Vector coef = a.ldlt().solve(b);
  double rss = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    double fit = 0.0;
    for (std::size_t u = 0; u < k; ++u) fit += coef(static_cast<Eigen::Index>(u)) * feature(r, u);
    rss += (y[r] - fit) * (y[r] - fit);
  }
  return rss;
}

/// Best subset of at most `max_size` predictors by BIC, enumerating index tuples in
/// increasing order. Strictly smaller BIC wins, so earlier subsets win ties.
inline std::vector<std::size_t> best_subset_bic(const std::vector<std::vector<double>>& rows,
                                                const std::vector<double>& y, std::size_t p, std::size_t max_size) {
  const double n = static_cast<double>(rows.size());
  std::vector<std::size_t> best;
  double best_bic = n * std::log(rss_normal_equations(rows, y, {}) / n);
  std::vector<std::size_t> cur;
  auto recurse = [&](auto&& self, std::size_t start) -> void {
    if (!cur.empty()) {
      const double bic = n * std::log(rss_normal_equations(rows, y, cur) / n) +
                         std::log(n) * static_cast<double>(cur.size());
      if (bic < best_bic) {
        best_bic = bic;
        best = cur;
      }
    }
    if (cur.size() == max_size) return;
    for (std::size_t j = start; j < p; ++j) {
      cur.push_back(j);
      self(self, j + 1);
      cur.pop_back();
    }
  };
  recurse(recurse, 0);
  return best;
}

}  // namespace testing
