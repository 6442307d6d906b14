#pragma once

// Internal: centered moment sums shared by the HIM and MIP statistics.

#include <cmath>
#include <string>

#include "selinfl/data.hpp"
#include "selinfl/error.hpp"

namespace selinfl::detail {

/// Centered sums over a row set, relative to fixed centering constants.
struct MomentSums {
  double count = 0.0;
  double sy = 0.0;
  double syy = 0.0;
  Vector sx;
  Vector sxx;
  Vector sxy;

  explicit MomentSums(Eigen::Index p) : sx(Vector::Zero(p)), sxx(Vector::Zero(p)), sxy(Vector::Zero(p)) {}

  void add(const Eigen::Ref<const Eigen::RowVectorXd>& xrow, double y, double sign = 1.0) {
    count += sign;
    sy += sign * y;
    syy += sign * y * y;
    sx.noalias() += sign * xrow.transpose();
    sxx.array() += sign * xrow.transpose().array().square();
    sxy.noalias() += (sign * y) * xrow.transpose();
  }

  /// Correlations using means sum/mean_divisor + shift; `ref_sxx` scales the degeneracy check.
  Vector correlations(double mean_divisor, const Vector& ref_sxx, double ref_syy, const Vector* x_shift = nullptr,
                      double y_shift = 0.0) const {
    const double my = sy / mean_divisor + y_shift;
    const double cyy = syy - 2.0 * my * sy + count * my * my;
    if (!(cyy > 1e-12 * ref_syy) || !(cyy > 0.0))
      throw DegenerateCorrelationError(DegenerateCorrelationError::npos, "response has zero variance on the row set");
    Vector rho(sx.size());
    for (Eigen::Index j = 0; j < sx.size(); ++j) {
      const double mx = sx(j) / mean_divisor + (x_shift ? (*x_shift)(j) : 0.0);
      const double cxx = sxx(j) - 2.0 * mx * sx(j) + count * mx * mx;
      if (!(cxx > 1e-12 * ref_sxx(j)) || !(cxx > 0.0))
        throw DegenerateCorrelationError(static_cast<std::size_t>(j),
                                         "predictor column " + std::to_string(j + 1) + " has zero variance on the row set");
      const double cxy = sxy(j) - my * sx(j) - mx * sy + count * mx * my;
      rho(j) = cxy / std::sqrt(cxx * cyy);
    }
    return rho;
  }
};

struct CenteredData {
  Matrix x;
  Vector y;
  Vector x_mean;
  double y_mean = 0.0;
};

inline CenteredData center(const Dataset& data) {
  CenteredData c;
  c.x_mean = data.x().colwise().mean().transpose();
  c.y_mean = data.y().mean();
  c.x = data.x().rowwise() - c.x_mean.transpose();
  c.y = data.y().array() - c.y_mean;
  return c;
}

inline MomentSums full_sums(const CenteredData& c) {
  MomentSums s(c.x.cols());
  s.count = static_cast<double>(c.y.size());
  s.sy = c.y.sum();
  s.syy = c.y.squaredNorm();
  s.sx = c.x.colwise().sum().transpose();
  s.sxx = c.x.colwise().squaredNorm().transpose();
  s.sxy = c.x.transpose() * c.y;
  return s;
}


}  // namespace selinfl::detail
