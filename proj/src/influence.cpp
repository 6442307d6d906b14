#include "selinfl/influence.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "selinfl/parallel.hpp"
#include "moments.hpp"

namespace selinfl {

using detail::CenteredData;
using detail::MomentSums;
using detail::center;
using detail::full_sums;

const char* to_string(Measure measure) {
  switch (measure) {
    case Measure::him: return "him";
    case Measure::df_lasso: return "df_lasso";
    case Measure::gdf: return "gdf";
  }
  return "unknown";
}

double two_sided_normal_p(double z) {
  const double p = std::erfc(std::abs(z) / std::sqrt(2.0));
  return std::clamp(p, 0.0, 1.0);
}

double chi2_1_upper(double t) {
  if (!(t > 0.0)) return 1.0;
  return std::clamp(std::erfc(std::sqrt(t / 2.0)), 0.0, 1.0);
}

double normal_quantile(double q) { return boost::math::quantile(boost::math::normal_distribution<double>(), q); }

double chi2_1_quantile(double q) {
  const double z = normal_quantile(0.5 + q / 2.0);
  return z * z;
}

StandardizedScores standardize_scores(const Vector& raw) {
  const auto m = raw.size();
  if (m < 2) throw Error(ErrorKind::invalid_spec, "standardization needs at least two scores");
  StandardizedScores out;
  // Sums over sorted values, so permuting the scores permutes the output exactly.
  std::vector<double> sorted(raw.data(), raw.data() + m);
  std::sort(sorted.begin(), sorted.end());
  double total = 0.0;
  for (double v : sorted) total += v;
  out.mean = total / static_cast<double>(m);
  double ss = 0.0;
  for (double v : sorted) ss += (v - out.mean) * (v - out.mean);
  const double var = ss / static_cast<double>(m - 1);
  out.scale = std::sqrt(var);
  if (!(out.scale > 0.0)) {
    out.degenerate = true;
    out.standardized = Vector::Zero(m);
    out.p_values = Vector::Ones(m);
    return out;
  }
  out.standardized = (raw.array() - out.mean) / out.scale;
  out.p_values.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) out.p_values(i) = two_sided_normal_p(out.standardized(i));
  return out;
}

namespace {

/// Leave-one-out correlations from sums over globally centered data. The literal
/// divisor puts the mean at (sum of originals)/n, which is sum/n - mean/n after centering.
Vector loo_correlations(const MomentSums& s, const CenteredData& c, double n, MeanDivisor divisor,
                        const Vector& ref_sxx, double ref_syy) {
  if (divisor == MeanDivisor::corrected) return s.correlations(n - 1.0, ref_sxx, ref_syy);
  const Vector x_shift = -c.x_mean / n;
  return s.correlations(n, ref_sxx, ref_syy, &x_shift, -c.y_mean / n);
}

}  // namespace

Vector loo_marginal_correlations(const Dataset& data, std::optional<std::size_t> left_out, MeanDivisor divisor) {
  const std::size_t n = data.n();
  if (n < 3) throw Error(ErrorKind::invalid_spec, "marginal correlations need at least three rows");
  const CenteredData c = center(data);
  MomentSums s = full_sums(c);
  const Vector ref_sxx = s.sxx;
  const double ref_syy = s.syy;
  if (!left_out) return s.correlations(static_cast<double>(n), ref_sxx, ref_syy);
  if (*left_out >= n) throw Error(ErrorKind::invalid_subset, "row position out of range");
  const auto i = static_cast<Eigen::Index>(*left_out);
  s.add(c.x.row(i), c.y(i), -1.0);
  return loo_correlations(s, c, static_cast<double>(n), divisor, ref_sxx, ref_syy);
}

Vector marginal_correlations(const Dataset& data, const std::vector<std::size_t>& rows) {
  if (rows.size() < 2) throw Error(ErrorKind::invalid_spec, "correlation needs at least two rows");
  const CenteredData c = center(data);
  const MomentSums all = full_sums(c);
  MomentSums s(c.x.cols());
  for (auto r : rows) s.add(c.x.row(static_cast<Eigen::Index>(r)), c.y(static_cast<Eigen::Index>(r)));
  return s.correlations(s.count, all.sxx, all.syy);
}

InfluenceScores him_scores(const Dataset& data, MeanDivisor divisor) {
  const std::size_t n = data.n();
  if (n < 3) throw Error(ErrorKind::invalid_spec, "HIM needs at least three rows");
  // Sums run in canonical row order so scores do not depend on the input row order.
  const auto order = canonical_order(data);
  const CenteredData c = center(reorder(data, order));
  const MomentSums all = full_sums(c);
  const Vector rho = all.correlations(static_cast<double>(n), all.sxx, all.syy);
  const double p = static_cast<double>(data.p());
  const double nd = static_cast<double>(n);

  InfluenceScores out;
  out.measure = Measure::him;
  out.row_ids = data.row_ids();
  out.raw.resize(static_cast<Eigen::Index>(n));
  out.standardized.resize(static_cast<Eigen::Index>(n));
  out.p_values.resize(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    MomentSums s = all;
    const auto ck = static_cast<Eigen::Index>(k);
    s.add(c.x.row(ck), c.y(ck), -1.0);
    const Vector loo = loo_correlations(s, c, nd, divisor, all.sxx, all.syy);
    const double d = (rho - loo).squaredNorm() / p;
    const auto i = static_cast<Eigen::Index>(order[k]);
    out.raw(i) = d;
    out.standardized(i) = nd * nd * d;
    out.p_values(i) = chi2_1_upper(nd * nd * d);
  }
  out.mean_used = 0.0;
  out.scale_used = 1.0 / (nd * nd);
  return out;
}

std::size_t symmetric_difference_size(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::vector<std::size_t> diff;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(diff));
  return diff.size();
}

namespace {

/// Sum over predictors of |1(beta_j = 0) - 1(beta_j^(i) = 0)|, from the supports.
std::size_t indicator_disagreements(const std::vector<std::size_t>& full, const std::vector<std::size_t>& reduced,
                                    std::size_t p) {
  std::vector<char> in_full(p, 0), in_reduced(p, 0);
  for (auto j : full) in_full[j] = 1;
  for (auto j : reduced) in_reduced[j] = 1;
  std::size_t tau = 0;
  for (std::size_t j = 0; j < p; ++j) tau += in_full[j] != in_reduced[j] ? 1 : 0;
  return tau;
}

std::vector<std::size_t> normalized_support(std::vector<std::size_t> s, std::size_t p) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  if (!s.empty() && s.back() >= p) throw Error(ErrorKind::invalid_spec, "selector returned an out-of-range predictor");
  return s;
}

}  // namespace

InfluenceScores gdf_scores(const Dataset& data, const SupportSelector& selector, const GdfOptions& options) {
  const std::size_t n = data.n();
  const std::size_t p = data.p();
  if (n < 3) throw Error(ErrorKind::invalid_spec, "GDF needs at least three rows");
  const auto full = normalized_support(selector(data), p);

  Vector raw(static_cast<Eigen::Index>(n));
  parallel_for(n, options.threads, [&](std::size_t i) {
    std::vector<std::size_t> reduced;
    try {
      reduced = normalized_support(selector(drop_one(data, i)), p);
    } catch (const Error& e) {
      throw Error(e.kind(), "selector failed without row " + std::to_string(data.row_ids()[i]) + ": " + e.what());
    }
    const std::size_t tau = indicator_disagreements(full, reduced, p);
    if (tau != symmetric_difference_size(full, reduced))
      throw std::logic_error("GDF indicator sum disagrees with the support symmetric difference");
    raw(static_cast<Eigen::Index>(i)) = static_cast<double>(tau);
  });

  InfluenceScores out;
  out.measure = Measure::gdf;
  out.row_ids = data.row_ids();
  out.raw = std::move(raw);
  StandardizedScores st = standardize_scores(out.raw);
  out.standardized = std::move(st.standardized);
  out.p_values = std::move(st.p_values);
  out.mean_used = st.mean;
  out.scale_used = st.scale;
  out.degenerate = st.degenerate;
  out.full_support = full;
  out.fit_count = n + 1;
  return out;
}

SupportSelector make_cv_selector(const SelectorSpec& spec, const SolverOptions& solver) {
  return [spec, solver](const Dataset& d) { return cv_select(d, spec, solver).support; };
}

InfluenceScores gdf_scores(const Dataset& data, const SelectorSpec& spec, const GdfOptions& options) {
  spec.validate();
  InfluenceScores out = gdf_scores(data, make_cv_selector(spec, options.solver), options);
  out.selector = spec.penalty;
  return out;
}

InfluenceScores df_lasso_scores(const Dataset& data, SelectorSpec spec, const GdfOptions& options) {
  spec.penalty = Penalty::lasso;
  InfluenceScores out = gdf_scores(data, spec, options);
  out.measure = Measure::df_lasso;
  return out;
}

}  // namespace selinfl
