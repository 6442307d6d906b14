#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "selinfl/data.hpp"
#include "selinfl/selectors.hpp"

namespace selinfl {

enum class Measure { him, df_lasso, gdf };

const char* to_string(Measure measure);

/// Divisor for leave-one-out means. `corrected` averages the n-1 remaining rows;
/// `literal_n` divides their sum by n as in the original HIM formula.
enum class MeanDivisor { corrected, literal_n };

struct InfluenceScores {
  std::vector<int> row_ids;
  Vector raw;
  Vector standardized;
  Vector p_values;
  Measure measure = Measure::gdf;
  std::optional<Penalty> selector;
  double mean_used = 0.0;
  double scale_used = 1.0;
  bool degenerate = false;
  /// Support selected on all scored rows (GDF and DF(LASSO) only).
  std::vector<std::size_t> full_support;
  /// Number of selector invocations.
  std::size_t fit_count = 0;
};

struct StandardizedScores {
  Vector standardized;
  Vector p_values;
  double mean = 0.0;
  double scale = 0.0;
  bool degenerate = false;
};

/// z-scores with the sample mean and (m-1) standard deviation, and two-sided normal
/// p-values. A zero-variance vector is degenerate: all z = 0, all p = 1.
StandardizedScores standardize_scores(const Vector& raw);

/// Two-sided standard normal tail probability 2 P(N(0,1) > |z|).
double two_sided_normal_p(double z);

/// Upper tail P(chi2(1) > t).
double chi2_1_upper(double t);

/// Quantile of chi2(1) at probability q.
double chi2_1_quantile(double q);

/// Standard normal quantile.
double normal_quantile(double q);

/// Pearson correlations between y and each predictor, with row `left_out` (0-based)
/// removed, or on all rows when empty.
Vector loo_marginal_correlations(const Dataset& data, std::optional<std::size_t> left_out,
                                 MeanDivisor divisor = MeanDivisor::corrected);

/// Pearson correlations between y and each predictor over the given rows.
Vector marginal_correlations(const Dataset& data, const std::vector<std::size_t>& rows);

/// raw = D_i, standardized = n^2 D_i, p from the chi2(1) upper tail.
InfluenceScores him_scores(const Dataset& data, MeanDivisor divisor = MeanDivisor::corrected);

using SupportSelector = std::function<std::vector<std::size_t>(const Dataset&)>;

struct GdfOptions {
  unsigned threads = 1;
  SolverOptions solver;
};

std::size_t symmetric_difference_size(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b);

/// tau_i = size of the symmetric difference between the support selected on all rows
/// and the support selected without row i, for each row.
InfluenceScores gdf_scores(const Dataset& data, const SupportSelector& selector, const GdfOptions& options = {});

/// GDF with a cross-validated penalized selector.
InfluenceScores gdf_scores(const Dataset& data, const SelectorSpec& spec, const GdfOptions& options = {});

/// delta_i / iota_i: GDF with the LASSO selector.
InfluenceScores df_lasso_scores(const Dataset& data, SelectorSpec spec, const GdfOptions& options = {});

SupportSelector make_cv_selector(const SelectorSpec& spec, const SolverOptions& solver = {});

}  // namespace selinfl
