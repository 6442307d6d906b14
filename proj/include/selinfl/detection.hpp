#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "selinfl/clustering.hpp"
#include "selinfl/data.hpp"
#include "selinfl/influence.hpp"
#include "selinfl/random.hpp"
#include "selinfl/selectors.hpp"

namespace selinfl {

enum class Procedure { gdf_single, clusmip, mip, df_lasso, him };

const char* to_string(Procedure procedure);
Procedure parse_procedure(std::string_view name);

/// Whether the procedure consumes a model selector.
bool uses_selector(Procedure procedure);

struct PointDecision {
  int row_id = 0;
  double raw = 0.0;
  double standardized = 0.0;
  double p_value = 1.0;
  bool reject = false;
};

struct DetectionResult {
  /// Detected rows as original row ids, ascending.
  std::vector<int> influential;
  /// One entry per scored row. For MIP, raw holds T_max and standardized holds T_min.
  std::vector<PointDecision> per_point;
  Procedure procedure = Procedure::clusmip;
  std::optional<Penalty> selector;
  double alpha = 0.05;
  double alpha0 = 0.05;
  std::optional<ClusterPartition> partition;
  double wall_time = 0.0;
  std::size_t fit_count = 0;
  /// MIP subsets skipped after a degenerate resample.
  std::size_t skipped_subsets = 0;
  bool fell_back = false;
  std::vector<std::string> warnings;
};

/// Benjamini-Hochberg step-up rule; returns rejected positions into p_values, ascending.
std::vector<std::size_t> bh_reject(const std::vector<double>& p_values, double alpha0);

struct SingleOptions {
  double alpha = 0.05;
  unsigned threads = 1;
  SolverOptions solver;
};

/// Flags rows whose standardized GDF exceeds the 1 - alpha/2 normal quantile in absolute value.
DetectionResult detect_single_gdf(const Dataset& data, const SelectorSpec& spec, const SingleOptions& options = {});

struct ClusmipOptions {
  PartitionOptions clustering;
  double alpha0 = 0.05;
  /// Level used by the single-point fallback.
  double alpha = 0.05;
  unsigned threads = 1;
  SolverOptions solver;
};

/// Clustering-based multiple influential point detection.
DetectionResult clusmip(const Dataset& data, const SelectorSpec& spec, const ClusmipOptions& options = {});

/// Same pipeline with an arbitrary support selector.
DetectionResult clusmip(const Dataset& data, const SupportSelector& selector, const ClusmipOptions& options);

struct RgdConfig {
  std::size_t m = 100;
  std::size_t n_sub = 0;  // 0 = ceil(n / 2)
  std::uint64_t seed = 0;

  std::size_t subset_size(std::size_t n) const;
};

/// m subsets of size n_sub drawn uniformly without replacement from {0..n-1} \ {i}.
std::vector<RowSubset> rgd_sample(std::size_t n, std::size_t i, const RgdConfig& cfg, Rng& rng);

struct MipOptions {
  RgdConfig rgd;
  double alpha = 0.05;
  /// Level of the confirming T_min test.
  double alpha_relaxed = 0.5;
  unsigned threads = 1;
};

/// Random-group-deletion HIM detector: T_max screened with BH, confirmed by T_min.
DetectionResult mip(const Dataset& data, const MipOptions& options = {});

/// Flags rows with |iota_i| >= 2; nothing when the scores are degenerate.
DetectionResult df_lasso_decide(const InfluenceScores& scores);

/// DF(LASSO) scores followed by df_lasso_decide.
DetectionResult df_lasso_detect(const Dataset& data, const SelectorSpec& spec, unsigned threads = 1,
                                const SolverOptions& solver = {});

/// Flags rows with n^2 D_i above the chi2(1) 1 - alpha quantile.
DetectionResult him_detect(const Dataset& data, double alpha = 0.05, MeanDivisor divisor = MeanDivisor::corrected);

}  // namespace selinfl
