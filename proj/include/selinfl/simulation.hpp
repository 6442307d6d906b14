#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "selinfl/clustering.hpp"
#include "selinfl/data.hpp"
#include "selinfl/detection.hpp"
#include "selinfl/random.hpp"
#include "selinfl/selectors.hpp"

namespace selinfl {

enum class DesignKind { toeplitz, spatial };
enum class Scheme { I, II, III };

const char* to_string(DesignKind kind);
const char* to_string(Scheme scheme);
DesignKind parse_design(std::string_view name);
Scheme parse_scheme(std::string_view name);

struct ScenarioConfig {
  std::size_t n = 100;
  std::size_t p = 1000;
  DesignKind design = DesignKind::spatial;
  double rho = 0.8;
  /// Size S of the correlated centre block (spatial design only).
  std::size_t block = 100;
  /// Empty means (2, 1, 1, 0, ..., 0).
  Vector beta;
  double sigma2 = 1.0;
  Scheme scheme = Scheme::I;
  double kappa_y = 5.0;
  double kappa_x = 0.0;
  /// Contamination proportion; 0 gives a clean control.
  double zeta = 0.2;
  std::size_t replicates = 50;
  std::size_t test_size = 1000;
  std::uint64_t seed = 0;

  std::size_t n_infl() const;
  Vector beta_vector() const;
  /// Throws invalid_spec.
  void validate() const;
};

/// Rows iid N(0, Sigma) with an AR(1) correlation on all columns (toeplitz) or on the
/// centre block only (spatial).
Matrix gen_design(const ScenarioConfig& cfg, std::size_t rows, Rng& rng);

/// y = X beta + N(0, sigma2) noise.
Dataset gen_clean(const Matrix& x, const Vector& beta, double sigma2, Rng& rng);

struct ContaminatedSample {
  Dataset data;
  /// Positions 0..n_infl-1.
  RowSubset truth;
  /// Position of the largest clean response.
  std::size_t i_max = 0;
};

/// Replaces the first n_infl rows following the configured scheme.
ContaminatedSample contaminate(const Dataset& clean, const ScenarioConfig& cfg, Rng& rng);

/// A detection procedure together with its selector.
struct Method {
  Procedure procedure = Procedure::clusmip;
  std::optional<Penalty> selector;

  std::string name() const;
};

/// Parses names like "clusmip(slasso)", "dflasso", "mip".
Method parse_method(std::string_view name);

struct ReplicateMetrics {
  std::optional<double> power;  // undefined without contamination
  double fpr = 0.0;
  std::optional<double> mse_before, mse_after;
  std::optional<double> select_prob_before, select_prob_after;
  double time_seconds = 0.0;
};

/// Metrics for a single replicate. Selector-based metrics are computed only when a spec is given.
ReplicateMetrics evaluate(const DetectionResult& result, const ContaminatedSample& sample, const Vector& beta,
                          const SelectorSpec* spec, const Dataset& test, const SolverOptions& solver = {});

struct Stat {
  double mean = 0.0;
  double se = 0.0;
  std::size_t count = 0;
};

struct MetricsReport {
  std::string method;
  Stat power, fpr, mse_before, mse_after, select_prob_before, select_prob_after, time_seconds;
  std::size_t replicates = 0;
  std::size_t failures = 0;
};

struct MetricRecord {
  std::size_t replicate = 0;
  std::string method;
  std::string metric;
  double value = 0.0;
};

struct ExperimentOptions {
  double alpha = 0.05;
  double alpha0 = 0.05;
  ClusterMethod clustering = ClusterMethod::kmeans_pp;
  std::size_t rgd_m = 100;
  unsigned threads = 1;
  SolverOptions solver;
};

struct ExperimentReport {
  std::vector<MetricsReport> reports;  // one per method, input order
  std::vector<MetricRecord> records;   // replicate-major
  std::vector<std::string> failure_messages;
};

/// Runs one detection method on one sample.
DetectionResult run_method(const Method& method, const Dataset& data, const ExperimentOptions& options,
                           std::uint64_t seed);

/// Independent replicates of the scenario, each scored by every method.
ExperimentReport run_experiment(const ScenarioConfig& cfg, const std::vector<Method>& methods,
                                const ExperimentOptions& options = {});

Stat summarize(const std::vector<double>& values);

}  // namespace selinfl
