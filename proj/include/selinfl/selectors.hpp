#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "selinfl/data.hpp"
#include "selinfl/error.hpp"

namespace selinfl {

enum class Penalty { lasso, scaled_lasso, elastic_net, scad, mcp };

const char* to_string(Penalty penalty);

/// Accepts the long names and the CLI spellings (slasso, enet).
Penalty parse_penalty(std::string_view name);

inline constexpr double kDefaultScadShape = 3.7;
inline constexpr double kDefaultMcpShape = 3.0;

struct SelectorSpec {
  Penalty penalty = Penalty::lasso;
  /// SCAD `a` or MCP `gamma`; the canonical default is used when empty.
  std::optional<double> shape;
  /// Elastic-net mixing weights searched by cross-validation.
  std::vector<double> mixing_grid{0.2, 0.4, 0.6, 0.8, 1.0};
  /// Strictly decreasing positive penalties; empty means an automatic grid.
  /// For the scaled LASSO these are candidate lambda0 values.
  std::vector<double> lambda_grid;
  std::size_t grid_size = 100;
  std::size_t cv_folds = 10;
  std::uint64_t seed = 0;

  double shape_value() const;
  /// Throws invalid_spec.
  void validate() const;
};

struct SparseFit {
  Vector beta;  // original predictor scale
  double intercept = 0.0;
  std::vector<std::size_t> support;  // 0-based, ascending
  double lambda = 0.0;
  std::optional<double> mixing;
  std::optional<double> sigma_hat;
  Penalty penalty = Penalty::lasso;
  std::optional<double> shape;
  int sweeps = 0;
  /// Objective after each coordinate sweep, filled only when requested.
  std::vector<double> objective_trace;

  Vector predict(const Matrix& x) const;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, SparseFit last)
      : Error(ErrorKind::convergence, what), last_(std::move(last)) {}

  const SparseFit& last_iterate() const noexcept { return last_; }

 private:
  SparseFit last_;
};

struct SolverOptions {
  double tolerance = 1e-7;  // max coefficient change per sweep, response-standardized scale
  int max_sweeps = 10000;
  bool record_objective = false;
};

double soft_threshold(double z, double t);

/// Univariate SCAD solution for a unit-variance coordinate.
double scad_threshold(double z, double lambda, double a);

/// Univariate MCP (firm thresholding) solution for a unit-variance coordinate.
double mcp_threshold(double z, double lambda, double gamma);

/// Smallest lambda with an empty LASSO support: max_j |x_j'(y - ybar)| / n on standardized columns.
double lambda_max(const Dataset& data);

/// Log-spaced grid from lambda_max/mixing down to 0.001 (0.05 when p > n) of it.
std::vector<double> auto_lambda_grid(const Dataset& data, double mixing, std::size_t size);

SparseFit lasso_fit(const Dataset& data, double lambda, const SolverOptions& options = {});

SparseFit elastic_net_fit(const Dataset& data, double lambda, double mixing,
                          const SolverOptions& options = {});

/// SCAD or MCP, warm-started down the automatic grid to `lambda`.
SparseFit nonconvex_fit(const Dataset& data, double lambda, const SelectorSpec& spec,
                        const SolverOptions& options = {});

/// sqrt(2 log p / n).
double universal_scaled_lambda0(std::size_t n, std::size_t p);

/// Quantile-based level sqrt(2/n) L, where L solves L = z_{1 - (L^4 + 2L^2)/p}.
double default_scaled_lambda0(std::size_t n, std::size_t p);

struct ScaledLassoOptions {
  std::optional<double> initial_sigma;  // defaults to the population sd of y
  int max_alternations = 100;
  double relative_tolerance = 1e-6;
  SolverOptions solver;
};

SparseFit scaled_lasso_fit(const Dataset& data, double lambda0, const ScaledLassoOptions& options = {});

/// Fold label in [0, k) per row; a pure function of (n, k, seed).
std::vector<std::size_t> assign_folds(std::size_t n, std::size_t k, std::uint64_t seed);

struct CvCurve {
  std::vector<double> mixings;               // one entry (1.0) unless elastic net
  std::vector<std::vector<double>> lambdas;  // per mixing
  std::vector<std::vector<double>> errors;   // mean held-out squared error, per mixing
  std::size_t best_mixing = 0;
  std::size_t best_lambda = 0;
};

struct CvResult {
  SparseFit fit;
  CvCurve curve;  // empty for the scaled LASSO at its universal lambda0
};

/// Cross-validated fit on a row-order-independent view of the data. The scaled LASSO
/// with an automatic grid uses its universal lambda0 instead of cross-validation.
CvResult cross_validate(const Dataset& data, const SelectorSpec& spec, const SolverOptions& options = {});

SparseFit cv_select(const Dataset& data, const SelectorSpec& spec, const SolverOptions& options = {});

inline const std::vector<std::size_t>& support(const SparseFit& fit) { return fit.support; }

}  // namespace selinfl
