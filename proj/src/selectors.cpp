#include "selinfl/selectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "selinfl/random.hpp"

namespace selinfl {

const char* to_string(Penalty penalty) {
  switch (penalty) {
    case Penalty::lasso: return "lasso";
    case Penalty::scaled_lasso: return "scaled_lasso";
    case Penalty::elastic_net: return "elastic_net";
    case Penalty::scad: return "scad";
    case Penalty::mcp: return "mcp";
  }
  return "unknown";
}

Penalty parse_penalty(std::string_view name) {
  if (name == "lasso") return Penalty::lasso;
  if (name == "slasso" || name == "scaled_lasso") return Penalty::scaled_lasso;
  if (name == "enet" || name == "elastic_net") return Penalty::elastic_net;
  if (name == "scad") return Penalty::scad;
  if (name == "mcp") return Penalty::mcp;
  throw Error(ErrorKind::invalid_spec, "unknown selector '" + std::string(name) + "'");
}

double SelectorSpec::shape_value() const {
  if (shape) return *shape;
  return penalty == Penalty::mcp ? kDefaultMcpShape : kDefaultScadShape;
}

void SelectorSpec::validate() const {
  if (penalty == Penalty::scad && !(shape_value() > 2.0))
    throw Error(ErrorKind::invalid_spec, "SCAD shape a must exceed 2");
  if (penalty == Penalty::mcp && !(shape_value() > 1.0))
    throw Error(ErrorKind::invalid_spec, "MCP shape gamma must exceed 1");
  if (penalty == Penalty::elastic_net) {
    if (mixing_grid.empty()) throw Error(ErrorKind::invalid_spec, "empty elastic-net mixing grid");
    for (double a : mixing_grid)
      if (!(a > 0.0 && a <= 1.0)) throw Error(ErrorKind::invalid_spec, "mixing weights must lie in (0, 1]");
  }
  for (std::size_t k = 0; k < lambda_grid.size(); ++k) {
    if (!(lambda_grid[k] > 0.0)) throw Error(ErrorKind::invalid_spec, "lambda grid must be positive");
    if (k > 0 && !(lambda_grid[k] < lambda_grid[k - 1]))
      throw Error(ErrorKind::invalid_spec, "lambda grid must be strictly decreasing");
  }
  if (lambda_grid.empty() && grid_size < 1) throw Error(ErrorKind::invalid_spec, "grid size must be positive");
  if (cv_folds < 2) throw Error(ErrorKind::invalid_spec, "cross-validation needs at least two folds");
}

Vector SparseFit::predict(const Matrix& x) const {
  Vector out = Vector::Constant(x.rows(), intercept);
  for (auto j : support) out.noalias() += beta(static_cast<Eigen::Index>(j)) * x.col(static_cast<Eigen::Index>(j));
  return out;
}

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

double scad_threshold(double z, double lambda, double a) {
  const double az = std::abs(z);
  if (az <= 2.0 * lambda) return soft_threshold(z, lambda);
  if (az <= a * lambda) return soft_threshold(z, a * lambda / (a - 1.0)) / (1.0 - 1.0 / (a - 1.0));
  return z;
}

double mcp_threshold(double z, double lambda, double gamma) {
  if (std::abs(z) <= gamma * lambda) return soft_threshold(z, lambda) / (1.0 - 1.0 / gamma);
  return z;
}

namespace {

/// Centered, scaled response and standardized design. Penalty levels passed to the
/// solver are divided by y_scale so that iterates are invariant to the response scale.
struct Problem {
  Matrix xs;
  Vector ys;
  Vector x_mean;
  Vector x_scale;
  double y_mean = 0.0;
  double y_scale = 1.0;
  Eigen::Index n = 0;
  Eigen::Index p = 0;
};

Problem prepare(const Dataset& data) {
  Problem pb;
  pb.n = static_cast<Eigen::Index>(data.n());
  pb.p = static_cast<Eigen::Index>(data.p());
  if (pb.n < 3) throw Error(ErrorKind::invalid_spec, "a sparse fit needs at least three rows");
  StandardizationInfo info = column_moments(data.x());
  if (auto bad = degenerate_columns(info); !bad.empty()) throw ColumnDegenerateError(std::move(bad));
  pb.x_mean = std::move(info.column_means);
  pb.x_scale = std::move(info.column_scales);
  pb.xs = (data.x().rowwise() - pb.x_mean.transpose()).array().rowwise() / pb.x_scale.transpose().array();
  pb.y_mean = data.y().mean();
  Vector yc = data.y().array() - pb.y_mean;
  const double sy = std::sqrt(yc.squaredNorm() / static_cast<double>(pb.n));
  pb.y_scale = sy > 0.0 ? sy : 1.0;
  pb.ys = yc / pb.y_scale;
  return pb;
}

struct PenaltyParams {
  Penalty kind = Penalty::lasso;
  double mixing = 1.0;
  double shape = 0.0;
};

struct NotConverged {
  bool oscillating = false;
};

constexpr int kPolishEvery = 4;

class CoordinateDescent {
 public:
  CoordinateDescent(const Problem& pb, PenaltyParams pen, const SolverOptions& opts)
      : pb_(pb),
        pen_(pen),
        opts_(opts),
        b_(Vector::Zero(pb.p)),
        r_(pb.ys),
        xty_(pb.xs.transpose() * pb.ys / static_cast<double>(pb.n)),
        gram_slot_(static_cast<std::size_t>(pb.p), -1) {}

  /// Solves at penalty `lambda` (response units), warm-started from the current iterate.
  /// Sweeps run over a working set seeded by the sequential strong rule; a coordinate
  /// outside it is admitted whenever a sweep would move it off zero.
  void solve(double lambda) {
    const double previous_l1 = has_solved_ ? l1_ : std::numeric_limits<double>::infinity();
    set_levels(lambda);
    int sweeps = 0;
    std::vector<std::size_t> recent_supports;
    std::vector<char> in_set(static_cast<std::size_t>(pb_.p), 0);
    std::vector<Eigen::Index> working, active;
    const double screen = std::isfinite(previous_l1) ? 2.0 * l1_ - previous_l1 : l1_;
    Vector grad = gradient();
    for (Eigen::Index j = 0; j < pb_.p; ++j) {
      if (b_(j) != 0.0 || std::abs(grad(j)) >= screen) {
        in_set[static_cast<std::size_t>(j)] = 1;
        working.push_back(j);
      }
    }
    for (;;) {
      for (;;) {
        const double change = sweep(working);
        if (++sweeps > opts_.max_sweeps) fail(recent_supports);
        if (change < opts_.tolerance) break;
        active.clear();
        for (auto j : working)
          if (b_(j) != 0.0) active.push_back(j);
        for (int inner = 1;; ++inner) {
          const double step_change = sweep(active);
          if (++sweeps > opts_.max_sweeps) fail(recent_supports);
          if (step_change < opts_.tolerance) break;
          if (inner % kPolishEvery == 0 && polish(active)) break;
        }
        recent_supports.push_back(support_signature());
      }
      grad = gradient();
      bool admitted = false;
      for (Eigen::Index j = 0; j < pb_.p; ++j) {
        if (in_set[static_cast<std::size_t>(j)] || update(grad(j)) == 0.0) continue;
        in_set[static_cast<std::size_t>(j)] = 1;
        working.push_back(j);
        admitted = true;
      }
      if (!admitted) break;
      std::sort(working.begin(), working.end());
    }
    has_solved_ = true;
    total_sweeps_ += sweeps;
  }

  const Vector& coefficients() const { return b_; }
  std::size_t support_size() const { return static_cast<std::size_t>((b_.array() != 0.0).count()); }
  int total_sweeps() const { return total_sweeps_; }
  std::vector<double>& trace() { return trace_; }

  SparseFit to_fit(double lambda) const {
    SparseFit fit;
    fit.beta = Vector::Zero(pb_.p);
    double shift = 0.0;
    for (Eigen::Index j = 0; j < pb_.p; ++j) {
      if (b_(j) == 0.0) continue;
      const double bj = pb_.y_scale * b_(j) / pb_.x_scale(j);
      fit.beta(j) = bj;
      fit.support.push_back(static_cast<std::size_t>(j));
      shift += pb_.x_mean(j) * bj;
    }
    fit.intercept = pb_.y_mean - shift;
    fit.lambda = lambda;
    fit.penalty = pen_.kind;
    if (pen_.kind == Penalty::elastic_net) fit.mixing = pen_.mixing;
    if (pen_.kind == Penalty::scad || pen_.kind == Penalty::mcp) fit.shape = pen_.shape;
    fit.sweeps = total_sweeps_;
    fit.objective_trace = trace_;
    return fit;
  }

 private:
  void set_levels(double lambda) {
    if (pen_.kind == Penalty::elastic_net) {
      l1_ = lambda * pen_.mixing / pb_.y_scale;
      l2_ = lambda * (1.0 - pen_.mixing);
    } else {
      l1_ = lambda / pb_.y_scale;
      l2_ = 0.0;
    }
  }

  double update(double z) const {
    switch (pen_.kind) {
      case Penalty::lasso:
      case Penalty::scaled_lasso: return soft_threshold(z, l1_);
      case Penalty::elastic_net: return soft_threshold(z, l1_) / (1.0 + l2_);
      case Penalty::scad: return scad_threshold(z, l1_, pen_.shape);
      case Penalty::mcp: return mcp_threshold(z, l1_, pen_.shape);
    }
    return 0.0;
  }

  double penalty_value(double b) const {
    const double ab = std::abs(b);
    switch (pen_.kind) {
      case Penalty::lasso:
      case Penalty::scaled_lasso: return l1_ * ab;
      case Penalty::elastic_net: return l1_ * ab + 0.5 * l2_ * b * b;
      case Penalty::scad: {
        const double a = pen_.shape;
        if (ab <= l1_) return l1_ * ab;
        if (ab <= a * l1_) return (2.0 * a * l1_ * ab - b * b - l1_ * l1_) / (2.0 * (a - 1.0));
        return l1_ * l1_ * (a + 1.0) / 2.0;
      }
      case Penalty::mcp: {
        const double g = pen_.shape;
        if (ab <= g * l1_) return l1_ * ab - b * b / (2.0 * g);
        return g * l1_ * l1_ / 2.0;
      }
    }
    return 0.0;
  }

  double objective() const {
    double pen = 0.0;
    for (Eigen::Index j = 0; j < pb_.p; ++j)
      if (b_(j) != 0.0) pen += penalty_value(b_(j));
    return 0.5 * r_.squaredNorm() / static_cast<double>(pb_.n) + pen;
  }

  double step(Eigen::Index j) {
    const double inv_n = 1.0 / static_cast<double>(pb_.n);
    const double old = b_(j);
    const double z = pb_.xs.col(j).dot(r_) * inv_n + old;
    const double updated = update(z);
    const double delta = updated - old;
    if (delta != 0.0) {
      b_(j) = updated;
      r_.noalias() -= delta * pb_.xs.col(j);
    }
    return std::abs(delta);
  }

  /// Feature-sign step on the active set for convex penalties: solves the stationarity
  /// equations with the current signs fixed, moving only as far as the first sign change
  /// and dropping that coordinate before solving again. Each move lowers the objective.
  bool polish(std::vector<Eigen::Index> active) {
    if (pen_.kind != Penalty::lasso && pen_.kind != Penalty::scaled_lasso && pen_.kind != Penalty::elastic_net)
      return false;
    bool moved = false;
    auto finish = [&](bool converged) {
      if (moved) {
        r_ = pb_.ys;
        for (Eigen::Index j = 0; j < pb_.p; ++j)
          if (b_(j) != 0.0) r_.noalias() -= b_(j) * pb_.xs.col(j);
      }
      return converged;
    };
    while (!active.empty()) {
      const auto k = static_cast<Eigen::Index>(active.size());
      if (k >= pb_.n) return finish(false);
      Matrix gram(k, k);
      for (Eigen::Index a = 0; a < k; ++a) {
        const Vector& col = gram_column(active[static_cast<std::size_t>(a)]);
        for (Eigen::Index c = 0; c < k; ++c) gram(c, a) = col(active[static_cast<std::size_t>(c)]);
      }
      gram.diagonal().array() += l2_;
      Vector current(k), rhs(k);
      for (Eigen::Index a = 0; a < k; ++a) {
        const Eigen::Index j = active[static_cast<std::size_t>(a)];
        current(a) = b_(j);
        rhs(a) = xty_(j) - l1_ * (current(a) > 0.0 ? 1.0 : -1.0);
      }
      const Eigen::LLT<Matrix> llt(gram);
      if (llt.info() != Eigen::Success) return finish(false);
      const Vector target = llt.solve(rhs);
      if (!target.allFinite()) return finish(false);
      double step = 1.0;
      Eigen::Index blocked = -1;
      for (Eigen::Index a = 0; a < k; ++a) {
        if (target(a) != 0.0 && (target(a) > 0.0) == (current(a) > 0.0)) continue;
        const double t = current(a) / (current(a) - target(a));
        if (t < step) {
          step = t;
          blocked = a;
        }
      }
      Vector next = current + step * (target - current);
      if (blocked >= 0) next(blocked) = 0.0;
      for (Eigen::Index a = 0; a < k; ++a) b_(active[static_cast<std::size_t>(a)]) = next(a);
      moved = true;
      if (blocked < 0) break;
      active.erase(active.begin() + blocked);
    }
    return finish(true);
  }

  /// X'x_j / n, computed once per coordinate.
  const Vector& gram_column(Eigen::Index j) {
    auto& slot = gram_slot_[static_cast<std::size_t>(j)];
    if (slot < 0) {
      slot = static_cast<Eigen::Index>(gram_cols_.size());
      gram_cols_.push_back(pb_.xs.transpose() * pb_.xs.col(j) / static_cast<double>(pb_.n));
    }
    return gram_cols_[static_cast<std::size_t>(slot)];
  }

  /// x_j'r / n for every coordinate.
  Vector gradient() const { return pb_.xs.transpose() * r_ / static_cast<double>(pb_.n); }

  double sweep(const std::vector<Eigen::Index>& coords) {
    double change = 0.0;
    for (auto j : coords) change = std::max(change, step(j));
    if (opts_.record_objective) trace_.push_back(objective());
    return change;
  }

  std::size_t support_signature() const {
    std::size_t h = 1469598103934665603ULL;
    for (Eigen::Index j = 0; j < pb_.p; ++j)
      if (b_(j) != 0.0) h = (h ^ static_cast<std::size_t>(j)) * 1099511628211ULL;
    return h;
  }

  [[noreturn]] void fail(const std::vector<std::size_t>& recent) const {
    bool cycling = false;
    if (recent.size() >= 4) {
      std::vector<std::size_t> tail(recent.end() - 4, recent.end());
      std::sort(tail.begin(), tail.end());
      cycling = std::unique(tail.begin(), tail.end()) - tail.begin() > 1;
    }
    throw NotConverged{cycling};
  }

  const Problem& pb_;
  PenaltyParams pen_;
  SolverOptions opts_;
  Vector b_;
  Vector r_;
  double l1_ = 0.0;
  double l2_ = 0.0;
  int total_sweeps_ = 0;
  bool has_solved_ = false;
  Vector xty_;
  std::vector<Eigen::Index> gram_slot_;
  std::vector<Vector> gram_cols_;
  std::vector<double> trace_;
};

[[noreturn]] void rethrow_not_converged(const NotConverged& nc, const CoordinateDescent& cd, double lambda) {
  std::ostringstream os;
  os << "coordinate descent did not converge at lambda=" << lambda;
  if (nc.oscillating) os << " (support oscillating across sweeps)";
  throw ConvergenceError(os.str(), cd.to_fit(lambda));
}

double lambda_max_of(const Problem& pb) {
  if (pb.p == 0) return 0.0;
  // Same arithmetic as a coordinate step from zero.
  const double inv_n = 1.0 / static_cast<double>(pb.n);
  double top = 0.0;
  for (Eigen::Index j = 0; j < pb.p; ++j) top = std::max(top, std::abs(pb.xs.col(j).dot(pb.ys) * inv_n));
  double lambda = top * pb.y_scale;
  // The solver divides by y_scale again; step up until that division reaches top.
  while (lambda / pb.y_scale < top) lambda = std::nextafter(lambda, std::numeric_limits<double>::infinity());
  return lambda;
}

std::vector<double> log_grid(double top, double ratio, std::size_t size) {
  if (!(top > 0.0)) return {0.0};
  if (size == 1) return {top};
  std::vector<double> grid(size);
  const double step = std::log(ratio) / static_cast<double>(size - 1);
  for (std::size_t k = 0; k < size; ++k) grid[k] = top * std::exp(step * static_cast<double>(k));
  grid[0] = top;
  return grid;
}

std::vector<double> auto_grid(const Problem& pb, double mixing, std::size_t size) {
  const double ratio = pb.p > pb.n ? 0.05 : 0.001;
  return log_grid(lambda_max_of(pb) / mixing, ratio, size);
}

PenaltyParams params_for(const SelectorSpec& spec, double mixing) {
  PenaltyParams pen;
  pen.kind = spec.penalty;
  pen.mixing = mixing;
  pen.shape = (spec.penalty == Penalty::scad || spec.penalty == Penalty::mcp) ? spec.shape_value() : 0.0;
  return pen;
}

SparseFit single_fit(const Dataset& data, double lambda, PenaltyParams pen, const SolverOptions& opts) {
  if (!(lambda >= 0.0)) throw Error(ErrorKind::invalid_spec, "lambda must be non-negative");
  const Problem pb = prepare(data);
  CoordinateDescent cd(pb, pen, opts);
  try {
    cd.solve(lambda);
  } catch (const NotConverged& nc) {
    rethrow_not_converged(nc, cd, lambda);
  }
  return cd.to_fit(lambda);
}

/// Warm-started pass over `lambdas`; visit(k, cd) returns false to stop early.
template <typename Visit>
void run_path(const Problem& pb, PenaltyParams pen, const std::vector<double>& lambdas,
              const SolverOptions& opts, Visit&& visit) {
  CoordinateDescent cd(pb, pen, opts);
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    try {
      cd.solve(lambdas[k]);
    } catch (const NotConverged& nc) {
      rethrow_not_converged(nc, cd, lambdas[k]);
    }
    if (!visit(k, cd)) return;
  }
}

SparseFit path_fit_to(const Problem& pb, PenaltyParams pen, const std::vector<double>& lambdas,
                      std::size_t last, const SolverOptions& opts) {
  SparseFit out;
  run_path(pb, pen, lambdas, opts, [&](std::size_t k, const CoordinateDescent& cd) {
    if (k < last) return true;
    out = cd.to_fit(lambdas[k]);
    return false;
  });
  return out;
}

}  // namespace

double lambda_max(const Dataset& data) { return lambda_max_of(prepare(data)); }

std::vector<double> auto_lambda_grid(const Dataset& data, double mixing, std::size_t size) {
  return auto_grid(prepare(data), mixing, size);
}

SparseFit lasso_fit(const Dataset& data, double lambda, const SolverOptions& options) {
  return single_fit(data, lambda, PenaltyParams{Penalty::lasso, 1.0, 0.0}, options);
}

SparseFit elastic_net_fit(const Dataset& data, double lambda, double mixing, const SolverOptions& options) {
  if (!(mixing > 0.0 && mixing <= 1.0)) throw Error(ErrorKind::invalid_spec, "mixing must lie in (0, 1]");
  return single_fit(data, lambda, PenaltyParams{Penalty::elastic_net, mixing, 0.0}, options);
}

SparseFit nonconvex_fit(const Dataset& data, double lambda, const SelectorSpec& spec, const SolverOptions& options) {
  if (spec.penalty != Penalty::scad && spec.penalty != Penalty::mcp)
    throw Error(ErrorKind::invalid_spec, "nonconvex_fit needs a SCAD or MCP spec");
  spec.validate();
  if (!(lambda >= 0.0)) throw Error(ErrorKind::invalid_spec, "lambda must be non-negative");
  const Problem pb = prepare(data);
  std::vector<double> lambdas;
  for (double l : auto_grid(pb, 1.0, spec.grid_size))
    if (l > lambda) lambdas.push_back(l);
  lambdas.push_back(lambda);
  return path_fit_to(pb, params_for(spec, 1.0), lambdas, lambdas.size() - 1, options);
}

double universal_scaled_lambda0(std::size_t n, std::size_t p) {
  return std::sqrt(2.0 * std::log(static_cast<double>(std::max<std::size_t>(p, 2))) / static_cast<double>(n));
}

double default_scaled_lambda0(std::size_t n, std::size_t p) {
  if (n == 0 || p == 0) throw Error(ErrorKind::invalid_spec, "lambda0 needs n > 0 and p > 0");
  const boost::math::normal_distribution<double> normal;
  const double pd = static_cast<double>(p);
  double level = 0.5;
  if (p > 1) {
    // Fixed point of L = z_{1 - k(L)/p} with k(L) = L^4 + 2L^2, damped by averaging.
    level = 0.1;
    double previous = 0.0;
    while (std::abs(level - previous) > 1e-3) {
      const double k = std::pow(level, 4) + 2.0 * level * level;
      previous = level;
      level = (-boost::math::quantile(normal, std::min(k / pd, 0.99)) + previous) / 2.0;
    }
  }
  return std::sqrt(2.0 / static_cast<double>(n)) * level;
}

SparseFit scaled_lasso_fit(const Dataset& data, double lambda0, const ScaledLassoOptions& options) {
  if (!(lambda0 > 0.0)) throw Error(ErrorKind::invalid_spec, "lambda0 must be positive");
  const Problem pb = prepare(data);
  CoordinateDescent cd(pb, PenaltyParams{Penalty::scaled_lasso, 1.0, 0.0}, options.solver);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(pb.n));
  double sigma = options.initial_sigma ? *options.initial_sigma : pb.ys.norm() * pb.y_scale * inv_sqrt_n;
  if (!(sigma > 1e-10)) throw Error(ErrorKind::degenerate_noise, "response has no variation");

  auto current = [&](double s) {
    SparseFit fit = cd.to_fit(s * lambda0);
    fit.penalty = Penalty::scaled_lasso;
    fit.sigma_hat = s;
    return fit;
  };

  for (int it = 0; it < options.max_alternations; ++it) {
    const double lambda = sigma * lambda0;
    try {
      cd.solve(lambda);
    } catch (const NotConverged& nc) {
      rethrow_not_converged(nc, cd, lambda);
    }
    // Residual of the centered problem, in response units.
    const Vector resid = pb.ys - pb.xs * cd.coefficients();
    const double updated = resid.norm() * pb.y_scale * inv_sqrt_n;
    if (updated < 1e-10)
      throw Error(ErrorKind::degenerate_noise, "noise estimate collapsed below 1e-10 (interpolating fit)");
    const double rel = std::abs(updated - sigma) / sigma;
    sigma = updated;
    if (rel < options.relative_tolerance) {
      SparseFit fit = current(sigma);
      fit.lambda = lambda;
      return fit;
    }
  }
  throw ConvergenceError("scaled LASSO noise estimate did not settle", current(sigma));
}

std::vector<std::size_t> assign_folds(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 1) throw Error(ErrorKind::invalid_spec, "fold count must be positive");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[uniform_below(rng, i)]);
  std::vector<std::size_t> fold(n);
  for (std::size_t i = 0; i < n; ++i) fold[perm[i]] = i % k;
  return fold;
}

namespace {

struct FoldData {
  Dataset train;
  Matrix test_x;
  Vector test_y;
};

std::vector<FoldData> split_folds(const Dataset& data, const std::vector<std::size_t>& fold, std::size_t k) {
  std::vector<FoldData> out;
  out.reserve(k);
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> tr, te;
    for (std::size_t i = 0; i < fold.size(); ++i) (fold[i] == f ? te : tr).push_back(i);
    Dataset train = reorder(data, tr);
    Dataset test = reorder(data, te);
    out.push_back(FoldData{std::move(train), test.x(), test.y()});
  }
  return out;
}

double held_out_sse(const CoordinateDescent& cd, double lambda, const FoldData& fd) {
  const SparseFit fit = cd.to_fit(lambda);
  return (fd.test_y - fit.predict(fd.test_x)).squaredNorm();
}

/// Adds held-out squared errors along a warm-started path; entries beyond a saturated
/// support (>= n_train - 1 nonzeros) or a non-converged solve become +inf.
void accumulate_path_errors(const FoldData& fd, PenaltyParams pen, const std::vector<double>& lambdas,
                            const SolverOptions& opts, std::vector<double>& sse) {
  const Problem pb = prepare(fd.train);
  const auto saturation = static_cast<std::size_t>(std::max<Eigen::Index>(pb.n - 1, 1));
  std::size_t reached = 0;
  try {
    run_path(pb, pen, lambdas, opts, [&](std::size_t k, const CoordinateDescent& cd) {
      sse[k] += held_out_sse(cd, lambdas[k], fd);
      reached = k + 1;
      return cd.support_size() < saturation;
    });
  } catch (const ConvergenceError&) {
  }
  for (std::size_t k = reached; k < lambdas.size(); ++k) sse[k] = std::numeric_limits<double>::infinity();
}

std::pair<std::size_t, std::size_t> argmin_curve(const std::vector<std::vector<double>>& errors) {
  std::size_t best_m = 0, best_l = 0;
  double best = std::numeric_limits<double>::infinity();
  std::size_t max_len = 0;
  for (const auto& e : errors) max_len = std::max(max_len, e.size());
  // Ties keep the earliest (largest) lambda.
  for (std::size_t l = 0; l < max_len; ++l) {
    for (std::size_t m = 0; m < errors.size(); ++m) {
      if (l < errors[m].size() && errors[m][l] < best) {
        best = errors[m][l];
        best_m = m;
        best_l = l;
      }
    }
  }
  if (!std::isfinite(best)) throw Error(ErrorKind::convergence, "no finite cross-validation error on the grid");
  return {best_m, best_l};
}

CvResult cross_validate_scaled(const Dataset& canon, const SelectorSpec& spec, const std::vector<FoldData>& folds,
                               const SolverOptions& opts) {
  ScaledLassoOptions sopts;
  sopts.solver = opts;
  CvResult result;
  if (spec.lambda_grid.empty()) {
    result.fit = scaled_lasso_fit(canon, default_scaled_lambda0(canon.n(), canon.p()), sopts);
    return result;
  }
  const auto& grid = spec.lambda_grid;
  if (grid.size() == 1) {
    result.fit = scaled_lasso_fit(canon, grid.front(), sopts);
    return result;
  }
  std::vector<double> sse(grid.size(), 0.0);
  for (const auto& fd : folds) {
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const SparseFit fit = scaled_lasso_fit(fd.train, grid[k], sopts);
      sse[k] += (fd.test_y - fit.predict(fd.test_x)).squaredNorm();
    }
  }
  for (double& e : sse) e /= static_cast<double>(canon.n());
  result.curve.mixings = {1.0};
  result.curve.lambdas = {grid};
  result.curve.errors = {sse};
  const auto [m, l] = argmin_curve(result.curve.errors);
  result.curve.best_mixing = m;
  result.curve.best_lambda = l;
  result.fit = scaled_lasso_fit(canon, grid[l], sopts);
  return result;
}

}  // namespace

CvResult cross_validate(const Dataset& data, const SelectorSpec& spec, const SolverOptions& options) {
  spec.validate();
  if (data.n() < spec.cv_folds)
    throw Error(ErrorKind::invalid_spec, "fewer rows (" + std::to_string(data.n()) + ") than folds (" +
                                             std::to_string(spec.cv_folds) + ")");
  const Dataset canon = reorder(data, canonical_order(data));
  const std::uint64_t fold_seed = derive_seed(spec.seed, {content_hash(canon)});
  const auto fold = assign_folds(canon.n(), spec.cv_folds, fold_seed);
  const auto folds = split_folds(canon, fold, spec.cv_folds);

  if (spec.penalty == Penalty::scaled_lasso) return cross_validate_scaled(canon, spec, folds, options);

  const Problem full = prepare(canon);
  CvResult result;
  CvCurve& curve = result.curve;
  curve.mixings = spec.penalty == Penalty::elastic_net ? spec.mixing_grid : std::vector<double>{1.0};
  for (double mixing : curve.mixings) {
    std::vector<double> lambdas = spec.lambda_grid.empty() ? auto_grid(full, mixing, spec.grid_size) : spec.lambda_grid;
    std::vector<double> sse(lambdas.size(), 0.0);
    const PenaltyParams pen = params_for(spec, mixing);
    for (const auto& fd : folds) accumulate_path_errors(fd, pen, lambdas, options, sse);
    for (double& e : sse) e /= static_cast<double>(canon.n());
    curve.lambdas.push_back(std::move(lambdas));
    curve.errors.push_back(std::move(sse));
  }
  const auto [m, l] = argmin_curve(curve.errors);
  curve.best_mixing = m;
  curve.best_lambda = l;
  result.fit = path_fit_to(full, params_for(spec, curve.mixings[m]), curve.lambdas[m], l, options);
  return result;
}

SparseFit cv_select(const Dataset& data, const SelectorSpec& spec, const SolverOptions& options) {
  return cross_validate(data, spec, options).fit;
}

}  // namespace selinfl
