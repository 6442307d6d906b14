#include "selinfl/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <random>

#include "selinfl/error.hpp"
#include "selinfl/parallel.hpp"

namespace selinfl {

const char* to_string(DesignKind kind) {
  return kind == DesignKind::toeplitz ? "toeplitz" : "spatial";
}

const char* to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::I: return "I";
    case Scheme::II: return "II";
    case Scheme::III: return "III";
  }
  return "unknown";
}

DesignKind parse_design(std::string_view name) {
  if (name == "toeplitz" || name == "tp") return DesignKind::toeplitz;
  if (name == "spatial" || name == "sc") return DesignKind::spatial;
  throw Error(ErrorKind::invalid_spec, "unknown design '" + std::string(name) + "'");
}

Scheme parse_scheme(std::string_view name) {
  if (name == "I" || name == "1") return Scheme::I;
  if (name == "II" || name == "2") return Scheme::II;
  if (name == "III" || name == "3") return Scheme::III;
  throw Error(ErrorKind::invalid_spec, "unknown scheme '" + std::string(name) + "'");
}

std::size_t ScenarioConfig::n_infl() const {
  return static_cast<std::size_t>(std::llround(zeta * static_cast<double>(n)));
}

Vector ScenarioConfig::beta_vector() const {
  if (beta.size() > 0) return beta;
  Vector b = Vector::Zero(static_cast<Eigen::Index>(p));
  const double head[] = {2.0, 1.0, 1.0};
  for (Eigen::Index j = 0; j < std::min<Eigen::Index>(3, b.size()); ++j) b(j) = head[j];
  return b;
}

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::invalid_spec, what); };
  if (n < 10) fail("n must be at least 10");
  if (p < 1) fail("p must be positive");
  if (!(rho >= 0.0 && rho < 1.0)) fail("rho must lie in [0, 1)");
  if (design == DesignKind::spatial && (block < 1 || block > p)) fail("spatial block size must lie in [1, p]");
  if (beta.size() > 0 && static_cast<std::size_t>(beta.size()) != p) fail("beta length must equal p");
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) fail("sigma2 must be finite and non-negative");
  if (!(zeta >= 0.0 && zeta < 0.5)) fail("zeta must lie in [0, 0.5)");
  const double count = zeta * static_cast<double>(n);
  if (std::abs(count - std::round(count)) > 1e-9) fail("zeta * n must be an integer");
  if (2 * n_infl() >= n) fail("zeta * n must be below n / 2");
  if (!std::isfinite(kappa_x) || !std::isfinite(kappa_y)) fail("contamination scales must be finite");
  if (n_infl() > 0) {
    if ((scheme == Scheme::I || scheme == Scheme::III) && !(kappa_y > 0.0)) fail("scheme needs kappa_y > 0");
    if ((scheme == Scheme::II || scheme == Scheme::III) && !(kappa_x > 0.0)) fail("scheme needs kappa_x > 0");
  }
  if (replicates < 1) fail("replicates must be positive");
  if (test_size < 1) fail("test_size must be positive");
}

Matrix gen_design(const ScenarioConfig& cfg, std::size_t rows, Rng& rng) {
  const auto p = static_cast<Eigen::Index>(cfg.p);
  Eigen::Index lo = 0, hi = p;
  if (cfg.design == DesignKind::spatial) {
    lo = static_cast<Eigen::Index>((cfg.p - cfg.block) / 2);
    hi = lo + static_cast<Eigen::Index>(cfg.block);
  }
  const double rho = cfg.rho;
  const double innov = std::sqrt(1.0 - rho * rho);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(static_cast<Eigen::Index>(rows), p);
  // AR(1) recursion inside the correlated block gives corr(x_j, x_k) = rho^|j-k| exactly.
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      const double z = normal(rng);
      x(i, j) = (j > lo && j < hi) ? rho * x(i, j - 1) + innov * z : z;
    }
  }
  return x;
}

Dataset gen_clean(const Matrix& x, const Vector& beta, double sigma2, Rng& rng) {
  if (x.cols() != beta.size()) throw Error(ErrorKind::invalid_spec, "beta length must equal the number of columns");
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sd = std::sqrt(sigma2);
  Vector y = x * beta;
  if (sd > 0.0)
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += sd * normal(rng);
  return Dataset(std::move(y), x);
}

ContaminatedSample contaminate(const Dataset& clean, const ScenarioConfig& cfg, Rng& rng) {
  cfg.validate();
  if (clean.n() != cfg.n || clean.p() != cfg.p) throw Error(ErrorKind::invalid_spec, "dataset shape does not match the scenario");
  const std::size_t k = cfg.n_infl();
  Vector y = clean.y();
  Matrix x = clean.x();
  Eigen::Index i_max = 0;
  y.maxCoeff(&i_max);
  const Vector beta = cfg.beta_vector();
  const Eigen::Index shifted = std::min<Eigen::Index>(10, x.cols());
  std::normal_distribution<double> normal(0.0, 1.0);
  const double y_max = clean.y()(i_max);
  const Vector x_max = clean.x().row(i_max).transpose();

  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(k); ++i) {
    switch (cfg.scheme) {
      case Scheme::I:
        y(i) = y_max + normal(rng) + cfg.kappa_y;
        break;
      case Scheme::II:
        x.row(i).head(shifted).array() += cfg.kappa_x;
        break;
      case Scheme::III:
        x.row(i) = x_max.transpose();
        x.row(i).head(shifted).array() += 0.5 * cfg.kappa_x;
        y(i) = x.row(i).dot(beta) + normal(rng) + cfg.kappa_y;
        break;
    }
  }
  std::vector<std::size_t> truth(k);
  for (std::size_t i = 0; i < k; ++i) truth[i] = i;
  return ContaminatedSample{Dataset(std::move(y), std::move(x), clean.row_ids()), RowSubset(std::move(truth), cfg.n),
                            static_cast<std::size_t>(i_max)};
}

std::string Method::name() const {
  std::string out = to_string(procedure);
  if (selector && procedure != Procedure::df_lasso) {
    std::string sel = *selector == Penalty::scaled_lasso ? "slasso"
                      : *selector == Penalty::elastic_net ? "enet"
                                                          : to_string(*selector);
    out += "(" + sel + ")";
  }
  return out;
}

Method parse_method(std::string_view name) {
  Method m;
  const auto open = name.find('(');
  if (open == std::string_view::npos) {
    m.procedure = parse_procedure(name);
  } else {
    if (name.back() != ')') throw Error(ErrorKind::invalid_spec, "malformed method '" + std::string(name) + "'");
    m.procedure = parse_procedure(name.substr(0, open));
    m.selector = parse_penalty(name.substr(open + 1, name.size() - open - 2));
  }
  if (m.procedure == Procedure::df_lasso) m.selector = Penalty::lasso;
  if (uses_selector(m.procedure) && !m.selector)
    throw Error(ErrorKind::invalid_spec, "method '" + std::string(name) + "' needs a selector");
  if (!uses_selector(m.procedure) && m.selector)
    throw Error(ErrorKind::invalid_spec, "method '" + std::string(name) + "' does not take a selector");
  return m;
}

namespace {

double test_mse(const SparseFit& fit, const Dataset& test) {
  return (test.y() - fit.predict(test.x())).squaredNorm() / static_cast<double>(test.n());
}

bool contains_all(const std::vector<std::size_t>& support, const std::vector<std::size_t>& truth) {
  return std::includes(support.begin(), support.end(), truth.begin(), truth.end());
}

}  // namespace

ReplicateMetrics evaluate(const DetectionResult& result, const ContaminatedSample& sample, const Vector& beta,
                          const SelectorSpec* spec, const Dataset& test, const SolverOptions& solver) {
  const Dataset& data = sample.data;
  const std::size_t n = data.n();
  std::vector<char> flagged(n, 0);
  std::map<int, std::size_t> position;
  for (std::size_t i = 0; i < n; ++i) position[data.row_ids()[i]] = i;
  for (int id : result.influential) {
    auto it = position.find(id);
    if (it == position.end()) throw Error(ErrorKind::invalid_subset, "detected row id not in the sample");
    flagged[it->second] = 1;
  }
  std::size_t hits = 0, false_hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!flagged[i]) continue;
    if (sample.truth.contains(i))
      ++hits;
    else
      ++false_hits;
  }
  ReplicateMetrics m;
  const std::size_t k = sample.truth.size();
  if (k > 0) m.power = static_cast<double>(hits) / static_cast<double>(k);
  m.fpr = static_cast<double>(false_hits) / static_cast<double>(n - k);
  m.time_seconds = result.wall_time;

  if (spec) {
    std::vector<std::size_t> true_support;
    for (Eigen::Index j = 0; j < beta.size(); ++j)
      if (beta(j) != 0.0) true_support.push_back(static_cast<std::size_t>(j));
    const SparseFit before = cv_select(data, *spec, solver);
    m.mse_before = test_mse(before, test);
    m.select_prob_before = contains_all(before.support, true_support) ? 1.0 : 0.0;
    if (result.influential.empty()) {
      m.mse_after = m.mse_before;
      m.select_prob_after = m.select_prob_before;
    } else {
      std::vector<std::size_t> keep;
      for (std::size_t i = 0; i < n; ++i)
        if (!flagged[i]) keep.push_back(i);
      const SparseFit after = cv_select(subset(data, RowSubset(std::move(keep), n)), *spec, solver);
      m.mse_after = test_mse(after, test);
      m.select_prob_after = contains_all(after.support, true_support) ? 1.0 : 0.0;
    }
  }
  return m;
}

Stat summarize(const std::vector<double>& values) {
  Stat s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.se = std::sqrt(ss / static_cast<double>(values.size() - 1) / static_cast<double>(values.size()));
  }
  return s;
}

DetectionResult run_method(const Method& method, const Dataset& data, const ExperimentOptions& options,
                           std::uint64_t seed) {
  SelectorSpec spec;
  if (method.selector) spec.penalty = *method.selector;
  spec.seed = derive_seed(seed, {1});
  switch (method.procedure) {
    case Procedure::gdf_single:
      return detect_single_gdf(data, spec, SingleOptions{options.alpha, 1, options.solver});
    case Procedure::clusmip: {
      ClusmipOptions o;
      o.clustering.method = options.clustering;
      o.clustering.seed = derive_seed(seed, {2});
      o.alpha0 = options.alpha0;
      o.alpha = options.alpha;
      o.solver = options.solver;
      return clusmip(data, spec, o);
    }
    case Procedure::mip: {
      MipOptions o;
      o.rgd.m = options.rgd_m;
      o.rgd.seed = derive_seed(seed, {3});
      o.alpha = options.alpha;
      return mip(data, o);
    }
    case Procedure::df_lasso:
      return df_lasso_detect(data, spec, 1, options.solver);
    case Procedure::him:
      return him_detect(data, options.alpha);
  }
  throw Error(ErrorKind::invalid_spec, "unknown procedure");
}

ExperimentReport run_experiment(const ScenarioConfig& cfg, const std::vector<Method>& methods,
                                const ExperimentOptions& options) {
  cfg.validate();
  if (methods.empty()) throw Error(ErrorKind::invalid_spec, "no methods to run");
  const std::size_t reps = cfg.replicates;
  const std::size_t k = methods.size();
  const Vector beta = cfg.beta_vector();

  struct Slot {
    std::optional<ReplicateMetrics> metrics;
    std::string failure;
  };
  std::vector<Slot> slots(reps * k);

  parallel_for(reps, options.threads, [&](std::size_t r) {
    Rng rng = make_rng(cfg.seed, {r, 0});
    const Matrix x = gen_design(cfg, cfg.n, rng);
    const Dataset clean = gen_clean(x, beta, cfg.sigma2, rng);
    const ContaminatedSample sample = contaminate(clean, cfg, rng);
    Rng test_rng = make_rng(cfg.seed, {r, 1});
    const Dataset test = gen_clean(gen_design(cfg, cfg.test_size, test_rng), beta, cfg.sigma2, test_rng);
    const std::uint64_t method_seed = derive_seed(cfg.seed, {r, 2});
    for (std::size_t m = 0; m < k; ++m) {
      Slot& slot = slots[r * k + m];
      try {
        const DetectionResult result = run_method(methods[m], sample.data, options, method_seed);
        SelectorSpec spec;
        spec.seed = derive_seed(method_seed, {1});
        const bool has_selector = methods[m].selector.has_value();
        if (has_selector) spec.penalty = *methods[m].selector;
        slot.metrics = evaluate(result, sample, beta, has_selector ? &spec : nullptr, test, options.solver);
      } catch (const std::exception& e) {
        slot.failure = "replicate " + std::to_string(r) + ", " + methods[m].name() + ": " + e.what();
      }
    }
  });

  ExperimentReport out;
  for (std::size_t m = 0; m < k; ++m) {
    std::vector<double> power, fpr, mse_b, mse_a, sel_b, sel_a, time;
    MetricsReport rep;
    rep.method = methods[m].name();
    rep.replicates = reps;
    for (std::size_t r = 0; r < reps; ++r) {
      const Slot& slot = slots[r * k + m];
      if (!slot.metrics) {
        ++rep.failures;
        continue;
      }
      const ReplicateMetrics& v = *slot.metrics;
      if (v.power) power.push_back(*v.power);
      fpr.push_back(v.fpr);
      time.push_back(v.time_seconds);
      if (v.mse_before) mse_b.push_back(*v.mse_before);
      if (v.mse_after) mse_a.push_back(*v.mse_after);
      if (v.select_prob_before) sel_b.push_back(*v.select_prob_before);
      if (v.select_prob_after) sel_a.push_back(*v.select_prob_after);
    }
    rep.power = summarize(power);
    rep.fpr = summarize(fpr);
    rep.mse_before = summarize(mse_b);
    rep.mse_after = summarize(mse_a);
    rep.select_prob_before = summarize(sel_b);
    rep.select_prob_after = summarize(sel_a);
    rep.time_seconds = summarize(time);
    out.reports.push_back(std::move(rep));
  }
  for (std::size_t r = 0; r < reps; ++r) {
    for (std::size_t m = 0; m < k; ++m) {
      const Slot& slot = slots[r * k + m];
      const std::string name = methods[m].name();
      if (!slot.metrics) {
        out.failure_messages.push_back(slot.failure);
        continue;
      }
      const ReplicateMetrics& v = *slot.metrics;
      auto emit = [&](const char* metric, double value) { out.records.push_back({r, name, metric, value}); };
      if (v.power) emit("power", *v.power);
      emit("fpr", v.fpr);
      if (v.mse_before) emit("mse_before", *v.mse_before);
      if (v.mse_after) emit("mse_after", *v.mse_after);
      if (v.select_prob_before) emit("select_prob_before", *v.select_prob_before);
      if (v.select_prob_after) emit("select_prob_after", *v.select_prob_after);
      emit("time_seconds", v.time_seconds);
    }
  }
  return out;
}

}  // namespace selinfl
