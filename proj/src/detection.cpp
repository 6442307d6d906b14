#include "selinfl/detection.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "moments.hpp"
#include "selinfl/parallel.hpp"

namespace selinfl {

const char* to_string(Procedure procedure) {
  switch (procedure) {
    case Procedure::gdf_single: return "gdf-single";
    case Procedure::clusmip: return "clusmip";
    case Procedure::mip: return "mip";
    case Procedure::df_lasso: return "dflasso";
    case Procedure::him: return "him";
  }
  return "unknown";
}

Procedure parse_procedure(std::string_view name) {
  if (name == "gdf-single" || name == "gdf_single" || name == "gdf") return Procedure::gdf_single;
  if (name == "clusmip") return Procedure::clusmip;
  if (name == "mip") return Procedure::mip;
  if (name == "dflasso" || name == "df_lasso") return Procedure::df_lasso;
  if (name == "him") return Procedure::him;
  throw Error(ErrorKind::invalid_spec, "unknown procedure '" + std::string(name) + "'");
}

bool uses_selector(Procedure procedure) {
  return procedure == Procedure::gdf_single || procedure == Procedure::clusmip || procedure == Procedure::df_lasso;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_level(double level, const char* name) {
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorKind::invalid_spec, std::string(name) + " must lie in (0, 1)");
}

DetectionResult from_scores(const InfluenceScores& scores, Procedure procedure, const std::vector<char>& reject) {
  DetectionResult out;
  out.procedure = procedure;
  out.selector = scores.selector;
  out.fit_count = scores.fit_count;
  for (std::size_t i = 0; i < scores.row_ids.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    out.per_point.push_back(
        PointDecision{scores.row_ids[i], scores.raw(k), scores.standardized(k), scores.p_values(k), reject[i] != 0});
    if (reject[i]) out.influential.push_back(scores.row_ids[i]);
  }
  std::sort(out.influential.begin(), out.influential.end());
  return out;
}

}  // namespace

std::vector<std::size_t> bh_reject(const std::vector<double>& p_values, double alpha0) {
  check_level(alpha0, "alpha0");
  const std::size_t m = p_values.size();
  for (double p : p_values)
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::invalid_spec, "p-values must lie in [0, 1]");
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
  std::size_t k_star = 0;
  for (std::size_t k = 1; k <= m; ++k)
    if (p_values[order[k - 1]] <= static_cast<double>(k) * alpha0 / static_cast<double>(m)) k_star = k;
  if (k_star == 0) return {};
  const double cutoff = p_values[order[k_star - 1]];
  std::vector<std::size_t> rejected;
  for (std::size_t i = 0; i < m; ++i)
    if (p_values[i] <= cutoff) rejected.push_back(i);
  return rejected;
}

DetectionResult detect_single_gdf(const Dataset& data, const SelectorSpec& spec, const SingleOptions& options) {
  check_level(options.alpha, "alpha");
  const auto start = Clock::now();
  const InfluenceScores scores = gdf_scores(data, spec, GdfOptions{options.threads, options.solver});
  const double threshold = normal_quantile(1.0 - options.alpha / 2.0);
  std::vector<char> reject(data.n(), 0);
  if (!scores.degenerate)
    for (std::size_t i = 0; i < data.n(); ++i)
      reject[i] = std::abs(scores.standardized(static_cast<Eigen::Index>(i))) > threshold ? 1 : 0;
  DetectionResult out = from_scores(scores, Procedure::gdf_single, reject);
  out.alpha = options.alpha;
  out.alpha0 = options.alpha;
  if (scores.degenerate) out.warnings.push_back("GDF scores have zero variance; no row is distinguishable");
  out.wall_time = seconds_since(start);
  return out;
}

DetectionResult clusmip(const Dataset& data, const SelectorSpec& spec, const ClusmipOptions& options) {
  spec.validate();
  DetectionResult out = clusmip(data, make_cv_selector(spec, options.solver), options);
  out.selector = spec.penalty;
  return out;
}

DetectionResult clusmip(const Dataset& data, const SupportSelector& selector, const ClusmipOptions& options) {
  check_level(options.alpha0, "alpha0");
  check_level(options.alpha, "alpha");
  if (data.n() < 10) throw Error(ErrorKind::invalid_spec, "ClusMIP needs at least ten rows");
  const auto start = Clock::now();

  DetectionResult out;
  out.procedure = Procedure::clusmip;
  out.alpha = options.alpha;
  out.alpha0 = options.alpha0;

  ClusterPartition part;
  try {
    part = partition_rows(data, options.clustering);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::degenerate_cluster && e.kind() != ErrorKind::ambiguous_embedding) throw;
    out.fell_back = true;
    out.warnings.push_back(std::string("clustering degenerate, fell back to single-point GDF: ") + e.what());
    // Single-point fallback with the plain selector.
    const InfluenceScores scores = gdf_scores(data, selector, GdfOptions{options.threads, options.solver});
    const double threshold = normal_quantile(1.0 - options.alpha / 2.0);
    std::vector<char> reject(data.n(), 0);
    if (!scores.degenerate)
      for (std::size_t i = 0; i < data.n(); ++i)
        reject[i] = std::abs(scores.standardized(static_cast<Eigen::Index>(i))) > threshold ? 1 : 0;
    DetectionResult single = from_scores(scores, Procedure::clusmip, reject);
    single.fell_back = true;
    single.warnings = out.warnings;
    single.alpha = options.alpha;
    single.alpha0 = options.alpha0;
    single.wall_time = seconds_since(start);
    return single;
  }

  const auto& suspects = part.suspect.positions();
  const auto& clean = part.clean.positions();
  const std::size_t s = suspects.size();
  std::vector<PointDecision> points(s);
  std::vector<std::size_t> fits(s, 0);

  parallel_for(s, options.threads, [&](std::size_t k) {
    const std::size_t j = suspects[k];
    std::vector<std::size_t> rows = clean;
    rows.push_back(j);
    const RowSubset subset_rows(std::move(rows), data.n());
    const Dataset sub = subset(data, subset_rows);
    const auto& pos = subset_rows.positions();
    const auto at = static_cast<Eigen::Index>(std::lower_bound(pos.begin(), pos.end(), j) - pos.begin());
    InfluenceScores scores;
    try {
      scores = gdf_scores(sub, selector, GdfOptions{1, options.solver});
    } catch (const Error& e) {
      throw Error(e.kind(), "while testing suspect row " + std::to_string(data.row_ids()[j]) + ": " + e.what());
    }
    fits[k] = scores.fit_count;
    points[k] = PointDecision{data.row_ids()[j], scores.raw(at), scores.standardized(at), scores.p_values(at), false};
  });

  std::vector<double> p(s);
  for (std::size_t k = 0; k < s; ++k) p[k] = points[k].p_value;
  for (auto k : bh_reject(p, options.alpha0)) {
    points[k].reject = true;
    out.influential.push_back(points[k].row_id);
  }
  std::sort(out.influential.begin(), out.influential.end());
  out.per_point = std::move(points);
  out.fit_count = std::accumulate(fits.begin(), fits.end(), std::size_t{0});
  out.partition = std::move(part);
  out.wall_time = seconds_since(start);
  return out;
}

std::size_t RgdConfig::subset_size(std::size_t n) const {
  return n_sub > 0 ? n_sub : (n + 1) / 2;
}

std::vector<RowSubset> rgd_sample(std::size_t n, std::size_t i, const RgdConfig& cfg, Rng& rng) {
  const std::size_t size = cfg.subset_size(n);
  if (i >= n) throw Error(ErrorKind::invalid_spec, "probed row out of range");
  if (cfg.m < 1) throw Error(ErrorKind::invalid_spec, "RGD needs m >= 1");
  if (size < 1 || size > n - 1) throw Error(ErrorKind::invalid_spec, "RGD subset size must lie in [1, n - 1]");
  std::vector<std::size_t> pool;
  pool.reserve(n - 1);
  for (std::size_t k = 0; k < n; ++k)
    if (k != i) pool.push_back(k);
  std::vector<RowSubset> out;
  out.reserve(cfg.m);
  for (std::size_t j = 0; j < cfg.m; ++j) {
    for (std::size_t t = 0; t < size; ++t) std::swap(pool[t], pool[t + uniform_below(rng, pool.size() - t)]);
    out.emplace_back(std::vector<std::size_t>(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size)), n);
  }
  return out;
}

DetectionResult mip(const Dataset& data, const MipOptions& options) {
  check_level(options.alpha, "alpha");
  check_level(options.alpha_relaxed, "alpha_relaxed");
  const std::size_t n = data.n();
  const std::size_t n_sub = options.rgd.subset_size(n);
  if (n < 3) throw Error(ErrorKind::invalid_spec, "MIP needs at least three rows");
  if (n_sub < 2 || n_sub > n - 1) throw Error(ErrorKind::invalid_spec, "RGD subset size must lie in [2, n - 1]");
  const auto start = Clock::now();

  // Canonical row order keeps subset draws and floating-point sums independent of input order.
  const auto order = canonical_order(data);
  const detail::CenteredData c = detail::center(reorder(data, order));
  const detail::MomentSums all = detail::full_sums(c);
  const double p = static_cast<double>(data.p());
  const double scale = static_cast<double>(n_sub) * static_cast<double>(n_sub);

  std::vector<double> t_min(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> t_max(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::size_t> skipped(n, 0);

  auto statistic = [&](const RowSubset& a, std::size_t probe) -> std::optional<double> {
    detail::MomentSums s(c.x.cols());
    for (auto r : a.positions()) s.add(c.x.row(static_cast<Eigen::Index>(r)), c.y(static_cast<Eigen::Index>(r)));
    try {
      const Vector base = s.correlations(s.count, all.sxx, all.syy);
      s.add(c.x.row(static_cast<Eigen::Index>(probe)), c.y(static_cast<Eigen::Index>(probe)));
      const Vector with = s.correlations(s.count, all.sxx, all.syy);
      return scale * (with - base).squaredNorm() / p;
    } catch (const DegenerateCorrelationError&) {
      return std::nullopt;
    }
  };

  parallel_for(n, options.threads, [&](std::size_t k) {
    Rng rng = make_rng(options.rgd.seed, {k});
    const auto subsets = rgd_sample(n, k, options.rgd, rng);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& a : subsets) {
      auto stat = statistic(a, k);
      if (!stat) {
        RgdConfig once = options.rgd;
        once.m = 1;
        stat = statistic(rgd_sample(n, k, once, rng).front(), k);
      }
      if (!stat) {
        ++skipped[k];
        continue;
      }
      lo = std::min(lo, *stat);
      hi = std::max(hi, *stat);
    }
    if (std::isfinite(hi)) {
      t_min[k] = lo;
      t_max[k] = hi;
    }
  });

  std::vector<double> pmax(n, 1.0);
  for (std::size_t k = 0; k < n; ++k)
    if (!std::isnan(t_max[k])) pmax[k] = chi2_1_upper(t_max[k]);
  std::vector<char> screened(n, 0);
  for (auto k : bh_reject(pmax, options.alpha)) screened[k] = 1;
  const double confirm = chi2_1_quantile(1.0 - options.alpha_relaxed);

  DetectionResult out;
  out.procedure = Procedure::mip;
  out.alpha = options.alpha;
  out.alpha0 = options.alpha;
  out.per_point.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    const bool reject = screened[k] && !std::isnan(t_min[k]) && t_min[k] > confirm;
    out.per_point[i] = PointDecision{data.row_ids()[i], t_max[k], t_min[k], pmax[k], reject};
    if (reject) out.influential.push_back(data.row_ids()[i]);
    out.skipped_subsets += skipped[k];
  }
  std::sort(out.influential.begin(), out.influential.end());
  if (out.skipped_subsets > 0)
    out.warnings.push_back(std::to_string(out.skipped_subsets) + " degenerate RGD subset(s) skipped");
  out.wall_time = seconds_since(start);
  return out;
}

DetectionResult df_lasso_decide(const InfluenceScores& scores) {
  std::vector<char> reject(scores.row_ids.size(), 0);
  if (!scores.degenerate)
    for (std::size_t i = 0; i < reject.size(); ++i)
      reject[i] = std::abs(scores.standardized(static_cast<Eigen::Index>(i))) >= 2.0 ? 1 : 0;
  DetectionResult out = from_scores(scores, Procedure::df_lasso, reject);
  out.selector = Penalty::lasso;
  return out;
}

DetectionResult df_lasso_detect(const Dataset& data, const SelectorSpec& spec, unsigned threads,
                                const SolverOptions& solver) {
  const auto start = Clock::now();
  DetectionResult out = df_lasso_decide(df_lasso_scores(data, spec, GdfOptions{threads, solver}));
  out.wall_time = seconds_since(start);
  return out;
}

DetectionResult him_detect(const Dataset& data, double alpha, MeanDivisor divisor) {
  check_level(alpha, "alpha");
  const auto start = Clock::now();
  const InfluenceScores scores = him_scores(data, divisor);
  const double threshold = chi2_1_quantile(1.0 - alpha);
  std::vector<char> reject(data.n(), 0);
  for (std::size_t i = 0; i < data.n(); ++i)
    reject[i] = scores.standardized(static_cast<Eigen::Index>(i)) > threshold ? 1 : 0;
  DetectionResult out = from_scores(scores, Procedure::him, reject);
  out.alpha = alpha;
  out.alpha0 = alpha;
  out.wall_time = seconds_since(start);
  return out;
}

}  // namespace selinfl
