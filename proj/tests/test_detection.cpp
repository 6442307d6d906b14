#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <random>

#include "helpers.hpp"
#include "selinfl/detection.hpp"

using namespace selinfl;

namespace {

/// Sparse linear data whose first `k` rows are shifted responses.
Dataset with_outliers(std::size_t n, std::size_t p, std::size_t k, double shift, std::uint64_t seed) {
  const Dataset clean = testing::sparse_linear(n, p, seed);
  Vector y = clean.y();
  const double top = y.maxCoeff();
  Rng rng(seed + 1);
  std::normal_distribution<double> z(0.0, 1.0);
  for (std::size_t i = 0; i < k; ++i) y(static_cast<Eigen::Index>(i)) = top + shift + z(rng);
  return Dataset(y, clean.x());
}

std::vector<std::size_t> as_positions(std::vector<std::size_t> v) { return v; }

}  // namespace

TEST_CASE("Benjamini-Hochberg examples") {
  CHECK(bh_reject({0.001, 0.002, 0.9}, 0.05) == as_positions({0, 1}));
  CHECK(bh_reject({1.0, 1.0, 1.0}, 0.05).empty());
  CHECK(bh_reject({0.0, 0.0, 0.0, 0.0}, 0.05) == as_positions({0, 1, 2, 3}));
  // Step-up: p_(3) = 0.03 <= 3 * 0.05 / 4 rescues the larger p-values below it.
  CHECK(bh_reject({0.03, 0.02, 0.5, 0.025}, 0.05) == as_positions({0, 1, 3}));
  CHECK(bh_reject({}, 0.05).empty());
  CHECK_THROWS_AS(bh_reject({0.1}, 0.0), Error);
  CHECK_THROWS_AS(bh_reject({1.5}, 0.05), Error);
}

TEST_CASE("Benjamini-Hochberg is monotone in the level") {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> p(1 + uniform_below(rng, 40));
    for (double& v : p) v = std::pow(uniform01(rng), 1.0 + 4.0 * uniform01(rng));
    std::vector<std::size_t> previous;
    for (double a : {0.01, 0.05, 0.1, 0.2, 0.5}) {
      const auto r = bh_reject(p, a);
      CHECK(std::includes(r.begin(), r.end(), previous.begin(), previous.end()));
      previous = r;
    }
  }
}

TEST_CASE("RGD sampling") {
  RgdConfig cfg;
  cfg.m = 25;
  cfg.n_sub = 9;
  Rng rng(1);
  for (const auto& a : rgd_sample(10, 4, cfg, rng)) {
    CHECK(a.positions() == as_positions({0, 1, 2, 3, 5, 6, 7, 8, 9}));
  }
  cfg.n_sub = 3;
  for (const auto& a : rgd_sample(10, 7, cfg, rng)) {
    CHECK(a.size() == 3);
    CHECK_FALSE(a.contains(7));
  }
  cfg.n_sub = 10;
  CHECK_THROWS_AS(rgd_sample(10, 0, cfg, rng), Error);
  cfg.n_sub = 3;
  cfg.m = 0;
  CHECK_THROWS_AS(rgd_sample(10, 0, cfg, rng), Error);
  CHECK(RgdConfig{}.subset_size(101) == 51);
}

TEST_CASE("RGD inclusion frequencies") {
  RgdConfig cfg;
  cfg.m = 1;
  cfg.n_sub = 3;
  Rng rng(11);
  std::vector<int> any_probe(10, 0), fixed_probe(10, 0);
  const int draws = 10000;
  for (int t = 0; t < draws; ++t) {
    const auto probe = static_cast<std::size_t>(uniform_below(rng, 10));
    const auto a = rgd_sample(10, probe, cfg, rng);
    for (auto r : a.front().positions()) ++any_probe[r];
    const auto b = rgd_sample(10, 0, cfg, rng);
    for (auto r : b.front().positions()) ++fixed_probe[r];
  }
  // Probe drawn uniformly: 9/10 * 3/9 = 0.3. Probe fixed: 3/9 for every other row.
  for (int c : any_probe) CHECK(std::abs(static_cast<double>(c) / draws - 0.3) <= 0.02);
  CHECK(fixed_probe[0] == 0);
  for (std::size_t k = 1; k < 10; ++k) CHECK(std::abs(static_cast<double>(fixed_probe[k]) / draws - 1.0 / 3.0) <= 0.02);
}

TEST_CASE("MIP with one subset") {
  const Dataset d = testing::sparse_linear(30, 20, 5);
  MipOptions opts;
  opts.rgd.m = 1;
  opts.rgd.seed = 3;
  const DetectionResult r = mip(d, opts);
  for (const auto& pt : r.per_point) CHECK(pt.raw == pt.standardized);
}

TEST_CASE("MIP null calibration") {
  double flagged = 0.0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Dataset d = testing::sparse_linear(100, 200, seed);
    MipOptions opts;
    opts.rgd.m = 30;
    opts.rgd.n_sub = 50;
    opts.rgd.seed = seed;
    flagged += static_cast<double>(mip(d, opts).influential.size()) / 100.0;
  }
  CHECK(flagged / 50.0 <= 0.07);
}

TEST_CASE("MIP flags gross response outliers") {
  const Dataset d = with_outliers(100, 50, 5, 30.0, 7);
  MipOptions opts;
  opts.rgd.seed = 2;
  const DetectionResult r = mip(d, opts);
  for (int id = 1; id <= 5; ++id) CHECK(std::find(r.influential.begin(), r.influential.end(), id) != r.influential.end());
}

TEST_CASE("DF(LASSO) rule") {
  InfluenceScores spike;
  spike.raw = Vector::Zero(20);
  spike.raw(19) = 50.0;
  for (int i = 1; i <= 20; ++i) spike.row_ids.push_back(i);
  StandardizedScores st = standardize_scores(spike.raw);
  spike.standardized = st.standardized;
  spike.p_values = st.p_values;
  // z = (50 - 2.5) / sqrt(125) for the spike, -2.5 / sqrt(125) elsewhere.
  CHECK(spike.standardized(19) == doctest::Approx(47.5 / std::sqrt(125.0)));
  const DetectionResult r = df_lasso_decide(spike);
  CHECK(r.influential == std::vector<int>{20});
  CHECK(r.procedure == Procedure::df_lasso);

  InfluenceScores flat = spike;
  flat.raw.setConstant(3.0);
  st = standardize_scores(flat.raw);
  flat.standardized = st.standardized;
  flat.degenerate = st.degenerate;
  CHECK(df_lasso_decide(flat).influential.empty());
}

TEST_CASE("single GDF with degenerate scores flags nothing") {
  const Dataset d = testing::sparse_linear(20, 10, 9);
  SelectorSpec spec;
  spec.lambda_grid = {10.0 * lambda_max(d)};
  const DetectionResult r = detect_single_gdf(d, spec);
  CHECK(r.influential.empty());
  CHECK_FALSE(r.warnings.empty());
  CHECK(r.per_point.size() == 20);
}

TEST_CASE("single GDF finds one large outlier") {
  int hits = 0;
  const int seeds = 20;
  for (int seed = 1; seed <= seeds; ++seed) {
    const Dataset d = with_outliers(100, 200, 1, 20.0, static_cast<std::uint64_t>(seed));
    SelectorSpec spec;
    spec.penalty = Penalty::scaled_lasso;
    const DetectionResult r = detect_single_gdf(d, spec);
    if (std::find(r.influential.begin(), r.influential.end(), 1) != r.influential.end()) ++hits;
  }
  CHECK(hits >= 18);
}

TEST_CASE("ClusMIP fit accounting") {
  const Dataset d = with_outliers(40, 10, 4, 15.0, 13);
  std::atomic<std::size_t> calls{0};
  const SupportSelector counting = [&](const Dataset& sub) {
    ++calls;
    return sub.y().maxCoeff() > 10.0 ? std::vector<std::size_t>{0, 1} : std::vector<std::size_t>{0};
  };
  ClusmipOptions opts;
  opts.clustering.seed = 5;
  const DetectionResult r = clusmip(d, counting, opts);
  REQUIRE(r.partition);
  const std::size_t s = r.partition->suspect.size(), c = r.partition->clean.size();
  CHECK(r.fit_count == s * (2 + c));
  CHECK(calls.load() == r.fit_count);
  CHECK(r.per_point.size() == s);
}

TEST_CASE("ClusMIP falls back on degenerate clustering") {
  Vector y = Vector::LinSpaced(12, 0.0, 1.0);
  Matrix x = Matrix::Ones(12, 3);
  x.col(1) = Vector::LinSpaced(12, 1.0, 2.0);
  x.col(2).setLinSpaced(12, -1.0, 1.0);
  const Dataset d(y, x);
  ClusmipOptions opts;
  opts.clustering.method = ClusterMethod::spectral;
  opts.clustering.n_neighbors = 1;
  const SupportSelector constant = [](const Dataset&) { return std::vector<std::size_t>{0}; };
  const DetectionResult r = clusmip(d, constant, opts);
  CHECK(r.fell_back);
  CHECK_FALSE(r.warnings.empty());
  CHECK(r.influential.empty());
  CHECK(r.per_point.size() == 12);
}

TEST_CASE("ClusMIP finds planted extreme rows") {
  const Dataset clean = testing::sparse_linear(100, 40, 17);
  Vector y = clean.y();
  Matrix x = clean.x();
  const double top = y.maxCoeff() + 25.0;
  for (Eigen::Index i = 0; i < 10; ++i) {
    y(i) = top;
    x.row(i) = x.row(0);
  }
  const Dataset d(y, x);
  SelectorSpec spec;
  spec.penalty = Penalty::scaled_lasso;
  ClusmipOptions opts;
  opts.clustering.seed = 1;
  const DetectionResult r = clusmip(d, spec, opts);
  REQUIRE(r.partition);
  for (std::size_t i = 0; i < 10; ++i) CHECK(r.partition->suspect.contains(i));
  int found = 0;
  for (int id = 1; id <= 10; ++id) found += std::count(r.influential.begin(), r.influential.end(), id);
  CHECK(found >= 8);
  for (int id : r.influential) CHECK(r.per_point.end() != std::find_if(r.per_point.begin(), r.per_point.end(), [&](const PointDecision& p) { return p.row_id == id && p.reject; }));
}

TEST_CASE("detections are permutation equivariant and thread independent") {
  const Dataset d = with_outliers(50, 30, 5, 10.0, 19);
  const auto perm = testing::random_permutation(50, 6);
  const Dataset q = testing::permute_rows(d, perm);
  SelectorSpec spec;
  spec.penalty = Penalty::scaled_lasso;
  spec.seed = 4;
  ClusmipOptions copts;
  copts.clustering.seed = 9;
  MipOptions mopts;
  mopts.rgd.seed = 8;

  auto by_id = [](const DetectionResult& r) {
    std::map<int, PointDecision> m;
    for (const auto& p : r.per_point) m[p.row_id] = p;
    return m;
  };
  auto same = [&](const DetectionResult& a, const DetectionResult& b) {
    CHECK(a.influential == b.influential);
    const auto ma = by_id(a), mb = by_id(b);
    REQUIRE(ma.size() == mb.size());
    for (const auto& [id, pa] : ma) {
      const auto& pb = mb.at(id);
      CHECK(pa.raw == pb.raw);
      CHECK(pa.standardized == pb.standardized);
      CHECK(pa.p_value == pb.p_value);
      CHECK(pa.reject == pb.reject);
    }
  };

  const DetectionResult c1 = clusmip(d, spec, copts);
  same(c1, clusmip(q, spec, copts));
  copts.threads = 3;
  same(c1, clusmip(d, spec, copts));

  const DetectionResult m1 = mip(d, mopts);
  same(m1, mip(q, mopts));
  mopts.threads = 3;
  same(m1, mip(d, mopts));

  same(him_detect(d), him_detect(q));
  same(detect_single_gdf(d, spec), detect_single_gdf(q, spec, SingleOptions{0.05, 3, {}}));
}

TEST_CASE("procedure names") {
  for (Procedure p : {Procedure::gdf_single, Procedure::clusmip, Procedure::mip, Procedure::df_lasso, Procedure::him})
    CHECK(parse_procedure(to_string(p)) == p);
  CHECK(uses_selector(Procedure::clusmip));
  CHECK_FALSE(uses_selector(Procedure::mip));
  CHECK_FALSE(uses_selector(Procedure::him));
  CHECK_THROWS_AS(parse_procedure("cook"), Error);
}
