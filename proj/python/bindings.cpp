#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "selinfl/detection.hpp"
#include "selinfl/influence.hpp"
#include "selinfl/io.hpp"
#include "selinfl/selectors.hpp"
#include "selinfl/simulation.hpp"

namespace py = pybind11;
using namespace selinfl;

namespace {

Dataset make_dataset(const Vector& y, const Matrix& x) { return Dataset(y, x); }

py::dict fit_dict(const SparseFit& fit) {
  py::dict d;
  d["beta"] = fit.beta;
  d["intercept"] = fit.intercept;
  d["support"] = fit.support;
  d["lambda"] = fit.lambda;
  d["penalty"] = to_string(fit.penalty);
  d["sigma_hat"] = fit.sigma_hat ? py::cast(*fit.sigma_hat) : py::none();
  d["mixing"] = fit.mixing ? py::cast(*fit.mixing) : py::none();
  return d;
}

py::dict scores_dict(const InfluenceScores& s) {
  py::dict d;
  d["row_ids"] = s.row_ids;
  d["raw"] = s.raw;
  d["standardized"] = s.standardized;
  d["p_values"] = s.p_values;
  d["measure"] = to_string(s.measure);
  d["degenerate"] = s.degenerate;
  d["full_support"] = s.full_support;
  d["fit_count"] = s.fit_count;
  return d;
}

SelectorSpec make_spec(const std::string& penalty, std::uint64_t seed, std::size_t folds) {
  SelectorSpec spec;
  spec.penalty = parse_penalty(penalty);
  spec.seed = seed;
  spec.cv_folds = folds;
  spec.validate();
  return spec;
}

std::string detect_json(const Vector& y, const Matrix& x, const std::string& procedure,
                        std::optional<std::string> selector, std::optional<double> alpha,
                        std::optional<double> alpha0, std::optional<std::string> clustering, std::uint64_t seed,
                        unsigned threads, std::optional<std::size_t> rgd_m, std::optional<std::size_t> rgd_n_sub) {
  DetectRequest req;
  req.procedure = procedure;
  req.selector = std::move(selector);
  req.alpha = alpha;
  req.alpha0 = alpha0;
  req.clustering = std::move(clustering);
  req.seed = seed;
  req.threads = threads;
  req.rgd_m = rgd_m;
  req.rgd_n_sub = rgd_n_sub;
  const Dataset data = make_dataset(y, x);
  py::gil_scoped_release release;
  return to_json(detect(data, req)).dump();
}

std::string simulate_json(const std::string& config, unsigned threads) {
  SimulationPlan plan = parse_simulation_config(nlohmann::json::parse(config));
  plan.options.threads = threads;
  nlohmann::json cells = nlohmann::json::array();
  py::gil_scoped_release release;
  for (const auto& cell : plan.cells) {
    const ExperimentReport rep = run_experiment(cell.scenario, plan.methods, plan.options);
    nlohmann::json reports = nlohmann::json::array();
    for (const auto& m : rep.reports) reports.push_back(to_json(m));
    cells.push_back({{"label", cell.label}, {"methods", reports}, {"failures", rep.failure_messages}});
  }
  return cells.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Influential observation detection for high-dimensional regression";
  m.attr("__version__") = kToolVersion;

  static py::exception<Error> error(m, "SelinflError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), (std::string(to_string(e.kind())) + ": " + e.what()).c_str());
    } catch (const nlohmann::json::exception& e) {
      PyErr_SetString(error.ptr(), (std::string("config: ") + e.what()).c_str());
    }
  });

  m.def("lambda_max", [](const Vector& y, const Matrix& x) { return lambda_max(make_dataset(y, x)); }, py::arg("y"),
        py::arg("X"));
  m.def("lasso_fit", [](const Vector& y, const Matrix& x, double lam) { return fit_dict(lasso_fit(make_dataset(y, x), lam)); },
        py::arg("y"), py::arg("X"), py::arg("lam"));
  m.def(
      "cv_select",
      [](const Vector& y, const Matrix& x, const std::string& penalty, std::uint64_t seed, std::size_t folds) {
        return fit_dict(cv_select(make_dataset(y, x), make_spec(penalty, seed, folds)));
      },
      py::arg("y"), py::arg("X"), py::arg("penalty") = "lasso", py::arg("seed") = 0, py::arg("folds") = 10);
  m.def(
      "gdf_scores",
      [](const Vector& y, const Matrix& x, const std::string& penalty, std::uint64_t seed, unsigned threads) {
        const Dataset data = make_dataset(y, x);
        const SelectorSpec spec = make_spec(penalty, seed, 10);
        InfluenceScores s;
        {
          py::gil_scoped_release release;
          s = gdf_scores(data, spec, GdfOptions{threads, {}});
        }
        return scores_dict(s);
      },
      py::arg("y"), py::arg("X"), py::arg("penalty") = "scaled_lasso", py::arg("seed") = 0, py::arg("threads") = 1);
  m.def("him_scores", [](const Vector& y, const Matrix& x) { return scores_dict(him_scores(make_dataset(y, x))); },
        py::arg("y"), py::arg("X"));
  m.def("bh_reject", &bh_reject, py::arg("p_values"), py::arg("alpha0") = 0.05);
  m.def("_detect_json", &detect_json, py::arg("y"), py::arg("X"), py::arg("procedure"), py::arg("selector"),
        py::arg("alpha"), py::arg("alpha0"), py::arg("clustering"), py::arg("seed"), py::arg("threads"),
        py::arg("rgd_m"), py::arg("rgd_n_sub"));
  m.def("_simulate_json", &simulate_json, py::arg("config"), py::arg("threads"));
}
