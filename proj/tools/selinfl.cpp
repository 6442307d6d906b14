#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "selinfl/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Influential observation detection for high-dimensional regression"};
  app.set_version_flag("--version", selinfl::kToolVersion);
  app.require_subcommand(1);

  selinfl::DetectRequest det;
  std::string selector, clustering;
  double alpha = 0.0, alpha0 = 0.0;
  std::size_t rgd_m = 0, rgd_n_sub = 0;
  auto* detect = app.add_subcommand("detect", "Flag influential rows in a CSV dataset");
  detect->add_option("--input", det.input, "CSV file with a header row")->required()->check(CLI::ExistingFile);
  detect->add_option("--response", det.response, "Response column name")->capture_default_str();
  detect->add_option("--procedure", det.procedure, "clusmip | mip | dflasso | gdf-single | him")->capture_default_str();
  auto* sel_opt = detect->add_option("--selector", selector, "lasso | slasso | enet | scad | mcp");
  auto* alpha_opt = detect->add_option("--alpha", alpha, "Nominal level");
  auto* alpha0_opt = detect->add_option("--alpha0", alpha0, "FDR level for clusmip");
  auto* clus_opt = detect->add_option("--clustering", clustering, "kmeans | kmeans++ | spectral");
  auto* m_opt = detect->add_option("--rgd-m", rgd_m, "Random subsets per row (mip)");
  auto* nsub_opt = detect->add_option("--rgd-n-sub", rgd_n_sub, "Subset size (mip)");
  detect->add_option("--seed", det.seed, "Master seed")->capture_default_str();
  detect->add_option("--threads", det.threads, "Worker threads (default: SELINFL_THREADS or all cores)");
  detect->add_option("--out-dir", det.out_dir, "Output directory")->capture_default_str();

  selinfl::SimulateRequest sim;
  std::uint64_t sim_seed = 0;
  std::size_t replicates = 0;
  auto* simulate = app.add_subcommand("simulate", "Run a simulation grid from a JSON config");
  simulate->add_option("--config", sim.config, "JSON grid config")->required()->check(CLI::ExistingFile);
  auto* seed_opt = simulate->add_option("--seed", sim_seed, "Override the config seed");
  auto* rep_opt = simulate->add_option("--replicates", replicates, "Override the replicate count");
  simulate->add_option("--threads", sim.threads, "Worker threads (default: SELINFL_THREADS or all cores)");
  simulate->add_option("--out-dir", sim.out_dir, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : selinfl::kExitConfig;
  }

  std::string message;
  int rc = 0;
  if (*detect) {
    if (*sel_opt) det.selector = selector;
    if (*alpha_opt) det.alpha = alpha;
    if (*alpha0_opt) det.alpha0 = alpha0;
    if (*clus_opt) det.clustering = clustering;
    if (*m_opt) det.rgd_m = rgd_m;
    if (*nsub_opt) det.rgd_n_sub = rgd_n_sub;
    rc = selinfl::run_detect(det, message);
  } else {
    if (*seed_opt) sim.seed = sim_seed;
    if (*rep_opt) sim.replicates = replicates;
    rc = selinfl::run_simulate(sim, message);
  }
  (rc == 0 ? std::cout : std::cerr) << message << "\n";
  return rc;
}
