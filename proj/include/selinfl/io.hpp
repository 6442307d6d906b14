#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "selinfl/data.hpp"
#include "selinfl/detection.hpp"
#include "selinfl/simulation.hpp"

namespace selinfl {

inline constexpr const char* kToolVersion = "0.1.0";

/// Header row required. The response column becomes y, the rest become X in header order.
Dataset load_csv(const std::filesystem::path& path, const std::string& response_column,
                 std::vector<std::string>* predictor_names = nullptr);

/// Parses CSV text; `source` is used in error messages only.
Dataset parse_csv(const std::string& text, const std::string& response_column,
                  std::vector<std::string>* predictor_names = nullptr, const std::string& source = "<input>");

/// Shortest round-trip decimal form of each value; the response comes first.
std::string format_csv(const Dataset& data, const std::string& response_column = "y",
                       const std::vector<std::string>& predictor_names = {});

void write_csv(const std::filesystem::path& path, const Dataset& data, const std::string& response_column = "y",
               const std::vector<std::string>& predictor_names = {});

/// Writes through a temporary file in the same directory and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

std::string format_double(double v);

/// FNV-1a over the canonical (sorted-key, compact) JSON dump, as 16 hex digits.
std::string config_digest(const nlohmann::json& config);

nlohmann::json to_json(const DetectionResult& result);
nlohmann::json to_json(const ClusterPartition& partition);
nlohmann::json to_json(const MetricsReport& report);

/// row_id,raw,standardized,p_value,decision
std::string scores_csv(const DetectionResult& result);

struct DetectRequest {
  std::filesystem::path input;
  std::string response = "y";
  std::string procedure = "clusmip";
  std::optional<std::string> selector;
  std::optional<double> alpha;
  std::optional<double> alpha0;
  std::optional<std::string> clustering;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0 = default
  std::optional<std::size_t> rgd_m;
  std::optional<std::size_t> rgd_n_sub;
  std::filesystem::path out_dir = ".";
};

struct SimulateRequest {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicates;
  unsigned threads = 0;
  std::filesystem::path out_dir = ".";
};

/// Exit codes shared by the command-line entry points.
enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitSolver = 3 };

/// One grid cell of a simulation config.
struct SimulationCell {
  ScenarioConfig scenario;
  std::string label;
};

struct SimulationPlan {
  std::vector<SimulationCell> cells;
  std::vector<Method> methods;
  ExperimentOptions options;
};

/// Expands the grid in a simulation config. Throws invalid_spec (kind config) naming offending cells.
SimulationPlan parse_simulation_config(const nlohmann::json& config);

/// Runs the requested procedure with the seeds and defaults used by the command line.
/// Throws a config error for option combinations that do not apply to the procedure.
DetectionResult detect(const Dataset& data, const DetectRequest& request);

int run_detect(const DetectRequest& request, std::string& message);
int run_simulate(const SimulateRequest& request, std::string& message);

}  // namespace selinfl
