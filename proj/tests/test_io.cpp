#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "helpers.hpp"
#include "selinfl/io.hpp"

using namespace selinfl;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("selinfl_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + SELINFL_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("small csv parses") {
  std::vector<std::string> names;
  const Dataset d = parse_csv("a,y,b\n1,2,3\n4,5,6\n7,8,9.5\n", "y", &names);
  CHECK(d.n() == 3);
  CHECK(d.p() == 2);
  CHECK(names == std::vector<std::string>{"a", "b"});
  CHECK(d.y() == (Vector(3) << 2, 5, 8).finished());
  CHECK(d.x()(2, 1) == 9.5);
  CHECK(d.row_ids() == std::vector<int>{1, 2, 3});
}

TEST_CASE("csv errors carry their location") {
  try {
    parse_csv("y,x1,x2\n1,2,3\n4,NaN,6\n", "y");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.row() == 2);
    CHECK(e.column() == "x1");
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_csv("y,x1\n1,inf\n", "y"), ParseError);
  CHECK_THROWS_AS(parse_csv("y,x1\n1,\n", "y"), ParseError);
  CHECK_THROWS_AS(parse_csv("y,x1\n1,2,3\n", "y"), ParseError);
  CHECK_THROWS_AS(parse_csv("y,x1,x1\n1,2,3\n", "y"), ParseError);
  CHECK_THROWS_AS(parse_csv("", "y"), ParseError);
  try {
    parse_csv("a,b\n1,2\n", "y");
    FAIL("expected a missing column");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::missing_column);
  }
  CHECK_THROWS_AS(load_csv("/nonexistent/file.csv", "y"), Error);
}

TEST_CASE("csv quoting and whitespace") {
  std::vector<std::string> names;
  const Dataset d = parse_csv("\"resp\",\"x,1\"\r\n 1 ,+2\r\n3,4e-1\r\n", "resp", &names);
  CHECK(names == std::vector<std::string>{"x,1"});
  CHECK(d.y()(0) == 1.0);
  CHECK(d.x()(0, 0) == 2.0);
  CHECK(d.x()(1, 0) == 0.4);
}

TEST_CASE("csv round trip is exact") {
  Rng rng(11);
  const Matrix x = testing::gaussian_matrix(25, 6, rng) * 1e3;
  const Vector y = testing::gaussian_matrix(25, 1, rng).col(0) / 7.0;
  const Dataset d(y, x);
  const std::vector<std::string> names{"a", "b", "c", "d", "e", "f"};
  std::vector<std::string> back_names;
  const Dataset back = parse_csv(format_csv(d, "resp", names), "resp", &back_names);
  CHECK(back == d);
  CHECK(back_names == names);

  const fs::path dir = scratch_dir("roundtrip");
  write_csv(dir / "d.csv", d);
  CHECK(load_csv(dir / "d.csv", "y") == d);
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("atomic writes replace whole files") {
  const fs::path dir = scratch_dir("atomic");
  write_atomic(dir / "out.txt", "first\n");
  write_atomic(dir / "out.txt", "second\n");
  CHECK(slurp(dir / "out.txt") == "second\n");
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    (void)entry;
    ++files;
  }
  CHECK(files == 1);
  write_atomic(dir / "nested" / "deep.txt", "x");
  CHECK(slurp(dir / "nested" / "deep.txt") == "x");
}

TEST_CASE("config digest tracks content") {
  const json a{{"n", 100}, {"p", 300}, {"methods", {"mip"}}};
  const json b = json::parse(R"j({"methods":["mip"],"p":300,"n":100})j");
  json c = a;
  c["p"] = 301;
  CHECK(config_digest(a) == config_digest(b));
  CHECK(config_digest(a) != config_digest(c));
  CHECK(config_digest(a).size() == 16);
}

TEST_CASE("simulation config expands the grid") {
  const json cfg = json::parse(R"j({"n": 100, "p": [200, 300], "scheme": ["I", "II"], "kappa": 5,
                                   "zeta": [0.1, 0.2], "methods": ["mip", "clusmip(slasso)"], "seed": 3})j");
  const SimulationPlan plan = parse_simulation_config(cfg);
  REQUIRE(plan.cells.size() == 8);
  CHECK(plan.methods.size() == 2);
  CHECK(plan.cells[0].scenario.p == 200);
  CHECK(plan.cells[0].scenario.kappa_y == 5.0);
  CHECK(plan.cells[0].scenario.kappa_x == 0.0);
  CHECK(plan.cells[2].scenario.scheme == Scheme::II);
  CHECK(plan.cells[2].scenario.kappa_x == 5.0);
  CHECK(plan.cells[2].scenario.kappa_y == 0.0);
  CHECK(plan.cells[0].scenario.seed != plan.cells[1].scenario.seed);
}

TEST_CASE("simulation config errors name the cells") {
  const json cfg = json::parse(R"j({"n": 100, "zeta": [0.2, 0.105, 0.75], "methods": ["mip"]})j");
  try {
    parse_simulation_config(cfg);
    FAIL("expected a config error");
  } catch (const Error& e) {
    const std::string what = e.what();
    CHECK(e.kind() == ErrorKind::config);
    CHECK(what.find("zeta=0.105") != std::string::npos);
    CHECK(what.find("zeta=0.75") != std::string::npos);
    CHECK(what.find("zeta=0.2]") == std::string::npos);
  }
  CHECK_THROWS_AS(parse_simulation_config(json::parse(R"j({"methods": ["bogus"]})j")), Error);
  CHECK_THROWS_AS(parse_simulation_config(json::parse(R"j({"methods": ["mip"], "colour": 1})j")), Error);
  CHECK_THROWS_AS(parse_simulation_config(json::parse(R"j({"n": 100})j")), Error);
  CHECK_THROWS_AS(parse_simulation_config(json::parse(R"j({"methods": ["mip"], "alpha": 1.5})j")), Error);
}

TEST_CASE("scores table layout") {
  DetectionResult r;
  r.per_point = {{1, 0.5, 1.25, 0.01, true}, {2, 0.1, -0.5, 0.9, false}};
  CHECK(scores_csv(r) == "row_id,raw,standardized,p_value,decision\n1,0.5,1.25,0.01,reject\n2,0.1,-0.5,0.9,keep\n");
  r.influential = {1};
  const json j = to_json(r);
  CHECK(j["influential"] == json{1});
  CHECK(j["per_point"][1]["reject"] == false);
}

TEST_CASE("command line detect") {
  const fs::path dir = scratch_dir("cli");
  write_csv(dir / "clean.csv", testing::sparse_linear(100, 300, 21));

  const std::string in = "--input \"" + (dir / "clean.csv").string() + "\"";
  CHECK(run_cli("detect " + in + " --procedure clusmip --selector slasso --seed 4 --threads 1 --out-dir \"" +
                (dir / "a").string() + "\"") == 0);
  const json result = json::parse(slurp(dir / "a" / "result.json"));
  CHECK(result["influential"].empty());
  CHECK(result["per_point"].size() == result["partition"]["suspect_positions"].size());
  const json manifest = json::parse(slurp(dir / "a" / "manifest.json"));
  CHECK(manifest["config"]["selector"] == "scaled_lasso");
  CHECK(manifest["config_digest"] == config_digest(manifest["config"]));

  CHECK(run_cli("detect " + in + " --procedure clusmip --selector slasso --seed 4 --threads 2 --out-dir \"" +
                (dir / "b").string() + "\"") == 0);
  CHECK(slurp(dir / "a" / "scores.csv") == slurp(dir / "b" / "scores.csv"));

  CHECK(run_cli("detect " + in + " --procedure mip --selector lasso --out-dir \"" + (dir / "c").string() + "\"") ==
        2);
  CHECK_FALSE(fs::exists(dir / "c" / "result.json"));
  CHECK(run_cli("detect " + in + " --procedure dflasso --selector mcp --out-dir \"" + (dir / "c").string() + "\"") ==
        2);
  CHECK(run_cli("detect " + in + " --procedure nope") == 2);
  CHECK(run_cli("detect " + in + " --response missing --out-dir \"" + (dir / "c").string() + "\"") == 2);
  CHECK(run_cli("detect --input \"" + (dir / "absent.csv").string() + "\"") == 2);
  CHECK(run_cli("--version") == 0);

  spit(dir / "flat.csv", "y,x1,x2\n1,1,5\n2,1,3\n3,1,8\n4,1,2\n5,1,9\n6,1,1\n7,1,4\n8,1,6\n9,1,7\n10,1,0\n");
  CHECK(run_cli("detect --input \"" + (dir / "flat.csv").string() + "\" --procedure him --out-dir \"" +
                (dir / "d").string() + "\"") == 3);
  CHECK_FALSE(fs::exists(dir / "d" / "result.json"));
}

TEST_CASE("command line simulate") {
  const fs::path dir = scratch_dir("cli_sim");
  spit(dir / "bad.json", "{\"n\": 100, ");
  CHECK(run_cli("simulate --config \"" + (dir / "bad.json").string() + "\" --out-dir \"" + (dir / "bad").string() +
                "\"") == 2);
  CHECK_FALSE(fs::exists(dir / "bad" / "manifest.json"));
  spit(dir / "cell.json", R"j({"n": 100, "zeta": 0.333, "methods": ["mip"]})j");
  CHECK(run_cli("simulate --config \"" + (dir / "cell.json").string() + "\" --out-dir \"" + (dir / "bad").string() +
                "\"") == 2);
  CHECK_FALSE(fs::exists(dir / "bad"));

  spit(dir / "ok.json", R"j({"n": 40, "p": 30, "block": 10, "zeta": 0.1, "replicates": 2, "test_size": 100,
                            "methods": ["him", "clusmip(slasso)"], "seed": 9})j");
  const std::string args = "simulate --config \"" + (dir / "ok.json").string() + "\" --threads 1 --out-dir ";
  CHECK(run_cli(args + "\"" + (dir / "x").string() + "\"") == 0);
  CHECK(run_cli(args + "\"" + (dir / "y").string() + "\" --replicates 2") == 0);
  for (const char* f : {"metrics.csv", "plot_power.csv", "plot_fpr.csv", "plot_mse.csv", "plot_select_prob.csv",
                        "plot_time.csv", "summary.json", "manifest.json"})
    CHECK(fs::exists(dir / "x" / f));
  CHECK(slurp(dir / "x" / "plot_power.csv") == slurp(dir / "y" / "plot_power.csv"));
  CHECK(slurp(dir / "x" / "plot_mse.csv") == slurp(dir / "y" / "plot_mse.csv"));
  const json summary = json::parse(slurp(dir / "x" / "summary.json"));
  CHECK(summary["cells"][0]["methods"][1]["method"] == "clusmip(slasso)");
  CHECK(summary["cells"][0]["methods"][1]["replicates"] == 2);
}
