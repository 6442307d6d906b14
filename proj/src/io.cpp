#include "selinfl/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <system_error>

#include "selinfl/error.hpp"
#include "selinfl/parallel.hpp"

namespace selinfl {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

/// Splits CSV text into records; quoted fields may contain separators, quotes ("") and newlines.
std::vector<std::vector<std::string>> split_records(const std::string& text, const std::string& source) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, was_quoted = false, any = false;
  std::size_t line = 1;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    was_quoted = false;
  };
  auto end_row = [&] {
    end_field();
    if (!(row.size() == 1 && row[0].empty())) records.push_back(std::move(row));
    row.clear();
    any = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (!field.empty() || was_quoted)
          throw ParseError(records.empty() ? 0 : records.size(), "", source + ":" + std::to_string(line) + ": stray quote");
        quoted = was_quoted = any = true;
        break;
      case ',':
        end_field();
        any = true;
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        ++line;
        break;
      default:
        field.push_back(ch);
        any = true;
    }
  }
  if (quoted) throw ParseError(records.size(), "", source + ": unterminated quoted field");
  if (any || !field.empty()) end_row();
  return records;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& raw, std::size_t row, const std::string& column, const std::string& source) {
  std::string s = trim(raw);
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (s.empty() || ec != std::errc() || ptr != last || !std::isfinite(v))
    throw ParseError(row, column,
                     source + ": row " + std::to_string(row) + ", column '" + column + "': not a finite number: '" + raw + "'");
  return v;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::config, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json stat_json(const Stat& s) { return json{{"mean", s.mean}, {"se", s.se}, {"count", s.count}}; }

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_spec:
    case ErrorKind::invalid_subset:
    case ErrorKind::parse:
    case ErrorKind::missing_column:
    case ErrorKind::config:
      return kExitConfig;
    default:
      return kExitSolver;
  }
}

unsigned resolve_threads(unsigned requested) { return requested > 0 ? requested : default_threads(); }

}  // namespace

Dataset parse_csv(const std::string& text, const std::string& response_column, std::vector<std::string>* predictor_names,
                  const std::string& source) {
  const auto records = split_records(text, source);
  if (records.empty()) throw ParseError(0, "", source + ": empty file, header row expected");
  std::vector<std::string> header;
  for (const auto& h : records[0]) header.push_back(trim(h));
  std::set<std::string> seen;
  for (const auto& h : header)
    if (!seen.insert(h).second) throw ParseError(0, h, source + ": duplicate column '" + h + "'");
  std::size_t response = header.size();
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == response_column) response = j;
  if (response == header.size())
    throw Error(ErrorKind::missing_column, source + ": response column '" + response_column + "' not found");
  const std::size_t n = records.size() - 1;
  const std::size_t p = header.size() - 1;
  if (n == 0) throw ParseError(0, "", source + ": no data rows");
  Vector y(static_cast<Eigen::Index>(n));
  Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (std::size_t r = 0; r < n; ++r) {
    const auto& rec = records[r + 1];
    if (rec.size() != header.size())
      throw ParseError(r + 1, "", source + ": row " + std::to_string(r + 1) + " has " + std::to_string(rec.size()) +
                                      " fields, header has " + std::to_string(header.size()));
    Eigen::Index col = 0;
    for (std::size_t j = 0; j < rec.size(); ++j) {
      const double v = parse_number(rec[j], r + 1, header[j], source);
      if (j == response)
        y(static_cast<Eigen::Index>(r)) = v;
      else
        x(static_cast<Eigen::Index>(r), col++) = v;
    }
  }
  if (predictor_names) {
    predictor_names->clear();
    for (std::size_t j = 0; j < header.size(); ++j)
      if (j != response) predictor_names->push_back(header[j]);
  }
  return Dataset(std::move(y), std::move(x));
}

Dataset load_csv(const fs::path& path, const std::string& response_column, std::vector<std::string>* predictor_names) {
  return parse_csv(read_file(path), response_column, predictor_names, path.string());
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw Error(ErrorKind::config, "cannot format number");
  return std::string(buf, ptr);
}

std::string format_csv(const Dataset& data, const std::string& response_column,
                       const std::vector<std::string>& predictor_names) {
  if (!predictor_names.empty() && predictor_names.size() != data.p())
    throw Error(ErrorKind::invalid_spec, "predictor name count does not match the dataset");
  std::string out = quote_if_needed(response_column);
  for (std::size_t j = 0; j < data.p(); ++j)
    out += "," + quote_if_needed(predictor_names.empty() ? "x" + std::to_string(j + 1) : predictor_names[j]);
  out += "\n";
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out += format_double(data.y()(r));
    for (Eigen::Index j = 0; j < data.x().cols(); ++j) out += "," + format_double(data.x()(r, j));
    out += "\n";
  }
  return out;
}

void write_csv(const fs::path& path, const Dataset& data, const std::string& response_column,
               const std::vector<std::string>& predictor_names) {
  write_atomic(path, format_csv(data, response_column, predictor_names));
}

void write_atomic(const fs::path& path, const std::string& contents) {
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path tmp = dir / ("." + path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::config, "cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw Error(ErrorKind::config, "short write to '" + tmp.string() + "'");
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorKind::config, "cannot move output into '" + path.string() + "'");
  }
}

std::string config_digest(const json& config) {
  // nlohmann::json objects keep keys sorted, so dump() is canonical.
  const std::string text = config.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json to_json(const ClusterPartition& partition) {
  json suspect = json::array(), clean = json::array();
  for (auto i : partition.suspect.positions()) suspect.push_back(i);
  for (auto i : partition.clean.positions()) clean.push_back(i);
  return json{{"method", to_string(partition.method)},
              {"labels", partition.labels},
              {"suspect_positions", suspect},
              {"clean_positions", clean},
              {"inertia", partition.inertia},
              {"seed", partition.seed},
              {"size_tie", partition.size_tie}};
}

json to_json(const DetectionResult& result) {
  json points = json::array();
  for (const auto& p : result.per_point)
    points.push_back(json{{"row_id", p.row_id},
                          {"raw", p.raw},
                          {"standardized", p.standardized},
                          {"p_value", p.p_value},
                          {"reject", p.reject}});
  json out{{"influential", result.influential},
           {"per_point", points},
           {"procedure", to_string(result.procedure)},
           {"selector", result.selector ? json(to_string(*result.selector)) : json(nullptr)},
           {"alpha", result.alpha},
           {"alpha0", result.alpha0},
           {"partition", result.partition ? to_json(*result.partition) : json(nullptr)},
           {"wall_time", result.wall_time},
           {"fit_count", result.fit_count},
           {"skipped_subsets", result.skipped_subsets},
           {"fell_back", result.fell_back},
           {"warnings", result.warnings}};
  return out;
}

json to_json(const MetricsReport& r) {
  return json{{"method", r.method},
              {"replicates", r.replicates},
              {"failures", r.failures},
              {"A_power", stat_json(r.power)},
              {"B_fpr", stat_json(r.fpr)},
              {"C_mse", {{"before", stat_json(r.mse_before)}, {"after", stat_json(r.mse_after)}}},
              {"D_select_prob",
               {{"before", stat_json(r.select_prob_before)}, {"after", stat_json(r.select_prob_after)}}},
              {"E_time", stat_json(r.time_seconds)}};
}

std::string scores_csv(const DetectionResult& result) {
  std::string out = "row_id,raw,standardized,p_value,decision\n";
  for (const auto& p : result.per_point)
    out += std::to_string(p.row_id) + "," + format_double(p.raw) + "," + format_double(p.standardized) + "," +
           format_double(p.p_value) + "," + (p.reject ? "reject" : "keep") + "\n";
  return out;
}

namespace {

std::vector<json> as_list(const json& v) {
  if (v.is_array()) return std::vector<json>(v.begin(), v.end());
  return {v};
}

template <typename T>
T get_scalar(const json& config, const char* key, T fallback) {
  if (!config.contains(key)) return fallback;
  try {
    return config.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::config, std::string("config field '") + key + "' has the wrong type");
  }
}

}  // namespace

SimulationPlan parse_simulation_config(const json& config) {
  static const std::set<std::string> known{"seed",     "replicates", "n",      "p",       "design",      "rho",
                                           "block",    "sigma2",     "scheme", "kappa",   "zeta",        "test_size",
                                           "methods",  "alpha",      "alpha0", "clustering", "rgd_m"};
  if (!config.is_object()) throw Error(ErrorKind::config, "simulation config must be a JSON object");
  for (const auto& [key, value] : config.items())
    if (!known.count(key)) throw Error(ErrorKind::config, "unknown config field '" + key + "'");

  SimulationPlan plan;
  auto& opt = plan.options;
  opt.alpha = get_scalar(config, "alpha", 0.05);
  opt.alpha0 = get_scalar(config, "alpha0", 0.05);
  opt.rgd_m = get_scalar<std::size_t>(config, "rgd_m", 100);
  try {
    opt.clustering = parse_cluster_method(get_scalar<std::string>(config, "clustering", "kmeans++"));
    if (!config.contains("methods")) throw Error(ErrorKind::config, "config needs a 'methods' list");
    for (const auto& m : as_list(config.at("methods"))) plan.methods.push_back(parse_method(m.get<std::string>()));
  } catch (const json::exception&) {
    throw Error(ErrorKind::config, "config field 'methods' must hold strings");
  } catch (const Error& e) {
    throw Error(ErrorKind::config, e.what());
  }
  if (!(opt.alpha > 0 && opt.alpha < 1) || !(opt.alpha0 > 0 && opt.alpha0 < 1))
    throw Error(ErrorKind::config, "alpha and alpha0 must lie in (0, 1)");
  if (opt.rgd_m < 1) throw Error(ErrorKind::config, "rgd_m must be positive");

  ScenarioConfig base;
  base.seed = get_scalar<std::uint64_t>(config, "seed", 0);
  base.replicates = get_scalar<std::size_t>(config, "replicates", 50);
  base.block = get_scalar<std::size_t>(config, "block", 100);
  base.sigma2 = get_scalar(config, "sigma2", 1.0);
  base.test_size = get_scalar<std::size_t>(config, "test_size", 1000);

  auto list = [&](const char* key, json fallback) { return as_list(config.contains(key) ? config.at(key) : fallback); };
  const auto ns = list("n", 100), ps = list("p", 1000), designs = list("design", "spatial"), rhos = list("rho", 0.8),
             schemes = list("scheme", "I"), kappas = list("kappa", 5.0), zetas = list("zeta", 0.2);

  std::vector<std::string> bad;
  std::size_t index = 0;
  for (const auto& n : ns)
    for (const auto& p : ps)
      for (const auto& d : designs)
        for (const auto& rho : rhos)
          for (const auto& sc : schemes)
            for (const auto& kappa : kappas)
              for (const auto& zeta : zetas) {
                const std::string label = "n=" + n.dump() + " p=" + p.dump() + " design=" + d.dump() +
                                          " rho=" + rho.dump() + " scheme=" + sc.dump() + " kappa=" + kappa.dump() +
                                          " zeta=" + zeta.dump();
                try {
                  ScenarioConfig cfg = base;
                  cfg.n = n.get<std::size_t>();
                  cfg.p = p.get<std::size_t>();
                  cfg.design = parse_design(d.get<std::string>());
                  cfg.rho = rho.get<double>();
                  cfg.scheme = parse_scheme(sc.get<std::string>());
                  const double k = kappa.get<double>();
                  cfg.kappa_y = cfg.scheme == Scheme::II ? 0.0 : k;
                  cfg.kappa_x = cfg.scheme == Scheme::I ? 0.0 : k;
                  cfg.zeta = zeta.get<double>();
                  cfg.seed = derive_seed(base.seed, {index});
                  cfg.validate();
                  plan.cells.push_back({cfg, label});
                } catch (const std::exception& e) {
                  bad.push_back("[" + label + "] " + e.what());
                }
                ++index;
              }
  if (!bad.empty()) {
    std::string what = "invalid grid cell(s):";
    for (const auto& b : bad) what += "\n  " + b;
    throw Error(ErrorKind::config, what);
  }
  return plan;
}

DetectionResult detect(const Dataset& data, const DetectRequest& req) {
  const Procedure procedure = parse_procedure(req.procedure);
  auto config_error = [](const std::string& what) { throw Error(ErrorKind::config, what); };
  if (req.selector && !uses_selector(procedure))
    config_error(std::string("--selector does not apply to ") + to_string(procedure) + ", which is selector-free");
  if (req.alpha0 && procedure != Procedure::clusmip) config_error("--alpha0 applies only to clusmip");
  if (req.clustering && procedure != Procedure::clusmip) config_error("--clustering applies only to clusmip");
  if ((req.rgd_m || req.rgd_n_sub) && procedure != Procedure::mip) config_error("RGD options apply only to mip");
  SelectorSpec spec;
  spec.penalty = req.selector ? parse_penalty(*req.selector)
                              : (procedure == Procedure::df_lasso ? Penalty::lasso : Penalty::scaled_lasso);
  if (procedure == Procedure::df_lasso && spec.penalty != Penalty::lasso)
    config_error("dflasso is defined for the LASSO selector only");
  spec.seed = derive_seed(req.seed, {1});
  const double alpha = req.alpha.value_or(0.05);
  const double alpha0 = req.alpha0.value_or(0.05);
  if (!(alpha > 0 && alpha < 1) || !(alpha0 > 0 && alpha0 < 1)) config_error("levels must lie in (0, 1)");
  const unsigned threads = resolve_threads(req.threads);

  DetectionResult result;
  switch (procedure) {
    case Procedure::gdf_single:
      result = detect_single_gdf(data, spec, SingleOptions{alpha, threads, {}});
      break;
    case Procedure::clusmip: {
      ClusmipOptions o;
      o.clustering.method = parse_cluster_method(req.clustering.value_or("kmeans++"));
      o.clustering.seed = derive_seed(req.seed, {2});
      o.clustering.threads = threads;
      o.alpha0 = alpha0;
      o.alpha = alpha;
      o.threads = threads;
      result = clusmip(data, spec, o);
      break;
    }
    case Procedure::mip: {
      MipOptions o;
      o.rgd.m = req.rgd_m.value_or(100);
      o.rgd.n_sub = req.rgd_n_sub.value_or(0);
      o.rgd.seed = derive_seed(req.seed, {3});
      o.alpha = alpha;
      o.threads = threads;
      result = mip(data, o);
      break;
    }
    case Procedure::df_lasso:
      result = df_lasso_detect(data, spec, threads);
      break;
    case Procedure::him:
      result = him_detect(data, alpha);
      break;
  }
  return result;
}

int run_detect(const DetectRequest& req, std::string& message) {
  const auto started = std::chrono::system_clock::now();
  try {
    const Dataset data = load_csv(req.input, req.response);
    const DetectionResult result = detect(data, req);
    const Procedure procedure = result.procedure;
    const unsigned threads = resolve_threads(req.threads);
    const double alpha = req.alpha.value_or(0.05);
    const double alpha0 = req.alpha0.value_or(0.05);

    json cfg{{"input", req.input.string()},
             {"response", req.response},
             {"procedure", to_string(procedure)},
             {"selector", result.selector ? json(to_string(*result.selector)) : json(nullptr)},
             {"alpha", alpha},
             {"alpha0", alpha0},
             {"clustering", req.clustering.value_or("kmeans++")},
             {"rgd_m", req.rgd_m.value_or(100)},
             {"rgd_n_sub", req.rgd_n_sub.value_or(0)},
             {"seed", req.seed}};
    json manifest{{"tool", "selinfl"},
                  {"version", kToolVersion},
                  {"command", "detect"},
                  {"config", cfg},
                  {"config_digest", config_digest(cfg)},
                  {"seed", req.seed},
                  {"threads", threads},
                  {"started", utc_timestamp(started)},
                  {"finished", utc_timestamp(std::chrono::system_clock::now())},
                  {"wall_times", {{to_string(procedure), result.wall_time}}}};
    const std::string result_text = to_json(result).dump(2) + "\n";
    const std::string scores_text = scores_csv(result);
    write_atomic(req.out_dir / "result.json", result_text);
    write_atomic(req.out_dir / "scores.csv", scores_text);
    write_atomic(req.out_dir / "manifest.json", manifest.dump(2) + "\n");
    message = std::to_string(result.influential.size()) + " influential row(s) flagged";
    for (const auto& w : result.warnings) message += "\nwarning: " + w;
    return kExitOk;
  } catch (const Error& e) {
    message = std::string(to_string(e.kind())) + ": " + e.what();
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    message = std::string("solver failure: ") + e.what();
    return kExitSolver;
  }
}

int run_simulate(const SimulateRequest& req, std::string& message) {
  const auto started = std::chrono::system_clock::now();
  try {
    json config;
    try {
      config = json::parse(read_file(req.config));
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::config, "malformed config: " + std::string(e.what()));
    }
    if (req.seed) config["seed"] = *req.seed;
    if (req.replicates) config["replicates"] = *req.replicates;
    SimulationPlan plan = parse_simulation_config(config);
    plan.options.threads = resolve_threads(req.threads);

    std::string metrics = "cell,n,p,design,rho,scheme,kappa_y,kappa_x,zeta,replicate,method,metric,value\n";
    std::string plot_power = "cell,scheme,kappa_y,kappa_x,zeta,method,mean,se,count\n";
    std::string plot_fpr = plot_power, plot_time = plot_power;
    std::string plot_mse = "cell,scheme,kappa_y,kappa_x,zeta,method,stage,mean,se,count\n";
    std::string plot_sel = plot_mse;
    json cells = json::array();
    std::map<std::string, double> wall;
    std::size_t failures = 0;

    for (std::size_t c = 0; c < plan.cells.size(); ++c) {
      const auto& cell = plan.cells[c];
      const auto& s = cell.scenario;
      const ExperimentReport rep = run_experiment(s, plan.methods, plan.options);
      const std::string key = std::to_string(c) + "," + std::to_string(s.n) + "," + std::to_string(s.p) + "," +
                              to_string(s.design) + "," + format_double(s.rho) + "," + to_string(s.scheme) + "," +
                              format_double(s.kappa_y) + "," + format_double(s.kappa_x) + "," + format_double(s.zeta);
      const std::string short_key = std::to_string(c) + "," + to_string(s.scheme) + "," + format_double(s.kappa_y) +
                                    "," + format_double(s.kappa_x) + "," + format_double(s.zeta);
      for (const auto& r : rep.records)
        metrics += key + "," + std::to_string(r.replicate) + "," + r.method + "," + r.metric + "," +
                   format_double(r.value) + "\n";
      json reports = json::array();
      for (const auto& m : rep.reports) {
        auto row = [&](const Stat& st) {
          return format_double(st.mean) + "," + format_double(st.se) + "," + std::to_string(st.count) + "\n";
        };
        plot_power += short_key + "," + m.method + "," + row(m.power);
        plot_fpr += short_key + "," + m.method + "," + row(m.fpr);
        plot_time += short_key + "," + m.method + "," + row(m.time_seconds);
        if (m.mse_before.count > 0) {
          plot_mse += short_key + "," + m.method + ",before," + row(m.mse_before);
          plot_mse += short_key + "," + m.method + ",after," + row(m.mse_after);
          plot_sel += short_key + "," + m.method + ",before," + row(m.select_prob_before);
          plot_sel += short_key + "," + m.method + ",after," + row(m.select_prob_after);
        }
        wall[m.method] += m.time_seconds.mean * static_cast<double>(m.time_seconds.count);
        failures += m.failures;
        reports.push_back(to_json(m));
      }
      cells.push_back(json{{"cell", c}, {"label", cell.label}, {"methods", reports}, {"failures", rep.failure_messages}});
    }

    json manifest{{"tool", "selinfl"},
                  {"version", kToolVersion},
                  {"command", "simulate"},
                  {"config", config},
                  {"config_digest", config_digest(config)},
                  {"seed", config.value("seed", 0)},
                  {"threads", plan.options.threads},
                  {"started", utc_timestamp(started)},
                  {"finished", utc_timestamp(std::chrono::system_clock::now())},
                  {"wall_times", wall}};
    json summary{{"cells", cells}, {"config_digest", config_digest(config)}};
    write_atomic(req.out_dir / "metrics.csv", metrics);
    write_atomic(req.out_dir / "plot_power.csv", plot_power);
    write_atomic(req.out_dir / "plot_fpr.csv", plot_fpr);
    write_atomic(req.out_dir / "plot_mse.csv", plot_mse);
    write_atomic(req.out_dir / "plot_select_prob.csv", plot_sel);
    write_atomic(req.out_dir / "plot_time.csv", plot_time);
    write_atomic(req.out_dir / "summary.json", summary.dump(2) + "\n");
    write_atomic(req.out_dir / "manifest.json", manifest.dump(2) + "\n");
    message = std::to_string(plan.cells.size()) + " cell(s) simulated";
    if (failures > 0) message += ", " + std::to_string(failures) + " failed replicate(s) excluded";
    return kExitOk;
  } catch (const Error& e) {
    message = std::string(to_string(e.kind())) + ": " + e.what();
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    message = std::string("failure: ") + e.what();
    return kExitSolver;
  }
}

}  // namespace selinfl
