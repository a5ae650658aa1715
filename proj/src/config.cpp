#include "sfrcs/config.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace sfrcs {

using nlohmann::json;

namespace {

// Walks one JSON object, recording which keys were consumed so that
// leftovers can be reported as unknown.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) const { return node_.contains(key) && !node_.at(key).is_null(); }

  void mark(const std::string& key) { seen_.insert(key); }

  const json& at(const std::string& key) {
    seen_.insert(key);
    return node_.at(key);
  }

  void require(const std::string& key, bool needed) {
    if (needed && !has(key)) throw ConfigError(field(key), "missing required field");
  }

  void number(const std::string& key, double& dst) {
    if (!has(key)) {
      seen_.insert(key);
      return;
    }
    const json& v = at(key);
    if (!v.is_number()) throw ConfigError(field(key), "expected a number");
    dst = v.get<double>();
    if (!std::isfinite(dst)) throw ConfigError(field(key), "must be finite");
  }

  void optional_number(const std::string& key, std::optional<double>& dst) {
    seen_.insert(key);
    if (!has(key)) return;
    double v = 0.0;
    number(key, v);
    dst = v;
  }

  void integer(const std::string& key, int& dst) {
    if (!has(key)) {
      seen_.insert(key);
      return;
    }
    const json& v = at(key);
    if (!v.is_number_integer()) throw ConfigError(field(key), "expected an integer");
    const auto wide = v.get<long long>();
    if (wide < std::numeric_limits<int>::min() || wide > std::numeric_limits<int>::max())
      throw ConfigError(field(key), "out of range");
    dst = static_cast<int>(wide);
  }

  void boolean(const std::string& key, bool& dst) {
    if (!has(key)) {
      seen_.insert(key);
      return;
    }
    const json& v = at(key);
    if (!v.is_boolean()) throw ConfigError(field(key), "expected true or false");
    dst = v.get<bool>();
  }

  void string(const std::string& key, std::string& dst) {
    if (!has(key)) {
      seen_.insert(key);
      return;
    }
    const json& v = at(key);
    if (!v.is_string()) throw ConfigError(field(key), "expected a string");
    dst = v.get<std::string>();
  }

  void reject_unknown() const {
    for (auto it = node_.begin(); it != node_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()), "unknown field");
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

double parse_snr(const json& v, const std::string& path) {
  if (v.is_number()) {
    const double s = v.get<double>();
    if (!std::isfinite(s)) throw ConfigError(path, "must be finite");
    return s;
  }
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "noiseless") return kNoiseless;
    if (s == "noise-only") return -kNoiseless;
  }
  throw ConfigError(path, "expected a number, \"noiseless\" or \"noise-only\"");
}

json snr_to_json(double s) {
  if (s == kNoiseless) return "noiseless";
  if (s == -kNoiseless) return "noise-only";
  return s;
}

std::string mu_rule_name(MuRule r) {
  switch (r) {
    case MuRule::fixed: return "fixed";
    case MuRule::automatic: return "automatic";
    case MuRule::formula: return "formula";
  }
  return "?";
}

MuRule parse_mu_rule(const std::string& s, const std::string& path) {
  if (s == "fixed") return MuRule::fixed;
  if (s == "automatic") return MuRule::automatic;
  if (s == "formula") return MuRule::formula;
  throw ConfigError(path, "expected \"fixed\", \"automatic\" or \"formula\"");
}

json optional_to_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

template <typename Fn>
void checked(const std::string& path, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
}

void validate(const RunConfig& rc) {
  const ExperimentConfig& cfg = rc.experiment;
  checked("radar", [&] { cfg.radar.validate(); });
  if (cfg.grid.n_ranges < 1) throw ConfigError("grid.n_ranges", "must be >= 1");
  if (cfg.grid.n_speeds < 1) throw ConfigError("grid.n_speeds", "must be >= 1");
  if (cfg.k_targets < 1 || cfg.k_targets > cfg.grid.n_ranges * cfg.grid.n_speeds)
    throw ConfigError("scene.k_targets", "must lie in [1, n_ranges * n_speeds]");
  if (cfg.adjacency_constraint && cfg.k_targets < 2)
    throw ConfigError("scene.adjacency_constraint", "needs k_targets >= 2");
  if (cfg.n_trials < 1) throw ConfigError("sweep.n_trials", "must be >= 1");
  if (cfg.pulse_counts.empty()) throw ConfigError("sweep.pulse_counts", "must not be empty");
  if (cfg.snr_values.empty()) throw ConfigError("sweep.snr_db", "must not be empty");
  if (cfg.detectors.empty()) throw ConfigError("sweep.detectors", "must not be empty");
  for (std::size_t i = 0; i < cfg.pulse_counts.size(); ++i) {
    const std::string path = "sweep.pulse_counts[" + std::to_string(i) + "]";
    const int n = cfg.pulse_counts[i];
    if (n < 1) throw ConfigError(path, "must be >= 1");
    if (cfg.k_targets > n) throw ConfigError(path, "must be >= scene.k_targets");
    RadarParams p = cfg.radar;
    p.n_pulses = n;
    checked("grid", [&] { cfg.grid.build(p); });
  }
  checked("solver", [&] { cfg.solver.validate(); });
  if (rc.output.directory.empty()) throw ConfigError("output.directory", "must not be empty");
}

}  // namespace

RunConfig preset_config(const std::string& name) {
  RunConfig rc;
  checked("preset", [&] { rc.experiment = preset(name); });
  return rc;
}

RunConfig parse_config(const std::string& text, const std::optional<std::string>& base_preset) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  Section root(doc, "");
  std::optional<std::string> preset_name = base_preset;
  if (root.has("preset")) {
    std::string name;
    root.string("preset", name);
    preset_name = name;
  } else {
    root.mark("preset");
  }
  const bool strict = !preset_name;
  RunConfig rc = preset_name ? preset_config(*preset_name) : RunConfig{};
  ExperimentConfig& cfg = rc.experiment;

  if (root.has("radar")) {
    Section s(root.at("radar"), "radar");
    s.number("f0", cfg.radar.f0);
    s.number("delta_f", cfg.radar.delta_f);
    s.number("pri", cfg.radar.pri);
    s.number("c", cfg.radar.c);
    s.reject_unknown();
  }

  root.require("grid", strict);
  if (root.has("grid")) {
    Section s(root.at("grid"), "grid");
    s.require("n_ranges", strict);
    s.integer("n_ranges", cfg.grid.n_ranges);
    s.integer("n_speeds", cfg.grid.n_speeds);
    s.optional_number("range_start", cfg.grid.range_start);
    s.optional_number("range_step", cfg.grid.range_step);
    s.optional_number("speed_start", cfg.grid.speed_start);
    s.optional_number("speed_step", cfg.grid.speed_step);
    s.reject_unknown();
  }

  root.require("scene", strict);
  if (root.has("scene")) {
    Section s(root.at("scene"), "scene");
    s.require("k_targets", strict);
    s.integer("k_targets", cfg.k_targets);
    s.boolean("adjacency_constraint", cfg.adjacency_constraint);
    if (s.has("amplitudes")) {
      std::string a;
      s.string("amplitudes", a);
      if (a == "unit") cfg.amplitudes = AmplitudeModel::unit;
      else if (a == "uniform") cfg.amplitudes = AmplitudeModel::uniform;
      else throw ConfigError("scene.amplitudes", "expected \"unit\" or \"uniform\"");
    } else {
      s.mark("amplitudes");
    }
    s.reject_unknown();
  }

  if (root.has("solver")) {
    Section s(root.at("solver"), "solver");
    if (s.has("mu_rule")) {
      std::string r;
      s.string("mu_rule", r);
      cfg.solver.mu_rule = parse_mu_rule(r, "solver.mu_rule");
    } else {
      s.mark("mu_rule");
    }
    s.number("mu", cfg.solver.mu);
    s.number("t_param", cfg.solver.t_param);
    if (s.has("epsilon") && s.at("epsilon").is_string()) {
      if (s.at("epsilon").get<std::string>() != "auto")
        throw ConfigError("solver.epsilon", "expected a number or \"auto\"");
      cfg.solver.auto_epsilon = true;
    } else if (s.has("epsilon")) {
      s.number("epsilon", cfg.solver.epsilon);
      cfg.solver.auto_epsilon = false;
    } else {
      s.mark("epsilon");
    }
    s.integer("max_iterations", cfg.solver.max_iterations);
    s.number("feasibility_tol", cfg.solver.feasibility_tol);
    s.reject_unknown();
  }

  root.require("sweep", strict);
  if (root.has("sweep")) {
    Section s(root.at("sweep"), "sweep");
    s.integer("n_trials", cfg.n_trials);
    s.require("pulse_counts", strict);
    if (s.has("pulse_counts")) {
      const json& v = s.at("pulse_counts");
      if (!v.is_array()) throw ConfigError("sweep.pulse_counts", "expected an array of integers");
      cfg.pulse_counts.clear();
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number_integer())
          throw ConfigError("sweep.pulse_counts[" + std::to_string(i) + "]", "expected an integer");
        cfg.pulse_counts.push_back(v[i].get<int>());
      }
    }
    s.require("snr_db", strict);
    if (s.has("snr_db")) {
      const json& v = s.at("snr_db");
      if (!v.is_array()) throw ConfigError("sweep.snr_db", "expected an array");
      cfg.snr_values.clear();
      for (std::size_t i = 0; i < v.size(); ++i)
        cfg.snr_values.push_back(parse_snr(v[i], "sweep.snr_db[" + std::to_string(i) + "]"));
    }
    s.require("detectors", strict);
    if (s.has("detectors")) {
      const json& v = s.at("detectors");
      if (!v.is_array()) throw ConfigError("sweep.detectors", "expected an array of names");
      cfg.detectors.clear();
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string path = "sweep.detectors[" + std::to_string(i) + "]";
        if (!v[i].is_string()) throw ConfigError(path, "expected a detector name");
        checked(path, [&] { cfg.detectors.push_back(parse_detector(v[i].get<std::string>())); });
      }
    }
    s.reject_unknown();
  }

  if (root.has("output")) {
    Section s(root.at("output"), "output");
    s.string("directory", rc.output.directory);
    s.boolean("record_timing", cfg.record_timing);
    s.reject_unknown();
  }

  if (root.has("master_seed")) {
    const json& v = root.at("master_seed");
    if (!v.is_number_unsigned()) throw ConfigError("master_seed", "expected a non-negative integer");
    cfg.master_seed = v.get<std::uint64_t>();
  } else {
    root.mark("master_seed");
  }
  for (const char* key : {"radar", "grid", "scene", "solver", "sweep", "output"})
    if (!root.has(key)) root.mark(key);
  root.reject_unknown();

  if (!cfg.pulse_counts.empty()) cfg.radar.n_pulses = cfg.pulse_counts.front();
  validate(rc);
  return rc;
}

RunConfig load_config(const std::string& path, const std::optional<std::string>& base_preset) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), base_preset);
}

std::string serialize_config(const RunConfig& rc) {
  const ExperimentConfig& cfg = rc.experiment;
  json doc;
  doc["radar"] = {{"f0", cfg.radar.f0}, {"delta_f", cfg.radar.delta_f}, {"pri", cfg.radar.pri}, {"c", cfg.radar.c}};
  doc["grid"] = {{"n_ranges", cfg.grid.n_ranges},
                 {"n_speeds", cfg.grid.n_speeds},
                 {"range_start", optional_to_json(cfg.grid.range_start)},
                 {"range_step", optional_to_json(cfg.grid.range_step)},
                 {"speed_start", optional_to_json(cfg.grid.speed_start)},
                 {"speed_step", optional_to_json(cfg.grid.speed_step)}};
  doc["scene"] = {{"k_targets", cfg.k_targets},
                  {"adjacency_constraint", cfg.adjacency_constraint},
                  {"amplitudes", cfg.amplitudes == AmplitudeModel::unit ? "unit" : "uniform"}};
  doc["solver"] = {{"mu_rule", mu_rule_name(cfg.solver.mu_rule)},
                   {"mu", cfg.solver.mu},
                   {"t_param", cfg.solver.t_param},
                   {"epsilon", cfg.solver.auto_epsilon ? json("auto") : json(cfg.solver.epsilon)},
                   {"max_iterations", cfg.solver.max_iterations},
                   {"feasibility_tol", cfg.solver.feasibility_tol}};
  json snrs = json::array();
  for (double s : cfg.snr_values) snrs.push_back(snr_to_json(s));
  json dets = json::array();
  for (Detector d : cfg.detectors) dets.push_back(to_string(d));
  doc["sweep"] = {{"n_trials", cfg.n_trials}, {"pulse_counts", cfg.pulse_counts}, {"snr_db", snrs}, {"detectors", dets}};
  doc["output"] = {{"directory", rc.output.directory}, {"record_timing", cfg.record_timing}};
  doc["master_seed"] = cfg.master_seed;
  return doc.dump(2) + "\n";
}

std::string config_digest(const RunConfig& cfg) {
  const std::string text = serialize_config(cfg);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string format_snr(double snr_db) {
  if (snr_db == kNoiseless) return "noiseless";
  if (snr_db == -kNoiseless) return "noise-only";
  return format_number(snr_db);
}

std::string RunManifest::to_json() const {
  json doc{{"config_digest", config_digest},
           {"tool_version", tool_version},
           {"started_utc", started_utc},
           {"finished_utc", finished_utc},
           {"outputs", outputs}};
  return doc.dump(2) + "\n";
}

std::string tool_version() { return SFRCS_VERSION; }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

std::string join_support(const std::vector<int>& cols) {
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(cols[i]);
  }
  return out;
}

}  // namespace

void write_trials_csv(std::ostream& out, const CellReport& cell) {
  out << "trial_index,seed,true_support,detected_support,correct,solve_time_s\n";
  for (const TrialRecord& r : cell.log)
    out << r.trial_index << ',' << r.seed << ',' << join_support(r.true_support) << ','
        << join_support(r.detected_support) << ',' << (r.correct ? 1 : 0) << ','
        << format_number(r.solve_time_s) << '\n';
}

void write_accuracy_csv(std::ostream& out, const AccuracyReport& report) {
  out << "detector,n_pulses,snr_db,trials,correct,accuracy,mean_solve_time_s\n";
  for (const CellReport& c : report.cells)
    out << to_string(c.detector) << ',' << c.n_pulses << ',' << format_snr(c.snr_db) << ',' << c.trials
        << ',' << c.correct << ',' << format_number(c.accuracy) << ',' << format_number(c.mean_solve_time_s)
        << '\n';
}

std::string summary_json(const CellReport& cell, const std::string& digest) {
  int errors = 0;
  for (const TrialRecord& r : cell.log) errors += r.error.empty() ? 0 : 1;
  json doc{{"detector", to_string(cell.detector)},
           {"n_pulses", cell.n_pulses},
           {"snr_db", snr_to_json(cell.snr_db)},
           {"trials", cell.trials},
           {"correct", cell.correct},
           {"accuracy", cell.accuracy},
           {"mean_solve_time_s", cell.mean_solve_time_s},
           {"solver_errors", errors},
           {"config_digest", digest}};
  return doc.dump(2) + "\n";
}

}  // namespace sfrcs
