#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfrcs/experiments.hpp"

namespace sfrcs {

/// Invalid or malformed configuration. `path` names the offending field,
/// e.g. "scene.k_targets".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& reason)
      : std::runtime_error(path.empty() ? reason : path + ": " + reason), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct OutputSpec {
  std::string directory = "results";
};

/// Everything a CLI run needs, with all defaults applied.
struct RunConfig {
  ExperimentConfig experiment;
  OutputSpec output;
};

/// Parses a JSON document. A top-level "preset" key (or `base_preset`)
/// selects the starting values; without one, grid.n_ranges,
/// scene.k_targets and the sweep axes are required. Unknown keys are errors.
RunConfig parse_config(const std::string& text, const std::optional<std::string>& base_preset = {});
RunConfig load_config(const std::string& path, const std::optional<std::string>& base_preset = {});
RunConfig preset_config(const std::string& name);

/// Fully resolved JSON form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& cfg);

/// Hex SHA-256 of serialize_config(cfg).
std::string config_digest(const RunConfig& cfg);

/// Locale-independent shortest round-trip decimal ("inf", "-inf", "nan" for non-finite).
std::string format_number(double value);

/// "noiseless", "noise-only" or the decimal value.
std::string format_snr(double snr_db);

struct RunManifest {
  std::string config_digest;
  std::string tool_version;
  std::string started_utc;
  std::string finished_utc;
  std::vector<std::string> outputs;

  std::string to_json() const;
};

std::string tool_version();
std::string utc_timestamp();

void write_trials_csv(std::ostream& out, const CellReport& cell);
void write_accuracy_csv(std::ostream& out, const AccuracyReport& report);
std::string summary_json(const CellReport& cell, const std::string& digest);

}  // namespace sfrcs
