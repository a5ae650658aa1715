// sfrcs: simulate, sweep and inspect the step-frequency radar CS detectors.
//
//   sfrcs simulate --config run.json --out results/
//   sfrcs sweep --preset moving-paper --threads 4
//   sfrcs dictionary-stats --config run.json
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sfrcs/config.hpp"
#include "sfrcs/dictionary.hpp"
#include "sfrcs/experiments.hpp"

namespace fs = std::filesystem;
using namespace sfrcs;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Options {
  std::string config_path;
  std::string out_dir;
  std::string preset_name;
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, Options& opt, bool with_output) {
  cmd->add_option("--config", opt.config_path, "JSON config file");
  cmd->add_option("--preset", opt.preset_name, "named parameter set (stationary-paper, moving-paper)");
  if (with_output) {
    cmd->add_option("--out", opt.out_dir, "output directory (overrides output.directory)");
    cmd->add_option("--threads", opt.threads, "trial worker threads (0 = all cores)");
  }
}

RunConfig resolve(const Options& opt) {
  const std::optional<std::string> base =
      opt.preset_name.empty() ? std::nullopt : std::optional<std::string>(opt.preset_name);
  if (!opt.config_path.empty()) {
    if (!fs::exists(opt.config_path)) throw ConfigError("--config", "no such file '" + opt.config_path + "'");
    return load_config(opt.config_path, base);
  }
  if (base) return preset_config(*base);
  throw ConfigError("", "either --config or --preset is required");
}

fs::path output_dir(const Options& opt, const RunConfig& cfg) {
  fs::path dir = opt.out_dir.empty() ? fs::path(cfg.output.directory) : fs::path(opt.out_dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

void log_cell(const CellReport& c) {
  std::cerr << to_string(c.detector) << " N=" << c.n_pulses << " snr=" << format_snr(c.snr_db)
            << " accuracy=" << format_number(c.accuracy) << " (" << c.correct << "/" << c.trials << ")\n";
}

int cmd_simulate(const Options& opt) {
  RunConfig cfg = resolve(opt);
  const std::string digest = config_digest(cfg);
  ExperimentConfig one = cfg.experiment;
  one.detectors.resize(1);
  one.pulse_counts.resize(1);
  one.snr_values.resize(1);

  RunManifest manifest{digest, tool_version(), utc_timestamp(), "", {}};
  const fs::path dir = output_dir(opt, cfg);
  const AccuracyReport report = sweep(one, opt.threads, log_cell);
  const CellReport& cell = report.cells.front();

  std::ostringstream trials;
  write_trials_csv(trials, cell);
  write_file(dir / "trials.csv", trials.str());
  write_file(dir / "summary.json", summary_json(cell, digest));
  manifest.finished_utc = utc_timestamp();
  manifest.outputs = {(dir / "trials.csv").string(), (dir / "summary.json").string()};
  write_file(dir / "manifest.json", manifest.to_json());
  return 0;
}

int cmd_sweep(const Options& opt) {
  RunConfig cfg = resolve(opt);
  RunManifest manifest{config_digest(cfg), tool_version(), utc_timestamp(), "", {}};
  const fs::path dir = output_dir(opt, cfg);
  const AccuracyReport report = sweep(cfg.experiment, opt.threads, log_cell);

  std::ostringstream acc;
  write_accuracy_csv(acc, report);
  write_file(dir / "accuracy.csv", acc.str());
  manifest.finished_utc = utc_timestamp();
  manifest.outputs = {(dir / "accuracy.csv").string()};
  write_file(dir / "manifest.json", manifest.to_json());
  return 0;
}

int cmd_dictionary_stats(const Options& opt) {
  const RunConfig cfg = resolve(opt);
  RadarParams params = cfg.experiment.radar;
  params.n_pulses = cfg.experiment.pulse_counts.front();
  const Grid grid = cfg.experiment.grid.build(params);
  const Dictionary d = build_dictionary(params, grid);

  const Eigen::VectorXd norms = d.matrix().colwise().norm();
  nlohmann::ordered_json out;
  out["n"] = d.n_pulses();
  out["m"] = d.n_ranges();
  out["l"] = d.n_speeds();
  out["coherence"] = d.n_columns() > 1 ? nlohmann::ordered_json(coherence(d)) : nlohmann::ordered_json(nullptr);
  if (d.n_ranges() >= 2) {
    out["adjacent_corr_modulus_closed_form"] =
        std::abs(adjacent_column_correlation_closed_form(d.n_pulses(), d.n_ranges()));
    out["adjacent_corr_modulus_numerical"] = adjacent_column_correlation(d, 0, 0);
  } else {
    out["adjacent_corr_modulus_closed_form"] = nullptr;
    out["adjacent_corr_modulus_numerical"] = nullptr;
  }
  out["column_norm_min"] = norms.minCoeff();
  out["column_norm_max"] = norms.maxCoeff();
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Step-frequency radar compressive sensing simulator", "sfrcs"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);
  Options opt;
  CLI::App* simulate = app.add_subcommand("simulate", "run the first (detector, N, SNR) cell of a config");
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run every cell and write accuracy.csv");
  CLI::App* stats = app.add_subcommand("dictionary-stats", "print coherence diagnostics as JSON");
  add_common(simulate, opt, true);
  add_common(sweep_cmd, opt, true);
  add_common(stats, opt, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(opt);
    if (sweep_cmd->parsed()) return cmd_sweep(opt);
    return cmd_dictionary_stats(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
