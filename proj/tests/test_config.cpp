#include <doctest.h>

#include <clocale>
#include <sstream>

#include "sfrcs/config.hpp"

using namespace sfrcs;

namespace {

const char* kMinimal = R"({
  "grid": {"n_ranges": 40},
  "scene": {"k_targets": 3},
  "sweep": {"pulse_counts": [30], "snr_db": [10], "detectors": ["omp"]}
})";

std::string field_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<none>";
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("minimal config and defaults") {
  const RunConfig rc = parse_config(kMinimal);
  CHECK(rc.experiment.grid.n_ranges == 40);
  CHECK(rc.experiment.grid.n_speeds == 1);
  CHECK(rc.experiment.k_targets == 3);
  CHECK(rc.experiment.radar.n_pulses == 30);
  CHECK(rc.experiment.solver.mu_rule == MuRule::automatic);
  CHECK(rc.experiment.solver.auto_epsilon);
  CHECK(rc.output.directory == "results");
}

TEST_CASE("errors name the field") {
  CHECK(field_of(R"({"grid": {"n_ranges": 40}, "sweep": {"pulse_counts": [30], "snr_db": [10], "detectors": ["omp"]}, "scene": {}})") ==
        "scene.k_targets");
  CHECK(field_of(R"({"grid": {"n_ranges": 40}, "scene": {"k_targets": 3}, "sweep": {"pulse_counts": [30], "snr_db": [10], "detectors": ["fft"]}})") ==
        "sweep.detectors[0]");
  CHECK(field_of(R"({"grid": {"n_ranges": 40, "colour": 1}, "scene": {"k_targets": 3}, "sweep": {"pulse_counts": [30], "snr_db": [10], "detectors": ["omp"]}})") ==
        "grid.colour");
  CHECK(field_of(R"({"grid": {"n_ranges": "forty"}, "scene": {"k_targets": 3}, "sweep": {"pulse_counts": [30], "snr_db": [10], "detectors": ["omp"]}})") ==
        "grid.n_ranges");
  CHECK(field_of(R"({"grid": {"n_ranges": 40}, "scene": {"k_targets": 3}, "sweep": {"pulse_counts": [30, 0], "snr_db": [10], "detectors": ["omp"]}})") ==
        "sweep.pulse_counts[1]");
  CHECK(field_of(R"({"grid": {"n_ranges": 40}, "scene": {"k_targets": 3}, "sweep": {"pulse_counts": [30], "snr_db": ["loud"], "detectors": ["omp"]}})") ==
        "sweep.snr_db[0]");
  CHECK(field_of(R"({"preset": "moving-paper", "radar": {"f0": -1}})") == "radar");
  CHECK(field_of(R"({"preset": "moving-paper", "solver": {"mu_rule": "fixed"}})") == "solver");
  CHECK(field_of("{not json") == "");
  CHECK(field_of("[1, 2]") == "");
  CHECK(field_of(R"({"preset": "fig9"})") == "preset");
}

TEST_CASE("presets as a base") {
  const RunConfig rc = parse_config(R"({"preset": "moving-paper", "sweep": {"pulse_counts": [100, 130]}})");
  CHECK(rc.experiment.grid.n_speeds == 6);
  CHECK(rc.experiment.pulse_counts == std::vector<int>{100, 130});
  CHECK(serialize_config(preset_config("stationary-paper")) ==
        serialize_config(parse_config("{}", std::string("stationary-paper"))));
}

TEST_CASE("round trip is digest-equal") {
  RunConfig rc = parse_config(R"({
    "preset": "moving-paper",
    "radar": {"pri": 0.002},
    "grid": {"speed_step": 12.5},
    "solver": {"mu_rule": "formula", "t_param": 3, "epsilon": 0.25},
    "sweep": {"snr_db": ["noiseless", -3.5, "noise-only"], "detectors": ["bpdn", "idft"]},
    "output": {"directory": "out/x", "record_timing": true},
    "master_seed": 18446744073709551615
  })");
  const std::string text = serialize_config(rc);
  const RunConfig again = parse_config(text);
  CHECK(serialize_config(again) == text);
  CHECK(config_digest(again) == config_digest(rc));
  CHECK(again.experiment.master_seed == 18446744073709551615ULL);
  CHECK(again.experiment.snr_values[0] == kNoiseless);
  CHECK(again.experiment.snr_values[2] == -kNoiseless);
  CHECK(again.experiment.grid.speed_step == 12.5);
  CHECK_FALSE(again.experiment.grid.range_step.has_value());

  for (const std::string& name : preset_names()) {
    const RunConfig p = preset_config(name);
    CHECK(config_digest(parse_config(serialize_config(p))) == config_digest(p));
  }
}

TEST_CASE("digest") {
  const RunConfig a = parse_config(kMinimal);
  RunConfig b = a;
  CHECK(config_digest(a) == config_digest(b));
  CHECK(config_digest(a).size() == 64);
  b.experiment.master_seed = 2;
  CHECK(config_digest(a) != config_digest(b));
}

TEST_CASE("number formatting is locale independent") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.3333333333333333");
  CHECK(format_number(1e-20) == "1e-20");
  CHECK(format_number(kNoiseless) == "inf");
  CHECK(format_snr(kNoiseless) == "noiseless");
  CHECK(format_snr(-kNoiseless) == "noise-only");
  CHECK(format_snr(-2.5) == "-2.5");
  if (std::setlocale(LC_NUMERIC, "de_DE.UTF-8")) {
    CHECK(format_number(0.5) == "0.5");
    std::setlocale(LC_NUMERIC, "C");
  }
}

TEST_CASE("report writers") {
  CellReport cell;
  cell.detector = Detector::omp;
  cell.n_pulses = 30;
  cell.snr_db = 10.0;
  cell.trials = 2;
  cell.correct = 1;
  cell.accuracy = 0.5;
  TrialRecord r0;
  r0.trial_index = 0;
  r0.seed = 99;
  r0.true_support = {1, 5};
  r0.detected_support = {1, 5};
  r0.correct = true;
  TrialRecord r1 = r0;
  r1.trial_index = 1;
  r1.detected_support = {2};
  r1.correct = false;
  cell.log = {r0, r1};

  std::ostringstream trials;
  write_trials_csv(trials, cell);
  CHECK(trials.str() ==
        "trial_index,seed,true_support,detected_support,correct,solve_time_s\n"
        "0,99,1 5,1 5,1,0\n"
        "1,99,1 5,2,0,0\n");

  AccuracyReport rep;
  rep.cells = {cell};
  rep.cells[0].log.clear();
  std::ostringstream acc;
  write_accuracy_csv(acc, rep);
  CHECK(acc.str() ==
        "detector,n_pulses,snr_db,trials,correct,accuracy,mean_solve_time_s\n"
        "omp,30,10,2,1,0.5,0\n");

  CHECK(summary_json(cell, "abc").find("\"accuracy\": 0.5") != std::string::npos);

  RunManifest m{"abc", tool_version(), "2020-01-01T00:00:00Z", "2020-01-01T00:00:01Z", {"x/accuracy.csv"}};
  CHECK(m.to_json().find("\"tool_version\": \"0.1.0\"") != std::string::npos);
  CHECK(utc_timestamp().size() == 20);
}

}  // TEST_SUITE
