#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "sfrcs/recovery.hpp"
#include "sfrcs/signal_model.hpp"

namespace sfrcs {

enum class Detector { dantzig, omp, bpdn, idft };

std::string to_string(Detector detector);
Detector parse_detector(const std::string& name);

/// Grid shape plus optional explicit axes. Missing axes fall back to
/// Grid::make_default for the pulse count of the run.
struct GridSpec {
  int n_ranges = 100;
  int n_speeds = 1;
  std::optional<double> range_start, range_step;
  std::optional<double> speed_start, speed_step;

  Grid build(const RadarParams& params) const;
};

enum class AmplitudeModel { unit, uniform };

struct ExperimentConfig {
  RadarParams radar;  // n_pulses is overridden per cell by pulse_counts
  GridSpec grid;
  int k_targets = 5;
  bool adjacency_constraint = false;
  AmplitudeModel amplitudes = AmplitudeModel::unit;
  int n_trials = 100;
  std::vector<double> snr_values{kNoiseless};
  std::vector<int> pulse_counts{70};
  std::vector<Detector> detectors{Detector::dantzig, Detector::idft};
  SolverConfig solver = [] {
    SolverConfig s;
    s.auto_epsilon = true;
    return s;
  }();
  std::uint64_t master_seed = 1;
  bool record_timing = false;  // wall-clock fields are written as 0 unless set

  void validate() const;
};

/// Named parameter sets: "stationary-paper", "moving-paper".
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

/// Order-dependent 64-bit mix of the words (splitmix64 finalizer chained
/// from a fixed offset). Stable across platforms.
std::uint64_t hash64(std::initializer_list<std::uint64_t> words);

/// Seed of trial `trial` in cell (detector, n_pulses, snr_db).
std::uint64_t trial_seed(std::uint64_t master_seed, Detector detector, int n_pulses, double snr_db,
                         int trial);

Scene generate_scene(const ExperimentConfig& cfg, std::uint64_t seed);

struct TrialRecord {
  int trial_index = 0;
  std::uint64_t seed = 0;
  std::vector<int> true_support;
  std::vector<int> detected_support;
  bool correct = false;
  double solve_time_s = 0.0;
  std::string error;  // non-empty when the detector failed
};

TrialRecord run_trial(const ExperimentConfig& cfg, int n_pulses, double snr_db, Detector detector,
                      std::uint64_t seed);

struct CellReport {
  Detector detector = Detector::dantzig;
  int n_pulses = 0;
  double snr_db = 0.0;
  int trials = 0;
  int correct = 0;
  double accuracy = 0.0;
  double mean_solve_time_s = 0.0;
  std::vector<TrialRecord> log;  // sorted by trial_index
};

struct AccuracyReport {
  std::vector<CellReport> cells;  // detector-major, then pulse count, then SNR, in config order

  const CellReport* find(Detector detector, int n_pulses, double snr_db) const;
};

using ProgressFn = std::function<void(const CellReport&)>;

/// Runs every (detector, N, SNR) cell. threads = 0 uses the hardware concurrency.
AccuracyReport sweep(const ExperimentConfig& cfg, unsigned threads = 0, const ProgressFn& progress = {});

}  // namespace sfrcs
