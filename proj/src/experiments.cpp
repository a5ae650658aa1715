#include "sfrcs/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

#include "sfrcs/dictionary.hpp"
#include "sfrcs/idft_baseline.hpp"

namespace sfrcs {

std::string to_string(Detector detector) {
  switch (detector) {
    case Detector::dantzig: return "dantzig";
    case Detector::omp: return "omp";
    case Detector::bpdn: return "bpdn";
    case Detector::idft: return "idft";
  }
  return "?";
}

Detector parse_detector(const std::string& name) {
  if (name == "dantzig") return Detector::dantzig;
  if (name == "omp") return Detector::omp;
  if (name == "bpdn") return Detector::bpdn;
  if (name == "idft") return Detector::idft;
  throw std::invalid_argument("unknown detector '" + name + "'");
}

Grid GridSpec::build(const RadarParams& params) const {
  const Grid fallback = Grid::make_default(params, n_ranges, n_speeds);
  auto axis = [](int count, std::optional<double> start, std::optional<double> step,
                 const std::vector<double>& def) {
    if (!start && !step) return def;
    const double s0 = start.value_or(def.front());
    const double ds = step.value_or(def.size() > 1 ? def[1] - def[0] : 1.0);
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = s0 + i * ds;
    return out;
  };
  Grid g(axis(n_ranges, range_start, range_step, fallback.ranges()),
         axis(n_speeds, speed_start, speed_step, fallback.speeds()));
  g.check_against(params);
  return g;
}

void ExperimentConfig::validate() const {
  radar.validate();
  if (grid.n_ranges < 1 || grid.n_speeds < 1) throw std::invalid_argument("grid: M and L must be >= 1");
  const int cells = grid.n_ranges * grid.n_speeds;
  if (k_targets < 1 || k_targets > cells)
    throw std::invalid_argument("k_targets must lie in [1, M*L]");
  if (adjacency_constraint && k_targets < 2)
    throw std::invalid_argument("adjacency_constraint needs k_targets >= 2");
  if (n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
  if (snr_values.empty() || pulse_counts.empty() || detectors.empty())
    throw std::invalid_argument("sweep axes must be non-empty");
  for (int n : pulse_counts)
    if (n < 1) throw std::invalid_argument("pulse_counts must be >= 1");
  for (double s : snr_values)
    if (std::isnan(s)) throw std::invalid_argument("snr_values must not be NaN");
  solver.validate();
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig cfg;
  if (name == "stationary-paper") {
    cfg.radar.f0 = 1.0e6;
    cfg.radar.delta_f = 1.0e4;
    cfg.radar.n_pulses = 70;
    cfg.grid.n_ranges = 100;
    cfg.grid.n_speeds = 1;
    cfg.k_targets = 5;
    cfg.adjacency_constraint = false;
    cfg.pulse_counts = {70};
    cfg.snr_values = {kNoiseless};
  } else if (name == "moving-paper") {
    cfg.radar.f0 = 1.0e8;
    cfg.radar.delta_f = 1.0e5;
    cfg.radar.n_pulses = 130;
    cfg.grid.n_ranges = 40;
    cfg.grid.n_speeds = 6;
    cfg.k_targets = 4;
    cfg.adjacency_constraint = true;
    cfg.pulse_counts = {130};
    cfg.snr_values = {15.0};
  } else {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }
  cfg.n_trials = 100;
  cfg.detectors = {Detector::dantzig, Detector::idft};
  cfg.master_seed = 1;
  return cfg;
}

std::vector<std::string> preset_names() { return {"stationary-paper", "moving-paper"}; }

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t hash64(std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (std::uint64_t w : words) h = splitmix64(h ^ w);
  return h;
}

std::uint64_t trial_seed(std::uint64_t master_seed, Detector detector, int n_pulses, double snr_db,
                         int trial) {
  return hash64({master_seed, static_cast<std::uint64_t>(detector),
                 static_cast<std::uint64_t>(n_pulses), std::bit_cast<std::uint64_t>(snr_db),
                 static_cast<std::uint64_t>(trial)});
}

Scene generate_scene(const ExperimentConfig& cfg, std::uint64_t seed) {
  const int m_count = cfg.grid.n_ranges;
  const int l_count = cfg.grid.n_speeds;
  const int cells = m_count * l_count;
  if (cfg.k_targets > cells) throw std::invalid_argument("generate_scene: k_targets exceeds M*L");
  if (cfg.adjacency_constraint && cfg.k_targets < 2)
    throw std::invalid_argument("generate_scene: adjacency needs at least two targets");

  std::mt19937_64 rng(seed);
  std::vector<int> free(static_cast<std::size_t>(cells));
  std::iota(free.begin(), free.end(), 0);
  std::vector<int> chosen;

  auto take = [&](std::size_t pos) {
    chosen.push_back(free[pos]);
    free.erase(free.begin() + static_cast<std::ptrdiff_t>(pos));
  };
  auto draw_free = [&] {
    std::uniform_int_distribution<std::size_t> pick(0, free.size() - 1);
    take(pick(rng));
  };

  draw_free();
  if (cfg.adjacency_constraint) {
    const int m = chosen[0] / l_count, l = chosen[0] % l_count;
    std::vector<int> neighbours;
    if (m > 0) neighbours.push_back((m - 1) * l_count + l);
    if (m + 1 < m_count) neighbours.push_back((m + 1) * l_count + l);
    if (l > 0) neighbours.push_back(m * l_count + l - 1);
    if (l + 1 < l_count) neighbours.push_back(m * l_count + l + 1);
    if (neighbours.empty()) throw std::invalid_argument("generate_scene: grid has no adjacent points");
    std::uniform_int_distribution<std::size_t> pick(0, neighbours.size() - 1);
    const int second = neighbours[pick(rng)];
    take(static_cast<std::size_t>(std::find(free.begin(), free.end(), second) - free.begin()));
  }
  while (static_cast<int>(chosen.size()) < cfg.k_targets) draw_free();

  std::uniform_real_distribution<double> amplitude(0.5, 1.5);
  std::vector<Target> targets;
  for (int col : chosen) {
    Target t;
    t.range_index = col / l_count;
    t.speed_index = col % l_count;
    t.reflectivity = cfg.amplitudes == AmplitudeModel::unit ? cdouble(1.0, 0.0) : cdouble(amplitude(rng), 0.0);
    targets.push_back(t);
  }
  return Scene(std::move(targets));
}

namespace {

// Per-cell state shared read-only by the trials of one (detector, N) pair.
struct CellContext {
  RadarParams params;
  Grid grid;
  std::optional<Dictionary> dictionary;

  CellContext(const ExperimentConfig& cfg, int n_pulses, Detector detector)
      : params(with_pulses(cfg.radar, n_pulses)), grid(cfg.grid.build(params)) {
    if (detector != Detector::idft) dictionary.emplace(build_dictionary(params, grid));
  }

  static RadarParams with_pulses(RadarParams p, int n) {
    p.n_pulses = n;
    return p;
  }
};

TrialRecord run_trial_in(const ExperimentConfig& cfg, const CellContext& ctx, double snr_db,
                         Detector detector, std::uint64_t seed) {
  TrialRecord rec;
  rec.seed = seed;
  const Scene scene = generate_scene(cfg, seed);
  rec.true_support = scene.support(ctx.grid);
  try {
    const Measurement clean = synthesize(ctx.params, ctx.grid, scene);
    const Measurement y = add_noise(clean, snr_db, hash64({seed, 0x6e6f697365ULL}));

    const auto start = std::chrono::steady_clock::now();
    if (detector == Detector::idft) {
      const IdftDetection det = ctx.grid.n_speeds() == 1
                                    ? idft_detect_stationary(y, ctx.params, cfg.k_targets)
                                    : idft_detect_moving(y, ctx.params, ctx.grid, cfg.k_targets);
      rec.detected_support = det.support(ctx.grid);
    } else {
      SolverConfig solver = cfg.solver;
      solver.method = detector == Detector::dantzig ? Method::dantzig
                      : detector == Detector::omp   ? Method::omp
                                                    : Method::bpdn;
      solver.sparsity_k = cfg.k_targets;
      rec.detected_support = recover(*ctx.dictionary, y, solver).support;
    }
    const auto stop = std::chrono::steady_clock::now();
    if (cfg.record_timing) rec.solve_time_s = std::chrono::duration<double>(stop - start).count();
  } catch (const std::exception& e) {
    rec.error = e.what();
    rec.detected_support.clear();
  }
  rec.correct = rec.error.empty() && rec.detected_support == rec.true_support;
  return rec;
}

}  // namespace

TrialRecord run_trial(const ExperimentConfig& cfg, int n_pulses, double snr_db, Detector detector,
                      std::uint64_t seed) {
  cfg.validate();
  const CellContext ctx(cfg, n_pulses, detector);
  return run_trial_in(cfg, ctx, snr_db, detector, seed);
}

const CellReport* AccuracyReport::find(Detector detector, int n_pulses, double snr_db) const {
  for (const auto& c : cells)
    if (c.detector == detector && c.n_pulses == n_pulses && c.snr_db == snr_db) return &c;
  return nullptr;
}

AccuracyReport sweep(const ExperimentConfig& cfg, unsigned threads, const ProgressFn& progress) {
  cfg.validate();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  AccuracyReport report;
  for (Detector detector : cfg.detectors) {
    for (int n : cfg.pulse_counts) {
      const CellContext ctx(cfg, n, detector);
      for (double snr : cfg.snr_values) {
        CellReport cell;
        cell.detector = detector;
        cell.n_pulses = n;
        cell.snr_db = snr;
        cell.trials = cfg.n_trials;
        cell.log.resize(static_cast<std::size_t>(cfg.n_trials));

        std::atomic<int> next{0};
        auto worker = [&] {
          for (int t = next++; t < cfg.n_trials; t = next++) {
            TrialRecord rec = run_trial_in(cfg, ctx, snr, detector,
                                           trial_seed(cfg.master_seed, detector, n, snr, t));
            rec.trial_index = t;
            cell.log[static_cast<std::size_t>(t)] = std::move(rec);
          }
        };
        const unsigned pool = std::min<unsigned>(threads, static_cast<unsigned>(cfg.n_trials));
        if (pool <= 1) {
          worker();
        } else {
          std::vector<std::jthread> workers;
          for (unsigned i = 0; i < pool; ++i) workers.emplace_back(worker);
        }

        double total_time = 0.0;
        for (const auto& rec : cell.log) {
          cell.correct += rec.correct ? 1 : 0;
          total_time += rec.solve_time_s;
        }
        cell.accuracy = static_cast<double>(cell.correct) / cell.trials;
        cell.mean_solve_time_s = total_time / cell.trials;
        if (progress) progress(cell);
        report.cells.push_back(std::move(cell));
      }
    }
  }
  return report;
}

}  // namespace sfrcs
