#include "sfrcs/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

namespace sfrcs {

void RadarParams::validate() const {
  if (!(f0 > 0.0) || !std::isfinite(f0)) throw std::invalid_argument("radar: f0 must be positive");
  if (!(delta_f > 0.0) || !std::isfinite(delta_f))
    throw std::invalid_argument("radar: delta_f must be positive");
  if (!(pri > 0.0) || !std::isfinite(pri)) throw std::invalid_argument("radar: pri must be positive");
  if (n_pulses < 1) throw std::invalid_argument("radar: n_pulses must be >= 1");
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("radar: c must be positive");
}

double pulse_frequency(const RadarParams& params, int k) {
  if (k < 0 || k >= params.n_pulses)
    throw std::out_of_range("pulse index " + std::to_string(k) + " outside [0, N)");
  return params.f0 + k * params.delta_f;
}

double unambiguous_range(const RadarParams& params) { return params.c / (2.0 * params.delta_f); }

double range_resolution(const RadarParams& params) {
  return params.c / (2.0 * params.n_pulses * params.delta_f);
}

double doppler_bin_width(const RadarParams& params) {
  return params.c / (2.0 * params.f0 * params.pri * params.n_pulses);
}

PhaseTerms phase_terms(const RadarParams& params, int k, double range, double speed) {
  if (k < 0 || k >= params.n_pulses)
    throw std::out_of_range("pulse index " + std::to_string(k) + " outside [0, N)");
  const double c = params.c;
  const double kk = k;
  const double vt = speed * params.pri;
  return PhaseTerms{
      4.0 * kPi * params.f0 * range / c,
      2.0 * kPi * (2.0 * params.delta_f * range / c) * kk,
      2.0 * kPi * (2.0 * params.f0 * vt / c) * kk,
      2.0 * kPi * (2.0 * kk * params.delta_f * vt / c) * kk,
  };
}

double phase(const RadarParams& params, int k, double range, double speed) {
  const double fk = params.f0 + k * params.delta_f;
  return 2.0 * kPi * fk * (2.0 / params.c) * (range + speed * k * params.pri);
}

namespace {

void check_uniform_increasing(const std::vector<double>& axis, const char* name) {
  if (axis.empty()) throw std::invalid_argument(std::string("grid: ") + name + " axis is empty");
  for (double x : axis)
    if (!std::isfinite(x)) throw std::invalid_argument(std::string("grid: non-finite ") + name);
  if (axis.size() < 2) return;
  const double step = (axis.back() - axis.front()) / static_cast<double>(axis.size() - 1);
  if (!(step > 0.0)) throw std::invalid_argument(std::string("grid: ") + name + " not increasing");
  for (std::size_t i = 1; i < axis.size(); ++i) {
    const double d = axis[i] - axis[i - 1];
    if (!(d > 0.0)) throw std::invalid_argument(std::string("grid: ") + name + " not strictly increasing");
    if (std::abs(d - step) > 1e-9 * std::abs(step))
      throw std::invalid_argument(std::string("grid: ") + name + " not uniformly spaced");
  }
}

}  // namespace

Grid::Grid(std::vector<double> ranges, std::vector<double> speeds)
    : ranges_(std::move(ranges)), speeds_(std::move(speeds)) {
  check_uniform_increasing(ranges_, "range");
  check_uniform_increasing(speeds_, "speed");
}

Grid Grid::make_default(const RadarParams& params, int n_ranges, int n_speeds) {
  if (n_ranges < 1 || n_speeds < 1) throw std::invalid_argument("grid: M and L must be >= 1");
  params.validate();
  const double ru = unambiguous_range(params);
  const double dv = doppler_bin_width(params);
  std::vector<double> ranges(static_cast<std::size_t>(n_ranges));
  std::vector<double> speeds(static_cast<std::size_t>(n_speeds));
  for (int m = 0; m < n_ranges; ++m) ranges[static_cast<std::size_t>(m)] = m * ru / n_ranges;
  for (int l = 0; l < n_speeds; ++l) speeds[static_cast<std::size_t>(l)] = l * dv;
  return Grid(std::move(ranges), std::move(speeds));
}

double Grid::range_step() const {
  if (ranges_.size() < 2) return 0.0;
  return (ranges_.back() - ranges_.front()) / static_cast<double>(ranges_.size() - 1);
}

double Grid::speed_step() const {
  if (speeds_.size() < 2) return 0.0;
  return (speeds_.back() - speeds_.front()) / static_cast<double>(speeds_.size() - 1);
}

void Grid::check_against(const RadarParams& params) const {
  if (ranges_.front() < 0.0) throw std::invalid_argument("grid: first range is negative");
  if (!(ranges_.back() < unambiguous_range(params)))
    throw std::invalid_argument("grid: last range reaches the unambiguous range");
}

Scene::Scene(std::vector<Target> targets) : targets_(std::move(targets)) {
  std::set<std::pair<int, int>> seen;
  for (const auto& t : targets_) {
    if (!seen.emplace(t.range_index, t.speed_index).second)
      throw std::invalid_argument("scene: two targets share grid point (" +
                                  std::to_string(t.range_index) + ", " +
                                  std::to_string(t.speed_index) + ")");
  }
}

void Scene::check_against(const Grid& grid) const {
  for (const auto& t : targets_) {
    if (t.range_index < 0 || t.range_index >= grid.n_ranges() || t.speed_index < 0 ||
        t.speed_index >= grid.n_speeds())
      throw std::out_of_range("scene: target (" + std::to_string(t.range_index) + ", " +
                              std::to_string(t.speed_index) + ") outside the grid");
  }
}

std::vector<int> Scene::support(const Grid& grid) const {
  check_against(grid);
  std::vector<int> cols;
  cols.reserve(targets_.size());
  for (const auto& t : targets_) cols.push_back(grid.column(t.range_index, t.speed_index));
  std::sort(cols.begin(), cols.end());
  return cols;
}

Eigen::VectorXcd Scene::coefficients(const Grid& grid) const {
  check_against(grid);
  Eigen::VectorXcd s = Eigen::VectorXcd::Zero(grid.size());
  for (const auto& t : targets_) s(grid.column(t.range_index, t.speed_index)) = t.reflectivity;
  return s;
}

Measurement synthesize(const RadarParams& params, const Grid& grid, const Scene& scene) {
  params.validate();
  scene.check_against(grid);
  Measurement out;
  out.samples = Eigen::VectorXcd::Zero(params.n_pulses);
  for (int k = 0; k < params.n_pulses; ++k) {
    cdouble acc{0.0, 0.0};
    for (const auto& t : scene.targets()) {
      acc += t.reflectivity * std::polar(1.0, phase(params, k, grid.range(t.range_index),
                                                    grid.speed(t.speed_index)));
    }
    out.samples(k) = acc;
  }
  return out;
}

Measurement add_noise(const Measurement& m, double snr_db, std::uint64_t seed) {
  if (std::isnan(snr_db)) throw std::invalid_argument("add_noise: SNR is NaN");
  if (snr_db == kNoiseless) return m;
  const auto n = m.samples.size();
  if (n == 0) throw std::invalid_argument("add_noise: empty measurement");
  const double signal_power = m.samples.squaredNorm() / static_cast<double>(n);
  if (!(signal_power > 0.0))
    throw std::domain_error("add_noise: signal power is zero, SNR undefined");

  const bool pure_noise = std::isinf(snr_db);  // only -inf reaches here
  const double variance = pure_noise ? signal_power : signal_power / std::pow(10.0, snr_db / 10.0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> component(0.0, std::sqrt(variance / 2.0));

  Measurement out;
  out.samples = pure_noise ? Eigen::VectorXcd::Zero(n) : m.samples;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double re = component(rng);
    const double im = component(rng);
    out.samples(k) += cdouble(re, im);
  }
  out.noise_variance = m.noise_variance + variance;
  return out;
}

}  // namespace sfrcs
