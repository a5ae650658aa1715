#include "sfrcs/idft_baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

namespace sfrcs {

Eigen::VectorXcd idft(const Eigen::VectorXcd& samples) {
  const Eigen::Index n = samples.size();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  if (n == 0) return out;
  // Twiddles indexed by (k n) mod N keep the arguments small.
  Eigen::VectorXcd twiddle(n);
  for (Eigen::Index j = 0; j < n; ++j)
    twiddle(j) = std::polar(1.0, -2.0 * kPi * static_cast<double>(j) / static_cast<double>(n));
  for (Eigen::Index bin = 0; bin < n; ++bin) {
    cdouble acc{0.0, 0.0};
    for (Eigen::Index k = 0; k < n; ++k) acc += samples(k) * twiddle((k * bin) % n);
    out(bin) = acc;
  }
  return out / std::sqrt(static_cast<double>(n));
}

RangeProfile range_profile(const Eigen::VectorXcd& samples, const RadarParams& params) {
  RangeProfile p;
  p.magnitudes = idft(samples).cwiseAbs();
  p.bin_width = unambiguous_range(params) / static_cast<double>(samples.size());
  return p;
}

std::vector<int> peak_bins(const RangeProfile& profile, int k) {
  const int n = profile.size();
  if (k > n) throw std::invalid_argument("idft: K = " + std::to_string(k) + " exceeds N = " + std::to_string(n));
  if (k < 0) throw std::invalid_argument("idft: K must be >= 0");
  if (n == 0 || !(profile.magnitudes.maxCoeff() > 0.0)) return {};
  const auto& mag = profile.magnitudes;
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + k, order.end(),
                    [&](int a, int b) { return mag(a) > mag(b) || (mag(a) == mag(b) && a < b); });
  order.resize(static_cast<std::size_t>(k));
  return order;
}

double sharpness(const RangeProfile& profile) {
  const auto& mag = profile.magnitudes;
  if (mag.size() == 0) return 0.0;
  Eigen::Index peak_at = 0;
  const double peak = mag.maxCoeff(&peak_at);
  std::vector<double> rest;
  rest.reserve(static_cast<std::size_t>(mag.size()));
  for (Eigen::Index i = 0; i < mag.size(); ++i)
    if (i != peak_at) rest.push_back(mag(i));
  if (rest.empty()) return peak > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  std::sort(rest.begin(), rest.end());
  const std::size_t h = rest.size() / 2;
  const double median = rest.size() % 2 ? rest[h] : 0.5 * (rest[h - 1] + rest[h]);
  if (!(median > 0.0)) return peak > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return peak / median;
}

Eigen::VectorXcd compensate_speed(const Eigen::VectorXcd& samples, const RadarParams& params,
                                  double speed) {
  Eigen::VectorXcd out(samples.size());
  for (Eigen::Index k = 0; k < samples.size(); ++k) {
    const double fk = params.f0 + static_cast<double>(k) * params.delta_f;
    const double doppler = 2.0 * kPi * fk * (2.0 / params.c) * speed * static_cast<double>(k) * params.pri;
    out(k) = samples(k) * std::polar(1.0, -doppler);
  }
  return out;
}

int nearest_range_index(const Grid& grid, double range) {
  const auto& r = grid.ranges();
  int best = 0;
  double best_dist = std::abs(r.front() - range);
  for (int m = 1; m < grid.n_ranges(); ++m) {
    const double dist = std::abs(r[static_cast<std::size_t>(m)] - range);
    if (dist < best_dist) {
      best = m;
      best_dist = dist;
    }
  }
  return best;
}

std::vector<int> IdftDetection::support(const Grid& grid) const {
  std::set<int> cols;
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    const int l = i < speed_indices.size() ? speed_indices[i] : speed_index;
    cols.insert(grid.column(nearest_range_index(grid, ranges[i]), l));
  }
  return {cols.begin(), cols.end()};
}

namespace {

void check_measurement(const Measurement& y, const RadarParams& params) {
  if (y.samples.size() != params.n_pulses)
    throw std::invalid_argument("idft: measurement length does not match N");
}

void fill_peaks(IdftDetection& det, const RangeProfile& profile, int k) {
  det.bins = peak_bins(profile, k);
  det.ranges.clear();
  for (int b : det.bins) det.ranges.push_back(profile.bin_to_range(b));
  det.speed_indices.assign(det.bins.size(), det.speed_index);
  det.empty = det.bins.empty();
}

}  // namespace

IdftDetection idft_detect_stationary(const Measurement& y, const RadarParams& params, int k) {
  check_measurement(y, params);
  if (k > params.n_pulses) throw std::invalid_argument("idft: K exceeds N");
  IdftDetection det;
  fill_peaks(det, range_profile(y.samples, params), k);
  return det;
}

IdftDetection idft_detect_moving(const Measurement& y, const RadarParams& params, const Grid& grid,
                                 int k) {
  check_measurement(y, params);
  if (k > params.n_pulses) throw std::invalid_argument("idft: K exceeds N");
  IdftDetection det;
  RangeProfile best;
  double best_score = -1.0;
  for (int l = 0; l < grid.n_speeds(); ++l) {
    RangeProfile p = range_profile(compensate_speed(y.samples, params, grid.speed(l)), params);
    const double score = sharpness(p);
    det.sharpness.push_back(score);
    if (score > best_score) {
      best_score = score;
      best = std::move(p);
      det.speed_index = l;
    }
  }
  fill_peaks(det, best, k);
  return det;
}

double doppler_bin_shift(const RadarParams& params, double residual_speed) {
  const int n = params.n_pulses;
  const double f_eff = params.f0 + params.delta_f * (n - 1);
  return n * 2.0 * residual_speed * params.pri * f_eff / params.c;
}

}  // namespace sfrcs
