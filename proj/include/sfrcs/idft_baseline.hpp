#pragma once

#include <vector>

#include <Eigen/Dense>

#include "sfrcs/signal_model.hpp"

namespace sfrcs {

/// Unitary inverse transform of the phase-detector sequence,
/// x_n = N^{-1/2} sum_k y_k e^{-i 2 pi k n / N}. The sign follows the
/// e^{+i} phase convention of the received samples, so a stationary target
/// at range R peaks at bin R N / R_u.
Eigen::VectorXcd idft(const Eigen::VectorXcd& samples);

struct RangeProfile {
  Eigen::VectorXd magnitudes;
  double bin_width = 0.0;  // R_u / N

  int size() const { return static_cast<int>(magnitudes.size()); }
  double bin_to_range(int bin) const { return bin * bin_width; }
};

RangeProfile range_profile(const Eigen::VectorXcd& samples, const RadarParams& params);

/// Bins of the K largest magnitudes, ties to the lower bin; empty if the profile is all zero.
std::vector<int> peak_bins(const RangeProfile& profile, int k);

/// Peak magnitude over the median of the remaining bins.
double sharpness(const RangeProfile& profile);

/// Multiplies sample k by exp(-i 2 pi f_k (2/c) v k T).
Eigen::VectorXcd compensate_speed(const Eigen::VectorXcd& samples, const RadarParams& params,
                                  double speed);

/// Grid range index closest to `range`, ties to the lower index.
int nearest_range_index(const Grid& grid, double range);

struct IdftDetection {
  int speed_index = 0;             // winning speed (single-speed mode)
  std::vector<int> speed_indices;  // per detection, parallel to bins
  std::vector<int> bins;
  std::vector<double> ranges;
  std::vector<double> sharpness;  // per candidate speed (moving mode)
  bool empty = true;

  /// Sorted, de-duplicated grid columns of the detections.
  std::vector<int> support(const Grid& grid) const;
};

IdftDetection idft_detect_stationary(const Measurement& y, const RadarParams& params, int k);

/// Compensates for every grid speed, keeps the sharpest profile and
/// reports its K peaks; every detection shares the winning speed.
IdftDetection idft_detect_moving(const Measurement& y, const RadarParams& params, const Grid& grid,
                                 int k);

/// Bin offset at which a target with residual speed dv appears after
/// compensation: N (2 dv T / c) (f0 + (N-1) df), the Doppler shift plus the
/// linear part of the spread term.
double doppler_bin_shift(const RadarParams& params, double residual_speed);

}  // namespace sfrcs
