#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace sfrcs {

using cdouble = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 3.0e8;
/// Stand-in SNR value meaning "do not add noise".
inline constexpr double kNoiseless = std::numeric_limits<double>::infinity();

/// Waveform constants of a step-frequency pulse train.
struct RadarParams {
  double f0 = 1.0e6;       // carrier of pulse 0 (Hz)
  double delta_f = 1.0e4;  // frequency step (Hz)
  int n_pulses = 100;      // N
  double pri = 1.0e-3;     // T (s)
  double c = kSpeedOfLight;

  /// Throws std::invalid_argument when any field is out of its domain.
  void validate() const;
};

double pulse_frequency(const RadarParams& params, int k);
double unambiguous_range(const RadarParams& params);
double range_resolution(const RadarParams& params);
/// Doppler bin width c / (2 f0 T N); speeds spaced by it give phase ramps
/// that differ by one DFT bin over the pulse train.
double doppler_bin_width(const RadarParams& params);

/// The four additive parts of the phase-detector exponent for pulse k.
struct PhaseTerms {
  double carrier;         // 4 pi f0 R / c
  double frequency_step;  // 2 pi (2 df R / c) k
  double doppler_shift;   // 2 pi (2 f0 v T / c) k
  double doppler_spread;  // 2 pi (2 k df v T / c) k

  double sum() const { return carrier + frequency_step + doppler_shift + doppler_spread; }
};

PhaseTerms phase_terms(const RadarParams& params, int k, double range, double speed);

/// Full exponent 2 pi f_k (2/c) (R + v k T) of the phase-detector output.
double phase(const RadarParams& params, int k, double range, double speed);

/// Uniform range and speed axes. Indices used across the library are 0-based.
class Grid {
 public:
  Grid(std::vector<double> ranges, std::vector<double> speeds);

  /// R_m = m R_u / M and v_l = l c / (2 f0 T N), m, l 0-based.
  static Grid make_default(const RadarParams& params, int n_ranges, int n_speeds);

  int n_ranges() const { return static_cast<int>(ranges_.size()); }
  int n_speeds() const { return static_cast<int>(speeds_.size()); }
  int size() const { return n_ranges() * n_speeds(); }

  const std::vector<double>& ranges() const { return ranges_; }
  const std::vector<double>& speeds() const { return speeds_; }
  double range(int m) const { return ranges_.at(static_cast<std::size_t>(m)); }
  double speed(int l) const { return speeds_.at(static_cast<std::size_t>(l)); }
  double range_step() const;
  double speed_step() const;

  /// Column index (range-major): m * L + l.
  int column(int m, int l) const { return m * n_speeds() + l; }
  int range_index(int column) const { return column / n_speeds(); }
  int speed_index(int column) const { return column % n_speeds(); }

  /// Throws std::invalid_argument if the grid does not fit inside R_u.
  void check_against(const RadarParams& params) const;

 private:
  std::vector<double> ranges_;
  std::vector<double> speeds_;
};

struct Target {
  int range_index = 0;
  int speed_index = 0;
  cdouble reflectivity{1.0, 0.0};
};

/// Sparse range-speed scene; no two targets share a grid point.
class Scene {
 public:
  Scene() = default;
  explicit Scene(std::vector<Target> targets);

  const std::vector<Target>& targets() const { return targets_; }
  int sparsity() const { return static_cast<int>(targets_.size()); }
  bool empty() const { return targets_.empty(); }

  /// Sorted grid columns occupied by the targets.
  std::vector<int> support(const Grid& grid) const;
  /// Dense coefficient vector s of length M*L.
  Eigen::VectorXcd coefficients(const Grid& grid) const;
  /// Throws std::out_of_range if any target falls outside the grid.
  void check_against(const Grid& grid) const;

 private:
  std::vector<Target> targets_;
};

struct Measurement {
  Eigen::VectorXcd samples;
  double noise_variance = 0.0;
};

/// Noiseless phase-detector outputs, evaluated target by target.
Measurement synthesize(const RadarParams& params, const Grid& grid, const Scene& scene);

/// Adds circular complex Gaussian noise at the given per-sample SNR (dB).
/// snr_db = +inf returns the input unchanged; snr_db = -inf replaces the
/// signal by noise whose variance equals the signal power.
Measurement add_noise(const Measurement& m, double snr_db, std::uint64_t seed);

}  // namespace sfrcs
