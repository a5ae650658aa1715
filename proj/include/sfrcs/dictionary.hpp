#pragma once

#include <complex>
#include <optional>
#include <stdexcept>

#include <Eigen/Dense>

#include "sfrcs/signal_model.hpp"

namespace sfrcs {

/// N x (M L) sensing matrix. Column m * L + l holds the noiseless
/// phase-detector response of a unit target at (R_m, v_l).
class Dictionary {
 public:
  Dictionary(Eigen::MatrixXcd entries, int n_ranges, int n_speeds);
  Dictionary(Eigen::MatrixXcd entries, const Grid& grid);

  const Eigen::MatrixXcd& matrix() const { return entries_; }
  int n_pulses() const { return static_cast<int>(entries_.rows()); }
  int n_columns() const { return static_cast<int>(entries_.cols()); }
  int n_ranges() const { return n_ranges_; }
  int n_speeds() const { return n_speeds_; }
  /// Grid the columns were built from, if known.
  const std::optional<Grid>& grid() const { return grid_; }

  int column(int m, int l) const { return m * n_speeds_ + l; }
  int range_index(int column) const { return column / n_speeds_; }
  int speed_index(int column) const { return column % n_speeds_; }

  /// Largest column norm, sigma_max of the mu bound. Equal to sqrt(N).
  double max_column_norm() const;

 private:
  Eigen::MatrixXcd entries_;
  int n_ranges_;
  int n_speeds_;
  std::optional<Grid> grid_;
};

Dictionary build_dictionary(const RadarParams& params, const Grid& grid);

/// (1/N) (1 - e^{-i 2 pi N/M}) / (1 - e^{-i 2 pi / M}); exactly 0 when M divides N.
std::complex<double> adjacent_column_correlation_closed_form(int n_pulses, int n_ranges);

/// |<psi_(m,l), psi_(m+1,l)>| / N, computed from the matrix.
double adjacent_column_correlation(const Dictionary& d, int m, int l = 0);

/// Mutual coherence max_{i != j} |<a_i, a_j>| / (|a_i| |a_j|) of the columns.
template <typename Derived>
double coherence(const Eigen::MatrixBase<Derived>& a) {
  if (a.cols() < 2) throw std::invalid_argument("coherence: needs at least two columns");
  const Eigen::VectorXd norms = a.colwise().norm().transpose();
  const Eigen::MatrixXcd gram = a.adjoint() * a;
  double best = 0.0;
  for (Eigen::Index j = 1; j < gram.cols(); ++j)
    for (Eigen::Index i = 0; i < j; ++i)
      best = std::max(best, std::abs(gram(i, j)) / (norms(i) * norms(j)));
  return std::min(best, 1.0);
}

inline double coherence(const Dictionary& d) { return coherence(d.matrix()); }

}  // namespace sfrcs
