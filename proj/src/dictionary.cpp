#include "sfrcs/dictionary.hpp"

#include <cmath>
#include <utility>

namespace sfrcs {

Dictionary::Dictionary(Eigen::MatrixXcd entries, int n_ranges, int n_speeds)
    : entries_(std::move(entries)), n_ranges_(n_ranges), n_speeds_(n_speeds) {
  if (n_ranges_ < 1 || n_speeds_ < 1 || entries_.cols() != n_ranges_ * n_speeds_)
    throw std::invalid_argument("dictionary: column count does not match M * L");
  if (entries_.rows() < 1) throw std::invalid_argument("dictionary: no rows");
}

Dictionary::Dictionary(Eigen::MatrixXcd entries, const Grid& grid)
    : Dictionary(std::move(entries), grid.n_ranges(), grid.n_speeds()) {
  grid_ = grid;
}

double Dictionary::max_column_norm() const { return entries_.colwise().norm().maxCoeff(); }

Dictionary build_dictionary(const RadarParams& params, const Grid& grid) {
  params.validate();
  if (grid.size() == 0) throw std::invalid_argument("dictionary: empty grid");
  const int n = params.n_pulses;
  Eigen::MatrixXcd psi(n, grid.size());
  for (int m = 0; m < grid.n_ranges(); ++m) {
    for (int l = 0; l < grid.n_speeds(); ++l) {
      const int col = grid.column(m, l);
      for (int k = 0; k < n; ++k)
        psi(k, col) = std::polar(1.0, phase(params, k, grid.range(m), grid.speed(l)));
    }
  }
  return Dictionary(std::move(psi), grid);
}

std::complex<double> adjacent_column_correlation_closed_form(int n_pulses, int n_ranges) {
  if (n_pulses < 1) throw std::invalid_argument("closed form: N must be >= 1");
  if (n_ranges < 2) throw std::invalid_argument("closed form: M must be >= 2");
  if (n_pulses % n_ranges == 0) return {0.0, 0.0};
  const std::complex<double> i(0.0, 1.0);
  const double m = n_ranges;
  const auto num = 1.0 - std::exp(-i * 2.0 * kPi * (n_pulses / m));
  const auto den = 1.0 - std::exp(-i * 2.0 * kPi / m);
  return num / den / static_cast<double>(n_pulses);
}

double adjacent_column_correlation(const Dictionary& d, int m, int l) {
  if (m < 0 || m + 1 >= d.n_ranges() || l < 0 || l >= d.n_speeds())
    throw std::out_of_range("adjacent correlation: index outside the grid");
  const auto& a = d.matrix();
  const auto inner = a.col(d.column(m, l)).dot(a.col(d.column(m + 1, l)));
  return std::abs(inner) / d.n_pulses();
}

}  // namespace sfrcs
