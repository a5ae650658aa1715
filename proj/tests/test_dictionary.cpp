#include <doctest.h>

#include <cmath>

#include "sfrcs/dictionary.hpp"

using namespace sfrcs;

namespace {

RadarParams stationary(int n) {
  RadarParams p;
  p.f0 = 1e6;
  p.delta_f = 1e4;
  p.n_pulses = n;
  return p;
}

// Explicit sum (1/N) sum_k e^{i 2 pi k / M}, the inner product of adjacent
// stationary columns without the unit carrier factor.
double summed_adjacent_modulus(int n, int m) {
  std::complex<double> acc{0.0, 0.0};
  for (int k = 0; k < n; ++k) acc += std::polar(1.0, 2.0 * kPi * k / m);
  return std::abs(acc) / n;
}

}  // namespace

TEST_SUITE("dictionary") {

TEST_CASE("entries and column norms") {
  RadarParams p;
  p.f0 = 1e8;
  p.delta_f = 1e5;
  p.n_pulses = 50;
  const Grid g = Grid::make_default(p, 40, 6);
  const Dictionary d = build_dictionary(p, g);
  CHECK(d.n_pulses() == 50);
  CHECK(d.n_columns() == 240);
  CHECK((d.matrix().cwiseAbs().array() - 1.0).abs().maxCoeff() <= 1e-12);
  const Eigen::VectorXd norms = d.matrix().colwise().norm();
  CHECK((norms.array() - std::sqrt(50.0)).abs().maxCoeff() <= 1e-10);
  CHECK(d.max_column_norm() == doctest::Approx(std::sqrt(50.0)).epsilon(1e-12));

  // Row k = 0 depends on the range only.
  for (int m = 0; m < 40; ++m) {
    const cdouble expected = std::polar(1.0, 4 * kPi * p.f0 * g.range(m) / p.c);
    for (int l = 0; l < 6; ++l) CHECK(std::abs(d.matrix()(0, d.column(m, l)) - expected) <= 1e-12);
  }
  CHECK(d.range_index(d.column(7, 4)) == 7);
  CHECK(d.speed_index(d.column(7, 4)) == 4);
}

TEST_CASE("orthogonal when N equals M") {
  const RadarParams p = stationary(100);
  const Dictionary d = build_dictionary(p, Grid::make_default(p, 100, 1));
  const Eigen::MatrixXcd gram = d.matrix().adjoint() * d.matrix();
  const Eigen::MatrixXcd target = 100.0 * Eigen::MatrixXcd::Identity(100, 100);
  CHECK((gram - target).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(coherence(d) <= 1e-8);
}

TEST_CASE("closed-form adjacent correlation") {
  CHECK(adjacent_column_correlation_closed_form(100, 100) == std::complex<double>(0.0, 0.0));
  CHECK(adjacent_column_correlation_closed_form(80, 40) == std::complex<double>(0.0, 0.0));
  CHECK(std::abs(adjacent_column_correlation_closed_form(50, 100)) ==
        doctest::Approx(1.0 / (50.0 * std::sin(kPi / 100.0))).epsilon(1e-12));
  CHECK(std::abs(adjacent_column_correlation_closed_form(50, 100)) == doctest::Approx(0.6367).epsilon(1e-4));
  CHECK(std::abs(adjacent_column_correlation_closed_form(70, 100)) == doctest::Approx(0.3679).epsilon(1e-4));
  CHECK_THROWS(adjacent_column_correlation_closed_form(10, 1));
  CHECK_THROWS(adjacent_column_correlation_closed_form(0, 10));

  for (int n : {7, 33, 70, 99})
    CHECK(std::abs(std::abs(adjacent_column_correlation_closed_form(n, 100)) - summed_adjacent_modulus(n, 100)) <=
          1e-12);
}

TEST_CASE("closed form matches the Gram matrix for every adjacent pair") {
  for (int m_count : {40, 100}) {
    for (int n = 10; n <= 100; n += 10) {
      const RadarParams p = stationary(n);
      const Dictionary d = build_dictionary(p, Grid::make_default(p, m_count, 1));
      const double expected = std::abs(adjacent_column_correlation_closed_form(n, m_count));
      double worst = 0.0;
      for (int m = 0; m + 1 < m_count; ++m)
        worst = std::max(worst, std::abs(adjacent_column_correlation(d, m) - expected));
      CHECK_MESSAGE(worst <= 1e-10, "N=" << n << " M=" << m_count);
    }
  }
}

TEST_CASE("isolation improves with N") {
  double previous = 2.0;
  for (int n : {10, 30, 50, 70, 90}) {
    const double v = std::abs(adjacent_column_correlation_closed_form(n, 100));
    CHECK(v < previous);
    previous = v;
  }
}

TEST_CASE("coherence") {
  const RadarParams p = stationary(70);
  const Dictionary d = build_dictionary(p, Grid::make_default(p, 100, 1));
  // Column pairs m, m+j have correlation |sum_k e^{i 2 pi j k / M}| / N; the
  // largest over j is the adjacent one here.
  double best = 0.0;
  for (int j = 1; j < 100; ++j) {
    std::complex<double> acc{0.0, 0.0};
    for (int k = 0; k < 70; ++k) acc += std::polar(1.0, 2.0 * kPi * j * k / 100.0);
    best = std::max(best, std::abs(acc) / 70.0);
  }
  CHECK(coherence(d) == doctest::Approx(best).epsilon(1e-10));
  CHECK(coherence(d) == doctest::Approx(std::abs(adjacent_column_correlation_closed_form(70, 100))).epsilon(1e-10));

  Eigen::MatrixXcd dup(3, 2);
  dup << 1.0, 1.0, cdouble(0, 1), cdouble(0, 1), -1.0, -1.0;
  CHECK(coherence(dup) == doctest::Approx(1.0));
  CHECK_THROWS(coherence(Eigen::MatrixXcd::Ones(4, 1)));
}

TEST_CASE("construction errors") {
  CHECK_THROWS(Dictionary(Eigen::MatrixXcd::Ones(4, 5), 2, 3));
  CHECK_THROWS(adjacent_column_correlation(build_dictionary(stationary(10), Grid::make_default(stationary(10), 5, 1)), 4));
}

}  // TEST_SUITE
