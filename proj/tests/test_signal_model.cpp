#include <doctest.h>

#include <cmath>
#include <random>

#include "sfrcs/dictionary.hpp"
#include "sfrcs/signal_model.hpp"

using namespace sfrcs;

namespace {

RadarParams stationary_params(int n = 100) {
  RadarParams p;
  p.f0 = 1e6;
  p.delta_f = 1e4;
  p.n_pulses = n;
  return p;
}

}  // namespace

TEST_SUITE("signal_model") {

TEST_CASE("pulse frequency") {
  RadarParams p = stationary_params();
  CHECK(pulse_frequency(p, 0) == 1e6);
  CHECK(pulse_frequency(p, 1) == doctest::Approx(1.01e6).epsilon(1e-15));
  p.f0 = 1e8;
  p.delta_f = 1e5;
  CHECK(pulse_frequency(p, 99) == doctest::Approx(1.099e8).epsilon(1e-15));
  CHECK_THROWS_AS(pulse_frequency(p, -1), std::out_of_range);
  CHECK_THROWS_AS(pulse_frequency(p, 100), std::out_of_range);
}

TEST_CASE("unambiguous range and resolution") {
  RadarParams p = stationary_params();
  CHECK(unambiguous_range(p) == doctest::Approx(15000.0));
  CHECK(range_resolution(p) == doctest::Approx(150.0));
  p.n_pulses = 1;
  CHECK(range_resolution(p) == doctest::Approx(15000.0));
  p.delta_f = 1e5;
  CHECK(unambiguous_range(p) == doctest::Approx(1500.0));
  p.n_pulses = 40;
  CHECK(range_resolution(p) == doctest::Approx(37.5));
  p.delta_f = p.c / 2.0;
  CHECK(unambiguous_range(p) == doctest::Approx(1.0));
}

TEST_CASE("params validation") {
  RadarParams p;
  p.f0 = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = RadarParams{};
  p.n_pulses = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = RadarParams{};
  p.pri = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("phase terms") {
  RadarParams p = stationary_params();
  const PhaseTerms t0 = phase_terms(p, 0, 1234.0, 55.0);
  CHECK(t0.frequency_step == 0.0);
  CHECK(t0.doppler_shift == 0.0);
  CHECK(t0.doppler_spread == 0.0);
  const PhaseTerms still = phase_terms(p, 7, 1234.0, 0.0);
  CHECK(still.doppler_shift == 0.0);
  CHECK(still.doppler_spread == 0.0);

  const PhaseTerms t = phase_terms(p, 1, 150.0, 0.0);
  CHECK(t.carrier == doctest::Approx(2 * kPi).epsilon(1e-12));
  CHECK(t.frequency_step == doctest::Approx(2 * kPi * 1e-2).epsilon(1e-12));
}

TEST_CASE("phase identity over random arguments") {
  RadarParams p;
  p.f0 = 1e8;
  p.delta_f = 1e5;
  p.n_pulses = 200;
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> k_dist(0, p.n_pulses - 1);
  std::uniform_real_distribution<double> r_dist(0.0, 1500.0), v_dist(-100.0, 100.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const int k = k_dist(rng);
    const double r = r_dist(rng), v = v_dist(rng);
    const double direct = 2 * kPi * (p.f0 + k * p.delta_f) * (2.0 / p.c) * (r + v * k * p.pri);
    worst = std::max(worst, std::abs(phase_terms(p, k, r, v).sum() - direct));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("grid construction") {
  const RadarParams p = stationary_params();
  const Grid g = Grid::make_default(p, 100, 1);
  CHECK(g.range(0) == 0.0);
  CHECK(g.range_step() == doctest::Approx(150.0));
  CHECK(g.range(99) < unambiguous_range(p));
  CHECK(g.column(3, 0) == 3);

  const Grid moving = Grid::make_default(p, 4, 3);
  CHECK(moving.column(2, 1) == 7);
  CHECK(moving.range_index(7) == 2);
  CHECK(moving.speed_index(7) == 1);
  CHECK(moving.speed_step() == doctest::Approx(doppler_bin_width(p)));

  CHECK_THROWS(Grid({0.0, 2.0, 1.0}, {0.0}));
  CHECK_THROWS(Grid({0.0, 1.0, 3.0}, {0.0}));
  CHECK_THROWS(Grid({}, {0.0}));
  CHECK_THROWS(Grid({-1.0, 0.0}, {0.0}).check_against(p));
  CHECK_THROWS(Grid({0.0, 15000.0}, {0.0}).check_against(p));
}

TEST_CASE("scene invariants") {
  CHECK_THROWS_AS(Scene({{1, 0, 1.0}, {1, 0, -1.0}}), std::invalid_argument);
  const Grid g = Grid::make_default(stationary_params(), 10, 2);
  const Scene s({{3, 1, 1.0}, {0, 0, 2.0}});
  CHECK(s.support(g) == std::vector<int>{0, 7});
  CHECK(s.coefficients(g)(7) == cdouble(1.0, 0.0));
  CHECK_THROWS(Scene({{10, 0, 1.0}}).check_against(g));
}

TEST_CASE("synthesis") {
  RadarParams p;
  p.f0 = 1e8;
  p.delta_f = 1e5;
  p.n_pulses = 64;
  const Grid g = Grid::make_default(p, 40, 6);

  SUBCASE("single target at k = 0 and unit modulus") {
    const Measurement y = synthesize(p, g, Scene({{12, 3, 1.0}}));
    CHECK(y.noise_variance == 0.0);
    const cdouble expected = std::polar(1.0, 4 * kPi * p.f0 * g.range(12) / p.c);
    CHECK(std::abs(y.samples(0) - expected) <= 1e-12);
    CHECK((y.samples.cwiseAbs().array() - 1.0).abs().maxCoeff() <= 1e-12);
  }

  SUBCASE("empty scene") {
    const Measurement y = synthesize(p, g, Scene{});
    CHECK(y.samples.size() == 64);
    CHECK(y.samples.norm() == 0.0);
  }

  SUBCASE("linearity") {
    const Scene a({{1, 0, 1.0}, {5, 2, cdouble(0.5, 0.2)}});
    const Scene b({{7, 5, 2.0}});
    const Scene both({{1, 0, 1.0}, {5, 2, cdouble(0.5, 0.2)}, {7, 5, 2.0}});
    const Eigen::VectorXcd sum = synthesize(p, g, a).samples + synthesize(p, g, b).samples;
    CHECK((synthesize(p, g, both).samples - sum).cwiseAbs().maxCoeff() <= 1e-12);
  }

  SUBCASE("matches the dictionary product for random scenes") {
    const Dictionary d = build_dictionary(p, g);
    std::mt19937_64 rng(11);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<Target> targets;
      std::vector<bool> used(static_cast<std::size_t>(g.size()), false);
      std::uniform_int_distribution<int> col(0, g.size() - 1);
      while (targets.size() < 5) {
        const int c = col(rng);
        if (used[static_cast<std::size_t>(c)]) continue;
        used[static_cast<std::size_t>(c)] = true;
        targets.push_back({g.range_index(c), g.speed_index(c), 1.0});
      }
      const Scene s(targets);
      const Eigen::VectorXcd product = d.matrix() * s.coefficients(g);
      worst = std::max(worst, (synthesize(p, g, s).samples - product).cwiseAbs().maxCoeff());
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("stationary range aliasing") {
  const RadarParams p = stationary_params(70);
  const double ru = unambiguous_range(p);
  const cdouble constant = std::polar(1.0, 4 * kPi * p.f0 * ru / p.c);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> r_dist(0.0, ru);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double r = r_dist(rng);
    const Grid near({r}, {0.0});
    const Grid far({r + ru}, {0.0});
    const Eigen::VectorXcd a = synthesize(p, near, Scene({{0, 0, 1.0}})).samples;
    const Eigen::VectorXcd b = synthesize(p, far, Scene({{0, 0, 1.0}})).samples * std::conj(constant);
    worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("noise") {
  const RadarParams p = stationary_params(100);
  const Grid g = Grid::make_default(p, 100, 1);
  const Measurement clean = synthesize(p, g, Scene({{17, 0, 1.0}}));

  SUBCASE("noiseless passes through") {
    const Measurement y = add_noise(clean, kNoiseless, 5);
    CHECK(y.samples == clean.samples);
    CHECK(y.noise_variance == 0.0);
  }

  SUBCASE("variance from SNR") {
    CHECK(add_noise(clean, 0.0, 5).noise_variance == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(add_noise(clean, 10.0, 5).noise_variance == doctest::Approx(0.1).epsilon(1e-12));
  }

  SUBCASE("determinism") {
    CHECK(add_noise(clean, 5.0, 42).samples == add_noise(clean, 5.0, 42).samples);
    CHECK(add_noise(clean, 5.0, 42).samples != add_noise(clean, 5.0, 43).samples);
  }

  SUBCASE("empirical variance") {
    Measurement zero_mean;
    zero_mean.samples = Eigen::VectorXcd::Constant(100000, cdouble(1.0, 0.0));
    const Measurement y = add_noise(zero_mean, 3.0, 99);
    const Eigen::VectorXcd w = y.samples - zero_mean.samples;
    const double var = w.squaredNorm() / static_cast<double>(w.size());
    CHECK(std::abs(var - y.noise_variance) <= 0.02 * y.noise_variance);
    const double re = w.real().squaredNorm() / static_cast<double>(w.size());
    CHECK(std::abs(re - 0.5 * y.noise_variance) <= 0.02 * 0.5 * y.noise_variance);
  }

  SUBCASE("errors and pure noise") {
    Measurement zero;
    zero.samples = Eigen::VectorXcd::Zero(10);
    CHECK_THROWS_AS(add_noise(zero, 10.0, 1), std::domain_error);
    CHECK_THROWS(add_noise(clean, std::nan(""), 1));
    const Measurement noise = add_noise(clean, -kNoiseless, 1);
    CHECK(noise.noise_variance == doctest::Approx(1.0));
    CHECK(std::abs(noise.samples.dot(clean.samples)) < 0.5 * clean.samples.squaredNorm());
  }
}

}  // TEST_SUITE
