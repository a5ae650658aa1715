#include "sfrcs/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sfrcs/linear_program.hpp"

namespace sfrcs {

void SolverConfig::validate() const {
  if (mu_rule == MuRule::fixed && !(mu > 0.0)) throw std::invalid_argument("solver: mu must be > 0");
  if (!(t_param > 0.0)) throw std::invalid_argument("solver: t_param must be > 0");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("solver: epsilon must be >= 0");
  if (max_iterations < 1) throw std::invalid_argument("solver: max_iterations must be >= 1");
  if (!(feasibility_tol > 0.0)) throw std::invalid_argument("solver: feasibility_tol must be > 0");
  if (sparsity_k && *sparsity_k < 0) throw std::invalid_argument("solver: sparsity_k must be >= 0");
}

std::string to_string(Method method) {
  switch (method) {
    case Method::dantzig: return "dantzig";
    case Method::omp: return "omp";
    case Method::bpdn: return "bpdn";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "dantzig") return Method::dantzig;
  if (name == "omp") return Method::omp;
  if (name == "bpdn") return Method::bpdn;
  throw std::invalid_argument("unknown solver method '" + name + "'");
}

namespace {

constexpr double kNotApplicable = std::numeric_limits<double>::quiet_NaN();

void check_length(const Dictionary& d, const Measurement& y) {
  if (y.samples.size() != d.n_pulses())
    throw std::invalid_argument("measurement length " + std::to_string(y.samples.size()) +
                                " does not match dictionary rows " + std::to_string(d.n_pulses()));
}

// A = [Re G; -Re G; Im G; -Im G] for a Hermitian Gram matrix G = Re G + i Im G.
class GramBoxConstraints {
 public:
  explicit GramBoxConstraints(const Eigen::MatrixXcd& gram) : re_(gram.real()), im_(gram.imag()) {}

  Eigen::Index rows() const { return 4 * re_.rows(); }
  Eigen::Index cols() const { return re_.cols(); }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
    const Eigen::Index n = re_.rows();
    Eigen::VectorXd out(4 * n);
    out.segment(0, n) = re_ * x;
    out.segment(n, n) = -out.segment(0, n);
    out.segment(2 * n, n) = im_ * x;
    out.segment(3 * n, n) = -out.segment(2 * n, n);
    return out;
  }

  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& y) const {
    const Eigen::Index n = re_.rows();
    return re_.transpose() * (y.segment(0, n) - y.segment(n, n)) +
           im_.transpose() * (y.segment(2 * n, n) - y.segment(3 * n, n));
  }

  Eigen::MatrixXd normal_matrix(const Eigen::VectorXd& d) const {
    const Eigen::Index n = re_.rows();
    const Eigen::VectorXd dr = d.segment(0, n) + d.segment(n, n);
    const Eigen::VectorXd di = d.segment(2 * n, n) + d.segment(3 * n, n);
    Eigen::MatrixXd h = re_.transpose() * dr.asDiagonal() * re_;
    h.noalias() += im_.transpose() * di.asDiagonal() * im_;
    return h;
  }

 private:
  Eigen::MatrixXd re_;
  Eigen::MatrixXd im_;
};

double box_norm(const Eigen::VectorXcd& z) {
  if (z.size() == 0) return 0.0;
  return std::max(z.real().cwiseAbs().maxCoeff(), z.imag().cwiseAbs().maxCoeff());
}

double inf_norm(const Eigen::VectorXcd& z) { return z.size() == 0 ? 0.0 : z.cwiseAbs().maxCoeff(); }

// Smallest achievable max(|Re z|, |Im z|) over s >= 0, z = b - G s.
double min_box_residual(const Eigen::MatrixXcd& gram, const Eigen::VectorXcd& b,
                        const lp::Options& options) {
  const Eigen::Index n = gram.rows();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4 * n, n + 1);
  Eigen::VectorXd rhs(4 * n);
  const Eigen::MatrixXd re = gram.real(), im = gram.imag();
  a.block(0, 0, n, n) = re;
  a.block(n, 0, n, n) = -re;
  a.block(2 * n, 0, n, n) = im;
  a.block(3 * n, 0, n, n) = -im;
  a.col(n).setConstant(-1.0);
  rhs << b.real(), -b.real(), b.imag(), -b.imag();
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(n + 1);
  cost(n) = 1.0;
  const auto sol = lp::solve(cost, lp::DenseConstraints(std::move(a)), rhs, options);
  return sol.x(n);
}

RecoveryResult make_result(const Dictionary& d, const Measurement& y, Eigen::VectorXcd s) {
  RecoveryResult r;
  r.coefficients = std::move(s);
  const Eigen::VectorXcd residual = y.samples - d.matrix() * r.coefficients;
  r.residual_inf_norm = inf_norm(d.matrix().adjoint() * residual);
  r.objective = r.coefficients.cwiseAbs().sum();
  return r;
}

}  // namespace

MuBounds mu_bounds(const Dictionary& d, const Measurement& y, double noise_variance) {
  check_length(d, y);
  if (!(noise_variance >= 0.0)) throw std::invalid_argument("mu_bounds: negative noise variance");
  const double n = d.n_pulses();
  MuBounds b;
  b.lower = std::sqrt(2.0 * std::log(n) * noise_variance) * d.max_column_norm();
  b.upper = inf_norm(d.matrix().adjoint() * y.samples);
  if (!(b.upper > b.lower))
    throw SolverError(SolverError::Kind::no_admissible_mu,
                      "no admissible mu: upper bound " + std::to_string(b.upper) +
                          " <= lower bound " + std::to_string(b.lower));
  return b;
}

double noise_residual_bound(int n_pulses, double noise_variance) {
  const double n = static_cast<double>(n_pulses);
  return std::sqrt(n * noise_variance) * (1.0 + 2.0 / std::sqrt(n));
}

double resolve_mu(const Dictionary& d, const Measurement& y, const SolverConfig& cfg) {
  if (cfg.mu_rule == MuRule::fixed) return cfg.mu;
  const MuBounds b = mu_bounds(d, y, y.noise_variance);
  if (cfg.mu_rule == MuRule::formula) {
    const double mu = (1.0 + 1.0 / cfg.t_param) * b.lower;
    if (!(mu > 0.0 && mu < b.upper))
      throw SolverError(SolverError::Kind::no_admissible_mu,
                        "no admissible mu: formula value outside the bracket", mu);
    return mu;
  }
  // Noiseless measurements get a floor so the bracket stays non-degenerate.
  const double floor = 1e-6 * d.max_column_norm();
  const double lower = std::max(b.lower, floor);
  if (!(lower < b.upper))
    throw SolverError(SolverError::Kind::no_admissible_mu, "no admissible mu: bracket collapsed");
  return std::sqrt(lower * b.upper);
}

RecoveryResult dantzig_select(const Dictionary& d, const Measurement& y, const SolverConfig& cfg) {
  cfg.validate();
  check_length(d, y);
  const double mu = resolve_mu(d, y, cfg);
  const double box = mu / std::sqrt(2.0);
  const Eigen::MatrixXcd& psi = d.matrix();
  const Eigen::VectorXcd corr = psi.adjoint() * y.samples;
  const Eigen::Index n = psi.cols();

  RecoveryResult result;
  if (box_norm(corr) <= box) {
    result = make_result(d, y, Eigen::VectorXcd::Zero(n));
  } else {
    // Work in units of sigma_max^2 so the Gram matrix has a unit diagonal.
    const double scale = d.max_column_norm() * d.max_column_norm();
    const Eigen::MatrixXcd gram = (psi.adjoint() * psi) / scale;
    const Eigen::VectorXcd b = corr / scale;
    const double bound = box / scale;

    Eigen::VectorXd rhs(4 * n);
    rhs << (bound + b.real().array()).matrix(), (bound - b.real().array()).matrix(),
        (bound + b.imag().array()).matrix(), (bound - b.imag().array()).matrix();

    lp::Options options;
    options.max_iterations = cfg.max_iterations;
    options.tolerance = std::min(1e-10, 0.01 * cfg.feasibility_tol);
    options.primal_tolerance = 0.1 * cfg.feasibility_tol * bound;
    const auto sol = lp::solve(Eigen::VectorXd::Ones(n), GramBoxConstraints(gram), rhs, options);

    if (sol.status != lp::Status::optimal) {
      const double t = min_box_residual(gram, b, lp::Options{1e-9, 0.0, cfg.max_iterations}) * scale;
      if (t > box * (1.0 + cfg.feasibility_tol))
        throw SolverError(SolverError::Kind::infeasible,
                          "dantzig: constraint infeasible for mu = " + std::to_string(mu) +
                              " (smallest achievable box residual " + std::to_string(t) + ")",
                          mu, t);
      throw SolverError(SolverError::Kind::stalled, "dantzig: solver stalled", mu, t);
    }
    result = make_result(d, y, sol.x.cwiseMax(0.0).cast<cdouble>());
    result.iterations = sol.iterations;
  }
  result.mu = mu;
  finalize_detection(result, d, cfg);
  return result;
}

RecoveryResult omp(const Dictionary& d, const Measurement& y, const SolverConfig& cfg) {
  cfg.validate();
  check_length(d, y);
  const Eigen::MatrixXcd& psi = d.matrix();
  const int n = d.n_pulses();
  if (cfg.sparsity_k && *cfg.sparsity_k > n)
    throw std::invalid_argument("omp: K = " + std::to_string(*cfg.sparsity_k) + " exceeds N = " +
                                std::to_string(n));

  const double y_norm = y.samples.norm();
  const double threshold =
      cfg.sparsity_k ? 0.0
                     : std::max(noise_residual_bound(n, y.noise_variance),
                                cfg.feasibility_tol * y_norm);
  const int max_atoms = cfg.sparsity_k ? *cfg.sparsity_k : std::min(n, cfg.max_iterations);

  std::vector<int> selected;
  Eigen::VectorXcd residual = y.samples;
  Eigen::VectorXcd fit;
  std::vector<double> norms;
  std::vector<bool> used(static_cast<std::size_t>(psi.cols()), false);

  while (static_cast<int>(selected.size()) < max_atoms) {
    if (!cfg.sparsity_k && residual.norm() <= threshold) break;
    const Eigen::VectorXd corr = (psi.adjoint() * residual).cwiseAbs();
    int best = -1;
    for (Eigen::Index i = 0; i < corr.size(); ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      if (best < 0 || corr(i) > corr(best)) best = static_cast<int>(i);
    }
    if (best < 0 || !(corr(best) > 1e-13 * (1.0 + y_norm) * std::sqrt(n))) break;
    selected.push_back(best);
    used[static_cast<std::size_t>(best)] = true;

    Eigen::MatrixXcd sub(n, static_cast<Eigen::Index>(selected.size()));
    for (std::size_t j = 0; j < selected.size(); ++j) sub.col(static_cast<Eigen::Index>(j)) = psi.col(selected[j]);
    fit = sub.colPivHouseholderQr().solve(y.samples);
    residual = y.samples - sub * fit;
    norms.push_back(residual.norm());
  }

  Eigen::VectorXcd s = Eigen::VectorXcd::Zero(psi.cols());
  for (std::size_t j = 0; j < selected.size(); ++j) s(selected[j]) = fit(static_cast<Eigen::Index>(j));
  RecoveryResult result = make_result(d, y, std::move(s));
  result.iterations = static_cast<int>(selected.size());
  result.residual_norms = std::move(norms);
  finalize_detection(result, d, cfg);
  return result;
}

RecoveryResult bpdn(const Dictionary& d, const Measurement& y, const SolverConfig& cfg) {
  cfg.validate();
  check_length(d, y);
  const Eigen::MatrixXcd& psi = d.matrix();
  const Eigen::Index n = psi.cols();
  const int rows = d.n_pulses();

  // Real model: s >= 0, so || y - Psi s || = || [Re y; Im y] - [Re Psi; Im Psi] s ||.
  Eigen::MatrixXd a(2 * rows, n);
  a << psi.real(), psi.imag();
  Eigen::VectorXd target(2 * rows);
  target << y.samples.real(), y.samples.imag();

  const double y_norm = target.norm();
  const double eps = cfg.auto_epsilon ? noise_residual_bound(rows, y.noise_variance) : cfg.epsilon;
  if (eps >= y_norm) {
    RecoveryResult r = make_result(d, y, Eigen::VectorXcd::Zero(n));
    finalize_detection(r, d, cfg);
    return r;
  }

  // Homotopy over tau for min 1/2 ||target - A s||^2 + tau 1's, s >= 0. On a
  // fixed active set F: s_F(tau) = p - tau q with p = Q_FF^-1 c_F, q = Q_FF^-1 1,
  // and the residual norm satisfies ||r(tau)||^2 = ||r0||^2 + tau^2 ||A_F q||^2.
  const Eigen::MatrixXd gram = a.transpose() * a;
  const Eigen::VectorXd corr0 = a.transpose() * target;
  const double slack = cfg.feasibility_tol * y_norm;

  const double tau0 = corr0.maxCoeff();
  if (!(tau0 > 0.0)) {
    if (y_norm <= eps + slack) {
      RecoveryResult r = make_result(d, y, Eigen::VectorXcd::Zero(n));
      finalize_detection(r, d, cfg);
      return r;
    }
    throw SolverError(SolverError::Kind::infeasible,
                      "bpdn: no nonnegative combination reduces the residual", kNotApplicable, y_norm);
  }

  // Columns tied at the top enter together.
  const double guard = 1e-13 * tau0;
  std::vector<int> active;
  std::vector<bool> in_active(static_cast<std::size_t>(n), false);
  for (Eigen::Index j = 0; j < n; ++j)
    if (corr0(j) >= tau0 - guard) {
      active.push_back(static_cast<int>(j));
      in_active[static_cast<std::size_t>(j)] = true;
    }
  double tau = tau0;
  std::vector<int> last_changed = active;
  Eigen::VectorXd p, q;
  double stop_tau = -1.0;
  double min_residual = y_norm;
  int it = 0;

  for (; it < cfg.max_iterations; ++it) {
    const Eigen::Index f = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXd qff(f, f);
    Eigen::VectorXd cf(f);
    Eigen::MatrixXd af(a.rows(), f);
    for (Eigen::Index i = 0; i < f; ++i) {
      cf(i) = corr0(active[static_cast<std::size_t>(i)]);
      af.col(i) = a.col(active[static_cast<std::size_t>(i)]);
      for (Eigen::Index j = 0; j < f; ++j)
        qff(i, j) = gram(active[static_cast<std::size_t>(i)], active[static_cast<std::size_t>(j)]);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(qff);
    if (llt.info() != Eigen::Success)
      throw SolverError(SolverError::Kind::stalled, "bpdn: active set became rank deficient");
    p = llt.solve(cf);
    q = llt.solve(Eigen::VectorXd::Ones(f));
    const Eigen::VectorXd r0 = target - af * p;
    const double u_norm = (af * q).norm();
    const double r0_norm = r0.norm();

    // Next breakpoint below tau; events within the guard of it happen together.
    std::vector<std::pair<double, int>> drops, joins;
    for (Eigen::Index i = 0; i < f; ++i)
      if (q(i) < 0.0) drops.emplace_back(p(i) / q(i), active[static_cast<std::size_t>(i)]);
    const Eigen::VectorXd alpha = corr0 - gram(Eigen::all, active) * p;
    const Eigen::VectorXd beta = gram(Eigen::all, active) * q;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (in_active[static_cast<std::size_t>(j)]) continue;
      if (std::find(last_changed.begin(), last_changed.end(), static_cast<int>(j)) != last_changed.end()) continue;
      const double denom = 1.0 - beta(j);
      if (std::abs(denom) < 1e-15) continue;
      joins.emplace_back(alpha(j) / denom, static_cast<int>(j));
    }
    double next = 0.0;
    for (const auto& e : drops)
      if (e.first < tau - guard) next = std::max(next, e.first);
    for (const auto& e : joins)
      if (e.first < tau - guard) next = std::max(next, e.first);
    std::vector<int> leaving, entering;
    if (next > 0.0) {
      for (const auto& e : drops)
        if (e.first < tau - guard && e.first >= next - guard) leaving.push_back(e.second);
      for (const auto& e : joins)
        if (e.first < tau - guard && e.first >= next - guard) entering.push_back(e.second);
    }

    // Does the residual reach eps on [next, tau]?
    const double res_at_next = std::sqrt(r0_norm * r0_norm + next * next * u_norm * u_norm);
    if (res_at_next <= eps) {
      const double t = u_norm > 0.0 ? std::sqrt(std::max(eps * eps - r0_norm * r0_norm, 0.0)) / u_norm : 0.0;
      stop_tau = std::clamp(t, next, tau);
      break;
    }
    if (leaving.empty() && entering.empty()) {
      // Reached tau = 0 with residual above eps.
      min_residual = r0_norm;
      break;
    }
    tau = next;
    last_changed.clear();
    for (int j : leaving) {
      active.erase(std::find(active.begin(), active.end(), j));
      in_active[static_cast<std::size_t>(j)] = false;
      last_changed.push_back(j);
    }
    for (int j : entering) {
      active.push_back(j);
      in_active[static_cast<std::size_t>(j)] = true;
      last_changed.push_back(j);
    }
  }

  if (stop_tau < 0.0) {
    if (it >= cfg.max_iterations)
      throw SolverError(SolverError::Kind::stalled, "bpdn: homotopy exceeded max_iterations");
    if (min_residual <= eps + slack) {
      stop_tau = 0.0;
    } else {
      throw SolverError(SolverError::Kind::infeasible,
                        "bpdn: epsilon " + std::to_string(eps) + " below the smallest residual " +
                            std::to_string(min_residual),
                        kNotApplicable, min_residual);
    }
  }

  Eigen::VectorXcd s = Eigen::VectorXcd::Zero(n);
  const Eigen::VectorXd sf = (p - stop_tau * q).cwiseMax(0.0);
  for (std::size_t i = 0; i < active.size(); ++i) s(active[i]) = sf(static_cast<Eigen::Index>(i));
  RecoveryResult result = make_result(d, y, std::move(s));
  result.iterations = it + 1;
  finalize_detection(result, d, cfg);
  return result;
}

RecoveryResult recover(const Dictionary& d, const Measurement& y, const SolverConfig& cfg) {
  switch (cfg.method) {
    case Method::dantzig: return dantzig_select(d, y, cfg);
    case Method::omp: return omp(d, y, cfg);
    case Method::bpdn: return bpdn(d, y, cfg);
  }
  throw std::invalid_argument("recover: unknown method");
}

std::vector<int> extract_support(const Eigen::VectorXcd& coefficients, const SolverConfig& cfg) {
  const Eigen::VectorXd mag = coefficients.cwiseAbs();
  std::vector<int> out;
  if (mag.size() == 0) return out;
  const double peak = mag.maxCoeff();
  if (!(peak > 0.0)) return out;

  if (cfg.sparsity_k) {
    std::vector<int> order(static_cast<std::size_t>(mag.size()));
    std::iota(order.begin(), order.end(), 0);
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(*cfg.sparsity_k), order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](int i, int j) { return mag(i) > mag(j) || (mag(i) == mag(j) && i < j); });
    for (std::size_t i = 0; i < k; ++i)
      if (mag(order[i]) > 0.0) out.push_back(order[i]);
  } else {
    for (Eigen::Index i = 0; i < mag.size(); ++i)
      if (mag(i) > 0.1 * peak) out.push_back(static_cast<int>(i));
  }
  std::sort(out.begin(), out.end());
  return out;
}

void finalize_detection(RecoveryResult& result, const Dictionary& d, const SolverConfig& cfg) {
  result.support = extract_support(result.coefficients, cfg);
  result.no_detection = result.support.empty();
  result.targets.clear();
  for (int col : result.support) {
    DetectedTarget t;
    t.range_index = d.range_index(col);
    t.speed_index = d.speed_index(col);
    t.magnitude = std::abs(result.coefficients(col));
    if (d.grid()) {
      t.range = d.grid()->range(t.range_index);
      t.speed = d.grid()->speed(t.speed_index);
    } else {
      t.range = t.speed = std::numeric_limits<double>::quiet_NaN();
    }
    result.targets.push_back(t);
  }
}

}  // namespace sfrcs
