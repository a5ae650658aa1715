#pragma once

// Dense primal-dual interior-point solver for
//
//   minimize c'x  subject to  A x <= b,  x >= 0.
//
// The constraint matrix is reached only through a small operator interface
// so that structured matrices can supply a cheap normal matrix A' D A:
//
//   Index rows() const;  Index cols() const;
//   VectorXd apply(const VectorXd& x) const;            // A x
//   VectorXd apply_transpose(const VectorXd& y) const;  // A' y
//   MatrixXd normal_matrix(const VectorXd& d) const;    // A' diag(d) A

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace sfrcs::lp {

struct Options {
  double tolerance = 1e-10;
  /// Optional absolute bound on || A x + w - b ||_inf; ignored when <= 0.
  double primal_tolerance = 0.0;
  int max_iterations = 200;
};

enum class Status { optimal, diverged, iteration_limit };

struct Solution {
  Status status = Status::iteration_limit;
  Eigen::VectorXd x;      // primal variables
  Eigen::VectorXd slack;  // b - A x
  Eigen::VectorXd dual;   // multipliers of A x <= b
  double objective = 0.0;
  int iterations = 0;
};

/// Plain dense constraint matrix.
class DenseConstraints {
 public:
  explicit DenseConstraints(Eigen::MatrixXd a) : a_(std::move(a)) {}
  Eigen::Index rows() const { return a_.rows(); }
  Eigen::Index cols() const { return a_.cols(); }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return a_ * x; }
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& y) const { return a_.transpose() * y; }
  Eigen::MatrixXd normal_matrix(const Eigen::VectorXd& d) const {
    return a_.transpose() * d.asDiagonal() * a_;
  }

 private:
  Eigen::MatrixXd a_;
};

namespace detail {

inline double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
  double alpha = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (dv(i) < 0.0) alpha = std::min(alpha, -v(i) / dv(i));
  return alpha;
}

inline double inf_norm(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

}  // namespace detail

/// Mehrotra predictor-corrector. Starts from the all-ones point; primal
/// infeasibility shows up as divergence of the dual multipliers.
template <typename Constraints>
Solution solve(const Eigen::VectorXd& cost, const Constraints& a, const Eigen::VectorXd& rhs,
               const Options& options = {}) {
  using Eigen::VectorXd;
  const Eigen::Index n = a.cols();
  const Eigen::Index m = a.rows();
  const double dim = static_cast<double>(n + m);

  VectorXd x = VectorXd::Ones(n), z = VectorXd::Ones(n);
  VectorXd w = VectorXd::Ones(m), y = VectorXd::Ones(m);
  const double b_scale = 1.0 + detail::inf_norm(rhs);
  const double c_scale = 1.0 + detail::inf_norm(cost);

  Solution out;
  for (int it = 0; it < options.max_iterations; ++it) {
    out.iterations = it;
    const VectorXd rp = a.apply(x) + w - rhs;
    const VectorXd rd = cost + a.apply_transpose(y) - z;
    const double gap = x.dot(z) + w.dot(y);
    const double mu = gap / dim;
    const double pobj = cost.dot(x);
    const double dobj = -rhs.dot(y);

    const double primal_limit = options.primal_tolerance > 0.0
                                    ? std::min(options.tolerance * b_scale, options.primal_tolerance)
                                    : options.tolerance * b_scale;
    if (detail::inf_norm(rp) <= primal_limit &&
        detail::inf_norm(rd) <= options.tolerance * c_scale &&
        std::abs(pobj - dobj) <= options.tolerance * (1.0 + std::abs(pobj))) {
      out.status = Status::optimal;
      break;
    }
    if (!std::isfinite(gap) || detail::inf_norm(y) > 1e12 * c_scale ||
        detail::inf_norm(x) > 1e12 * b_scale) {
      out.status = Status::diverged;
      break;
    }

    const VectorXd d = y.cwiseQuotient(w);
    Eigen::MatrixXd h = a.normal_matrix(d);
    h.diagonal() += z.cwiseQuotient(x);
    Eigen::LLT<Eigen::MatrixXd> llt(h);
    if (llt.info() != Eigen::Success) {
      h.diagonal().array() += 1e-12 * (1.0 + h.diagonal().cwiseAbs().maxCoeff());
      llt.compute(h);
      if (llt.info() != Eigen::Success) {
        out.status = Status::diverged;
        break;
      }
    }

    // Newton system for complementarity targets r_xz = XZe - .., r_wy = WYe - ..
    auto newton = [&](const VectorXd& r_xz, const VectorXd& r_wy, VectorXd& dx, VectorXd& dy,
                      VectorXd& dz, VectorXd& dw) {
      const VectorXd t = rp - r_wy.cwiseQuotient(y);
      const VectorXd rhs_x = -rd - r_xz.cwiseQuotient(x) - a.apply_transpose(d.cwiseProduct(t));
      dx = llt.solve(rhs_x);
      dy = d.cwiseProduct(a.apply(dx) + t);
      dz = (-r_xz - z.cwiseProduct(dx)).cwiseQuotient(x);
      dw = (-r_wy - w.cwiseProduct(dy)).cwiseQuotient(y);
    };

    VectorXd dx, dy, dz, dw;
    newton(x.cwiseProduct(z), w.cwiseProduct(y), dx, dy, dz, dw);
    const double ap_aff = std::min(detail::max_step(x, dx), detail::max_step(w, dw));
    const double ad_aff = std::min(detail::max_step(z, dz), detail::max_step(y, dy));
    const double mu_aff = ((x + ap_aff * dx).dot(z + ad_aff * dz) +
                           (w + ap_aff * dw).dot(y + ad_aff * dy)) /
                          dim;
    const double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);

    const VectorXd r_xz = x.cwiseProduct(z) + dx.cwiseProduct(dz) - VectorXd::Constant(n, sigma * mu);
    const VectorXd r_wy = w.cwiseProduct(y) + dw.cwiseProduct(dy) - VectorXd::Constant(m, sigma * mu);
    newton(r_xz, r_wy, dx, dy, dz, dw);

    const double ap = std::min(1.0, 0.995 * std::min(detail::max_step(x, dx), detail::max_step(w, dw)));
    const double ad = std::min(1.0, 0.995 * std::min(detail::max_step(z, dz), detail::max_step(y, dy)));
    x += ap * dx;
    w += ap * dw;
    z += ad * dz;
    y += ad * dy;
    out.iterations = it + 1;
  }

  out.x = x;
  out.slack = rhs - a.apply(x);
  out.dual = y;
  out.objective = cost.dot(x);
  return out;
}

}  // namespace sfrcs::lp
