#pragma once

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sfrcs/dictionary.hpp"
#include "sfrcs/signal_model.hpp"

namespace sfrcs {

enum class Method { dantzig, omp, bpdn };

/// How the Dantzig threshold is chosen.
enum class MuRule {
  fixed,      // SolverConfig::mu as given
  automatic,  // geometric mean of the admissible bracket
  formula,    // (1 + 1/t) * lower bound
};

struct SolverConfig {
  Method method = Method::dantzig;
  MuRule mu_rule = MuRule::automatic;
  double mu = 0.0;
  double t_param = 1.0;
  double epsilon = 0.0;  // BPDN residual bound
  /// BPDN: replace epsilon by noise_residual_bound of the measurement.
  bool auto_epsilon = false;
  int max_iterations = 500;
  double feasibility_tol = 1e-8;
  std::optional<int> sparsity_k;

  void validate() const;
};

/// Failure modes of the sparse solvers. `mu` and `min_residual` are NaN
/// when they do not apply.
class SolverError : public std::runtime_error {
 public:
  enum class Kind { no_admissible_mu, infeasible, stalled };

  SolverError(Kind kind, const std::string& what, double mu = kNaN, double min_residual = kNaN)
      : std::runtime_error(what), kind_(kind), mu_(mu), min_residual_(min_residual) {}

  Kind kind() const { return kind_; }
  double mu() const { return mu_; }
  double min_residual() const { return min_residual_; }

 private:
  static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  Kind kind_;
  double mu_;
  double min_residual_;
};

struct DetectedTarget {
  int range_index = 0;
  int speed_index = 0;
  double range = 0.0;
  double speed = 0.0;
  double magnitude = 0.0;
};

struct RecoveryResult {
  Eigen::VectorXcd coefficients;  // real nonnegative for dantzig and bpdn
  std::vector<int> support;       // sorted column indices
  std::vector<DetectedTarget> targets;
  double residual_inf_norm = 0.0;  // || Psi^H (y - Psi s) ||_inf
  double objective = 0.0;          // || s ||_1
  double mu = 0.0;                 // Dantzig threshold actually used
  int iterations = 0;
  bool no_detection = false;
  std::vector<double> residual_norms;  // OMP: ||y - Psi s|| after each selection
};

struct MuBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// lower = sqrt(2 ln N sigma^2) sigma_max, upper = || Psi^H y ||_inf.
/// Throws SolverError(no_admissible_mu) when upper <= lower.
MuBounds mu_bounds(const Dictionary& d, const Measurement& y, double noise_variance);

/// sqrt(N sigma^2) (1 + 2 / sqrt(N)): a noise-only residual norm stays
/// below this with high probability. Also the OMP stopping threshold.
double noise_residual_bound(int n_pulses, double noise_variance);

/// Threshold the Dantzig selector uses for this measurement under cfg.
double resolve_mu(const Dictionary& d, const Measurement& y, const SolverConfig& cfg);

RecoveryResult dantzig_select(const Dictionary& d, const Measurement& y, const SolverConfig& cfg);
RecoveryResult omp(const Dictionary& d, const Measurement& y, const SolverConfig& cfg);
RecoveryResult bpdn(const Dictionary& d, const Measurement& y, const SolverConfig& cfg);

/// Dispatches on cfg.method.
RecoveryResult recover(const Dictionary& d, const Measurement& y, const SolverConfig& cfg);

/// Top-K magnitudes when K is known, otherwise everything above 10% of the peak.
std::vector<int> extract_support(const Eigen::VectorXcd& coefficients, const SolverConfig& cfg);

/// Fills support, targets and no_detection of `result` from its coefficients.
void finalize_detection(RecoveryResult& result, const Dictionary& d, const SolverConfig& cfg);

std::string to_string(Method method);
Method parse_method(const std::string& name);

}  // namespace sfrcs
