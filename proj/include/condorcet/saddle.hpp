#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "condorcet/culture.hpp"
#include "condorcet/polyalg.hpp"

namespace condorcet {

enum class Criticality { Subcritical, Critical, Supercritical };

const char* to_string(Criticality c);

/// Victory thresholds, indexed by adversary bit (same order as
/// CharPoly::adversaries()). The candidate must beat adversary j by more than
/// alpha_j n voters (at least alpha_j n when `weak`).
struct Thresholds {
  std::vector<double> alpha;
  std::vector<double> beta;  // 1 - alpha
  bool weak = false;

  /// Throws InvalidInput unless every alpha_j lies in (0, 1).
  static Thresholds from_alpha(std::vector<double> alpha, bool weak = false);
  /// alpha = 1/2 for each of the d adversaries.
  static Thresholds condorcet(int d, bool weak = false);

  int dim() const { return static_cast<int>(alpha.size()); }
};

/// (beta_X, alpha_Y) in the variable order of `p`.
std::vector<double> saddle_target(const XYPoly& p, const Thresholds& th);

struct SaddleOptions {
  double tolerance = 1e-12;  // on ||grad K(tau) - target||_inf
  int max_iterations = 200;
  int max_halvings = 40;
  double eps_c = 1e-9;       // criticality band
  double warn_band = 1e-4;   // warn when eps_c < |zeta_j - 1| <= warn_band
};

struct SaddleResult {
  Eigen::VectorXd tau;
  Eigen::VectorXd zeta;
  Eigen::MatrixXd hessian;  // H_K(tau)
  double log_p = 0.0;       // K(tau) = log P(zeta)
  std::vector<Criticality> classes;
  int iterations = 0;
  double residual = 0.0;
  std::vector<std::string> warnings;

  int dim() const { return static_cast<int>(tau.size()); }
  bool any(Criticality c) const;
};

std::vector<Criticality> classify(std::span<const double> zeta, double eps_c = 1e-9);

/// Solves grad K(tau) = target by damped Newton from tau = 0. Throws
/// SolverFailure (carrying the last iterate) on non-convergence and
/// InvalidInput when a target coordinate is outside (0, 1).
SaddleResult solve_saddle(const MultilinearPoly& p, std::span<const double> target, const SaddleOptions& opts = {});

inline SaddleResult solve_saddle(const CharPoly& p, const Thresholds& th, const SaddleOptions& opts = {}) {
  return solve_saddle(p.poly(), th.beta, opts);
}
inline SaddleResult solve_saddle(const XYPoly& p, const Thresholds& th, const SaddleOptions& opts = {}) {
  return solve_saddle(p.poly, saddle_target(p, th), opts);
}

/// Fills the derived fields (zeta, hessian, log_p, classes, warnings) of a
/// saddle point known in closed form, e.g. after a coordinate inversion.
SaddleResult saddle_at(const MultilinearPoly& p, Eigen::VectorXd tau, std::span<const double> target,
                       const SaddleOptions& opts = {});

enum class MallowsOrientation { Last, First };

/// Closed-form log saddle point for the Condorcet thresholds under a Mallows
/// culture whose reference ranks the candidate last (tau_j = (2j - m - 2) rho / 2)
/// or first (the negated progression).
std::vector<double> mallows_saddle(int m, double rho, MallowsOrientation orientation);

}  // namespace condorcet
