#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "condorcet/polyalg.hpp"

namespace condorcet {

/// Polynomial of total degree <= 3 in c variables:
///   w(u) = constant + sum_i linear_i u_i + sum_ij quadratic_ij u_i u_j
///          + sum_ijk cubic_ijk u_i u_j u_k
struct CubicWeight {
  double constant = 0.0;
  Eigen::VectorXd linear;
  Eigen::MatrixXd quadratic;
  Tensor3 cubic;

  explicit CubicWeight(int c = 0);
  int dim() const { return static_cast<int>(linear.size()); }
  double operator()(const Eigen::VectorXd& u) const;

  static CubicWeight one(int c);
  static CubicWeight linear_form(const Eigen::VectorXd& coeffs);
};

/// Integral of weight(u) e^{-u^T M u / 2} over the positive orthant of R^c.
struct OrthantRequest {
  Eigen::MatrixXd M;
  std::optional<CubicWeight> weight;
  double rel_tol = 1e-7;
  int qmc_points = 1 << 16;  // per shift, upper bound
  int qmc_shifts = 16;
  std::uint64_t seed = 0x5eed;
  // Weighted integrals with c <= 3 use exact orthant moments unless set.
  bool force_qmc = false;
};

struct OrthantResult {
  double value = 0.0;
  double error = 0.0;  // absolute, ~99% confidence half-width; 0 for closed forms
};

/// Closed forms for c <= 3; randomized QMC over the Genz sequential
/// conditioning transform for c >= 4. Throws InvalidInput when M is not
/// symmetric positive definite.
OrthantResult orthant_integral(const OrthantRequest& req);

/// Exact for c <= 3 (closed-form orthant moments), QMC otherwise. The weight
/// defaults to 1 when absent.
OrthantResult orthant_weighted_integral(const OrthantRequest& req);

/// P(N(0, Sigma) > 0) for a c x c covariance, c <= 3, in arcsine closed form.
double orthant_probability_closed_form(const Eigen::MatrixXd& sigma);

/// E[prod_k U_k^{powers_k} 1{U > 0}] for U ~ N(0, sigma). Exact when every
/// orthant probability met in the recursion has dimension <= 3.
double orthant_moment(const Eigen::MatrixXd& sigma, const std::vector<int>& powers);

/// (1/sqrt(pi)) * integral of e^{-u^2} (1 - Phi(u))^{m-1} du over R.
double ic_limit_erf(int m);

}  // namespace condorcet
