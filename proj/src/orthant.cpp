#include "condorcet/orthant.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "condorcet/error.hpp"
#include "condorcet/parallel.hpp"
#include "condorcet/rng.hpp"

namespace condorcet {

namespace {

using std::numbers::pi;

constexpr std::array<int, 32> kPrimes = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,  31,  37,  41,  43,  47,  53,
                                         59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131};

// Student t 0.995 quantile, 15 degrees of freedom (16 shifts).
constexpr double kT99 = 2.947;

double upper_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

// z with upper_tail(z) = q
double upper_tail_inverse(double q) { return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * q); }

Eigen::LLT<Eigen::MatrixXd> checked_cholesky(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols()) throw InvalidInput("orthant: matrix must be square");
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw InvalidInput("orthant: matrix must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) throw InvalidInput("orthant: matrix is not positive definite");
  for (int i = 0; i < M.rows(); ++i)
    if (!(llt.matrixL()(i, i) > 0.0)) throw InvalidInput("orthant: matrix is not positive definite");
  return llt;
}

double log_det_from_cholesky(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  double s = 0.0;
  for (int i = 0; i < llt.matrixL().rows(); ++i) s += std::log(llt.matrixL()(i, i));
  return 2.0 * s;
}

// (2 pi)^{c/2} det(M)^{-1/2}: the Gaussian normalization linking the integral
// to an orthant expectation under N(0, M^{-1}).
double gaussian_scale(int c, double log_det_m) { return std::exp(0.5 * c * std::log(2.0 * pi) - 0.5 * log_det_m); }

// E[w(U) 1{U > 0}] for U ~ N(0, Sigma) by randomized Kronecker-lattice QMC over
// the sequential conditioning (Genz) transform.
OrthantResult qmc_orthant_expectation(const Eigen::MatrixXd& sigma, const CubicWeight* weight, const OrthantRequest& req) {
  const int c = static_cast<int>(sigma.rows());
  if (c > static_cast<int>(kPrimes.size())) throw InvalidInput("orthant: dimension too large for QMC");
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) throw InvalidInput("orthant: covariance is not positive definite");
  const Eigen::MatrixXd L = llt.matrixL();

  // without a weight the last coordinate only contributes its tail mass
  const int sampled = weight ? c : c - 1;
  std::vector<double> alpha(static_cast<std::size_t>(std::max(sampled, 0)));
  for (int i = 0; i < sampled; ++i) alpha[i] = std::sqrt(static_cast<double>(kPrimes[i])) - std::floor(std::sqrt(static_cast<double>(kPrimes[i])));

  const int shifts = std::max(2, req.qmc_shifts);
  std::vector<std::vector<double>> shift(static_cast<std::size_t>(shifts));
  for (int s = 0; s < shifts; ++s) {
    CounterRng rng(req.seed, static_cast<std::uint64_t>(s));
    shift[s].resize(alpha.size());
    for (double& v : shift[s]) v = rng.uniform();
  }

  auto integrand = [&](const std::vector<double>& x, Eigen::VectorXd& z, Eigen::VectorXd& u) {
    double f = 1.0;
    for (int i = 0; i < c; ++i) {
      double partial = 0.0;
      for (int k = 0; k < i; ++k) partial += L(i, k) * z[k];
      const double lower = -partial / L(i, i);
      const double tail = upper_tail(lower);
      f *= tail;
      if (f == 0.0) return 0.0;
      if (i < sampled) {
        const double w = std::clamp(x[i], 1e-16, 1.0 - 1e-16);
        z[i] = upper_tail_inverse((1.0 - w) * tail);
      } else {
        z[i] = 0.0;
      }
    }
    if (!weight) return f;
    u = L * z;
    return f * (*weight)(u);
  };

  std::vector<double> sums(static_cast<std::size_t>(shifts), 0.0);
  const long long max_points = std::max(1, req.qmc_points);
  long long done = 0;
  long long target = std::min<long long>(1024, max_points);
  double mean = 0.0, err = 0.0;
  while (true) {
    parallel_for(static_cast<std::size_t>(shifts), [&](std::size_t s) {
      std::vector<double> x(alpha.size());
      Eigen::VectorXd z(c), u(c);
      double acc = 0.0;
      for (long long k = done + 1; k <= target; ++k) {
        for (std::size_t i = 0; i < alpha.size(); ++i) {
          double v = std::fmod(static_cast<double>(k) * alpha[i] + shift[s][i], 1.0);
          x[i] = 1.0 - std::abs(2.0 * v - 1.0);  // baker's transform
        }
        acc += integrand(x, z, u);
      }
      sums[s] += acc;
    });
    done = target;
    // shift estimates combined in shift order
    mean = 0.0;
    for (double s : sums) mean += s / static_cast<double>(done);
    mean /= shifts;
    double var = 0.0;
    for (double s : sums) {
      const double e = s / static_cast<double>(done) - mean;
      var += e * e;
    }
    var /= static_cast<double>(shifts) * (shifts - 1);
    err = kT99 * std::sqrt(var);
    if (err <= req.rel_tol * std::abs(mean) || done >= max_points) break;
    target = std::min(2 * done, max_points);
  }
  return {mean, err};
}

// E[prod_k U_k^{pow_k} 1{U > 0}] for U ~ N(0, sigma), by Gaussian
// integration by parts: each step lowers the degree or, through the boundary
// term at U_l = 0, the dimension.
double moment_rec(const Eigen::MatrixXd& sigma, std::vector<int> pow, const OrthantRequest& req) {
  const int c = static_cast<int>(sigma.rows());
  if (c == 0) return 1.0;
  int i = -1;
  for (int k = 0; k < c; ++k)
    if (pow[k] > 0) {
      i = k;
      break;
    }
  if (i < 0) {
    if (c <= 3) return orthant_probability_closed_form(sigma);
    OrthantRequest sub = req;
    sub.weight.reset();
    return qmc_orthant_expectation(sigma, nullptr, sub).value;
  }
  --pow[i];
  double total = 0.0;
  for (int l = 0; l < c; ++l) {
    const double s_il = sigma(i, l);
    if (s_il == 0.0) continue;
    if (pow[l] > 0) {
      std::vector<int> q = pow;
      const int factor = q[l]--;
      total += s_il * factor * moment_rec(sigma, q, req);
    } else {
      // U_l = 0 on the boundary; the rest is conditionally Gaussian
      Eigen::MatrixXd cond(c - 1, c - 1);
      std::vector<int> q;
      for (int a = 0, ra = 0; a < c; ++a) {
        if (a == l) continue;
        q.push_back(pow[a]);
        for (int b = 0, rb = 0; b < c; ++b) {
          if (b == l) continue;
          cond(ra, rb++) = sigma(a, b) - sigma(a, l) * sigma(l, b) / sigma(l, l);
        }
        ++ra;
      }
      const double density = 1.0 / std::sqrt(2.0 * pi * sigma(l, l));
      total += s_il * density * moment_rec(cond, q, req);
    }
  }
  return total;
}

}  // namespace

double orthant_moment(const Eigen::MatrixXd& sigma, const std::vector<int>& powers) {
  if (static_cast<int>(powers.size()) != sigma.rows()) throw InvalidInput("orthant_moment: power vector size mismatch");
  for (int p : powers)
    if (p < 0) throw InvalidInput("orthant_moment: powers must be non-negative");
  checked_cholesky(sigma);
  return moment_rec(sigma, powers, OrthantRequest{});
}

CubicWeight::CubicWeight(int c)
    : linear(Eigen::VectorXd::Zero(c)), quadratic(Eigen::MatrixXd::Zero(c, c)), cubic(c) {}

double CubicWeight::operator()(const Eigen::VectorXd& u) const {
  const int c = dim();
  double v = constant + linear.dot(u) + u.dot(quadratic * u);
  if (cubic.max_abs() != 0.0)
    for (int i = 0; i < c; ++i)
      for (int j = 0; j < c; ++j) {
        const double uij = u[i] * u[j];
        for (int k = 0; k < c; ++k) v += cubic(i, j, k) * uij * u[k];
      }
  return v;
}

CubicWeight CubicWeight::one(int c) {
  CubicWeight w(c);
  w.constant = 1.0;
  return w;
}

CubicWeight CubicWeight::linear_form(const Eigen::VectorXd& coeffs) {
  CubicWeight w(static_cast<int>(coeffs.size()));
  w.linear = coeffs;
  return w;
}

double orthant_probability_closed_form(const Eigen::MatrixXd& sigma) {
  const int c = static_cast<int>(sigma.rows());
  auto corr = [&](int i, int j) { return sigma(i, j) / std::sqrt(sigma(i, i) * sigma(j, j)); };
  switch (c) {
    case 0: return 1.0;
    case 1: return 0.5;
    case 2: return 0.25 + std::asin(corr(0, 1)) / (2.0 * pi);
    case 3: return 0.125 + (std::asin(corr(0, 1)) + std::asin(corr(0, 2)) + std::asin(corr(1, 2))) / (4.0 * pi);
    default: throw InvalidInput("orthant: closed form only for dimension <= 3");
  }
}

OrthantResult orthant_integral(const OrthantRequest& req) {
  const int c = static_cast<int>(req.M.rows());
  if (c == 0) return {1.0, 0.0};
  const auto llt = checked_cholesky(req.M);
  const double scale = gaussian_scale(c, log_det_from_cholesky(llt));
  if (c == 1) return {std::sqrt(pi / (2.0 * req.M(0, 0))), 0.0};
  const Eigen::MatrixXd sigma = llt.solve(Eigen::MatrixXd::Identity(c, c));
  if (c <= 3) return {scale * orthant_probability_closed_form(sigma), 0.0};
  const OrthantResult e = qmc_orthant_expectation(sigma, nullptr, req);
  return {scale * e.value, scale * e.error};
}

OrthantResult orthant_weighted_integral(const OrthantRequest& req) {
  const int c = static_cast<int>(req.M.rows());
  const CubicWeight weight = req.weight ? *req.weight : CubicWeight::one(c);
  if (weight.dim() != c) throw InvalidInput("orthant: weight dimension mismatch");
  if (c == 0) return {weight.constant, 0.0};
  const auto llt = checked_cholesky(req.M);
  const double scale = gaussian_scale(c, log_det_from_cholesky(llt));
  const Eigen::MatrixXd sigma = llt.solve(Eigen::MatrixXd::Identity(c, c));
  if (c <= 3 && !req.force_qmc) {
    // exact: combine closed-form orthant moments
    std::vector<int> pow(static_cast<std::size_t>(c), 0);
    auto mom = [&](std::initializer_list<int> idx) {
      std::fill(pow.begin(), pow.end(), 0);
      for (int k : idx) ++pow[k];
      return moment_rec(sigma, pow, req);
    };
    double v = weight.constant * mom({});
    for (int a = 0; a < c; ++a) {
      if (weight.linear[a] != 0.0) v += weight.linear[a] * mom({a});
      for (int b = 0; b < c; ++b) {
        if (weight.quadratic(a, b) != 0.0) v += weight.quadratic(a, b) * mom({a, b});
        if (weight.cubic.dim() == c)
          for (int e = 0; e < c; ++e)
            if (weight.cubic(a, b, e) != 0.0) v += weight.cubic(a, b, e) * mom({a, b, e});
      }
    }
    return {scale * v, 0.0};
  }
  const OrthantResult e = qmc_orthant_expectation(sigma, &weight, req);
  return {scale * e.value, scale * e.error};
}

double ic_limit_erf(int m) {
  if (m < 2) throw InvalidInput("ic_limit_erf: m must be >= 2");
  auto f = [m](double u) { return std::exp(-u * u) * std::pow(upper_tail(u), m - 1); };
  // Outside (-10, 10) the integrand is below e^{-100}.
  double err = 0.0;
  const double body =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -10.0, 0.0, 20, 1e-15, &err) +
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 10.0, 20, 1e-15, &err);
  return body / std::sqrt(pi);
}

}  // namespace condorcet
