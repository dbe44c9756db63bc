#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "condorcet/error.hpp"
#include "condorcet/orthant.hpp"
#include "condorcet/polyalg.hpp"

using namespace condorcet;
using std::numbers::pi;

namespace {

struct MCOracle {
  double mean;
  double se;
};

// Plain Monte Carlo for E[w(U) 1{U > 0}], U ~ N(0, sigma).
template <typename W>
MCOracle rejection(const Eigen::MatrixXd& sigma, W w, long long samples, std::uint64_t seed) {
  const int c = static_cast<int>(sigma.rows());
  const Eigen::MatrixXd L = sigma.llt().matrixL();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXd z(c), u(c);
  double s = 0.0, s2 = 0.0;
  for (long long i = 0; i < samples; ++i) {
    for (int k = 0; k < c; ++k) z[k] = g(rng);
    u = L * z;
    const double v = (u.array() > 0).all() ? w(u) : 0.0;
    s += v;
    s2 += v * v;
  }
  const double mean = s / samples;
  return {mean, std::sqrt((s2 / samples - mean * mean) / samples)};
}

double gaussian_scale(const Eigen::MatrixXd& M) {
  const int c = static_cast<int>(M.rows());
  return std::pow(2 * pi, c / 2.0) / std::sqrt(M.determinant());
}

Eigen::MatrixXd random_spd(int c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd A(c, c);
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < c; ++j) A(i, j) = g(rng);
  Eigen::MatrixXd M = A * A.transpose() + 0.5 * Eigen::MatrixXd::Identity(c, c);
  return 0.5 * (M + M.transpose());
}

Eigen::MatrixXd ic_hessian(int d) {
  return (Eigen::MatrixXd::Identity(d, d) + 0.5 * Eigen::MatrixXd::Ones(d, d)) / 6.0;
}

OrthantRequest request(Eigen::MatrixXd M) {
  OrthantRequest r;
  r.M = std::move(M);
  return r;
}

}  // namespace

TEST_CASE("closed-form examples") {
  CHECK(orthant_integral(request(Eigen::MatrixXd::Identity(1, 1))).value == doctest::Approx(std::sqrt(pi / 2)).epsilon(1e-15));
  CHECK(orthant_integral(request(Eigen::MatrixXd::Identity(2, 2))).value == doctest::Approx(pi / 2).epsilon(1e-15));
  CHECK(orthant_integral(request(Eigen::MatrixXd::Identity(3, 3))).value == doctest::Approx(std::pow(pi / 2, 1.5)).epsilon(1e-14));
  CHECK(orthant_integral(request(Eigen::MatrixXd(0, 0))).value == 1.0);

  const Eigen::MatrixXd H = ic_hessian(2);
  const double v = orthant_integral(request(H.inverse())).value;
  CHECK(v == doctest::Approx(0.45034).epsilon(2e-5));
  const double a0 = v / std::sqrt(std::pow(2 * pi, 2) * H.determinant());
  CHECK(std::abs(a0 - 0.304086723984094) < 1e-9);
  CHECK(std::abs(a0 - (0.25 + std::asin(1.0 / 3) / (2 * pi))) < 1e-14);
}

TEST_CASE("invalid matrices are rejected") {
  Eigen::MatrixXd M(2, 2);
  M << 1, 2, 2, 1;
  CHECK_THROWS_AS(orthant_integral(request(M)), InvalidInput);
  M << 1, 0.5, 0.4, 1;
  CHECK_THROWS_AS(orthant_integral(request(M)), InvalidInput);
  CHECK_THROWS_AS(orthant_integral(request(Eigen::MatrixXd::Zero(2, 3))), InvalidInput);
}

TEST_CASE("change of variables against rejection sampling, c <= 4") {
  std::mt19937_64 rng(31);
  for (int c = 1; c <= 4; ++c)
    for (int trial = 0; trial < 3; ++trial) {
      const Eigen::MatrixXd M = random_spd(c, rng);
      const OrthantResult r = orthant_integral(request(M));
      const auto mc = rejection(M.inverse(), [](const Eigen::VectorXd&) { return 1.0; }, 1000000, 100 + c * 10 + trial);
      const double scale = gaussian_scale(M);
      CHECK(std::abs(r.value - scale * mc.mean) < 4 * scale * mc.se + r.error);
    }
}

TEST_CASE("QMC in dimension >= 4 is accurate and reports its error") {
  // independent coordinates: (pi/2)^{c/2}
  for (int c : {4, 5, 6}) {
    const OrthantResult r = orthant_integral(request(Eigen::MatrixXd::Identity(c, c)));
    CHECK(r.value == doctest::Approx(std::pow(pi / 2, c / 2.0)).epsilon(1e-6));
  }
  // IC m=5: equicorrelated with rho = 1/3; P(all > 0) has no elementary
  // form, so compare against the m=5 erf integral through the a0 identity
  const Eigen::MatrixXd H = ic_hessian(4);
  const OrthantResult r = orthant_integral(request(H.inverse()));
  const double a0 = r.value / std::sqrt(std::pow(2 * pi, 4) * H.determinant());
  CHECK(std::abs(a0 - ic_limit_erf(5)) < 1e-6);
  CHECK(r.error >= 0.0);
  CHECK(r.error < 1e-5 * r.value);
}

TEST_CASE("weighted integrals") {
  const Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
  OrthantRequest lin = request(one);
  lin.weight = CubicWeight::linear_form(Eigen::VectorXd::Ones(1));
  CHECK(orthant_weighted_integral(lin).value == doctest::Approx(1.0).epsilon(1e-14));
  lin.force_qmc = true;
  const OrthantResult lq = orthant_weighted_integral(lin);
  CHECK(std::abs(lq.value - 1.0) <= 3 * lq.error);
  CHECK(lq.error < 1e-4);

  std::mt19937_64 rng(32);
  for (int c = 1; c <= 3; ++c) {
    const Eigen::MatrixXd M = random_spd(c, rng);
    OrthantRequest unit = request(M);
    CHECK(orthant_weighted_integral(unit).value == doctest::Approx(orthant_integral(request(M)).value).epsilon(1e-13));
    unit.force_qmc = true;
    const OrthantResult q = orthant_weighted_integral(unit);
    CHECK(std::abs(q.value - orthant_integral(request(M)).value) <= 3 * q.error + 1e-12);
  }
}

TEST_CASE("IC m=3 linear weight against a rejection oracle") {
  const Eigen::MatrixXd H = ic_hessian(2);
  OrthantRequest req = request(H.inverse());
  req.weight = CubicWeight::linear_form(Eigen::VectorXd::Ones(2));
  const OrthantResult exact = orthant_weighted_integral(req);
  req.force_qmc = true;
  const OrthantResult qmc = orthant_weighted_integral(req);
  const auto mc = rejection(H, [](const Eigen::VectorXd& u) { return u.sum(); }, 10000000, 77);
  const double scale = gaussian_scale(H.inverse());
  CHECK(std::abs(exact.value - scale * mc.mean) < 4 * scale * mc.se);
  CHECK(std::abs(qmc.value - exact.value) <= 3 * qmc.error + 1e-12);
}

TEST_CASE("exact cubic moments agree with QMC and rejection sampling") {
  std::mt19937_64 rng(33);
  std::normal_distribution<double> g;
  for (int c = 1; c <= 3; ++c) {
    const Eigen::MatrixXd M = random_spd(c, rng);
    CubicWeight w(c);
    w.constant = g(rng);
    for (int i = 0; i < c; ++i) {
      w.linear[i] = g(rng);
      for (int j = 0; j < c; ++j) {
        w.quadratic(i, j) = g(rng);
        for (int k = 0; k < c; ++k) w.cubic(i, j, k) = g(rng);
      }
    }
    OrthantRequest req = request(M);
    req.weight = w;
    const OrthantResult exact = orthant_weighted_integral(req);
    req.force_qmc = true;
    const OrthantResult qmc = orthant_weighted_integral(req);
    CHECK(std::abs(qmc.value - exact.value) <= 3 * qmc.error + 1e-10 * std::abs(exact.value));
    const auto mc = rejection(M.inverse(), [&](const Eigen::VectorXd& u) { return w(u); }, 2000000, 200 + c);
    const double scale = gaussian_scale(M);
    CHECK(std::abs(exact.value - scale * mc.mean) < 4 * scale * mc.se);
  }
}

TEST_CASE("orthant moments: known one-dimensional values") {
  Eigen::MatrixXd s(1, 1);
  s << 4.0;  // sd 2
  CHECK(orthant_moment(s, {0}) == doctest::Approx(0.5));
  CHECK(orthant_moment(s, {1}) == doctest::Approx(2.0 / std::sqrt(2 * pi)));
  CHECK(orthant_moment(s, {2}) == doctest::Approx(2.0));
  CHECK(orthant_moment(s, {3}) == doctest::Approx(2 * 8.0 / std::sqrt(2 * pi)));
  CHECK_THROWS_AS(orthant_moment(s, {0, 1}), InvalidInput);
}

TEST_CASE("ic_limit_erf") {
  CHECK(ic_limit_erf(2) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(std::abs(ic_limit_erf(3) - 0.304086723984094) < 1e-9);
  CHECK(std::abs(ic_limit_erf(3) - (0.25 + std::asin(1.0 / 3) / (2 * pi))) < 1e-13);
  // m = 4: octant probability of the IC covariance (correlation 1/3)
  CHECK(std::abs(ic_limit_erf(4) - orthant_probability_closed_form(ic_hessian(3))) < 1e-8);
  double prev = 1.0;
  for (int m = 2; m <= 10; ++m) {
    const double v = ic_limit_erf(m);
    CHECK(v < prev);
    prev = v;
  }
  CHECK_THROWS_AS(ic_limit_erf(1), InvalidInput);
}
