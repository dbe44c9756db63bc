#include <doctest.h>

#include <cmath>
#include <random>

#include "condorcet/error.hpp"
#include "condorcet/polyalg.hpp"
#include "oracles.hpp"

using namespace condorcet;

namespace {

std::vector<double> random_t(int d, std::mt19937_64& rng, double scale = 3.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> t(static_cast<std::size_t>(d));
  for (double& v : t) v = u(rng);
  return t;
}

double k_at(const MultilinearPoly& p, std::vector<double> t) { return cumulant_eval(p, t).value; }

}  // namespace

TEST_CASE("poly_eval examples") {
  const CharPoly ic = char_poly(build_culture(CultureSpec::impartial(3)), 3);
  const std::vector<double> one{1.0, 1.0};
  const PolyEval e = poly_eval(ic, one);
  CHECK(e.value == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(e.gradient[0] == doctest::Approx(0.5));
  CHECK(e.gradient[1] == doctest::Approx(0.5));

  const double r = std::log(2.0);
  const CharPoly ml = char_poly(build_culture(CultureSpec::mallows_last(3, r)), 3);
  const std::vector<double> z{std::exp(-1.5 * r), std::exp(-0.5 * r)};
  const double closed = 2 * std::exp(-2 * r) * (1 + std::exp(-r / 2) + std::exp(-r)) /
                        ((1 + std::exp(-r)) * (1 + std::exp(-r) + std::exp(-2 * r)));
  CHECK(poly_eval(ml, z).value == doctest::Approx(closed).epsilon(1e-14));
  CHECK(std::abs(closed - 0.4204015) < 5e-7);
  CHECK_THROWS_AS(poly_eval(ml, std::vector<double>{1.0}), InvalidInput);
}

TEST_CASE("poly_eval derivatives against finite differences") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.3, 2.0);
  for (int m = 2; m <= 5; ++m) {
    const CharPoly p = char_poly(oracle::random_culture(m, rng), m);
    const int d = m - 1;
    std::vector<double> x(static_cast<std::size_t>(d));
    for (double& v : x) v = u(rng);
    const PolyEval e = poly_eval(p, x);
    const double h = 1e-6;
    for (int i = 0; i < d; ++i) {
      auto xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const PolyEval ep = poly_eval(p, xp), em = poly_eval(p, xm);
      CHECK(e.gradient[i] == doctest::Approx((ep.value - em.value) / (2 * h)).epsilon(1e-7));
      for (int j = 0; j < d; ++j)
        CHECK(e.hessian(i, j) == doctest::Approx((ep.gradient[j] - em.gradient[j]) / (2 * h)).epsilon(1e-6));
    }
  }
}

TEST_CASE("cumulant examples") {
  const CharPoly ic = char_poly(build_culture(CultureSpec::impartial(3)), 3);
  const std::vector<double> zero{0.0, 0.0};
  const CumulantEval e = cumulant_eval(ic, zero, true);
  CHECK(std::abs(e.value) < 1e-15);
  CHECK(e.third->max_abs() < 1e-15);
  for (int m : {3, 4, 5, 6}) {
    const CharPoly p = char_poly_impartial(m, m);
    const std::vector<double> t(static_cast<std::size_t>(m - 1), 0.0);
    const CumulantEval c = cumulant_eval(p, t, true);
    for (int i = 0; i < m - 1; ++i)
      for (int j = 0; j < m - 1; ++j) CHECK(c.hessian(i, j) == doctest::Approx((i == j ? 1.0 : 0.0) / 6 + 1.0 / 12).epsilon(1e-13));
    CHECK(c.third->max_abs() < 1e-14);
  }
}

TEST_CASE("cumulant derivatives against central differences") {
  std::mt19937_64 rng(5);
  const double h = 1e-5;
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 2 + trial % 4;
    const int d = m - 1;
    const MultilinearPoly p = char_poly(oracle::random_culture(m, rng), m).poly();
    const auto t = random_t(d, rng);
    const CumulantEval e = cumulant_eval(p, t, true);
    CHECK(e.value == doctest::Approx(oracle::naive_k(p, t)).epsilon(1e-12));
    for (int i = 0; i < d; ++i) {
      auto tp = t, tm = t;
      tp[i] += h;
      tm[i] -= h;
      CHECK(std::abs(e.gradient[i] - (k_at(p, tp) - k_at(p, tm)) / (2 * h)) < 1e-6);
      const CumulantEval ep = cumulant_eval(p, tp), em = cumulant_eval(p, tm);
      for (int j = 0; j < d; ++j) {
        CHECK(std::abs(e.hessian(i, j) - (ep.gradient[j] - em.gradient[j]) / (2 * h)) < 1e-6);
        for (int k = 0; k < d; ++k)
          CHECK(std::abs((*e.third)(i, j, k) - (ep.hessian(j, k) - em.hessian(j, k)) / (2 * h)) < 1e-6);
      }
      CHECK(e.gradient[i] > 0.0);
      CHECK(e.gradient[i] < 1.0);
    }
    CHECK(e.hessian.llt().info() == Eigen::Success);
  }
}

TEST_CASE("cumulant is stable for extreme arguments") {
  const MultilinearPoly p = char_poly(build_culture(CultureSpec::mallows_last(4, 5.0)), 4).poly();
  const std::vector<double> t{-400.0, 300.0, -50.0};
  const CumulantEval e = cumulant_eval(p, t);
  CHECK(std::isfinite(e.value));
  CHECK(e.gradient.allFinite());
  CHECK(e.hessian.allFinite());
}

TEST_CASE("shift identity: K(s+t) - K(s) is the cumulant of the tilted polynomial") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 3 + trial % 3, d = m - 1;
    const MultilinearPoly p = char_poly(oracle::random_culture(m, rng), m).poly();
    const auto s = random_t(d, rng), t = random_t(d, rng);
    // tilted polynomial: coefficients p_X e^{<s, X>} / P(e^s)
    MultilinearPoly q = p;
    double z = 0.0;
    for (std::size_t x = 0; x < q.coeffs.size(); ++x) {
      double e = 0.0;
      for (int k = 0; k < d; ++k)
        if (x >> k & 1u) e += s[k];
      z += (q.coeffs[x] *= std::exp(e));
    }
    for (double& c : q.coeffs) c /= z;
    std::vector<double> st(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) st[k] = s[k] + t[k];
    const CumulantEval a = cumulant_eval(p, st), b = cumulant_eval(q, t);
    CHECK(a.value - cumulant_eval(p, s).value == doctest::Approx(b.value).epsilon(1e-10));
    CHECK((a.gradient - b.gradient).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((a.hessian - b.hessian).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("tilted mean by direct summation") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 3 + trial % 3, d = m - 1;
    const MultilinearPoly p = char_poly(oracle::random_culture(m, rng), m).poly();
    const auto t = random_t(d, rng);
    std::vector<double> mean(static_cast<std::size_t>(d), 0.0);
    double z = 0.0;
    for (std::size_t x = 0; x < p.coeffs.size(); ++x) {
      double e = 0.0;
      for (int k = 0; k < d; ++k)
        if (x >> k & 1u) e += t[k];
      const double w = p.coeffs[x] * std::exp(e);
      z += w;
      for (int k = 0; k < d; ++k)
        if (x >> k & 1u) mean[k] += w;
    }
    const CumulantEval e = cumulant_eval(p, t);
    for (int k = 0; k < d; ++k) CHECK(std::abs(e.gradient[k] - mean[k] / z) < 1e-12);
  }
}

TEST_CASE("transform_xy worked example and identities") {
  std::mt19937_64 rng(10);
  const CharPoly p = char_poly(oracle::random_culture(3, rng), 3);
  // X={1}, Y={2}: p_0 y2 + p_1 x1 y2 + p_2 + p_12 x1 (variables ordered x1, y2)
  const XYPoly q = transform_xy(p, 0b01, 0b10);
  REQUIRE(q.dim() == 2);
  CHECK(q.is_y == std::vector<bool>{false, true});
  CHECK(q.poly.coeffs[0b10] == p.coeff(0b00));
  CHECK(q.poly.coeffs[0b11] == p.coeff(0b01));
  CHECK(q.poly.coeffs[0b00] == p.coeff(0b10));
  CHECK(q.poly.coeffs[0b01] == p.coeff(0b11));
  CHECK(q.describe() == "X={1} Y={2}");

  const XYPoly id = transform_xy(p, 0b11, 0);
  CHECK(id.poly.coeffs == p.poly().coeffs);
  const XYPoly one = transform_xy(p, 0, 0);
  CHECK(one.dim() == 0);
  CHECK(one.poly.coeffs[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(transform_xy(p, 0b01, 0b01), InvalidInput);
  CHECK_THROWS_AS(transform_xy(p, 0b100, 0), InvalidInput);
}

TEST_CASE("transform_xy preserves total probability and the definition") {
  std::mt19937_64 rng(12);
  const int m = 5, d = 4;
  const CharPoly p = char_poly(oracle::random_culture(m, rng), m);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (SubsetMask x = 0; x < 16; ++x)
    for (SubsetMask y = 0; y < 16; ++y) {
      if (x & y) continue;
      const XYPoly q = transform_xy(p, x, y);
      CHECK(q.poly.total() == doctest::Approx(1.0).epsilon(1e-13));
      // evaluate at a random point and compare with sum_S p_S prod_{X n S} x_j prod_{Y \ S} y_j
      std::vector<double> v(static_cast<std::size_t>(q.dim()));
      for (double& a : v) a = u(rng);
      double direct = 0.0;
      for (SubsetMask s = 0; s < 16; ++s) {
        double term = p.coeff(s);
        for (int k = 0; k < q.dim(); ++k) {
          const bool in_s = s >> q.vars[k] & 1u;
          if (q.is_y[k] ? !in_s : in_s) term *= v[k];
        }
        direct += term;
      }
      CHECK(poly_eval(q, v).value == doctest::Approx(direct).epsilon(1e-13));
      (void)d;
    }
}
