#include "condorcet/polyalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "condorcet/error.hpp"

namespace condorcet {

double Tensor3::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

int XYPoly::var_index(int bit) const {
  auto it = std::find(vars.begin(), vars.end(), bit);
  return it == vars.end() ? -1 : static_cast<int>(it - vars.begin());
}

std::string XYPoly::describe() const {
  auto list = [&](bool want_y) {
    std::string s = "{";
    bool first = true;
    for (std::size_t k = 0; k < vars.size(); ++k) {
      if (is_y[k] != want_y) continue;
      if (!first) s += ',';
      s += std::to_string(labels[k]);
      first = false;
    }
    return s + "}";
  };
  return "X=" + list(false) + " Y=" + list(true);
}

PolyEval poly_eval(const MultilinearPoly& p, std::span<const double> x) {
  const int d = p.dim;
  if (static_cast<int>(x.size()) != d) throw InvalidInput("poly_eval: dimension mismatch");
  for (double v : x)
    if (!(v > 0.0)) throw InvalidInput("poly_eval: coordinates must be strictly positive");

  PolyEval out;
  out.gradient = Eigen::VectorXd::Zero(d);
  out.hessian = Eigen::MatrixXd::Zero(d, d);
  std::vector<int> members;
  members.reserve(static_cast<std::size_t>(d));
  for (std::size_t s = 0; s < p.coeffs.size(); ++s) {
    double mono = p.coeffs[s];
    if (mono == 0.0) continue;
    members.clear();
    for (int k = 0; k < d; ++k)
      if (contains(static_cast<SubsetMask>(s), k)) {
        mono *= x[k];
        members.push_back(k);
      }
    out.value += mono;
    for (std::size_t a = 0; a < members.size(); ++a) {
      const int j = members[a];
      out.gradient[j] += mono / x[j];
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        const int k = members[b];
        const double h = mono / (x[j] * x[k]);
        out.hessian(j, k) += h;
        out.hessian(k, j) += h;
      }
    }
  }
  return out;
}

CumulantEval cumulant_eval(const MultilinearPoly& p, std::span<const double> t, bool want_third) {
  const int d = p.dim;
  if (static_cast<int>(t.size()) != d) throw InvalidInput("cumulant_eval: dimension mismatch");
  const std::size_t count = p.coeffs.size();

  // log-weights of each monomial, shifted by their maximum
  std::vector<double> w(count);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < count; ++s) {
    if (p.coeffs[s] <= 0.0) {
      w[s] = -std::numeric_limits<double>::infinity();
      continue;
    }
    double e = std::log(p.coeffs[s]);
    for (int k = 0; k < d; ++k)
      if (contains(static_cast<SubsetMask>(s), k)) e += t[k];
    w[s] = e;
    top = std::max(top, e);
  }
  double z = 0.0;
  for (std::size_t s = 0; s < count; ++s) z += (w[s] = std::exp(w[s] - top));

  CumulantEval out;
  out.value = top + std::log(z);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (std::size_t s = 0; s < count; ++s) {
    w[s] /= z;  // tilted probability
    for (int k = 0; k < d; ++k)
      if (contains(static_cast<SubsetMask>(s), k)) mean[k] += w[s];
  }

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  Tensor3 third;
  if (want_third) third = Tensor3(d);
  Eigen::VectorXd c(d);
  for (std::size_t s = 0; s < count; ++s) {
    const double q = w[s];
    if (q == 0.0) continue;
    for (int k = 0; k < d; ++k) c[k] = (contains(static_cast<SubsetMask>(s), k) ? 1.0 : 0.0) - mean[k];
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        const double qij = q * c[i] * c[j];
        cov(i, j) += qij;
        if (want_third)
          for (int k = j; k < d; ++k) third(i, j, k) += qij * c[k];
      }
  }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < i; ++j) cov(i, j) = cov(j, i);
  if (want_third) {
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j)
        for (int k = j; k < d; ++k) {
          const double v = third(i, j, k);
          third(i, k, j) = third(j, i, k) = third(j, k, i) = third(k, i, j) = third(k, j, i) = v;
        }
    out.third = std::move(third);
  }
  out.gradient = std::move(mean);
  out.hessian = std::move(cov);
  return out;
}

XYPoly transform_xy(const CharPoly& p, SubsetMask x_set, SubsetMask y_set) {
  const int d = p.dim();
  const SubsetMask full = d == 32 ? ~SubsetMask{0} : (SubsetMask{1} << d) - 1;
  if ((x_set & y_set) != 0) throw InvalidInput("transform_xy: X and Y must be disjoint");
  if (((x_set | y_set) & ~full) != 0) throw InvalidInput("transform_xy: subset outside the adversary set");

  XYPoly out;
  out.x_set = x_set;
  out.y_set = y_set;
  for (int k = 0; k < d; ++k)
    if (contains(x_set | y_set, k)) {
      out.vars.push_back(k);
      out.labels.push_back(p.adversaries()[k]);
      out.is_y.push_back(contains(y_set, k));
    }
  const int dim = static_cast<int>(out.vars.size());
  out.poly.dim = dim;
  out.poly.coeffs.assign(std::size_t{1} << dim, 0.0);
  for (std::size_t s = 0; s < p.poly().coeffs.size(); ++s) {
    SubsetMask mono = 0;
    for (int v = 0; v < dim; ++v) {
      const bool above = contains(static_cast<SubsetMask>(s), out.vars[v]);
      // x_j marks "j above the candidate", y_j marks "candidate above j"
      if (above != out.is_y[v]) mono |= SubsetMask{1} << v;
    }
    out.poly.coeffs[mono] += p.poly().coeffs[s];
  }
  return out;
}

}  // namespace condorcet
