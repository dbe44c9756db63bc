#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "condorcet/culture.hpp"
#include "condorcet/multilinear.hpp"

namespace condorcet {

/// Dense symmetric d x d x d tensor.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int d) : d_(d), data_(static_cast<std::size_t>(d) * d * d, 0.0) {}

  int dim() const { return d_; }
  double& operator()(int i, int j, int k) { return data_[(static_cast<std::size_t>(i) * d_ + j) * d_ + k]; }
  double operator()(int i, int j, int k) const { return data_[(static_cast<std::size_t>(i) * d_ + j) * d_ + k]; }
  double max_abs() const;

 private:
  int d_ = 0;
  std::vector<double> data_;
};

struct PolyEval {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

/// K(t) = log P(e^t) together with its derivatives. These are the mean,
/// covariance and third central moment tensor of the tilted distribution
/// P(X = S) proportional to p_S e^{sum_{k in S} t_k}.
struct CumulantEval {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
  std::optional<Tensor3> third;
};

/// P_Y^X: the polynomial obtained from P by keeping x_j for j in X, replacing
/// x_j by 1/y_j (times y_j) for j in Y, and setting the other variables to 1.
///
/// Variables are ordered by ascending adversary bit; is_y[k] tells whether
/// variable k is a y-variable. Masks are over the CharPoly's adversary bits.
struct XYPoly {
  SubsetMask x_set = 0;
  SubsetMask y_set = 0;
  std::vector<int> vars;        // adversary bit index of each variable
  std::vector<int> labels;      // adversary candidate label of each variable
  std::vector<bool> is_y;
  MultilinearPoly poly;

  int dim() const { return poly.dim; }
  /// Position of adversary bit `bit` among vars, or -1.
  int var_index(int bit) const;
  /// "x{1,2} y{3}" style description with candidate labels.
  std::string describe() const;
};

PolyEval poly_eval(const MultilinearPoly& p, std::span<const double> x);
inline PolyEval poly_eval(const CharPoly& p, std::span<const double> x) { return poly_eval(p.poly(), x); }
inline PolyEval poly_eval(const XYPoly& p, std::span<const double> x) { return poly_eval(p.poly, x); }

CumulantEval cumulant_eval(const MultilinearPoly& p, std::span<const double> t, bool want_third = false);
inline CumulantEval cumulant_eval(const CharPoly& p, std::span<const double> t, bool want_third = false) {
  return cumulant_eval(p.poly(), t, want_third);
}
inline CumulantEval cumulant_eval(const XYPoly& p, std::span<const double> t, bool want_third = false) {
  return cumulant_eval(p.poly, t, want_third);
}

/// Throws InvalidInput when X and Y overlap or reach outside the adversaries.
XYPoly transform_xy(const CharPoly& p, SubsetMask x_set, SubsetMask y_set);

}  // namespace condorcet
