#include "condorcet/saddle.hpp"

#include <cmath>
#include <sstream>

#include "condorcet/error.hpp"

namespace condorcet {

const char* to_string(Criticality c) {
  switch (c) {
    case Criticality::Subcritical: return "subcritical";
    case Criticality::Critical: return "critical";
    case Criticality::Supercritical: return "supercritical";
  }
  return "?";
}

Thresholds Thresholds::from_alpha(std::vector<double> alpha, bool weak) {
  Thresholds th;
  th.beta.reserve(alpha.size());
  for (double a : alpha) {
    if (!(a > 0.0 && a < 1.0)) throw InvalidInput("thresholds: every alpha must lie in (0, 1)");
    th.beta.push_back(1.0 - a);
  }
  th.alpha = std::move(alpha);
  th.weak = weak;
  return th;
}

Thresholds Thresholds::condorcet(int d, bool weak) {
  return from_alpha(std::vector<double>(static_cast<std::size_t>(d), 0.5), weak);
}

std::vector<double> saddle_target(const XYPoly& p, const Thresholds& th) {
  std::vector<double> target;
  target.reserve(p.vars.size());
  for (std::size_t k = 0; k < p.vars.size(); ++k) {
    const int bit = p.vars[k];
    if (bit >= th.dim()) throw InvalidInput("thresholds do not cover every adversary");
    target.push_back(p.is_y[k] ? th.alpha[bit] : th.beta[bit]);
  }
  return target;
}

bool SaddleResult::any(Criticality c) const {
  for (Criticality x : classes)
    if (x == c) return true;
  return false;
}

std::vector<Criticality> classify(std::span<const double> zeta, double eps_c) {
  std::vector<Criticality> out;
  out.reserve(zeta.size());
  for (double z : zeta) {
    if (z < 1.0 - eps_c)
      out.push_back(Criticality::Subcritical);
    else if (z > 1.0 + eps_c)
      out.push_back(Criticality::Supercritical);
    else
      out.push_back(Criticality::Critical);
  }
  return out;
}

SaddleResult saddle_at(const MultilinearPoly& p, Eigen::VectorXd tau, std::span<const double> target,
                       const SaddleOptions& opts) {
  const int d = p.dim;
  const auto ev = cumulant_eval(p, std::span<const double>(tau.data(), static_cast<std::size_t>(d)));
  SaddleResult r;
  r.zeta = tau.array().exp();
  r.tau = std::move(tau);
  r.hessian = ev.hessian;
  r.log_p = ev.value;
  r.residual = 0.0;
  for (int k = 0; k < d; ++k) r.residual = std::max(r.residual, std::abs(ev.gradient[k] - target[k]));
  r.classes = classify(std::span<const double>(r.zeta.data(), static_cast<std::size_t>(d)), opts.eps_c);
  for (int k = 0; k < d; ++k) {
    const double gap = std::abs(r.zeta[k] - 1.0);
    if (gap > opts.eps_c && gap <= opts.warn_band) {
      std::ostringstream os;
      os << "saddle coordinate " << k << " is near-critical (zeta = " << r.zeta[k]
         << "); finite-n asymptotics may be unreliable";
      r.warnings.push_back(os.str());
    }
  }
  return r;
}

SaddleResult solve_saddle(const MultilinearPoly& p, std::span<const double> target, const SaddleOptions& opts) {
  const int d = p.dim;
  if (static_cast<int>(target.size()) != d) throw InvalidInput("solve_saddle: target dimension mismatch");
  for (double b : target)
    if (!(b > 0.0 && b < 1.0)) throw InvalidInput("solve_saddle: target coordinates must lie in (0, 1)");
  const Eigen::Map<const Eigen::VectorXd> goal(target.data(), d);

  Eigen::VectorXd t = Eigen::VectorXd::Zero(d);
  auto span_of = [d](const Eigen::VectorXd& v) { return std::span<const double>(v.data(), static_cast<std::size_t>(d)); };

  // psi(t) = K(t) - target . t is strictly convex with gradient g(t)
  CumulantEval ev = cumulant_eval(p, span_of(t));
  Eigen::VectorXd g = ev.gradient - goal;
  double psi = ev.value - goal.dot(t);
  int iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    if (g.lpNorm<Eigen::Infinity>() <= opts.tolerance) break;
    const Eigen::VectorXd step = ev.hessian.ldlt().solve(g);
    const double slope = g.dot(step);  // -d psi along -step
    double scale = 1.0;
    bool improved = false;
    for (int h = 0; h <= opts.max_halvings; ++h, scale *= 0.5) {
      Eigen::VectorXd trial = t - scale * step;
      CumulantEval tev = cumulant_eval(p, span_of(trial));
      Eigen::VectorXd tg = tev.gradient - goal;
      const double tpsi = tev.value - goal.dot(trial);
      // Armijo decrease of psi; near the optimum psi is flat to rounding, so
      // a smaller gradient without a psi increase is accepted too
      const bool armijo = tpsi <= psi - 1e-4 * scale * slope;
      const bool flat = tpsi <= psi + 1e-14 * (1.0 + std::abs(psi)) && tg.norm() < g.norm();
      if (armijo || flat) {
        t = std::move(trial);
        ev = std::move(tev);
        g = std::move(tg);
        psi = tpsi;
        improved = true;
        break;
      }
    }
    if (!improved) break;  // stalled at rounding level
  }
  if (g.lpNorm<Eigen::Infinity>() > opts.tolerance) {
    std::ostringstream os;
    os << "saddle point solver did not converge after " << iter << " iterations (residual "
       << g.lpNorm<Eigen::Infinity>() << ")";
    throw SolverFailure(os.str(), std::vector<double>(t.data(), t.data() + d));
  }
  SaddleResult r = saddle_at(p, t, target, opts);
  r.iterations = iter;
  return r;
}

std::vector<double> mallows_saddle(int m, double rho, MallowsOrientation orientation) {
  if (m < 2) throw InvalidInput("mallows_saddle: m must be >= 2");
  if (!(rho >= 0.0)) throw InvalidInput("mallows_saddle: rho must be >= 0");
  std::vector<double> tau;
  for (int j = 1; j <= m - 1; ++j) {
    const double last = (2.0 * j - m - 2.0) * rho / 2.0;
    tau.push_back(orientation == MallowsOrientation::Last ? last : -last);
  }
  return tau;
}

}  // namespace condorcet
