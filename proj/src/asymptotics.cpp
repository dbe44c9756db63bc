#include "condorcet/asymptotics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "condorcet/error.hpp"

namespace condorcet {

namespace {

using std::numbers::pi;

constexpr double kIntegerGuard = 1e-9;
constexpr double kReportableLog = 700.0;
// Terms whose log estimate trails the largest by more than this are dominated.
constexpr double kDominanceGap = 2.0;

// x rounded to the nearest integer when it is within the guard, else nullopt
std::optional<long long> near_integer(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= kIntegerGuard) return static_cast<long long>(r);
  return std::nullopt;
}

double lambda_of(const TermSpec& t, const Thresholds& th, int k) {
  const int bit = t.poly.vars[k];
  return t.poly.is_y[k] ? th.alpha[bit] : th.beta[bit];
}

// Saddle of the constant polynomial 1 in zero variables.
SaddleResult empty_saddle() {
  SaddleResult r;
  r.tau = Eigen::VectorXd(0);
  r.zeta = Eigen::VectorXd(0);
  r.hessian = Eigen::MatrixXd(0, 0);
  return r;
}

SaddleResult solve_term(const XYPoly& poly, const Thresholds& th, const SaddleOptions& opts) {
  if (poly.dim() == 0) return empty_saddle();
  return solve_saddle(poly, th, opts);
}

TermSpec make_term(const CharPoly& p, int sign, SubsetMask x, SubsetMask y) {
  TermSpec t;
  t.sign = sign;
  t.x_set = x;
  t.y_set = y;
  t.poly = transform_xy(p, x, y);
  return t;
}

// Index of the X variable with the largest supercritical zeta, or -1.
int pick_supercritical(const TermSpec& t) {
  int best = -1;
  for (int k = 0; k < t.saddle.dim(); ++k) {
    if (t.poly.is_y[k] || t.saddle.classes[k] != Criticality::Supercritical) continue;
    if (best < 0 || t.saddle.zeta[k] > t.saddle.zeta[best]) best = k;
  }
  return best;
}

struct SignedLog {
  int sign = 1;
  double log = -std::numeric_limits<double>::infinity();
};

SignedLog signed_log_sum(const std::vector<SignedLog>& parts) {
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& p : parts) top = std::max(top, p.log);
  if (!std::isfinite(top)) return {1, top};
  double s = 0.0;
  for (const auto& p : parts) s += p.sign * std::exp(p.log - top);
  if (s == 0.0) return {1, -std::numeric_limits<double>::infinity()};
  return {s > 0 ? 1 : -1, top + std::log(std::abs(s))};
}

// Critical block of H^{-1}, i.e. the inverse covariance of the critical
// coordinates with the others pinned.
struct CriticalBlock {
  std::vector<int> idx;
  Eigen::MatrixXd h_inv;
  Eigen::MatrixXd M;
};

CriticalBlock critical_block(const TermSpec& t) {
  CriticalBlock b;
  const int d = t.saddle.dim();
  for (int k = 0; k < d; ++k)
    if (t.saddle.classes[k] == Criticality::Critical) b.idx.push_back(k);
  b.h_inv = t.saddle.hessian.ldlt().solve(Eigen::MatrixXd::Identity(d, d));
  const int c = static_cast<int>(b.idx.size());
  b.M.resize(c, c);
  for (int a = 0; a < c; ++a)
    for (int e = 0; e < c; ++e) b.M(a, e) = b.h_inv(b.idx[a], b.idx[e]);
  b.M = 0.5 * (b.M + b.M.transpose());
  return b;
}

// log of 1 / (sqrt((2 pi)^d det H) prod_{S u Y} (1 - zeta_j))
double log_norm(const TermSpec& t) {
  const int d = t.saddle.dim();
  if (d == 0) return 0.0;
  const double log_det = t.saddle.hessian.ldlt().vectorD().array().log().sum();
  double v = -0.5 * (d * std::log(2.0 * pi) + log_det);
  for (int k = 0; k < d; ++k)
    if (t.saddle.classes[k] != Criticality::Critical) v -= std::log1p(-t.saddle.zeta[k]);
  return v;
}

OrthantRequest orthant_request(Eigen::MatrixXd M, const AsymptoticOptions& opts) {
  OrthantRequest req;
  req.M = std::move(M);
  req.rel_tol = opts.qmc_rel_tol;
  req.qmc_points = opts.qmc_points;
  req.qmc_shifts = opts.qmc_shifts;
  req.seed = opts.qmc_seed;
  return req;
}

void check_reduced(const TermSpec& t) {
  for (int k = 0; k < t.saddle.dim(); ++k) {
    const Criticality c = t.saddle.classes[k];
    if (c == Criticality::Supercritical || (t.poly.is_y[k] && c != Criticality::Subcritical)) {
      std::ostringstream os;
      os << "term " << t.describe() << " has a " << to_string(c) << " coordinate for adversary "
         << t.poly.labels[k] << " (zeta = " << t.saddle.zeta[k] << "); not covered by the asymptotic formulas";
      throw UnsupportedConfiguration(os.str());
    }
  }
}

// n-dependent part of a term's log estimate, excluding a0:
// n log P(zeta) - sum_{S u Y} kappa_j log zeta_j - |S u Y|/2 log n
struct Prefix {
  double n_log_p = 0.0;
  std::vector<double> exponent_terms;
  double log_n_power = 0.0;
  double rate = 0.0;
};

Prefix term_prefix(const TermSpec& t, const Thresholds& th, long long n) {
  Prefix p;
  const int d = t.saddle.dim();
  const auto kappa = term_bounds(t, th, n);
  p.n_log_p = static_cast<double>(n) * t.saddle.log_p;
  p.rate = t.saddle.log_p;
  p.exponent_terms.assign(static_cast<std::size_t>(d), 0.0);
  int boundary = 0;
  for (int k = 0; k < d; ++k) {
    if (t.saddle.classes[k] == Criticality::Critical) continue;
    ++boundary;
    p.exponent_terms[k] = -static_cast<double>(kappa[k]) * t.saddle.tau[k];
    p.rate -= lambda_of(t, th, k) * t.saddle.tau[k];
  }
  p.log_n_power = -0.5 * boundary * std::log(static_cast<double>(n));
  return p;
}

double prefix_log(const Prefix& p) {
  double v = p.n_log_p + p.log_n_power;
  for (double e : p.exponent_terms) v += e;
  return v;
}

}  // namespace

long long win_bound(double beta, long long n, bool weak) {
  const double x = beta * static_cast<double>(n);
  if (auto r = near_integer(x)) return weak ? *r : *r - 1;
  return static_cast<long long>(std::floor(x));
}

long long loss_bound(double alpha, long long n, bool weak) {
  const double x = alpha * static_cast<double>(n);
  if (auto r = near_integer(x)) return weak ? *r - 1 : *r;
  return static_cast<long long>(std::floor(x));
}

std::string TermSpec::describe() const { return poly.describe(); }

std::vector<long long> term_bounds(const TermSpec& term, const Thresholds& th, long long n) {
  std::vector<long long> out;
  for (std::size_t k = 0; k < term.poly.vars.size(); ++k) {
    const int bit = term.poly.vars[k];
    out.push_back(term.poly.is_y[k] ? loss_bound(th.alpha[bit], n, th.weak) : win_bound(th.beta[bit], n, th.weak));
  }
  return out;
}

std::vector<double> term_parity_key(const TermSpec& term, const Thresholds& th, long long n) {
  const auto kappa = term_bounds(term, th, n);
  std::vector<double> key;
  for (std::size_t k = 0; k < kappa.size(); ++k)
    key.push_back(static_cast<double>(kappa[k]) - lambda_of(term, th, static_cast<int>(k)) * static_cast<double>(n));
  return key;
}

std::vector<double> parity_key(const Thresholds& th, long long n) {
  std::vector<double> key;
  for (double b : th.beta) key.push_back(static_cast<double>(win_bound(b, n, th.weak)) - b * static_cast<double>(n));
  return key;
}

Estimate Estimate::from_log(int sign, double log_value) {
  Estimate e;
  e.sign = sign;
  e.log_value = log_value;
  if (std::abs(log_value) < kReportableLog || log_value == -std::numeric_limits<double>::infinity())
    e.value = sign * std::exp(log_value);
  return e;
}

std::vector<TermSpec> reduce_terms(const CharPoly& p, const Thresholds& th, const AsymptoticOptions& opts) {
  validate_generic(p);
  if (th.dim() != p.dim()) throw InvalidInput("thresholds must have one entry per adversary");
  const SubsetMask all = p.dim() == 0 ? 0 : static_cast<SubsetMask>((std::uint64_t{1} << p.dim()) - 1);

  std::vector<TermSpec> work;
  work.push_back(make_term(p, 1, all, 0));
  work.back().saddle = solve_term(work.back().poly, th, opts.saddle);

  std::vector<TermSpec> done;
  while (!work.empty()) {
    TermSpec t = std::move(work.back());
    work.pop_back();
    const int k = pick_supercritical(t);
    if (k < 0) {
      check_reduced(t);
      done.push_back(std::move(t));
      continue;
    }
    const int bit = t.poly.vars[k];
    const SubsetMask j = SubsetMask{1} << bit;

    TermSpec shrunk = make_term(p, t.sign, t.x_set & ~j, t.y_set);
    shrunk.saddle = solve_term(shrunk.poly, th, opts.saddle);

    // same variable set, coordinate k inverted
    TermSpec flipped = make_term(p, -t.sign, t.x_set & ~j, t.y_set | j);
    Eigen::VectorXd tau = t.saddle.tau;
    tau[k] = -tau[k];
    const auto target = saddle_target(flipped.poly, th);
    flipped.saddle = saddle_at(flipped.poly.poly, tau, target, opts.saddle);
    if (opts.verify_flips) {
      const SaddleResult fresh = solve_saddle(flipped.poly, th, opts.saddle);
      const double gap = (fresh.zeta - flipped.saddle.zeta).cwiseAbs().maxCoeff();
      if (gap > opts.flip_tolerance * std::max(1.0, flipped.saddle.zeta.cwiseAbs().maxCoeff())) {
        std::ostringstream os;
        os << "inverted saddle of " << flipped.describe() << " disagrees with a fresh solve by " << gap;
        throw SolverFailure(os.str(), std::vector<double>(tau.data(), tau.data() + tau.size()));
      }
    }
    work.push_back(std::move(shrunk));
    work.push_back(std::move(flipped));
  }

  std::sort(done.begin(), done.end(), [](const TermSpec& a, const TermSpec& b) {
    const int pa = std::popcount(a.x_set), pb = std::popcount(b.x_set);
    if (pa != pb) return pa < pb;
    if (a.x_set != b.x_set) return a.x_set < b.x_set;
    return a.y_set < b.y_set;
  });
  return done;
}

Estimate term_estimate(const TermSpec& term, const Thresholds& th, long long n, const AsymptoticOptions& opts) {
  if (n < 1) throw InvalidInput("term_estimate: n must be >= 1");
  if (term.is_constant()) {
    Estimate e = Estimate::from_log(1, 0.0);
    e.rate = 0.0;
    return e;
  }
  check_reduced(term);
  const int d = term.saddle.dim();
  const Prefix pre = term_prefix(term, th, n);
  const CriticalBlock block = critical_block(term);

  EstimateFactors f;
  f.n_log_p = pre.n_log_p;
  f.exponent_terms = pre.exponent_terms;
  const double log_det = term.saddle.hessian.ldlt().vectorD().array().log().sum();
  const int boundary = d - static_cast<int>(block.idx.size());
  for (int k = 0; k < d; ++k)
    if (term.saddle.classes[k] != Criticality::Critical) f.boundary_log -= std::log1p(-term.saddle.zeta[k]);
  f.prefactor_log = -0.5 * (d * std::log(2.0 * pi) + boundary * std::log(static_cast<double>(n)) + log_det);

  double orthant_error = 0.0;
  if (!block.idx.empty()) {
    const OrthantResult o = orthant_integral(orthant_request(block.M, opts));
    f.orthant_log = std::log(o.value);
    orthant_error = o.error / o.value;
  }

  double total = f.n_log_p + f.boundary_log + f.prefactor_log + f.orthant_log;
  for (double e : f.exponent_terms) total += e;
  Estimate e = Estimate::from_log(1, total);
  e.factors = std::move(f);
  e.parity_key = term_parity_key(term, th, n);
  e.rate = pre.rate;
  e.orthant_error = orthant_error;
  return e;
}

ExpansionCoeffs expansion_coeffs(const TermSpec& term, std::span<const double> key, const AsymptoticOptions& opts) {
  ExpansionCoeffs out;
  out.parity_key.assign(key.begin(), key.end());
  if (term.is_constant()) {
    out.a0 = 1.0;
    return out;
  }
  check_reduced(term);
  const int d = term.saddle.dim();
  if (static_cast<int>(key.size()) != d) throw InvalidInput("expansion_coeffs: parity key dimension mismatch");

  const CriticalBlock block = critical_block(term);
  const int c = static_cast<int>(block.idx.size());
  const double norm = std::exp(log_norm(term));
  out.a0 = norm * orthant_integral(orthant_request(block.M, opts)).value;
  if (c == 0) return out;  // purely geometric terms have no n^{-1/2} correction

  const CumulantEval ev = cumulant_eval(term.poly, std::span<const double>(term.saddle.tau.data(), d), true);
  if (!ev.third) throw UnsupportedConfiguration("expansion_coeffs: third cumulant unavailable");
  const Tensor3& k3 = *ev.third;
  const Eigen::MatrixXd& Hi = block.h_inv;

  // G = H^{-1} restricted to critical columns
  Eigen::MatrixXd G(d, c);
  for (int a = 0; a < c; ++a) G.col(a) = Hi.col(block.idx[a]);

  // cubic part: -(1/6) sum kappa3_jkl G_ja G_kb G_lc
  CubicWeight w(c);
  std::vector<double> jk_c(static_cast<std::size_t>(d) * d * c, 0.0);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      for (int cc = 0; cc < c; ++cc) {
        double s = 0.0;
        for (int l = 0; l < d; ++l) s += k3(j, k, l) * G(l, cc);
        jk_c[(static_cast<std::size_t>(j) * d + k) * c + cc] = s;
      }
  for (int a = 0; a < c; ++a)
    for (int b = 0; b < c; ++b)
      for (int cc = 0; cc < c; ++cc) {
        double s = 0.0;
        for (int j = 0; j < d; ++j)
          for (int k = 0; k < d; ++k) s += G(j, a) * G(k, b) * jk_c[(static_cast<std::size_t>(j) * d + k) * c + cc];
        w.cubic(a, b, cc) = -s / 6.0;
      }

  // linear part: (w' - (b - key))^T G with w'_j = (1/2) sum_kl kappa3_jkl H^{-1}_kl
  Eigen::VectorXd drift(d);
  for (int j = 0; j < d; ++j) {
    double s = 0.0;
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l) s += k3(j, k, l) * Hi(k, l);
    const double zeta = term.saddle.zeta[j];
    const double b = term.saddle.classes[j] == Criticality::Critical ? -0.5 : zeta / (1.0 - zeta);
    drift[j] = 0.5 * s - (b - key[j]);
  }
  w.linear = G.transpose() * drift;

  if (w.linear.cwiseAbs().maxCoeff() == 0.0 && w.cubic.max_abs() == 0.0) return out;
  OrthantRequest req = orthant_request(block.M, opts);
  req.weight = std::move(w);
  const OrthantResult r = orthant_weighted_integral(req);
  out.a1 = norm * r.value;
  out.a1_error = norm * r.error;
  return out;
}

ExpansionCoeffs expansion_coeffs(const CharPoly& p, const Thresholds& th, std::span<const double> key,
                                 const AsymptoticOptions& opts) {
  validate_generic(p);
  if (th.dim() != p.dim()) throw InvalidInput("thresholds must have one entry per adversary");
  const SubsetMask all = p.dim() == 0 ? 0 : static_cast<SubsetMask>((std::uint64_t{1} << p.dim()) - 1);
  TermSpec t = make_term(p, 1, all, 0);
  t.saddle = solve_term(t.poly, th, opts.saddle);
  if (t.saddle.any(Criticality::Supercritical))
    throw UnsupportedConfiguration("expansion_coeffs: saddle has a supercritical coordinate; reduce first");
  return expansion_coeffs(t, key, opts);
}

Estimate term_expansion_estimate(const TermSpec& term, const Thresholds& th, long long n,
                                 const AsymptoticOptions& opts) {
  if (n < 1) throw InvalidInput("term_expansion_estimate: n must be >= 1");
  if (term.is_constant()) return Estimate::from_log(1, 0.0);
  const auto key = term_parity_key(term, th, n);
  const ExpansionCoeffs ac = expansion_coeffs(term, key, opts);
  const double series = ac.a0 + ac.a1 / std::sqrt(static_cast<double>(n));
  const Prefix pre = term_prefix(term, th, n);
  const int sign = series < 0.0 ? -1 : 1;
  Estimate e = Estimate::from_log(sign, prefix_log(pre) + std::log(std::abs(series)));
  e.factors.n_log_p = pre.n_log_p;
  e.factors.exponent_terms = pre.exponent_terms;
  e.parity_key = key;
  e.rate = pre.rate;
  e.orthant_error = ac.a1_error / std::sqrt(static_cast<double>(n)) / std::abs(series);
  return e;
}

std::string AlphaWinnerEstimate::dominant_description() const {
  std::string s;
  for (const auto& t : terms) {
    if (!t.dominant) continue;
    if (!s.empty()) s += ';';
    s += t.term.describe();
  }
  return s;
}

AlphaWinnerEstimate estimate_alpha_winner(const CharPoly& p, const Thresholds& th, long long n, EstimateMode mode,
                                          const AsymptoticOptions& opts) {
  AlphaWinnerEstimate out;
  auto reduced = reduce_terms(p, th, opts);
  out.terms.reserve(reduced.size());
  for (auto& t : reduced) {
    TermBreakdown b;
    b.estimate = mode.second_order ? term_expansion_estimate(t, th, n, opts) : term_estimate(t, th, n, opts);
    b.estimate.sign *= t.sign;
    if (b.estimate.value) b.estimate.value = *b.estimate.value * t.sign;
    for (const auto& w : t.saddle.warnings) out.warnings.push_back(t.describe() + ": " + w);
    b.term = std::move(t);
    out.terms.push_back(std::move(b));
  }

  // dominance among the non-constant terms, by log magnitude at this n
  bool has_constant = false;
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& b : out.terms) {
    if (b.term.is_constant())
      has_constant = true;
    else
      top = std::max(top, b.estimate.log_value);
  }
  for (auto& b : out.terms)
    b.dominant = !b.term.is_constant() && b.estimate.log_value >= top - kDominanceGap;

  std::vector<SignedLog> all, rest;
  for (const auto& b : out.terms) {
    if (mode.dominant_only && !b.term.is_constant() && !b.dominant) continue;
    const SignedLog s{b.estimate.sign, b.estimate.log_value};
    all.push_back(s);
    if (!b.term.is_constant()) rest.push_back({-s.sign, s.log});
  }
  const SignedLog total = signed_log_sum(all);
  out.total = Estimate::from_log(total.sign, total.log);
  if (has_constant) {
    const SignedLog comp = signed_log_sum(rest);
    out.complement = Estimate::from_log(comp.sign, comp.log);
    out.complement_primary = true;
  }
  // single-term results keep the detailed factors
  if (out.terms.size() == 1) out.total = out.terms.front().estimate;
  return out;
}

AlphaWinnerEstimate estimate_alpha_winner(const Culture& culture, int candidate, const Thresholds& th, long long n,
                                          EstimateMode mode, const AsymptoticOptions& opts) {
  return estimate_alpha_winner(char_poly(culture, candidate), th, n, mode, opts);
}

double alpha_winner_limit(const CharPoly& p, const Thresholds& th, const AsymptoticOptions& opts) {
  const auto terms = reduce_terms(p, th, opts);
  double sum = 0.0;
  for (const auto& t : terms) {
    bool all_critical = true;
    for (Criticality c : t.saddle.classes) all_critical = all_critical && c == Criticality::Critical;
    if (!all_critical) continue;
    if (t.is_constant()) {
      sum += t.sign;
      continue;
    }
    const CriticalBlock block = critical_block(t);
    sum += t.sign * std::exp(log_norm(t)) * orthant_integral(orthant_request(block.M, opts)).value;
  }
  return sum;
}

}  // namespace condorcet
