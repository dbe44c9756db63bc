#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "condorcet/culture.hpp"
#include "condorcet/orthant.hpp"
#include "condorcet/polyalg.hpp"
#include "condorcet/saddle.hpp"

namespace condorcet {

struct AsymptoticOptions {
  SaddleOptions saddle;
  // QMC settings for orthant integrals of dimension >= 4 and for a1
  double qmc_rel_tol = 1e-7;
  int qmc_points = 1 << 16;
  int qmc_shifts = 16;
  std::uint64_t qmc_seed = 0x5eed;
  // Flipped saddles are checked against a fresh solve when set.
  bool verify_flips = true;
  double flip_tolerance = 1e-9;
};

/// Integer bound for "beats j" constraints: ceil(beta n) - 1, or floor(beta n)
/// for weak winners. beta n within 1e-9 of an integer is treated as exact.
long long win_bound(double beta, long long n, bool weak);
/// Integer bound for "does not beat j" constraints: floor(alpha n), or
/// ceil(alpha n) - 1 for weak winners.
long long loss_bound(double alpha, long long n, bool weak);

/// One signed term P(m beats X and does not beat Y) of the complement-rule
/// reduction, with its transformed polynomial and saddle point.
struct TermSpec {
  int sign = 1;
  SubsetMask x_set = 0;
  SubsetMask y_set = 0;
  XYPoly poly;
  SaddleResult saddle;

  bool is_constant() const { return poly.dim() == 0; }
  std::string describe() const;
};

/// Per-variable bound kappa_j(n) of a term (win_bound for X, loss_bound for Y).
std::vector<long long> term_bounds(const TermSpec& term, const Thresholds& th, long long n);
/// kappa_j(n) - lambda_j n, the bounded vector the expansion depends on.
std::vector<double> term_parity_key(const TermSpec& term, const Thresholds& th, long long n);
/// ceil(beta n) - 1 - beta n for each adversary (floor(beta n) - beta n when weak).
std::vector<double> parity_key(const Thresholds& th, long long n);

struct EstimateFactors {
  double n_log_p = 0.0;                  // n log P(zeta)
  std::vector<double> exponent_terms;    // -kappa_j log zeta_j per variable (0 for critical)
  double boundary_log = 0.0;             // -sum log(1 - zeta_j) over S and Y
  double prefactor_log = 0.0;            // -1/2 log((2 pi)^d n^{|S u Y|} det H)
  double orthant_log = 0.0;              // log of the critical-block orthant integral
};

struct Estimate {
  int sign = 1;
  double log_value = 0.0;  // natural log of |estimate|
  std::optional<double> value;  // signed, present when |log_value| < 700
  EstimateFactors factors;
  std::vector<double> parity_key;
  double rate = 0.0;  // exponential rate per voter
  double orthant_error = 0.0;

  static Estimate from_log(int sign, double log_value);
};

/// Complement-rule reduction of P(m is alpha-winner) into signed terms with no
/// supercritical coordinate. Terms are ordered by (|X|, X mask, Y mask).
/// Throws UnsupportedConfiguration when a Y coordinate is not subcritical.
std::vector<TermSpec> reduce_terms(const CharPoly& p, const Thresholds& th, const AsymptoticOptions& opts = {});

/// Leading-order asymptotic estimate of one reduced term at n voters
/// (unsigned; `sign` is carried separately on the term).
Estimate term_estimate(const TermSpec& term, const Thresholds& th, long long n, const AsymptoticOptions& opts = {});

struct TermBreakdown {
  TermSpec term;
  Estimate estimate;
  bool dominant = false;
};

struct AlphaWinnerEstimate {
  Estimate total;                    // P(m is alpha-winner)
  std::optional<Estimate> complement;  // 1 - P, when the reduction produced the constant term
  bool complement_primary = false;
  std::vector<TermBreakdown> terms;
  std::vector<std::string> warnings;

  /// Terms flagged dominant, described.
  std::string dominant_description() const;
};

struct EstimateMode {
  // Only the constant term and the dominant terms enter the headline sums.
  bool dominant_only = false;
  // Each term uses prefix * (a0 + a1 / sqrt(n)) instead of the leading order.
  bool second_order = false;
};

/// char_poly -> reduce_terms -> term_estimate -> signed log-scale sum.
AlphaWinnerEstimate estimate_alpha_winner(const CharPoly& p, const Thresholds& th, long long n,
                                          EstimateMode mode = {}, const AsymptoticOptions& opts = {});
AlphaWinnerEstimate estimate_alpha_winner(const Culture& culture, int candidate, const Thresholds& th, long long n,
                                          EstimateMode mode = {}, const AsymptoticOptions& opts = {});

/// Limit of P(m is alpha-winner) as n -> infinity: the signed sum of a0 over
/// reduced terms whose coordinates are all critical (other terms vanish).
double alpha_winner_limit(const CharPoly& p, const Thresholds& th, const AsymptoticOptions& opts = {});

struct ExpansionCoeffs {
  double a0 = 0.0;
  double a1 = 0.0;
  double a1_error = 0.0;  // QMC error estimate on a1
  std::vector<double> parity_key;
};

/// a0 and a1 of the n^{-1/2} expansion of a reduced term:
///   P = P(zeta)^n / prod_{S u Y} zeta_j^{kappa_j} n^{-|S u Y|/2} (a0 + a1 n^{-1/2} + O(1/n)).
/// `key` is kappa_n - lambda n in the term's variable order.
ExpansionCoeffs expansion_coeffs(const TermSpec& term, std::span<const double> key, const AsymptoticOptions& opts = {});

/// Same for the unreduced polynomial; requires no supercritical coordinate.
ExpansionCoeffs expansion_coeffs(const CharPoly& p, const Thresholds& th, std::span<const double> key,
                                 const AsymptoticOptions& opts = {});

/// Second-order estimate prefix * (a0 + a1 / sqrt(n)) of one reduced term.
Estimate term_expansion_estimate(const TermSpec& term, const Thresholds& th, long long n,
                                 const AsymptoticOptions& opts = {});

}  // namespace condorcet
