#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "condorcet/multilinear.hpp"
#include "condorcet/rng.hpp"

namespace condorcet {

// Cultures are enumerated explicitly over all m! rankings, so m is capped.
inline constexpr int kMaxEnumeratedCandidates = 9;

/// A strict ranking of candidates 1..m, best to worst.
class Ranking {
 public:
  Ranking() = default;
  /// Throws InvalidInput unless `order` is a permutation of 1..order.size().
  explicit Ranking(std::vector<int> order);

  static Ranking identity(int m);  // (1, 2, ..., m)
  static Ranking reversed(int m);  // (m, ..., 2, 1)

  int m() const { return static_cast<int>(order_.size()); }
  const std::vector<int>& order() const { return order_; }
  int operator[](std::size_t i) const { return order_[i]; }

  /// 0-based position of candidate c (1-based label).
  int position_of(int c) const;

  /// Digit string for m <= 9 ("123"), otherwise comma-separated ("1,2,...").
  std::string to_string() const;
  /// Accepts both forms produced by to_string().
  static Ranking parse(const std::string& text);

  friend bool operator==(const Ranking&, const Ranking&) = default;
  friend auto operator<=>(const Ranking&, const Ranking&) = default;

 private:
  std::vector<int> order_;
};

/// Number of discordant pairs between two rankings of the same candidates.
int kendall_tau(const Ranking& a, const Ranking& b);

enum class CultureKind { Explicit, Impartial, Mallows };

struct CultureSpec {
  CultureKind kind = CultureKind::Impartial;
  int m = 0;
  std::vector<std::pair<Ranking, double>> probs;  // explicit only
  double rho = 0.0;                               // mallows only
  Ranking reference;                              // mallows only

  static CultureSpec impartial(int m);
  static CultureSpec mallows(int m, double rho, Ranking reference);
  // Reference (1..m): candidate m is ranked last.
  static CultureSpec mallows_last(int m, double rho);
  // Reference (m..1): candidate m is ranked first.
  static CultureSpec mallows_first(int m, double rho);
  static CultureSpec explicit_probs(int m, std::vector<std::pair<Ranking, double>> probs);
};

/// Normalizer sum_r e^{-rho d(r, r0)} over all rankings of m candidates.
double mallows_normalizer(int m, double rho);

/// Explicit distribution over all m! rankings. Rankings are indexed in
/// lexicographic order of their candidate sequences.
class Culture {
 public:
  int m() const { return m_; }
  CultureKind kind() const { return kind_; }
  double rho() const { return rho_; }
  const Ranking& reference() const { return reference_; }

  std::size_t size() const { return probs_.size(); }
  const std::vector<double>& probabilities() const { return probs_; }
  double probability(std::size_t index) const { return probs_[index]; }
  double probability(const Ranking& r) const { return probs_[index_of(r)]; }

  /// Candidate sequence of ranking `index`, 1-based labels.
  std::span<const std::uint8_t> order(std::size_t index) const {
    return {orders_.data() + index * static_cast<std::size_t>(m_), static_cast<std::size_t>(m_)};
  }
  Ranking ranking(std::size_t index) const;
  std::size_t index_of(const Ranking& r) const;

  // Builds an explicit distribution without the genericity check (zero
  // probabilities allowed). Still requires a normalized, non-negative input.
  static Culture from_probabilities(int m, std::vector<double> probs_by_index);

 private:
  friend Culture build_culture(const CultureSpec& spec);
  Culture(int m, CultureKind kind);

  int m_ = 0;
  CultureKind kind_ = CultureKind::Explicit;
  double rho_ = 0.0;
  Ranking reference_;
  std::vector<std::uint8_t> orders_;
  std::vector<double> probs_;
};

/// Validates `spec` and materializes its distribution over rankings.
/// Throws NonGenericCulture, NormalizationError or InvalidInput.
Culture build_culture(const CultureSpec& spec);

/// Characteristic polynomial of a culture with respect to one candidate.
///
/// Adversaries are the other candidates in ascending label order; bit k of a
/// monomial mask refers to adversaries()[k]. coeffs[X] is the probability that
/// exactly the adversaries in X are ranked above the candidate.
class CharPoly {
 public:
  CharPoly(int m, int candidate, MultilinearPoly poly);

  int m() const { return m_; }
  int candidate() const { return candidate_; }
  int dim() const { return poly_.dim; }
  const std::vector<int>& adversaries() const { return adversaries_; }
  const MultilinearPoly& poly() const { return poly_; }
  double coeff(SubsetMask x) const { return poly_.coeffs[x]; }

  /// Bitmask of a set of adversary labels.
  SubsetMask mask_of(std::initializer_list<int> labels) const;

 private:
  int m_;
  int candidate_;
  std::vector<int> adversaries_;
  MultilinearPoly poly_;
};

CharPoly char_poly(const Culture& culture, int candidate);
/// Closed form |X|!(m-1-|X|)!/m! for the Impartial Culture; valid up to
/// m = kMaxPolyDim + 1 without enumerating rankings.
CharPoly char_poly_impartial(int m, int candidate);

/// Throws NonGenericCulture carrying the first zero coefficient's mask.
void validate_generic(const CharPoly& p);
std::optional<SubsetMask> first_zero_coefficient(const CharPoly& p);

/// Draws rankings from a culture. Mallows cultures use repeated insertion,
/// the Impartial Culture a uniform shuffle, explicit cultures CDF inversion.
class RankingSampler {
 public:
  explicit RankingSampler(const Culture& culture);

  int m() const { return m_; }
  /// Writes a ranking (1-based labels, best first) into `out` (size m).
  void draw(CounterRng& rng, std::span<std::uint8_t> out) const;

 private:
  int m_;
  CultureKind kind_;
  std::vector<std::uint8_t> reference_;
  std::vector<std::vector<double>> insertion_cdf_;  // mallows
  std::vector<double> cdf_;                         // explicit
  std::vector<std::uint8_t> orders_;                // explicit
};

/// n voters drawn independently; voter i depends only on (seed, i).
std::vector<Ranking> sample_profile(const Culture& culture, int n, std::uint64_t seed);

}  // namespace condorcet
