#pragma once

#include <optional>
#include <string>

#include "condorcet/culture.hpp"

namespace condorcet {

/// rho from text; accepts a decimal number or the token "ln2".
double parse_rho(const std::string& text);

/// Culture from JSON text, e.g.
///   {"kind":"mallows","m":4,"rho":"ln2","reference":"m-last"}
///   {"kind":"impartial","m":3}
///   {"kind":"explicit","m":3,"probs":{"123":0.2,"132":0.1,...}}
/// "reference" is "m-last", "m-first" or a ranking. Ranking keys are digit
/// strings (m <= 9) or comma lists. Duplicate keys are rejected.
CultureSpec culture_from_json(const std::string& text);

/// Inline presets ("impartial:m=3", "mallows:m=3,rho=ln2,ref=last"), inline
/// JSON (starting with '{') or a path to a JSON file.
CultureSpec parse_culture_arg(const std::string& arg);

/// Candidate-independent handle: the enumerated culture when m is small
/// enough, plus the characteristic polynomial for any candidate.
class LoadedCulture {
 public:
  explicit LoadedCulture(CultureSpec spec);

  const CultureSpec& spec() const { return spec_; }
  int m() const { return spec_.m; }
  /// Enumerated culture; absent for the Impartial Culture above the
  /// enumeration cap.
  const std::optional<Culture>& culture() const { return culture_; }
  CharPoly char_poly(int candidate) const;

 private:
  CultureSpec spec_;
  std::optional<Culture> culture_;
};

}  // namespace condorcet
