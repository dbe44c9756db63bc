#include "condorcet/culture.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "condorcet/error.hpp"

namespace condorcet {


namespace {

constexpr double kNormalizationTol = 1e-12;

// Neumaier summation; 9! rounded terms would otherwise drift past the tolerance
double compensated_sum(const std::vector<double>& v) {
  double sum = 0.0, comp = 0.0;
  for (double x : v) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

}  // namespace

double MultilinearPoly::total() const { return compensated_sum(coeffs); }

namespace {

std::string show(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::size_t factorial(int m) {
  std::size_t f = 1;
  for (int i = 2; i <= m; ++i) f *= static_cast<std::size_t>(i);
  return f;
}

void check_enumerable(int m) {
  if (m < 2 || m > kMaxEnumeratedCandidates) {
    throw InvalidInput("candidate count must be in [2, " + std::to_string(kMaxEnumeratedCandidates) +
                       "], got " + std::to_string(m));
  }
}

std::vector<std::uint8_t> all_orders(int m) {
  std::vector<std::uint8_t> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), std::uint8_t{1});
  std::vector<std::uint8_t> out;
  out.reserve(factorial(m) * static_cast<std::size_t>(m));
  do {
    out.insert(out.end(), perm.begin(), perm.end());
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

int discordant_pairs(std::span<const std::uint8_t> order, const std::vector<int>& ref_pos) {
  int d = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t j = i + 1; j < order.size(); ++j)
      if (ref_pos[order[i]] > ref_pos[order[j]]) ++d;
  return d;
}

}  // namespace

// ---------------------------------------------------------------- Ranking

Ranking::Ranking(std::vector<int> order) : order_(std::move(order)) {
  const int m = static_cast<int>(order_.size());
  std::vector<bool> seen(static_cast<std::size_t>(m) + 1, false);
  for (int c : order_) {
    if (c < 1 || c > m || seen[c]) throw InvalidInput("ranking is not a permutation of 1.." + std::to_string(m));
    seen[c] = true;
  }
}

Ranking Ranking::identity(int m) {
  std::vector<int> v(static_cast<std::size_t>(m));
  std::iota(v.begin(), v.end(), 1);
  return Ranking(std::move(v));
}

Ranking Ranking::reversed(int m) {
  std::vector<int> v(static_cast<std::size_t>(m));
  std::iota(v.rbegin(), v.rend(), 1);
  return Ranking(std::move(v));
}

int Ranking::position_of(int c) const {
  auto it = std::find(order_.begin(), order_.end(), c);
  if (it == order_.end()) throw InvalidInput("candidate " + std::to_string(c) + " not in ranking");
  return static_cast<int>(it - order_.begin());
}

std::string Ranking::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < order_.size(); ++i) {
    if (m() > 9 && i > 0) s += ',';
    s += std::to_string(order_[i]);
  }
  return s;
}

Ranking Ranking::parse(const std::string& text) {
  std::vector<int> v;
  if (text.find(',') != std::string::npos) {
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        std::size_t used = 0;
        v.push_back(std::stoi(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw InvalidInput("malformed ranking '" + text + "'");
      }
    }
  } else {
    for (char ch : text) {
      if (ch < '1' || ch > '9') throw InvalidInput("malformed ranking '" + text + "'");
      v.push_back(ch - '0');
    }
  }
  if (v.empty()) throw InvalidInput("empty ranking");
  return Ranking(std::move(v));
}

int kendall_tau(const Ranking& a, const Ranking& b) {
  if (a.m() != b.m()) throw InvalidInput("kendall_tau: rankings have different lengths");
  std::vector<int> pos_b(static_cast<std::size_t>(b.m()) + 1);
  for (int i = 0; i < b.m(); ++i) pos_b[b[i]] = i;
  int d = 0;
  for (int i = 0; i < a.m(); ++i)
    for (int j = i + 1; j < a.m(); ++j)
      if (pos_b[a[i]] > pos_b[a[j]]) ++d;
  return d;
}

// ---------------------------------------------------------------- CultureSpec

CultureSpec CultureSpec::impartial(int m) {
  CultureSpec s;
  s.kind = CultureKind::Impartial;
  s.m = m;
  return s;
}

CultureSpec CultureSpec::mallows(int m, double rho, Ranking reference) {
  CultureSpec s;
  s.kind = CultureKind::Mallows;
  s.m = m;
  s.rho = rho;
  s.reference = std::move(reference);
  return s;
}

CultureSpec CultureSpec::mallows_last(int m, double rho) { return mallows(m, rho, Ranking::identity(m)); }

CultureSpec CultureSpec::mallows_first(int m, double rho) { return mallows(m, rho, Ranking::reversed(m)); }

CultureSpec CultureSpec::explicit_probs(int m, std::vector<std::pair<Ranking, double>> probs) {
  CultureSpec s;
  s.kind = CultureKind::Explicit;
  s.m = m;
  s.probs = std::move(probs);
  return s;
}

double mallows_normalizer(int m, double rho) {
  if (rho < 0) throw InvalidInput("mallows: rho must be >= 0");
  double z = 1.0;
  for (int i = 1; i <= m; ++i) {
    // (1 - e^{-rho i}) / (1 - e^{-rho}), with the rho -> 0 limit i.
    z *= rho == 0.0 ? static_cast<double>(i) : std::expm1(-rho * i) / std::expm1(-rho);
  }
  return z;
}

// ---------------------------------------------------------------- Culture

Culture::Culture(int m, CultureKind kind) : m_(m), kind_(kind), orders_(all_orders(m)) {}

Ranking Culture::ranking(std::size_t index) const {
  auto o = order(index);
  return Ranking(std::vector<int>(o.begin(), o.end()));
}

std::size_t Culture::index_of(const Ranking& r) const {
  if (r.m() != m_) throw InvalidInput("ranking has " + std::to_string(r.m()) + " candidates, culture has " +
                                      std::to_string(m_));
  // Lehmer code in lexicographic order.
  std::size_t index = 0;
  for (int i = 0; i < m_; ++i) {
    int smaller = 0;
    for (int j = i + 1; j < m_; ++j)
      if (r[j] < r[i]) ++smaller;
    index += static_cast<std::size_t>(smaller) * factorial(m_ - 1 - i);
  }
  return index;
}

Culture Culture::from_probabilities(int m, std::vector<double> probs_by_index) {
  check_enumerable(m);
  Culture c(m, CultureKind::Explicit);
  if (probs_by_index.size() != c.orders_.size() / static_cast<std::size_t>(m))
    throw InvalidInput("expected " + std::to_string(factorial(m)) + " probabilities");
  for (double p : probs_by_index)
    if (!(p >= 0.0)) throw InvalidInput("negative probability");
  const double sum = compensated_sum(probs_by_index);
  if (std::abs(sum - 1.0) > kNormalizationTol) throw NormalizationError("probabilities sum to " + show(sum) + ", expected 1");
  c.probs_ = std::move(probs_by_index);
  return c;
}

Culture build_culture(const CultureSpec& spec) {
  check_enumerable(spec.m);
  Culture c(spec.m, spec.kind);
  const std::size_t count = factorial(spec.m);
  c.probs_.assign(count, 0.0);

  switch (spec.kind) {
    case CultureKind::Impartial:
      std::fill(c.probs_.begin(), c.probs_.end(), 1.0 / static_cast<double>(count));
      break;

    case CultureKind::Mallows: {
      if (!(spec.rho >= 0.0) || !std::isfinite(spec.rho)) throw InvalidInput("mallows: rho must be finite and >= 0");
      if (spec.reference.m() != spec.m) throw InvalidInput("mallows: reference ranking must cover all candidates");
      c.rho_ = spec.rho;
      c.reference_ = spec.reference;
      std::vector<int> ref_pos(static_cast<std::size_t>(spec.m) + 1);
      for (int i = 0; i < spec.m; ++i) ref_pos[spec.reference[i]] = i;
      const double gamma = 1.0 / mallows_normalizer(spec.m, spec.rho);
      for (std::size_t i = 0; i < count; ++i)
        c.probs_[i] = gamma * std::exp(-spec.rho * discordant_pairs(c.order(i), ref_pos));
      break;
    }

    case CultureKind::Explicit: {
      std::vector<bool> seen(count, false);
      for (const auto& [r, p] : spec.probs) {
        const std::size_t idx = c.index_of(r);
        if (seen[idx]) throw InvalidInput("duplicate ranking " + r.to_string());
        seen[idx] = true;
        if (!(p > 0.0))
          throw NonGenericCulture("ranking " + r.to_string() + " has non-positive probability");
        c.probs_[idx] = p;
      }
      for (std::size_t i = 0; i < count; ++i)
        if (!seen[i]) throw NonGenericCulture("ranking " + c.ranking(i).to_string() + " is missing (probability 0)");
      break;
    }
  }

  const double sum = compensated_sum(c.probs_);
  if (std::abs(sum - 1.0) > kNormalizationTol) throw NormalizationError("probabilities sum to " + show(sum) + ", expected 1");
  return c;
}

// ---------------------------------------------------------------- CharPoly

CharPoly::CharPoly(int m, int candidate, MultilinearPoly poly)
    : m_(m), candidate_(candidate), poly_(std::move(poly)) {
  if (candidate < 1 || candidate > m) throw InvalidInput("candidate out of range");
  if (poly_.dim != m - 1 || poly_.coeffs.size() != (std::size_t{1} << poly_.dim))
    throw InvalidInput("characteristic polynomial has the wrong dimension");
  for (int c = 1; c <= m; ++c)
    if (c != candidate) adversaries_.push_back(c);
}

SubsetMask CharPoly::mask_of(std::initializer_list<int> labels) const {
  SubsetMask mask = 0;
  for (int label : labels) {
    auto it = std::find(adversaries_.begin(), adversaries_.end(), label);
    if (it == adversaries_.end()) throw InvalidInput("not an adversary: " + std::to_string(label));
    mask |= SubsetMask{1} << (it - adversaries_.begin());
  }
  return mask;
}

CharPoly char_poly(const Culture& culture, int candidate) {
  const int m = culture.m();
  if (candidate < 1 || candidate > m) throw InvalidInput("candidate out of range");
  // bit index of each adversary label
  std::vector<int> bit(static_cast<std::size_t>(m) + 1, -1);
  for (int c = 1, k = 0; c <= m; ++c)
    if (c != candidate) bit[c] = k++;

  MultilinearPoly poly;
  poly.dim = m - 1;
  poly.coeffs.assign(std::size_t{1} << poly.dim, 0.0);
  for (std::size_t i = 0; i < culture.size(); ++i) {
    SubsetMask above = 0;
    for (std::uint8_t c : culture.order(i)) {
      if (c == candidate) break;
      above |= SubsetMask{1} << bit[c];
    }
    poly.coeffs[above] += culture.probability(i);
  }
  return CharPoly(m, candidate, std::move(poly));
}

CharPoly char_poly_impartial(int m, int candidate) {
  if (m < 2 || m - 1 > kMaxPolyDim) throw InvalidInput("impartial: m out of range");
  // |X|!(m-1-|X|)!/m! = 1 / (m * C(m-1, |X|))
  std::vector<double> by_size(static_cast<std::size_t>(m));
  double binom = 1.0;  // C(m-1, k), exact in double for m <= 25
  for (int k = 0; k < m; ++k) {
    by_size[k] = 1.0 / (m * binom);
    binom = binom * (m - 1 - k) / (k + 1);
  }
  MultilinearPoly poly;
  poly.dim = m - 1;
  poly.coeffs.resize(std::size_t{1} << poly.dim);
  for (std::size_t s = 0; s < poly.coeffs.size(); ++s) poly.coeffs[s] = by_size[popcount(static_cast<SubsetMask>(s))];
  return CharPoly(m, candidate, std::move(poly));
}

std::optional<SubsetMask> first_zero_coefficient(const CharPoly& p) {
  for (std::size_t s = 0; s < p.poly().coeffs.size(); ++s)
    if (!(p.poly().coeffs[s] > 0.0)) return static_cast<SubsetMask>(s);
  return std::nullopt;
}

void validate_generic(const CharPoly& p) {
  if (auto zero = first_zero_coefficient(p)) {
    std::string set = "{";
    for (int k = 0; k < p.dim(); ++k)
      if (contains(*zero, k)) set += (set.size() > 1 ? "," : "") + std::to_string(p.adversaries()[k]);
    set += "}";
    throw NonGenericCulture("characteristic polynomial has zero coefficient for X=" + set, *zero);
  }
}

// ---------------------------------------------------------------- sampling

RankingSampler::RankingSampler(const Culture& culture) : m_(culture.m()), kind_(culture.kind()) {
  switch (kind_) {
    case CultureKind::Impartial:
      break;
    case CultureKind::Mallows:
      for (int c : culture.reference().order()) reference_.push_back(static_cast<std::uint8_t>(c));
      // Inserting the i-th reference item (0-based) at position j from the top
      // creates i - j inversions; weight e^{-rho (i - j)}.
      insertion_cdf_.resize(static_cast<std::size_t>(m_));
      for (int i = 0; i < m_; ++i) {
        auto& cdf = insertion_cdf_[i];
        cdf.resize(static_cast<std::size_t>(i) + 1);
        double acc = 0.0;
        for (int j = 0; j <= i; ++j) cdf[j] = (acc += std::exp(-culture.rho() * (i - j)));
        for (double& v : cdf) v /= acc;
      }
      break;
    case CultureKind::Explicit: {
      cdf_.resize(culture.size());
      double acc = 0.0;
      for (std::size_t i = 0; i < culture.size(); ++i) cdf_[i] = (acc += culture.probability(i));
      for (double& v : cdf_) v /= acc;
      orders_.assign(culture.order(0).data(), culture.order(0).data() + culture.size() * m_);
      break;
    }
  }
}

void RankingSampler::draw(CounterRng& rng, std::span<std::uint8_t> out) const {
  switch (kind_) {
    case CultureKind::Impartial: {
      for (int i = 0; i < m_; ++i) out[i] = static_cast<std::uint8_t>(i + 1);
      for (int i = m_ - 1; i > 0; --i) {
        std::uniform_int_distribution<int> pick(0, i);
        std::swap(out[i], out[pick(rng)]);
      }
      break;
    }
    case CultureKind::Mallows: {
      for (int i = 0; i < m_; ++i) {
        const auto& cdf = insertion_cdf_[i];
        const double u = rng.uniform();
        int j = static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        j = std::min(j, i);
        for (int k = i; k > j; --k) out[k] = out[k - 1];
        out[j] = reference_[i];
      }
      break;
    }
    case CultureKind::Explicit: {
      const double u = rng.uniform();
      std::size_t idx = static_cast<std::size_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
      idx = std::min(idx, cdf_.size() - 1);
      std::copy_n(orders_.begin() + static_cast<std::ptrdiff_t>(idx * m_), m_, out.begin());
      break;
    }
  }
}

std::vector<Ranking> sample_profile(const Culture& culture, int n, std::uint64_t seed) {
  if (n < 1) throw InvalidInput("sample_profile: n must be >= 1");
  RankingSampler sampler(culture);
  std::vector<Ranking> profile;
  profile.reserve(static_cast<std::size_t>(n));
  std::vector<std::uint8_t> buf(static_cast<std::size_t>(culture.m()));
  for (int i = 0; i < n; ++i) {
    CounterRng rng(seed, static_cast<std::uint64_t>(i));
    sampler.draw(rng, buf);
    profile.emplace_back(std::vector<int>(buf.begin(), buf.end()));
  }
  return profile;
}

}  // namespace condorcet
