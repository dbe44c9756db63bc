#include "condorcet/culture_io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "condorcet/error.hpp"

namespace condorcet {

namespace {

using nlohmann::json;

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InvalidInput("malformed " + what + " '" + text + "'");
  }
}

int parse_m(const std::string& text) {
  const double v = parse_number(text, "candidate count");
  if (v != std::floor(v) || v < 2 || v > 25) throw InvalidInput("candidate count must be an integer in [2, 25]");
  return static_cast<int>(v);
}

Ranking reference_from(const std::string& ref, int m) {
  if (ref == "last" || ref == "m-last") return Ranking::identity(m);
  if (ref == "first" || ref == "m-first") return Ranking::reversed(m);
  Ranking r = Ranking::parse(ref);
  if (r.m() != m) throw InvalidInput("reference ranking has the wrong number of candidates");
  return r;
}

double rho_from(const json& v) {
  if (v.is_string()) return parse_rho(v.get<std::string>());
  if (v.is_number()) return v.get<double>();
  throw InvalidInput("culture JSON: rho must be a number or \"ln2\"");
}

CultureSpec finish(CultureSpec spec) {
  if (spec.kind == CultureKind::Mallows && !(spec.rho >= 0.0 && std::isfinite(spec.rho)))
    throw InvalidInput("mallows: rho must be a finite number >= 0");
  return spec;
}

}  // namespace

double parse_rho(const std::string& text) {
  if (text == "ln2" || text == "log2") return std::log(2.0);
  return parse_number(text, "rho");
}

CultureSpec culture_from_json(const std::string& text) {
  // duplicate keys are invisible after parsing, so the probs object is
  // checked through the SAX-level callback
  std::vector<std::set<std::string>> seen;
  std::string duplicate;
  json::parser_callback_t cb = [&](int, json::parse_event_t event, json& parsed) {
    if (event == json::parse_event_t::object_start) seen.emplace_back();
    if (event == json::parse_event_t::object_end) seen.pop_back();
    if (event == json::parse_event_t::key) {
      const std::string key = parsed.get<std::string>();
      if (!seen.back().insert(key).second && duplicate.empty()) duplicate = key;
    }
    return true;
  };
  json j;
  try {
    j = json::parse(text, cb);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("malformed culture JSON: ") + e.what());
  }
  if (!duplicate.empty()) throw InvalidInput("culture JSON: duplicate key '" + duplicate + "'");
  if (!j.is_object()) throw InvalidInput("culture JSON must be an object");
  if (!j.contains("kind") || !j["kind"].is_string()) throw InvalidInput("culture JSON: missing string field \"kind\"");
  if (!j.contains("m") || !j["m"].is_number_integer()) throw InvalidInput("culture JSON: missing integer field \"m\"");
  const std::string kind = j["kind"].get<std::string>();
  const int m = parse_m(std::to_string(j["m"].get<long long>()));

  if (kind == "impartial" || kind == "ic") return CultureSpec::impartial(m);
  if (kind == "mallows") {
    if (!j.contains("rho")) throw InvalidInput("culture JSON: mallows needs \"rho\"");
    const std::string ref = j.value("reference", std::string("m-last"));
    return finish(CultureSpec::mallows(m, rho_from(j["rho"]), reference_from(ref, m)));
  }
  if (kind == "explicit") {
    if (!j.contains("probs") || !j["probs"].is_object()) throw InvalidInput("culture JSON: explicit needs object \"probs\"");
    std::vector<std::pair<Ranking, double>> probs;
    for (const auto& [key, value] : j["probs"].items()) {
      if (!value.is_number()) throw InvalidInput("culture JSON: probability of '" + key + "' is not a number");
      probs.emplace_back(Ranking::parse(key), value.get<double>());
    }
    return CultureSpec::explicit_probs(m, std::move(probs));
  }
  throw InvalidInput("unknown culture kind '" + kind + "'");
}

CultureSpec parse_culture_arg(const std::string& arg) {
  if (arg.empty()) throw InvalidInput("empty culture specification");
  if (arg.front() == '{') return culture_from_json(arg);

  const auto colon = arg.find(':');
  const std::string head = arg.substr(0, colon);
  if (colon != std::string::npos && (head == "impartial" || head == "ic" || head == "mallows")) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(arg.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw InvalidInput("malformed preset parameter '" + item + "'");
      const std::string key = item.substr(0, eq);
      if (!kv.emplace(key, item.substr(eq + 1)).second) throw InvalidInput("preset parameter '" + key + "' repeated");
    }
    auto take = [&](const std::string& key) -> std::optional<std::string> {
      auto it = kv.find(key);
      if (it == kv.end()) return std::nullopt;
      std::string v = it->second;
      kv.erase(it);
      return v;
    };
    const auto m_text = take("m");
    if (!m_text) throw InvalidInput("preset needs m=<candidates>");
    const int m = parse_m(*m_text);
    CultureSpec spec;
    if (head == "mallows") {
      const auto rho = take("rho");
      if (!rho) throw InvalidInput("mallows preset needs rho=<value>");
      const std::string ref = take("ref").value_or("last");
      spec = finish(CultureSpec::mallows(m, parse_rho(*rho), reference_from(ref, m)));
    } else {
      spec = CultureSpec::impartial(m);
    }
    if (!kv.empty()) throw InvalidInput("unknown preset parameter '" + kv.begin()->first + "'");
    return spec;
  }
  if (colon != std::string::npos && arg.find('/') == std::string::npos && arg.find('.') == std::string::npos)
    throw InvalidInput("unknown culture kind '" + head + "'");

  std::ifstream in(arg);
  if (!in) throw InvalidInput("cannot open culture file '" + arg + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return culture_from_json(buf.str());
}

LoadedCulture::LoadedCulture(CultureSpec spec) : spec_(std::move(spec)) {
  if (spec_.kind != CultureKind::Impartial || spec_.m <= kMaxEnumeratedCandidates) culture_ = build_culture(spec_);
}

CharPoly LoadedCulture::char_poly(int candidate) const {
  if (candidate < 1 || candidate > spec_.m) throw InvalidInput("candidate must lie in 1..m");
  if (spec_.kind == CultureKind::Impartial) return char_poly_impartial(spec_.m, candidate);
  return condorcet::char_poly(*culture_, candidate);
}

}  // namespace condorcet
