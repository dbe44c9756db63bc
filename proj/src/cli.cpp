#include "condorcet/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>

#include "condorcet/asymptotics.hpp"
#include "condorcet/culture_io.hpp"
#include "condorcet/error.hpp"
#include "condorcet/exact.hpp"
#include "condorcet/montecarlo.hpp"
#include "condorcet/parallel.hpp"

namespace condorcet {

namespace {

enum class Method { Asymptotic, Expansion, Exact, MC };

const char* method_name(Method m) {
  switch (m) {
    case Method::Asymptotic: return "asymptotic";
    case Method::Expansion: return "expansion";
    case Method::Exact: return "exact";
    case Method::MC: return "mc";
  }
  return "?";
}

struct Options {
  std::string culture;
  int candidate = 0;  // 0: m
  std::string alpha = "0.5";
  bool weak = false;
  std::string methods;
  std::string n_range;
  long long mc_samples = 10000;
  std::uint64_t seed = 42;
  std::string output;
  double eps_c = 1e-9;
  bool dominant_only = false;
  bool complement = false;
  int qmc_points = 1 << 16;
};

struct Row {
  long long n = 0;
  Method method = Method::Exact;
  double value = 0.0;
  double log_value = 0.0;
  double std_error = 0.0;
  std::string dominant;
  std::string parity;
  std::vector<std::string> warnings;
};

struct Plan {
  LoadedCulture culture;
  int candidate;
  Thresholds th;
  std::vector<Method> methods;
  std::vector<long long> ns;
  AsymptoticOptions asym;
};

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string g17(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  return fmt("%.17g", v);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::vector<long long> parse_n(const std::string& text) {
  auto to_ll = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw InvalidInput("malformed --n value '" + text + "'");
    }
  };
  std::vector<long long> out;
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    out.push_back(to_ll(text));
  } else {
    const long long lo = to_ll(text.substr(0, dots)), hi = to_ll(text.substr(dots + 2));
    if (hi < lo) throw InvalidInput("--n range must be ascending");
    if (hi - lo > 1000000) throw InvalidInput("--n range too long");
    for (long long n = lo; n <= hi; ++n) out.push_back(n);
  }
  for (long long n : out)
    if (n < 1) throw InvalidInput("--n values must be >= 1");
  return out;
}

std::vector<Method> parse_methods(const std::string& text) {
  std::vector<Method> out;
  std::stringstream ss(text);
  std::string tok;
  auto add = [&](Method m) {
    for (Method x : out)
      if (x == m) return;
    out.push_back(m);
  };
  while (std::getline(ss, tok, ',')) {
    if (tok == "asymptotic") add(Method::Asymptotic);
    else if (tok == "expansion") add(Method::Expansion);
    else if (tok == "exact") add(Method::Exact);
    else if (tok == "mc") add(Method::MC);
    else if (tok == "all") {
      for (Method m : {Method::Asymptotic, Method::Expansion, Method::Exact, Method::MC}) add(m);
    } else {
      throw InvalidInput("unknown method '" + tok + "'");
    }
  }
  if (out.empty()) throw InvalidInput("no method selected");
  return out;
}

std::vector<double> parse_alpha(const std::string& text, int d) {
  std::vector<double> a;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      a.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw InvalidInput("malformed --alpha '" + text + "'");
    }
  }
  if (a.size() == 1) a.assign(static_cast<std::size_t>(d), a.front());
  if (static_cast<int>(a.size()) != d)
    throw InvalidInput("--alpha needs 1 or " + std::to_string(d) + " values (one per adversary)");
  return a;
}

std::string join_key(const std::vector<double>& key) {
  std::string s;
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (i) s += ';';
    s += fmt("%.6g", key[i] == 0.0 ? 0.0 : key[i]);
  }
  return s;
}

Plan make_plan(const Options& o, bool need_n) {
  if (o.culture.empty()) throw InvalidInput("--culture is required");
  LoadedCulture lc(parse_culture_arg(o.culture));
  const int m = lc.m();
  const int candidate = o.candidate == 0 ? m : o.candidate;
  if (candidate < 1 || candidate > m) throw InvalidInput("--candidate must lie in 1.." + std::to_string(m));
  Plan plan{std::move(lc), candidate, Thresholds::from_alpha(parse_alpha(o.alpha, m - 1), o.weak), {}, {}, {}};
  plan.methods = parse_methods(o.methods);
  if (need_n) {
    if (o.n_range.empty()) throw InvalidInput("--n is required");
    plan.ns = parse_n(o.n_range);
  }
  for (Method meth : plan.methods)
    if (meth == Method::MC) {
      if (o.mc_samples < 1) throw InvalidInput("--mc-samples must be >= 1");
      if (!plan.culture.culture())
        throw InvalidInput("Monte Carlo needs an enumerable culture (m <= " + std::to_string(kMaxEnumeratedCandidates) + ")");
    }
  if (o.dominant_only &&
      std::none_of(plan.methods.begin(), plan.methods.end(),
                   [](Method m) { return m == Method::Asymptotic || m == Method::Expansion; }))
    throw InvalidInput("--dominant-only needs the asymptotic or expansion method");
  if (!(o.eps_c > 0.0 && o.eps_c < 1.0)) throw InvalidInput("--eps-c must lie in (0, 1)");
  if (o.qmc_points < 1024) throw InvalidInput("--qmc-points must be >= 1024");
  plan.asym.saddle.eps_c = o.eps_c;
  plan.asym.qmc_points = o.qmc_points;
  return plan;
}

Row compute(const Plan& plan, const CharPoly& poly, const Options& o, Method meth, long long n) {
  Row r;
  r.n = n;
  r.method = meth;
  r.parity = join_key(parity_key(plan.th, n));
  switch (meth) {
    case Method::Asymptotic:
    case Method::Expansion: {
      EstimateMode mode;
      mode.dominant_only = o.dominant_only;
      mode.second_order = meth == Method::Expansion;
      const AlphaWinnerEstimate est = estimate_alpha_winner(poly, plan.th, n, mode, plan.asym);
      const Estimate* e = &est.total;
      Estimate one_minus;
      if (o.complement) {
        if (est.complement) {
          e = &*est.complement;
        } else {
          const double v = 1.0 - std::exp(est.total.log_value) * est.total.sign;
          one_minus = Estimate::from_log(v < 0 ? -1 : 1, std::log(std::abs(v)));
          e = &one_minus;
        }
      }
      r.log_value = e->log_value;
      r.value = e->value ? *e->value : e->sign * std::exp(e->log_value);
      double err = 0.0;
      for (const auto& t : est.terms) err += std::exp(t.estimate.log_value) * t.estimate.orthant_error;
      r.std_error = err;
      r.dominant = est.dominant_description();
      r.warnings = est.warnings;
      break;
    }
    case Method::Exact: {
      const double p = exact_probability(poly, plan.th, n);
      r.value = o.complement ? 1.0 - p : p;
      r.log_value = std::log(r.value);
      break;
    }
    case Method::MC: {
      const MCResult mc = mc_estimate(*plan.culture.culture(), plan.candidate, plan.th, n, o.mc_samples, o.seed);
      r.value = o.complement ? 1.0 - mc.estimate : mc.estimate;
      r.log_value = std::log(r.value);
      r.std_error = mc.std_error;
      break;
    }
  }
  return r;
}

std::vector<Row> compute_all(const Plan& plan, const Options& o) {
  const CharPoly poly = plan.culture.char_poly(plan.candidate);
  validate_generic(poly);
  const std::size_t per = plan.methods.size();
  std::vector<Row> rows(plan.ns.size() * per);
  // n values are interleaved over workers so that large n do not pile up
  const std::size_t count = rows.size();
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(thread_count(), count));
  parallel_for(workers, [&](std::size_t w) {
    for (std::size_t i = w; i < count; i += workers)
      rows[i] = compute(plan, poly, o, plan.methods[i % per], plan.ns[i / per]);
  });
  return rows;
}

void write_csv(std::ostream& os, const std::vector<Row>& rows) {
  os << kCsvHeader << '\n';
  for (const Row& r : rows)
    os << r.n << ',' << method_name(r.method) << ',' << g17(r.value) << ',' << g17(r.log_value) << ','
       << g17(r.std_error) << ',' << csv_field(r.dominant) << ',' << csv_field(r.parity) << '\n';
}

std::string human_value(const Row& r) {
  if (r.value == 0.0 && std::isfinite(r.log_value)) return "0 (log " + fmt("%.15g", r.log_value) + ")";
  return fmt("%.15g", r.value);
}

void report(const std::vector<Row>& rows, const Options& o, bool single_method, std::ostream& out,
            std::ostream& err) {
  for (const Row& r : rows)
    for (const auto& w : r.warnings) err << "warning: n=" << r.n << " " << w << '\n';
  if (!o.output.empty()) {
    std::ofstream f(o.output);
    if (!f) throw InvalidInput("cannot write '" + o.output + "'");
    write_csv(f, rows);
  }
  const bool single = single_method && rows.size() == 1;
  for (const Row& r : rows) {
    if (single) {
      out << human_value(r) << '\n';
    } else {
      out << "n=" << r.n << ' ' << method_name(r.method) << ' ' << human_value(r);
      if (r.method == Method::MC) out << " +/- " << fmt("%.3g", r.std_error);
      out << '\n';
    }
  }
  if (single && rows.front().method == Method::MC)
    out << "stderr " << fmt("%.15g", rows.front().std_error) << " (N=" << o.mc_samples << ", seed=" << o.seed << ")\n";
  if (single && !rows.front().dominant.empty()) out << "dominant term: " << rows.front().dominant << '\n';
}

void add_common(CLI::App* app, Options& o, bool with_n, bool with_mc) {
  app->add_option("--culture", o.culture, "preset (impartial:m=3, mallows:m=3,rho=ln2,ref=last), JSON text or file")
      ->required();
  app->add_option("--candidate", o.candidate, "candidate label (default m)");
  app->add_option("--alpha", o.alpha, "threshold, one value or one per adversary (default 0.5)");
  app->add_flag("--weak", o.weak, "weak alpha-winner (at least alpha n instead of more than)");
  app->add_option("--eps-c", o.eps_c, "criticality band for saddle coordinates");
  app->add_option("--qmc-points", o.qmc_points, "QMC points per shift for orthant integrals");
  if (with_n) {
    app->add_option("--n", o.n_range, "voters: N or A..B")->required();
    app->add_option("-o,--output", o.output, "CSV output path");
    app->add_flag("--dominant-only", o.dominant_only, "sum only the constant and dominant terms");
    app->add_flag("--complement", o.complement, "report 1 - P instead of P");
  }
  if (with_mc) {
    app->add_option("--mc-samples", o.mc_samples, "Monte Carlo profiles per point");
    app->add_option("--seed", o.seed, "Monte Carlo seed");
  }
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Probability that a candidate is a Condorcet (alpha-)winner"};
  app.require_subcommand(1);
  Options o;
  auto* sweep = app.add_subcommand("sweep", "evaluate several methods over a range of n; writes CSV");
  add_common(sweep, o, true, true);
  sweep->add_option("--methods", o.methods, "comma list of asymptotic, expansion, exact, mc, all")->required();
  auto* limit = app.add_subcommand("limit", "limit of the probability as n grows");
  add_common(limit, o, false, false);
  auto* exact = app.add_subcommand("exact", "exact probability by dynamic programming");
  add_common(exact, o, true, false);
  auto* asym = app.add_subcommand("asymptotic", "leading-order asymptotic estimate");
  add_common(asym, o, true, false);
  auto* expan = app.add_subcommand("expansion", "asymptotic estimate with the n^{-1/2} correction");
  add_common(expan, o, true, false);
  auto* mc = app.add_subcommand("mc", "Monte Carlo estimate");
  add_common(mc, o, true, true);

  std::vector<const char*> argv{"condorcet"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (limit->parsed()) {
      o.methods = "asymptotic";
      const Plan plan = make_plan(o, false);
      const CharPoly poly = plan.culture.char_poly(plan.candidate);
      out << fmt("%.15g", alpha_winner_limit(poly, plan.th, plan.asym)) << '\n';
      return 0;
    }
    bool single_method = true;
    if (sweep->parsed()) single_method = false;
    else if (exact->parsed()) o.methods = "exact";
    else if (asym->parsed()) o.methods = "asymptotic";
    else if (expan->parsed()) o.methods = "expansion";
    else if (mc->parsed()) o.methods = "mc";
    const Plan plan = make_plan(o, true);
    const auto rows = compute_all(plan, o);
    if (sweep->parsed() && o.output.empty()) {
      for (const Row& r : rows)
        for (const auto& w : r.warnings) err << "warning: n=" << r.n << " " << w << '\n';
      write_csv(out, rows);
      return 0;
    }
    report(rows, o, single_method, out, err);
    if (sweep->parsed()) out << "wrote " << rows.size() << " rows to " << o.output << '\n';
    return 0;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ComputationError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace condorcet
