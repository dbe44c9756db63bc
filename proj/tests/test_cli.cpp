#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "condorcet/cli.hpp"
#include "condorcet/culture_io.hpp"
#include "condorcet/error.hpp"
#include "condorcet/exact.hpp"

using namespace condorcet;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::stringstream ss(s);
  std::string line;
  while (std::getline(ss, line)) v.push_back(line);
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> f;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') quoted = !quoted;
    else if (c == ',' && !quoted) {
      f.push_back(cur);
      cur.clear();
    } else cur += c;
  }
  f.push_back(cur);
  return f;
}

struct CsvRow {
  long long n;
  std::string method;
  double value;
  double std_error;
  std::string value_text;
};

std::vector<CsvRow> parse_csv(const std::string& text) {
  const auto ls = lines(text);
  REQUIRE(!ls.empty());
  CHECK(ls[0] == kCsvHeader);
  std::vector<CsvRow> rows;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    const auto f = split_csv(ls[i]);
    REQUIRE(f.size() == 7);
    rows.push_back({std::stoll(f[0]), f[1], std::strtod(f[2].c_str(), nullptr), std::strtod(f[4].c_str(), nullptr), f[2]});
  }
  return rows;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("condorcet_cli_test_" + name)).string();
}

std::string write_file(const std::string& name, const std::string& body) {
  const std::string p = temp_path(name);
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST_CASE("documented examples") {
  Run r = run({"limit", "--culture", "impartial:m=3"});
  CHECK(r.code == 0);
  CHECK(std::abs(std::stod(r.out) - 0.304086723984094) < 1e-9);

  r = run({"exact", "--culture", "impartial:m=3", "--n", "3"});
  CHECK(r.code == 0);
  CHECK(lines(r.out)[0] == "0.314814814814815");

  const std::string csv = temp_path("fig1.csv");
  r = run({"sweep", "--culture", "mallows:m=3,rho=ln2,ref=last", "--methods", "asymptotic,exact,mc", "--n", "2..100",
           "--mc-samples", "10000", "--seed", "42", "-o", csv});
  CHECK(r.code == 0);
  CHECK(r.out.find("wrote 297 rows") != std::string::npos);
  std::ifstream in(csv);
  std::stringstream body;
  body << in.rdbuf();
  const auto rows = parse_csv(body.str());
  REQUIRE(rows.size() == 297);
  const CsvRow& last = rows[rows.size() - 3];
  CHECK(last.n == 100);
  CHECK(last.method == "asymptotic");
  CHECK(std::abs(last.value / 2.65453570520244e-10 - 1) < 1e-5);
  std::filesystem::remove(csv);
}

TEST_CASE("help exits cleanly") {
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"sweep", "--help"}).code == 0);
}

TEST_CASE("validation errors exit with 2") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"exact", "--culture", "bogus:m=3", "--n", "3"},
           {"exact", "--culture", "impartial:m=3"},
           {"exact", "--culture", "impartial:m=3", "--n", "0"},
           {"exact", "--culture", "impartial:m=3", "--n", "5..2"},
           {"exact", "--culture", "impartial:m=3", "--n", "3", "--alpha", "0.5,0.5,0.5"},
           {"exact", "--culture", "impartial:m=3", "--n", "3", "--alpha", "1.5"},
           {"exact", "--culture", "impartial:m=3", "--n", "3", "--candidate", "4"},
           {"exact", "--culture", "impartial:m=3", "--n", "3", "--dominant-only"},
           {"exact", "--culture", "impartial:m=3", "--n", "3", "--seed", "4"},
           {"exact", "--culture", "mallows:m=3,rho=-1", "--n", "3"},
           {"exact", "--culture", "mallows:m=3,rho=1,rho=2", "--n", "3"},
           {"exact", "--culture", "mallows:m=3", "--n", "3"},
           {"exact", "--culture", "impartial:m=3,foo=1", "--n", "3"},
           {"exact", "--culture", "/nonexistent/culture.json", "--n", "3"},
           {"sweep", "--culture", "impartial:m=3", "--n", "3", "--methods", "magic"},
           {"sweep", "--culture", "impartial:m=3", "--n", "3"},
           {"mc", "--culture", "impartial:m=12", "--n", "3"},
           {"mc", "--culture", "impartial:m=3", "--n", "3", "--mc-samples", "0"},
           {"frobnicate"},
       }) {
    const Run r = run(args);
    std::string joined;
    for (const auto& a : args) joined += a + " ";
    INFO(joined);
    CHECK(r.code == 2);
    CHECK(r.out.empty());
  }
}

TEST_CASE("computation errors exit with 3") {
  const Run r = run({"exact", "--culture", "impartial:m=12", "--n", "300"});
  CHECK(r.code == 3);
  CHECK(r.err.find("Monte Carlo") != std::string::npos);
}

TEST_CASE("culture JSON") {
  const std::string mallows = R"({"kind":"mallows","m":4,"rho":0.6931471805599453,"reference":"m-last"})";
  const std::string token = R"({"kind":"mallows","m":4,"rho":"ln2","reference":"m-last"})";
  const CultureSpec a = culture_from_json(mallows), b = culture_from_json(token);
  CHECK(a.rho == b.rho);
  CHECK(b.rho == std::log(2.0));
  CHECK(parse_rho("ln2") == std::log(2.0));

  CHECK_THROWS_AS(culture_from_json(R"({"kind":"mallows","m":3,"rho":1,"rho":2})"), InvalidInput);
  CHECK_THROWS_AS(culture_from_json(R"({"kind":"mallows","m":3,"rho":1)"), InvalidInput);
  CHECK_THROWS_AS(culture_from_json(R"({"kind":"mallows","m":3.5,"rho":1})"), InvalidInput);
  CHECK_THROWS_AS(culture_from_json(R"({"kind":"weird","m":3})"), InvalidInput);
  CHECK_THROWS_AS(culture_from_json(R"({"m":3})"), InvalidInput);

  const std::string expl =
      R"({"kind":"explicit","m":3,"probs":{"123":0.2,"132":0.1,"213":0.15,"231":0.25,"312":0.1,"321":0.2}})";
  const std::string commas =
      R"({"kind":"explicit","m":3,"probs":{"1,2,3":0.2,"1,3,2":0.1,"2,1,3":0.15,"2,3,1":0.25,"3,1,2":0.1,"3,2,1":0.2}})";
  const Culture c1 = build_culture(culture_from_json(expl)), c2 = build_culture(culture_from_json(commas));
  CHECK(c1.probabilities() == c2.probabilities());
  CHECK(c1.probability(Ranking::parse("231")) == 0.25);
  CHECK_THROWS_AS(build_culture(culture_from_json(
                      R"({"kind":"explicit","m":3,"probs":{"123":0.2,"132":0.1,"213":0.15,"231":0.25,"312":0.3}})")),
                  NonGenericCulture);

  // file and inline forms give the same answer
  const std::string path = write_file("explicit.json", expl);
  const Run f = run({"exact", "--culture", path, "--n", "7"});
  const Run i = run({"exact", "--culture", expl, "--n", "7"});
  CHECK(f.code == 0);
  CHECK(f.out == i.out);
  const double direct = exact_probability(c1, 3, Thresholds::condorcet(2), 7);
  CHECK(std::stod(f.out) == doctest::Approx(direct).epsilon(1e-14));
  std::filesystem::remove(path);

  const Run dup = run({"exact", "--culture", R"({"kind":"ic","m":3,"m":4})", "--n", "3"});
  CHECK(dup.code == 2);
  CHECK(dup.err.find("duplicate") != std::string::npos);
}

TEST_CASE("CSV values round-trip bit-exactly") {
  const Run r = run({"sweep", "--culture", "mallows:m=4,rho=0.3", "--methods", "asymptotic,exact", "--n", "5..30"});
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 52);
  const Culture c = build_culture(CultureSpec::mallows_last(4, 0.3));
  for (const auto& row : rows) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", row.value);
    CHECK(row.value_text == buf);
    if (row.method == "exact") CHECK(row.value == exact_probability(c, 4, Thresholds::condorcet(3), row.n));
  }
}

TEST_CASE("sweep rows are ordered and mutually consistent") {
  const Run r = run({"sweep", "--culture", "mallows:m=3,rho=0.4,ref=last", "--methods", "all", "--n", "20..60",
                     "--mc-samples", "20000", "--seed", "9"});
  REQUIRE(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 41 * 4);
  const std::vector<std::string> order{"asymptotic", "expansion", "exact", "mc"};
  std::map<long long, std::map<std::string, CsvRow>> by_n;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].n == 20 + static_cast<long long>(i / 4));
    CHECK(rows[i].method == order[i % 4]);
    by_n[rows[i].n].emplace(rows[i].method, rows[i]);
  }
  double prev[2] = {1e300, 1e300};
  for (auto& [n, m] : by_n) {
    const double exact = m.at("exact").value;
    const CsvRow& mc = m.at("mc");
    CHECK(std::abs(exact - mc.value) <= 5 * mc.std_error);
    const double ratio = m.at("asymptotic").value / exact;
    CHECK(ratio < prev[n % 2]);
    prev[n % 2] = ratio;
  }
}

TEST_CASE("single values and summaries") {
  Run r = run({"mc", "--culture", "impartial:m=3", "--n", "100"});
  CHECK(r.code == 0);
  CHECK(r.out.find("stderr") != std::string::npos);
  CHECK(r.out.find("seed=42") != std::string::npos);

  r = run({"asymptotic", "--culture", "mallows:m=3,rho=ln2,ref=first", "--n", "100", "--complement", "--dominant-only"});
  CHECK(r.code == 0);
  CHECK(std::abs(std::stod(r.out) / 0.000441920282760544 - 1) < 1e-9);
  CHECK(r.out.find("Y={2}") != std::string::npos);

  r = run({"expansion", "--culture", "impartial:m=3", "--n", "101"});
  CHECK(std::stod(r.out) == doctest::Approx(0.304086723984094).epsilon(1e-9));

  r = run({"exact", "--culture", "impartial:m=4", "--n", "3..5"});
  CHECK(lines(r.out).size() == 3);
  CHECK(lines(r.out)[0].rfind("n=3 exact", 0) == 0);
}
