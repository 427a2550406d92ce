#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pcc/checks.hpp"
#include "pcc/runner.hpp"
#include "pcc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace {

const std::string kHeader = R"(
[chart]
coords = x y
box = -1 1 -1 1

[sampling]
seed = 3
count = 20

[endo E]
components = 0 1
             1 0

[connection F]
kind = flat
)";

pcc::Scenario load(const std::string& body) { return pcc::load_scenario(kHeader + body, "t"); }

std::vector<std::string> errors_of(const std::string& text) {
  try {
    pcc::load_scenario(text, "t");
  } catch (const pcc::ScenarioError& e) {
    return e.errors();
  }
  return {};
}

bool mentions(const std::vector<std::string>& errs, const std::string& what) {
  return std::any_of(errs.begin(), errs.end(), [&](const std::string& e) { return e.find(what) != std::string::npos; });
}

const pcc::ReportLine& line(const pcc::RunResult& r, const std::string& id) {
  auto it = std::find_if(r.lines.begin(), r.lines.end(), [&](const pcc::ReportLine& l) { return l.id == id; });
  REQUIRE_MESSAGE(it != r.lines.end(), "missing " << id);
  return *it;
}

}  // namespace

TEST_CASE("a scenario without checks is valid") {
  const pcc::Scenario s = load("");
  CHECK(s.checks.empty());
  CHECK(s.chart.dim == 2);
  CHECK(s.seed == 3);
  CHECK(s.count == 20);
  const pcc::RunResult r = pcc::run_scenario(s, {});
  CHECK(r.lines.empty());
  CHECK(pcc::format_summary("t", r) == "# t\trecords=0\tpass=0\tfail=0\tskip=0\tinfo=0\tinconclusive=0\n");
}

TEST_CASE("comments, continuation lines and sparse components") {
  const pcc::Scenario s = load(R"(
# a comment
[tensor S]   # trailing comment
kind = components
c.x.x.y = (* x
           y)

[check s]
kind = tensor_axioms
tensor = S
)");
  const auto comps = s.tensors.at("S").materialize(pcc::Point{0.5, 0.5});
  CHECK(comps[1] == doctest::Approx(0.25));
  CHECK(comps[0] == 0);
  REQUIRE(s.checks.size() == 1);
  CHECK(s.checks[0].line > 0);
}

TEST_CASE("the shipped flat swap scenario passes") {
  const pcc::Scenario s = pcc::load_scenario_file(pcc::default_corpus_dir() / "flat_swap.scn");
  CHECK(s.name == "flat_swap");
  pcc::RunOptions opts;
  opts.samples = 40;
  const pcc::RunResult r = pcc::run_scenario(s, opts);
  CHECK_FALSE(r.any_failure());
  CHECK(r.count(pcc::Status::Pass) > 50);
}

TEST_CASE("an undefined connection is reported with its line") {
  const auto errs = errors_of(kHeader + "\n[check c]\nkind = flat\nconnection = Missing\n");
  REQUIRE(errs.size() == 1);
  CHECK(errs[0].rfind("line ", 0) == 0);
  CHECK(mentions(errs, "Missing"));
}

TEST_CASE("all errors are collected before reporting") {
  const auto errs = errors_of(kHeader + R"(
[endo Bad]
components = 1 x 0 1

[connection G]
kind = sum

[check a]
kind = no_such_kind

[check b]
kind = flat
connection = F
colour = blue
)");
  CHECK(errs.size() >= 4);
  CHECK(mentions(errs, "no_such_kind"));
  CHECK(mentions(errs, "colour"));
  for (const auto& e : errs) CHECK(e.rfind("line ", 0) == 0);
}

TEST_CASE("a structure that is not an involution is rejected") {
  const auto errs = errors_of(kHeader + R"(
[endo Bad]
components = 1 x 0 1

[check c]
kind = almost_product
structure = Bad
)");
  CHECK_FALSE(errs.empty());
}

TEST_CASE("a non-positive Riemannian metric is rejected") {
  CHECK_FALSE(errors_of(kHeader + "\n[metric g]\ncomponents = 1 0 x\n").empty());
  CHECK(errors_of(kHeader + "\n[metric g]\ncomponents = 1 0 x\nriemannian = false\n").empty());
}

TEST_CASE("reference cycles are rejected") {
  const auto errs = errors_of(kHeader + R"(
[connection A]
kind = conjugate
base = B
structure = E

[connection B]
kind = psi
base = A
structure = E
)");
  CHECK(mentions(errs, "cycl"));
}

TEST_CASE("syntax errors") {
  CHECK_FALSE(errors_of(kHeader + "\n[endo E2\n").empty());
  CHECK_FALSE(errors_of(kHeader + "\n[endo Q]\ncomponents = 1 0 0 1\ncomponents = 1 0 0 1\n").empty());
  CHECK_FALSE(errors_of(kHeader + "\n[sampling]\ncount = 0\n").empty());
  CHECK_FALSE(errors_of("[sampling]\ncount = 5\n").empty());  // no chart
  CHECK_FALSE(errors_of(kHeader + "\n[endo Q]\ncomponents = (+ 1\n").empty());
  CHECK_FALSE(errors_of(kHeader + "\n[check c]\nkind = flat\nconnection = F\nexpect_fail = pair.axioms\n").empty());
}

TEST_CASE("rationals") {
  const auto a = pcc::parse_rational("6/4");
  CHECK(a.num == 3);
  CHECK(a.den == 2);
  const auto b = pcc::parse_rational("-0.25");
  CHECK(b.num == -1);
  CHECK(b.den == 4);
  const auto c = pcc::parse_rational("3/-6");
  CHECK(c.num == -1);
  CHECK(c.den == 2);
  CHECK(pcc::parse_rational("7").den == 1);
  CHECK_THROWS_AS(pcc::parse_rational("1/0"), pcc::ConfigError);
  CHECK_THROWS_AS(pcc::parse_rational("abc"), pcc::ConfigError);
  CHECK_THROWS_AS(pcc::parse_rational("4294967296"), pcc::ConfigError);

  const auto cells = pcc::parse_cells("0,0 1/2,-1");
  REQUIRE(cells.size() == 2);
  CHECK(cells[1].lambda.num == 1);
  CHECK(cells[1].mu.num == -1);
}

TEST_CASE("expected failures") {
  const std::string body = R"(
[endo S]
components = 1 x 0 -1

[check parallel]
kind = parallel
connection = F
structure = S
expect_fail = connection.parallel
min_residual = 0.5

[check too_strict]
kind = parallel
connection = F
structure = S
expect_fail = connection.parallel
min_residual = 5

[check does_not_fail]
kind = parallel
connection = F
structure = E
expect_fail = connection.parallel

[check skipped]
kind = recurrent
connection = F
structure = S
form = Z
mode = recurrent
expect_fail = recurrent.torsion

[one_form Z]
components = 0 0
)";
  const pcc::RunResult r = pcc::run_scenario(load(body), {});
  const auto& ok = line(r, "t/parallel/connection.parallel");
  CHECK(ok.status == pcc::Status::Pass);
  CHECK(ok.detail.find("expected failure") == 0);
  CHECK(line(r, "t/too_strict/connection.parallel").status == pcc::Status::Fail);
  CHECK(line(r, "t/does_not_fail/connection.parallel").status == pcc::Status::Fail);
  CHECK(line(r, "t/skipped/recurrent.torsion").status == pcc::Status::Fail);
  CHECK(r.any_failure());
}

TEST_CASE("evaluation errors become failing records") {
  const std::string singular = R"(
[chart]
coords = x y
box = -1 1 -1 1

[sampling]
count = 5

[metric g]
components = 0 0 0
riemannian = false

[check lc]
kind = levi_civita
metric = g
)";
  const pcc::RunResult e = pcc::run_scenario(pcc::load_scenario(singular, "s"), {});
  const auto& err = line(e, "s/lc/error");
  CHECK(err.status == pcc::Status::Fail);
  CHECK(err.anchor == "plumbing");
  CHECK(std::isnan(err.residual));
  CHECK(pcc::format_report(e).find("s/lc/error\tplumbing\tnan\tFAIL") != std::string::npos);
}

TEST_CASE("filters select by record id or check kind") {
  const pcc::Scenario s = pcc::load_scenario_file(pcc::default_corpus_dir() / "flat_swap.scn");
  pcc::RunOptions opts;
  opts.samples = 10;
  opts.filter = "levi_civita.uniqueness";
  const auto r = pcc::run_scenario(s, opts);
  REQUIRE(r.lines.size() == 1);
  CHECK(r.lines[0].id == "flat_swap/lc/levi_civita.uniqueness");

  opts.filter = "involutivity";
  const auto k = pcc::run_scenario(s, opts);
  CHECK(k.lines.size() >= 6);
  for (const auto& l : k.lines) CHECK(l.id.find("involutive_") != std::string::npos);

  opts.filter = "no such thing";
  CHECK(pcc::run_scenario(s, opts).lines.empty());
}

TEST_CASE("reports are deterministic and independent of the job count") {
  const pcc::Scenario s = pcc::load_scenario_file(pcc::default_corpus_dir() / "flat_swap.scn");
  pcc::RunOptions opts;
  opts.samples = 15;
  const std::string a = pcc::format_report(pcc::run_scenario(s, opts), {true, false});
  const std::string b = pcc::format_report(pcc::run_scenario(s, opts), {true, false});
  opts.jobs = 3;
  const std::string c = pcc::format_report(pcc::run_scenario(s, opts), {true, false});
  CHECK(a == b);
  CHECK(a == c);
  CHECK(a.find("point=") != std::string::npos);
  CHECK(a.find("time_ms=") == std::string::npos);

  opts.seed = 12345;
  CHECK(pcc::format_report(pcc::run_scenario(s, opts), {true, false}) != a);
}

TEST_CASE("the catalog") {
  const auto& cat = pcc::catalog();
  CHECK(cat.size() >= 18);
  CHECK(std::is_sorted(cat.begin(), cat.end(), [](const auto& a, const auto& b) { return a.item < b.item; }));
  for (const auto& e : cat) {
    CHECK_FALSE(e.anchor.empty());
    CHECK(pcc::find_check_kind(e.kind) != nullptr);
  }
  CHECK(pcc::anchor_for("family.duality(1/2,0)") == pcc::anchor_for("family.duality"));
  CHECK(pcc::anchor_for("made.up") == "plumbing");
  for (const auto& k : pcc::check_kinds()) {
    CHECK_FALSE(k.items.empty());
    CHECK_FALSE(k.summary.empty());
  }
}

TEST_CASE("corpus listing") {
  const auto files = pcc::corpus_files(pcc::default_corpus_dir());
  CHECK(files.size() >= 5);
  CHECK(std::is_sorted(files.begin(), files.end()));
  CHECK_THROWS_AS(pcc::corpus_files("/nonexistent/dir"), pcc::ConfigError);
}
