// Acceptance run over the shipped corpus. Prints one PASS/FAIL line per
// criterion and exits nonzero if any fails. argv[1], when given, is the pcc
// executable used for the exit-code checks.

#include "oracles.hpp"
#include "pcc/checks.hpp"
#include "pcc/generalized.hpp"
#include "pcc/runner.hpp"
#include "pcc/scenario.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

constexpr double kTol = 1e-9;

struct Record {
  std::string scenario;
  std::string label;
  std::string item;
  double residual;
  pcc::Status status;
  std::string detail;
};

struct CorpusRun {
  std::map<std::string, pcc::Scenario> scenarios;
  std::vector<Record> records;
  std::map<std::string, double> seconds;
  std::string report;
};

CorpusRun run_corpus() {
  CorpusRun out;
  for (const auto& path : pcc::corpus_files(pcc::default_corpus_dir())) {
    pcc::Scenario s = pcc::load_scenario_file(path);
    const auto start = std::chrono::steady_clock::now();
    const pcc::RunResult r = pcc::run_scenario(s, {});
    out.seconds[s.name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.report += pcc::format_report(r, {true, false});
    for (const auto& l : r.lines) {
      const auto a = l.id.find('/');
      const auto b = l.id.find('/', a + 1);
      out.records.push_back({s.name, l.id.substr(a + 1, b - a - 1), l.id.substr(b + 1), l.residual, l.status, l.detail});
    }
    out.scenarios.emplace(s.name, std::move(s));
  }
  return out;
}

/// Collects failures for one criterion.
class Verdict {
 public:
  void require(bool ok, const std::string& what) {
    ++checks_;
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    failed_ = failed_ || !ok;
  }
  bool ok() const { return !failed_ && checks_ > 0; }
  std::string summary() const {
    if (checks_ == 0) return "no checks ran";
    if (!failed_) return std::to_string(checks_) + " checks";
    std::string s;
    for (const auto& f : failures_) s += (s.empty() ? "" : "; ") + f;
    return s;
  }

 private:
  int checks_ = 0;
  bool failed_ = false;
  std::vector<std::string> failures_;
};

std::string where(const Record& r) { return r.scenario + "/" + r.label + "/" + r.item; }

bool expected_failure(const Record& r) { return r.detail.rfind("expected failure", 0) == 0; }

/// Every record of `item` that ran is a genuine pass at or below `tol`; at least one ran.
int require_items(Verdict& v, const std::vector<Record>& rs, const std::string& item, double tol,
                  const std::string& scenario = "") {
  int n = 0;
  for (const auto& r : rs) {
    if (r.item != item || (!scenario.empty() && r.scenario != scenario)) continue;
    if (expected_failure(r) || r.status == pcc::Status::Skip) continue;
    ++n;
    v.require(r.status == pcc::Status::Pass && r.residual <= tol, where(r) + " residual " + std::to_string(r.residual));
  }
  v.require(n > 0, "no " + item + " records" + (scenario.empty() ? "" : " in " + scenario));
  return n;
}

int exit_code(const std::string& cmd) {
  const int st = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

int g_failed = 0;

void report(int n, const std::string& title, const Verdict& v) {
  std::printf("criterion %d\t%s\t%s\t%s\n", n, v.ok() ? "PASS" : "FAIL", title.c_str(), v.summary().c_str());
  std::fflush(stdout);
  if (!v.ok()) ++g_failed;
}

}  // namespace

int main(int argc, char** argv) {
  const CorpusRun first = run_corpus();
  const auto& rs = first.records;

  {
    Verdict v;
    for (const auto& [name, secs] : first.seconds) {
      v.require(secs <= 5.0, name + " took " + std::to_string(secs) + " s");
      v.require(first.scenarios.at(name).count == 200, name + " does not use 200 samples");
      for (const char* item : {"conjugate.nabla_E", "conjugate.duality", "conjugate.torsion", "conjugate.curvature"}) {
        require_items(v, rs, item, kTol, name);
      }
    }
    int metric = 0;
    for (const auto& r : rs) {
      if (r.item != "conjugate.metric" || r.status == pcc::Status::Skip) continue;
      ++metric;
      v.require(r.status == pcc::Status::Pass && r.residual <= kTol, where(r));
    }
    v.require(metric > 0, "no scenario with an E-compatible metric");
    report(1, "conjugation identities on every scenario within 5 s", v);
  }

  {
    Verdict v;
    double worst = 0;
    for (const auto& r : rs) {
      if (r.item == "conjugate.duality") worst = std::max(worst, r.residual);
    }
    require_items(v, rs, "conjugate.duality", kTol);
    v.require(worst <= kTol, "max residual " + std::to_string(worst));
    report(2, "conjugation is an involution", v);
  }

  {
    Verdict v;
    for (const char* item : {"projector.psi_idempotent", "projector.chi_idempotent", "projector.affinity", "projector.mean"}) {
      require_items(v, rs, item, kTol);
    }
    report(3, "projector algebra and mean decomposition", v);
  }

  {
    Verdict v;
    for (const auto& [name, s] : first.scenarios) {
      for (const char* item : {"kirichenko.conjugate_C", "kirichenko.conjugate_B", "kirichenko.C_invariance",
                               "kirichenko.B_anti", "kirichenko.decomposition"}) {
        require_items(v, rs, item, kTol, name);
      }
    }
    std::set<std::pair<std::string, std::string>> pairs;
    for (const auto& r : rs) {
      if (r.item != "projective.B_difference" || r.status != pcc::Status::Pass || r.residual > kTol) continue;
      const auto& spec = *std::find_if(first.scenarios.at(r.scenario).checks.begin(),
                                       first.scenarios.at(r.scenario).checks.end(),
                                       [&](const pcc::CheckSpec& c) { return c.label == r.label; });
      pairs.insert({r.scenario, spec.params.at("form")});
    }
    require_items(v, rs, "projective.C_invariant", kTol);
    require_items(v, rs, "projective.B_difference", kTol);
    std::set<std::string> scenario_names;
    for (const auto& p : pairs) scenario_names.insert(p.first);
    v.require(scenario_names.size() >= 2, "projective change verified on fewer than two scenarios");
    report(4, "Kirichenko tensors and projective change", v);
  }

  {
    Verdict v;
    require_items(v, rs, "pencil.expansion", kTol, "pencil_pythagorean");
    require_items(v, rs, "pencil.reduction", 1e-12, "pencil_pythagorean");
    report(5, "Pythagorean pencil expansion and reductions", v);
  }

  {
    Verdict v;
    for (const char* scenario : {"flat_swap", "projector_xdep", "sphere_metric", "warped"}) {
      for (const char* item : {"pair.hv_form", "pair.C_projectors", "pair.B_projectors", "pair.C_oneill_gray",
                               "pair.B_oneill_gray", "pair.blocks"}) {
        require_items(v, rs, item, kTol, scenario);
      }
    }
    // Torsion-free conjugate with a non-involutive side must not occur.
    std::map<std::string, std::pair<double, double>> inv;  // scenario/label -> (hypothesis, conclusion)
    for (const auto& r : rs) {
      if (r.item == "involutivity.hypothesis") inv[r.scenario + "/" + r.label].first = r.residual;
      if (r.item == "involutivity.conclusion") inv[r.scenario + "/" + r.label].second = r.residual;
    }
    v.require(inv.size() >= 3, "too few involutivity checks");
    for (const auto& [id, hc] : inv) v.require(!(hc.first <= kTol && hc.second > kTol), id + " breaks the implication");
    bool r3 = false;
    for (const auto& r : rs) {
      if (r.scenario == "involutivity_r3" && r.item == "involutivity.hypothesis" && r.residual >= 1e-3) r3 = true;
    }
    v.require(r3, "R^3 pair does not show conjugate torsion >= 1e-3");
    report(6, "projector pairs against the tensor splitting and involutivity", v);
  }

  {
    Verdict v;
    const pcc::Scenario& s = first.scenarios.at("family_grid");
    const auto spec = std::find_if(s.checks.begin(), s.checks.end(), [](const pcc::CheckSpec& c) { return c.kind == "family_sweep"; });
    v.require(spec != s.checks.end(), "no sweep in family_grid");
    if (spec != s.checks.end()) {
      const auto cells = pcc::parse_cells(spec->params.at("cells"));
      const pcc::Connection& nabla = s.connections.at(spec->params.at("connection"));
      const pcc::EndoField& e = s.endos.at(spec->params.at("structure"));
      const pcc::VerifyContext ctx = pcc::make_context(s, {});
      const std::set<std::pair<double, double>> solutions{{0, 0}, {0, -2}, {1, -1}, {-1, -1}};
      std::set<std::pair<double, double>> observed;
      int probes = 0;
      for (const auto& cell : cells) {
        const double l = cell.lambda.value();
        const double m = cell.mu.value();
        if (!solutions.count({l, m})) ++probes;
        const auto r = pcc::equality_check(pcc::family_twice(nabla, e, l, m), nabla, ctx, "");
        if (r.status == pcc::Status::Pass) observed.insert({l, m});
      }
      v.require(observed == solutions, "involutive cells differ from the four solutions");
      v.require(probes >= 12, "only " + std::to_string(probes) + " probes");
      int cells_seen = 0;
      for (const auto& r : rs) {
        if (r.scenario != "family_grid" || r.item.rfind("family.duality(", 0) != 0) continue;
        ++cells_seen;
        v.require(r.status == pcc::Status::Pass, where(r));
      }
      v.require(cells_seen == static_cast<int>(cells.size()), "sweep records missing");
      require_items(v, rs, "family.coefficients", kTol, "family_grid");
    }
    report(7, "family sweep involutive exactly on the four solutions", v);
  }

  {
    Verdict v;
    std::mt19937_64 rng(8675309);
    int bad_fd = 0;
    int bad_rules = 0;
    for (int t = 0; t < 1000; ++t) {
      const int dim = 1 + static_cast<int>(rng() % 3);
      const pcc::Expr f = oracle::random_expr(rng, dim, 4);
      const pcc::Expr g = oracle::random_expr(rng, dim, 3);
      const pcc::Point p = oracle::random_point(rng, dim);
      const pcc::Jet jf = pcc::eval_jet(f, p, 2);
      const auto grad = oracle::fd_gradient(f, p);
      const auto hess = oracle::fd_hessian(f, p);
      const pcc::Jet jg = pcc::eval_jet(g, p, 2);
      const pcc::Jet prod = pcc::eval_jet(f * g, p, 2);
      const pcc::Jet chain = pcc::eval_jet(pcc::Expr::sin(f), p, 2);
      for (int i = 0; i < dim; ++i) {
        bad_fd += oracle::close(jf.d(i), grad[i], 1e-6) ? 0 : 1;
        bad_rules += oracle::close(prod.d(i), jf.value() * jg.d(i) + jg.value() * jf.d(i), 1e-12) ? 0 : 1;
        bad_rules += oracle::close(chain.d(i), std::cos(jf.value()) * jf.d(i), 1e-12) ? 0 : 1;
        for (int k = 0; k < dim; ++k) {
          bad_fd += oracle::close(jf.d2(i, k), hess[i][k], 1e-6) ? 0 : 1;
          const double leib =
              jf.value() * jg.d2(i, k) + jg.value() * jf.d2(i, k) + jf.d(i) * jg.d(k) + jf.d(k) * jg.d(i);
          bad_rules += oracle::close(prod.d2(i, k), leib, 1e-12) ? 0 : 1;
        }
      }
    }
    v.require(bad_fd == 0, std::to_string(bad_fd) + " derivative mismatches");
    v.require(bad_rules == 0, std::to_string(bad_rules) + " Leibniz or chain rule mismatches");
    report(8, "jets agree with finite differences on 1000 random expressions", v);
  }

  {
    Verdict v;
    const CorpusRun second = run_corpus();
    v.require(first.report == second.report, "reports differ between runs");
    v.require(!first.report.empty(), "empty report");
    std::set<std::string> covered;
    for (const auto& r : rs) {
      if (r.status == pcc::Status::Skip) continue;
      const auto paren = r.item.find('(');
      covered.insert(paren == std::string::npos ? r.item : r.item.substr(0, paren));
    }
    for (const auto& entry : pcc::catalog()) v.require(covered.count(entry.item) > 0, entry.item + " never exercised");
    report(9, "deterministic reports and full catalog coverage", v);
  }

  if (argc > 1) {
    Verdict v;
    const std::string exe = std::string("\"") + argv[1] + "\"";
    const fs::path dir = fs::temp_directory_path() / "pcc_acceptance";
    fs::create_directories(dir);
    const std::string header = "[chart]\ncoords = x y\nbox = -1 1 -1 1\n[sampling]\ncount = 10\n"
                               "[endo S]\ncomponents = 1 x 0 -1\n[connection F]\nkind = flat\n";
    std::ofstream(dir / "failing.scn") << header << "[check p]\nkind = parallel\nconnection = F\nstructure = S\n";
    std::ofstream(dir / "broken.scn") << header << "[check p]\nkind = parallel\nconnection = Nope\n";
    const std::string good = (pcc::default_corpus_dir() / "pencil_pythagorean.scn").string();
    v.require(exit_code(exe + " verify \"" + good + "\"") == 0, "passing scenario does not exit 0");
    v.require(exit_code(exe + " verify \"" + (dir / "failing.scn").string() + "\"") == 1, "failing scenario does not exit 1");
    v.require(exit_code(exe + " verify \"" + (dir / "broken.scn").string() + "\"") == 2, "broken scenario does not exit 2");
    v.require(exit_code(exe + " verify --samples nope \"" + good + "\"") == 2, "bad option does not exit 2");
    v.require(exit_code(exe + " verify \"" + (dir / "missing.scn").string() + "\"") == 2, "missing file does not exit 2");
    fs::remove_all(dir);
    std::printf("cli\t%s\texit codes 0, 1 and 2\t%s\n", v.ok() ? "PASS" : "FAIL", v.summary().c_str());
    if (!v.ok()) ++g_failed;
  }

  std::printf("# acceptance\tfailed=%d\n", g_failed);
  return g_failed == 0 ? 0 : 1;
}
