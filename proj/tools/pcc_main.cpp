#include "pcc/checks.hpp"
#include "pcc/runner.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kConfig = 2;

struct RunFlags {
  pcc::RunOptions opts;
  pcc::ReportStyle style;
  std::string report;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option_function<std::uint64_t>("--seed", [&f](std::uint64_t v) { f.opts.seed = v; }, "Sample seed");
  cmd->add_option_function<int>("--samples", [&f](int v) { f.opts.samples = v; }, "Number of sample points")
      ->check(CLI::Range(1, 100000));
  cmd->add_option_function<double>("--tol", [&f](double v) { f.opts.tol = v; }, "Residual tolerance")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--filter", f.opts.filter, "Run only checks whose label, kind or item contains this");
  cmd->add_option("--jobs", f.opts.jobs, "Checks run concurrently")->check(CLI::Range(1, 256));
  cmd->add_option("--report", f.report, "Write the report to this file instead of stdout");
  cmd->add_flag("--details", f.style.details, "Add worst point, frames and notes to each record");
  cmd->add_flag("--timing", f.style.timing, "Add wall time to each record");
}

int emit(const RunFlags& f, const std::string& text) {
  if (f.report.empty()) {
    std::cout << text;
    return kOk;
  }
  std::ofstream out(f.report, std::ios::binary);
  if (!out || !(out << text)) {
    std::cerr << "cannot write " << f.report << "\n";
    return kConfig;
  }
  return kOk;
}

int load_failed(const std::string& what, const pcc::ConfigError& err) {
  std::cerr << what << ": " << err.what() << "\n";
  return kConfig;
}

int verify(const std::string& file, const RunFlags& f) {
  pcc::Scenario s;
  try {
    s = pcc::load_scenario_file(file);
  } catch (const pcc::ConfigError& err) {
    return load_failed(file, err);
  }
  const pcc::RunResult r = pcc::run_scenario(s, f.opts);
  const std::string summary = pcc::format_summary(s.name, r);
  if (const int rc = emit(f, pcc::format_report(r, f.style) + summary); rc != kOk) return rc;
  if (!f.report.empty()) std::cout << summary;
  return r.any_failure() ? kFailed : kOk;
}

int corpus(const std::string& dir, const RunFlags& f) {
  std::vector<pcc::Scenario> scenarios;
  try {
    for (const auto& path : pcc::corpus_files(dir)) scenarios.push_back(pcc::load_scenario_file(path));
  } catch (const pcc::ConfigError& err) {
    return load_failed(dir, err);
  }
  std::string text;
  std::string summaries;
  pcc::RunResult all;
  for (const auto& s : scenarios) {
    pcc::RunResult r = pcc::run_scenario(s, f.opts);
    text += pcc::format_report(r, f.style);
    summaries += pcc::format_summary(s.name, r);
    all.lines.insert(all.lines.end(), r.lines.begin(), r.lines.end());
  }
  summaries += pcc::format_summary("corpus", all);
  if (const int rc = emit(f, text + summaries); rc != kOk) return rc;
  if (!f.report.empty()) std::cout << summaries;
  return all.any_failure() ? kFailed : kOk;
}

int catalog() {
  for (const auto& e : pcc::catalog()) std::cout << e.item << "\t" << e.kind << "\t" << e.anchor << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification of conjugate connections of almost product structures"};
  app.require_subcommand(1);

  RunFlags verify_flags;
  std::string file;
  auto* v = app.add_subcommand("verify", "Run the checks of one scenario");
  v->add_option("file", file, "Scenario file")->required();
  add_run_flags(v, verify_flags);

  RunFlags corpus_flags;
  std::string dir = pcc::default_corpus_dir().string();
  auto* c = app.add_subcommand("corpus", "Run every shipped scenario");
  c->add_option("--dir", dir, "Scenario directory");
  add_run_flags(c, corpus_flags);

  auto* cat = app.add_subcommand("catalog", "List every check item with the identity it verifies");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? kOk : kConfig;
  }
  if (*v) return verify(file, verify_flags);
  if (*c) return corpus(dir, corpus_flags);
  if (*cat) return catalog();
  return kConfig;
}
