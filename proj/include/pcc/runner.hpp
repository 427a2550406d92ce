#pragma once

#include "pcc/scenario.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pcc {

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<double> tol;
  /// Keeps records whose id "<scenario>/<label>/<item>" or check kind contains this.
  std::string filter;
  int jobs = 1;
};

/// One report record.
struct ReportLine {
  std::string id;  // <scenario>/<label>/<item>
  std::string anchor;
  double residual = 0.0;
  Status status = Status::Pass;
  Point worst_point;
  std::string worst_frames;
  std::string detail;
  double seconds = 0.0;  // wall time of the owning check
};

struct RunResult {
  std::vector<ReportLine> lines;  // sorted by id
  int count(Status s) const;
  bool any_failure() const { return count(Status::Fail) > 0; }
};

/// The verification context the scenario (with overrides) describes.
VerifyContext make_context(const Scenario& s, const RunOptions& opts);

/// Runs every selected check, `opts.jobs` at a time. A thrown error becomes a
/// failing "<label>/error" record. Expected failures are turned into passes
/// when they do fail, and into failures when they do not.
RunResult run_scenario(const Scenario& s, const RunOptions& opts);

struct ReportStyle {
  bool details = false;  // worst point, frames and detail text
  bool timing = false;   // wall time; makes output run-dependent
};

/// Tab-separated "id, anchor, residual (%.5e), status" lines followed by a
/// summary line.
std::string format_report(const RunResult& r, const ReportStyle& style = {});
std::string format_summary(const std::string& name, const RunResult& r);

/// Directory holding the shipped scenarios.
std::filesystem::path default_corpus_dir();

/// *.scn files of a directory, sorted by name.
std::vector<std::filesystem::path> corpus_files(const std::filesystem::path& dir);

}  // namespace pcc
