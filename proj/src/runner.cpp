#include "pcc/runner.hpp"

#include "pcc/checks.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>

namespace pcc {

int RunResult::count(Status s) const {
  return static_cast<int>(std::count_if(lines.begin(), lines.end(), [s](const ReportLine& l) { return l.status == s; }));
}

VerifyContext make_context(const Scenario& s, const RunOptions& opts) {
  VerifyContext ctx;
  ctx.dim = s.chart.dim;
  ctx.tol = opts.tol.value_or(s.tol);
  ctx.points = sample_points({opts.seed.value_or(s.seed), opts.samples.value_or(s.count), s.chart.box});
  ctx.frames = coordinate_frames(s.chart.dim);
  for (const auto& name : s.frames) ctx.frames.push_back(field_frame(name, s.vectors.at(name)));
  return ctx;
}

namespace {

bool contains(std::string_view hay, std::string_view needle) { return hay.find(needle) != std::string_view::npos; }

std::string base_item(const std::string& item) {
  const auto paren = item.find('(');
  return paren == std::string::npos ? item : item.substr(0, paren);
}

bool listed(const CheckSpec& spec, const std::string& item) {
  return std::any_of(spec.expect_fail.begin(), spec.expect_fail.end(),
                     [&](const std::string& e) { return e == item || e == base_item(item); });
}

// A listed item must fail on its own residual, by at least min_residual.
void apply_expectation(const CheckSpec& spec, CheckRecord& r, double tol) {
  if (!listed(spec, r.item)) return;
  const bool failed = r.status == Status::Fail || (r.status == Status::Info && r.residual > tol);
  if (r.status == Status::Skip) {
    r.status = Status::Fail;
    r.detail = "expected failure was skipped: " + r.detail;
  } else if (failed && !(r.residual >= spec.min_residual)) {
    r.status = Status::Fail;
    r.detail = "expected failure below minimum residual";
  } else if (failed) {
    r.status = Status::Pass;
    r.detail = "expected failure" + (r.detail.empty() ? std::string() : "; " + r.detail);
  } else {
    r.status = Status::Fail;
    r.detail = "expected failure did not occur" + (r.detail.empty() ? std::string() : "; " + r.detail);
  }
}

struct Selection {
  const CheckSpec* spec;
  bool whole;  // otherwise only items matching the filter are kept
};

}  // namespace

RunResult run_scenario(const Scenario& s, const RunOptions& opts) {
  const VerifyContext ctx = make_context(s, opts);

  std::vector<Selection> selected;
  for (const auto& spec : s.checks) {
    const std::string prefix = s.name + "/" + spec.label + "/";
    if (opts.filter.empty() || contains(spec.kind, opts.filter)) {
      selected.push_back({&spec, true});
      continue;
    }
    const CheckKind* kind = find_check_kind(spec.kind);
    const bool any = contains(prefix + "error", opts.filter) ||
                     (kind && std::any_of(kind->items.begin(), kind->items.end(),
                                          [&](const std::string& i) { return contains(prefix + i, opts.filter); }));
    if (any) selected.push_back({&spec, false});
  }

  std::vector<std::vector<ReportLine>> per_check(selected.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < selected.size(); i = next++) {
      const CheckSpec& spec = *selected[i].spec;
      const auto start = std::chrono::steady_clock::now();
      std::vector<CheckRecord> records;
      try {
        records = run_check(s, spec, ctx);
      } catch (const std::exception& err) {
        CheckRecord r;
        r.item = "error";
        r.residual = std::nan("");
        r.status = Status::Fail;
        r.detail = err.what();
        if (const auto* ev = dynamic_cast<const EvalError*>(&err)) {
          r.worst_point = ev->point();
          r.detail += " in " + ev->subexpression();
        }
        records.push_back(std::move(r));
      }
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      for (auto& r : records) {
        const std::string id = s.name + "/" + spec.label + "/" + r.item;
        if (!selected[i].whole && !contains(id, opts.filter)) continue;
        apply_expectation(spec, r, ctx.tol);
        per_check[i].push_back({id, r.item == "error" ? "plumbing" : anchor_for(r.item),
                                r.residual, r.status, r.worst_point, r.worst_frames, r.detail, secs});
      }
    }
  };

  const int jobs = std::clamp(opts.jobs, 1, std::max(1, static_cast<int>(selected.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  RunResult out;
  for (auto& v : per_check) {
    for (auto& l : v) out.lines.push_back(std::move(l));
  }
  std::stable_sort(out.lines.begin(), out.lines.end(), [](const ReportLine& a, const ReportLine& b) { return a.id < b.id; });
  return out;
}

namespace {

std::string sci(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  return buf;
}

std::string point_text(const Point& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", p[i]);
    s += (i ? ", " : "") + std::string(buf);
  }
  return s + ")";
}

}  // namespace

std::string format_report(const RunResult& r, const ReportStyle& style) {
  std::string out;
  for (const auto& l : r.lines) {
    out += l.id + "\t" + l.anchor + "\t" + sci(l.residual) + "\t" + std::string(to_string(l.status));
    if (style.details) {
      out += "\tpoint=" + (l.worst_point.empty() ? std::string("-") : point_text(l.worst_point));
      out += "\tframes=" + (l.worst_frames.empty() ? std::string("-") : l.worst_frames);
      if (!l.detail.empty()) out += "\t" + l.detail;
    }
    if (style.timing) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3f", l.seconds * 1e3);
      out += "\ttime_ms=" + std::string(buf);
    }
    out += "\n";
  }
  return out;
}

std::string format_summary(const std::string& name, const RunResult& r) {
  return "# " + name + "\trecords=" + std::to_string(r.lines.size()) + "\tpass=" + std::to_string(r.count(Status::Pass)) +
         "\tfail=" + std::to_string(r.count(Status::Fail)) + "\tskip=" + std::to_string(r.count(Status::Skip)) +
         "\tinfo=" + std::to_string(r.count(Status::Info)) +
         "\tinconclusive=" + std::to_string(r.count(Status::Inconclusive)) + "\n";
}

std::filesystem::path default_corpus_dir() {
#ifdef PCC_CORPUS_DIR
  return PCC_CORPUS_DIR;
#else
  return "scenarios";
#endif
}

std::vector<std::filesystem::path> corpus_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  if (!std::filesystem::is_directory(dir)) throw ConfigError("no such directory: " + dir.string());
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".scn") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace pcc
