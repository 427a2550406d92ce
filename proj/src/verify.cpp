#include "pcc/verify.hpp"

#include "pcc/fields.hpp"

#include <algorithm>
#include <cmath>

namespace pcc {

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Pass:
      return "pass";
    case Status::Fail:
      return "FAIL";
    case Status::Skip:
      return "skip";
    case Status::Info:
      return "info";
    case Status::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

void MaxResidual::observe(double r, const Point& p, std::string_view frames) {
  if (std::isnan(r)) {
    if (!seen_nan_) {
      point_ = p;
      frames_ = frames;
    }
    seen_nan_ = true;
    return;
  }
  if (!has_ || r > max_) {
    max_ = std::max(max_, r);
    if (!seen_nan_) {
      point_ = p;
      frames_ = frames;
    }
    has_ = true;
  }
}

void MaxResidual::merge(const MaxResidual& o) {
  if (o.seen_nan_) {
    if (!seen_nan_) {
      point_ = o.point_;
      frames_ = o.frames_;
    }
    seen_nan_ = true;
  }
  if (o.has_ && (!has_ || o.max_ > max_)) {
    max_ = std::max(max_, o.max_);
    if (!seen_nan_) {
      point_ = o.point_;
      frames_ = o.frames_;
    }
    has_ = true;
  }
}

CheckRecord MaxResidual::record(std::string item, double tol) const {
  const bool ok = !seen_nan_ && max_ <= tol;
  return record(std::move(item), ok ? Status::Pass : Status::Fail);
}

CheckRecord MaxResidual::record(std::string item, Status status, std::string detail) const {
  CheckRecord r;
  r.item = std::move(item);
  r.residual = seen_nan_ ? std::nan("") : max_;
  r.status = status;
  r.worst_point = point_;
  r.worst_frames = frames_;
  r.detail = std::move(detail);
  return r;
}

CheckRecord skipped(std::string item, std::string why) {
  CheckRecord r;
  r.item = std::move(item);
  r.residual = std::nan("");
  r.status = Status::Skip;
  r.detail = std::move(why);
  return r;
}

CheckRecord renamed(CheckRecord r, std::string item) {
  r.item = std::move(item);
  return r;
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

CheckRecord agreement(std::string item, const CheckRecord& lhs, const CheckRecord& rhs, std::string_view lhs_name,
                      std::string_view rhs_name) {
  CheckRecord r = rhs;
  r.item = std::move(item);
  const bool a = lhs.status == Status::Pass;
  const bool b = rhs.status == Status::Pass;
  r.status = a == b ? Status::Pass : Status::Fail;
  r.detail = std::string(lhs_name) + ": " + yes_no(a) + "; " + std::string(rhs_name) + ": " + yes_no(b);
  return r;
}

std::vector<Frame> coordinate_frames(int dim) {
  std::vector<Frame> frames;
  for (int i = 0; i < dim; ++i) {
    frames.push_back(
        {"d" + std::to_string(i), [dim, i](std::span<const double>) { return basis_vec(dim, 2, i); }});
  }
  return frames;
}

Frame field_frame(std::string label, const VectorField& field) {
  return {std::move(label), [field](std::span<const double> p) { return field.eval(p, 2); }};
}

std::vector<JetVec> eval_frames(const VerifyContext& ctx, std::span<const double> p) {
  std::vector<JetVec> out;
  out.reserve(ctx.frames.size());
  for (const auto& f : ctx.frames) out.push_back(f.eval(p));
  return out;
}

std::string frame_tuple(const VerifyContext& ctx, std::initializer_list<std::size_t> idx) {
  std::string s;
  for (auto i : idx) {
    if (!s.empty()) s += ',';
    s += ctx.frames[i].label;
  }
  return s;
}

MaxResidual over_pairs(const VerifyContext& ctx, const std::function<PairProbe(std::span<const double>)>& bind) {
  MaxResidual acc;
  for (const auto& p : ctx.points) {
    const PairProbe probe = bind(p);
    const auto frames = eval_frames(ctx, p);
    for (std::size_t a = 0; a < frames.size(); ++a) {
      for (std::size_t b = 0; b < frames.size(); ++b) {
        const double r = probe(frames[a], frames[b]);
        if (acc.wants(r)) acc.observe(r, p, frame_tuple(ctx, {a, b}));
      }
    }
  }
  return acc;
}

MaxResidual over_triples(const VerifyContext& ctx, const std::function<TripleProbe(std::span<const double>)>& bind) {
  MaxResidual acc;
  for (const auto& p : ctx.points) {
    const TripleProbe probe = bind(p);
    const auto frames = eval_frames(ctx, p);
    for (std::size_t a = 0; a < frames.size(); ++a) {
      for (std::size_t b = 0; b < frames.size(); ++b) {
        for (std::size_t c = 0; c < frames.size(); ++c) {
          const double r = probe(frames[a], frames[b], frames[c]);
          if (acc.wants(r)) acc.observe(r, p, frame_tuple(ctx, {a, b, c}));
        }
      }
    }
  }
  return acc;
}

Expr probe_function(int dim) {
  const Expr x0 = Expr::coord(0);
  const Expr xl = Expr::coord(dim - 1);
  return Expr::rational(1) + Expr::rational(1, 2) * x0 * xl + Expr::rational(1, 3) * Expr::sin(xl);
}

}  // namespace pcc
