#pragma once

#include "pcc/expr.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace pcc {

class VectorField;

enum class Status { Pass, Fail, Skip, Info, Inconclusive };

std::string_view to_string(Status s);

/// Outcome of one identity check.
struct CheckRecord {
  std::string item;  // catalog id, e.g. "conjugate.duality"
  double residual = 0.0;
  Status status = Status::Pass;
  Point worst_point;
  std::string worst_frames;
  std::string detail;
};

/// Tracks the largest residual seen and where it occurred.
class MaxResidual {
 public:
  void observe(double r, const Point& p, std::string_view frames);
  /// True iff observing r would change the tracked state.
  bool wants(double r) const { return std::isnan(r) ? !seen_nan_ : (!has_ || r > max_); }
  void merge(const MaxResidual& o);

  double value() const { return max_; }
  const Point& worst_point() const { return point_; }
  const std::string& worst_frames() const { return frames_; }

  /// Pass iff value <= tol (NaN never passes).
  CheckRecord record(std::string item, double tol) const;
  /// Record with an explicit status.
  CheckRecord record(std::string item, Status status, std::string detail = {}) const;

 private:
  double max_ = 0.0;
  bool seen_nan_ = false;
  bool has_ = false;
  Point point_;
  std::string frames_;
};

/// A record that was not evaluated, with the reason.
CheckRecord skipped(std::string item, std::string why);
CheckRecord renamed(CheckRecord r, std::string item);
/// Pass iff both predicates have the same status; keeps the right-hand residual.
CheckRecord agreement(std::string item, const CheckRecord& lhs, const CheckRecord& rhs, std::string_view lhs_name,
                      std::string_view rhs_name);
std::string yes_no(bool b);

/// A named vector field used as a test direction.
struct Frame {
  std::string label;
  std::function<JetVec(std::span<const double>)> eval;
};

/// Coordinate frame d_0 .. d_{n-1} as constant order-2 fields.
std::vector<Frame> coordinate_frames(int dim);
Frame field_frame(std::string label, const VectorField& field);

/// Everything an identity suite needs to quantify over.
struct VerifyContext {
  int dim = 2;
  std::vector<Point> points;
  std::vector<Frame> frames;
  double tol = 1e-9;
};

/// Frame jets evaluated at one point, in frame order.
std::vector<JetVec> eval_frames(const VerifyContext& ctx, std::span<const double> p);

std::string frame_tuple(const VerifyContext& ctx, std::initializer_list<std::size_t> idx);

using PairProbe = std::function<double(const JetVec&, const JetVec&)>;
using TripleProbe = std::function<double(const JetVec&, const JetVec&, const JetVec&)>;

/// Max of probe(X, Y) over all points and ordered frame pairs; `bind` is
/// called once per point.
MaxResidual over_pairs(const VerifyContext& ctx, const std::function<PairProbe(std::span<const double>)>& bind);
MaxResidual over_triples(const VerifyContext& ctx, const std::function<TripleProbe(std::span<const double>)>& bind);

/// Built-in scalar test function used for Leibniz and tensoriality probes:
/// f = 1 + x_0 x_{n-1} / 2 + sin(x_{n-1}) / 3.
Expr probe_function(int dim);

}  // namespace pcc
