#pragma once

#include "pcc/conjugation.hpp"

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <vector>

namespace pcc {

/// Complementary projectors h + v = I.
struct ProjectorPair {
  EndoField h;
  EndoField v;

  /// v = I - h, built exactly.
  static ProjectorPair from_horizontal(const EndoField& h);
  /// h = (I + E) / 2, v = (I - E) / 2.
  static ProjectorPair from_structure(const EndoField& e);
  int dim() const { return h.dim(); }
};

/// Max residual of h + v = I, h^2 = h, v^2 = v, hv = 0, vh = 0; item "pair.axioms".
CheckRecord projector_pair_axioms(const ProjectorPair& pair, std::span<const Point> points, double tol);

/// E = h - v, built exactly.
EndoField structure_from_projectors(const ProjectorPair& pair);

enum class Side { Horizontal, Vertical };

/// The spanning fields lose rank at a sample point.
class RankDeficiency : public std::runtime_error {
 public:
  RankDeficiency(const std::string& what, Point point) : std::runtime_error(what), point_(std::move(point)) {}
  const Point& point() const { return point_; }

 private:
  Point point_;
};

/// A distribution given by pointwise independent spanning fields or by one
/// side of a projector pair.
class Distribution {
 public:
  /// Relative singular-value threshold below which spanning fields count as dependent.
  static constexpr double kRankThreshold = 1e-8;

  static Distribution span(int dim, std::vector<VectorField> fields);
  static Distribution side(const ProjectorPair& pair, Side side);

  int dim() const { return n_; }

  struct Local {
    std::vector<JetVec> sections;  // pointwise spanning sections, order 2
    Eigen::MatrixXd complement;    // annihilates exactly the fibre
    /// Max-norm of the component of w outside the fibre.
    double residual(const JetVec& w) const;
  };

  /// Throws RankDeficiency when spanning fields are dependent at p.
  Local at(std::span<const double> p) const;

 private:
  int n_ = 0;
  std::vector<VectorField> fields_;
  std::optional<ProjectorPair> pair_;
  Side side_ = Side::Horizontal;
};

/// X in D implies EX in D.
CheckRecord invariance_check(const Distribution& d, const EndoField& e, const VerifyContext& ctx);
/// Y in D implies nabla_X Y in D for every frame X.
CheckRecord restriction_check(const Connection& c, const Distribution& d, const VerifyContext& ctx);
/// <X : Y> in D for X, Y in D.
CheckRecord geodesic_invariance_check(const Connection& c, const Distribution& d, const VerifyContext& ctx);

/// For an E-invariant D to which nabla restricts: nabla^E restricts to D and
/// D is geodesically invariant for nabla^E. Both items are skipped when the
/// hypotheses fail.
std::vector<CheckRecord> conjugate_restriction_suite(const Connection& c, const EndoField& e, const Distribution& d,
                                                     const VerifyContext& ctx);

/// h(nabla_X hY) + v(nabla_X vY).
Connection schouten(const Connection& c, const ProjectorPair& pair);

/// h(nabla_X hY) - h(nabla_X vY) - v(nabla_X hY) + v(nabla_X vY).
Connection conjugate_hv_form(const Connection& c, const ProjectorPair& pair);

struct OneillGray {
  Tensor12Field t;  // h(nabla_vX vY) + v(nabla_vX hY)
  Tensor12Field a;  // v(nabla_hX hY) + h(nabla_hX vY)
};

OneillGray oneill_gray(const Connection& c, const ProjectorPair& pair);

/// Kirichenko tensors of h - v written through the projectors:
/// C = 2[h(nabla_vX vY) + v(nabla_hX hY)], B = -2[h(nabla_hX vY) + v(nabla_vX hY)].
Kirichenko kirichenko_from_projectors(const Connection& c, const ProjectorPair& pair);

/// Everything that holds for a valid projector pair: structure, invariance of
/// both sides, the four-term conjugate, the Schouten connection, Kirichenko
/// tensors through projectors and through O'Neill-Gray tensors, and their
/// block structure. Only the axioms are reported when they fail.
std::vector<CheckRecord> projector_pair_suite(const Connection& c, const ProjectorPair& pair, const VerifyContext& ctx);

/// If nabla^E (E = h - v) is torsion-free, both sides are involutive. The
/// hypothesis record is informational when it fails; the conclusion is then
/// skipped, with its residual still shown.
std::vector<CheckRecord> involutivity_suite(const Connection& c, const ProjectorPair& pair, const VerifyContext& ctx);

}  // namespace pcc
