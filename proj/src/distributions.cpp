#include "pcc/distributions.hpp"

#include <cmath>

namespace pcc {

namespace {

void require_same_chart(int a, int b) {
  if (a != b) throw ConfigError("chart mismatch: dimensions " + std::to_string(a) + " and " + std::to_string(b));
}

struct BoundPair {
  JetMat h;
  JetMat v;
};

BoundPair bind_pair(const ProjectorPair& pair, std::span<const double> p) {
  return {pair.h.eval(p, 2), pair.v.eval(p, 2)};
}

CheckRecord inconclusive(std::string item, const RankDeficiency& err) {
  CheckRecord r;
  r.item = std::move(item);
  r.residual = std::nan("");
  r.status = Status::Inconclusive;
  r.worst_point = err.point();
  r.detail = err.what();
  return r;
}

// Max of probe over points, frames X and sections Y of d.
template <class Bind>
CheckRecord over_frames_and_sections(const Distribution& d, const VerifyContext& ctx, std::string item, Bind bind) {
  MaxResidual acc;
  try {
    for (const auto& p : ctx.points) {
      const Distribution::Local local = d.at(p);
      const auto probe = bind(p);
      const auto frames = eval_frames(ctx, p);
      for (std::size_t a = 0; a < frames.size(); ++a) {
        for (std::size_t s = 0; s < local.sections.size(); ++s) {
          const double r = local.residual(probe(frames[a], local.sections[s]));
          if (acc.wants(r)) acc.observe(r, p, ctx.frames[a].label + ",s" + std::to_string(s));
        }
      }
    }
  } catch (const RankDeficiency& err) {
    return inconclusive(std::move(item), err);
  }
  return acc.record(std::move(item), ctx.tol);
}

}  // namespace

ProjectorPair ProjectorPair::from_horizontal(const EndoField& h) { return {h, EndoField::identity(h.dim()) - h}; }

ProjectorPair ProjectorPair::from_structure(const EndoField& e) {
  const EndoField id = EndoField::identity(e.dim());
  const Expr half = Expr::rational(1, 2);
  return {half * (id + e), half * (id - e)};
}

CheckRecord projector_pair_axioms(const ProjectorPair& pair, std::span<const Point> points, double tol) {
  require_same_chart(pair.h.dim(), pair.v.dim());
  const int n = pair.dim();
  MaxResidual acc;
  for (const auto& p : points) {
    const JetMat h = pair.h.eval(p, 0);
    const JetMat v = pair.v.eval(p, 0);
    const JetMat id = JetMat::identity(n, 0);
    for (const JetMat& m : {h + v - id, h * h - h, v * v - v, h * v, v * h}) acc.observe(m.value_norm(), p, "");
  }
  return acc.record("pair.axioms", tol);
}

EndoField structure_from_projectors(const ProjectorPair& pair) { return pair.h - pair.v; }

Distribution Distribution::span(int dim, std::vector<VectorField> fields) {
  if (fields.empty()) throw ConfigError("a spanned distribution needs at least one field");
  if (static_cast<int>(fields.size()) > dim) throw ConfigError("more spanning fields than the chart dimension");
  for (const auto& f : fields) require_same_chart(dim, f.dim());
  Distribution d;
  d.n_ = dim;
  d.fields_ = std::move(fields);
  return d;
}

Distribution Distribution::side(const ProjectorPair& pair, Side side) {
  Distribution d;
  d.n_ = pair.dim();
  d.pair_ = pair;
  d.side_ = side;
  return d;
}

double Distribution::Local::residual(const JetVec& w) const {
  const auto vals = values(w);
  const Eigen::VectorXd out = complement * Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
  return out.lpNorm<Eigen::Infinity>();
}

Distribution::Local Distribution::at(std::span<const double> p) const {
  Local local;
  if (pair_) {
    const BoundPair b = bind_pair(*pair_, p);
    const JetMat& keep = side_ == Side::Horizontal ? b.h : b.v;
    const JetMat& drop = side_ == Side::Horizontal ? b.v : b.h;
    for (int j = 0; j < n_; ++j) local.sections.push_back(keep * basis_vec(n_, 2, j));
    local.complement.resize(n_, n_);
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) local.complement(i, j) = drop(i, j).value();
    }
    return local;
  }
  const auto r = static_cast<Eigen::Index>(fields_.size());
  Eigen::MatrixXd basis(n_, r);
  for (Eigen::Index c = 0; c < r; ++c) {
    local.sections.push_back(fields_[c].eval(p, 2));
    for (int i = 0; i < n_; ++i) basis(i, c) = local.sections.back()[i].value();
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (!(sv(0) > 0.0) || sv(r - 1) < kRankThreshold * sv(0)) {
    throw RankDeficiency("spanning fields are dependent at a sample point", Point(p.begin(), p.end()));
  }
  const Eigen::MatrixXd u = svd.matrixU();
  local.complement = Eigen::MatrixXd::Identity(n_, n_) - u * u.transpose();
  return local;
}

CheckRecord invariance_check(const Distribution& d, const EndoField& e, const VerifyContext& ctx) {
  require_same_chart(d.dim(), e.dim());
  MaxResidual acc;
  try {
    for (const auto& p : ctx.points) {
      const Distribution::Local local = d.at(p);
      const JetMat em = e.eval(p, 2);
      for (std::size_t s = 0; s < local.sections.size(); ++s) {
        const double r = local.residual(em * local.sections[s]);
        if (acc.wants(r)) acc.observe(r, p, "s" + std::to_string(s));
      }
    }
  } catch (const RankDeficiency& err) {
    return inconclusive("distribution.invariant", err);
  }
  return acc.record("distribution.invariant", ctx.tol);
}

CheckRecord restriction_check(const Connection& c, const Distribution& d, const VerifyContext& ctx) {
  require_same_chart(c.dim(), d.dim());
  return over_frames_and_sections(d, ctx, "distribution.restricts", [&](std::span<const double> p) { return c.at(p); });
}

CheckRecord geodesic_invariance_check(const Connection& c, const Distribution& d, const VerifyContext& ctx) {
  require_same_chart(c.dim(), d.dim());
  MaxResidual acc;
  try {
    for (const auto& p : ctx.points) {
      const Distribution::Local local = d.at(p);
      const auto nabla = c.at(p);
      for (std::size_t a = 0; a < local.sections.size(); ++a) {
        for (std::size_t b = a; b < local.sections.size(); ++b) {
          const double r = local.residual(symmetric_product(nabla, local.sections[a], local.sections[b]));
          if (acc.wants(r)) acc.observe(r, p, "s" + std::to_string(a) + ",s" + std::to_string(b));
        }
      }
    }
  } catch (const RankDeficiency& err) {
    return inconclusive("distribution.geodesic", err);
  }
  return acc.record("distribution.geodesic", ctx.tol);
}

std::vector<CheckRecord> conjugate_restriction_suite(const Connection& c, const EndoField& e, const Distribution& d,
                                                     const VerifyContext& ctx) {
  std::vector<CheckRecord> out;
  const CheckRecord inv = invariance_check(d, e, ctx);
  const CheckRecord res = restriction_check(c, d, ctx);
  out.push_back(inv);
  out.push_back(res);
  if (inv.status != Status::Pass || res.status != Status::Pass) {
    const std::string why = "E-invariant: " + yes_no(inv.status == Status::Pass) +
                            "; nabla restricts: " + yes_no(res.status == Status::Pass);
    out.push_back(skipped("distribution.conjugate_restricts", why));
    out.push_back(skipped("distribution.conjugate_geodesic", why));
    return out;
  }
  const Connection ce = conjugate(c, e);
  out.push_back(renamed(restriction_check(ce, d, ctx), "distribution.conjugate_restricts"));
  out.push_back(renamed(geodesic_invariance_check(ce, d, ctx), "distribution.conjugate_geodesic"));
  return out;
}

Connection schouten(const Connection& c, const ProjectorPair& pair) {
  require_same_chart(c.dim(), pair.dim());
  return Connection(c.dim(), Provenance::Schouten, "schouten(" + c.label() + ")",
                    [c, pair](std::span<const double> p) -> Connection::Local {
                      auto l = c.at(p);
                      auto b = bind_pair(pair, p);
                      return [l, b](const JetVec& x, const JetVec& y) {
                        return b.h * l(x, b.h * y) + b.v * l(x, b.v * y);
                      };
                    });
}

Connection conjugate_hv_form(const Connection& c, const ProjectorPair& pair) {
  require_same_chart(c.dim(), pair.dim());
  return Connection(c.dim(), Provenance::Derived, "hv(" + c.label() + ")",
                    [c, pair](std::span<const double> p) -> Connection::Local {
                      auto l = c.at(p);
                      auto b = bind_pair(pair, p);
                      return [l, b](const JetVec& x, const JetVec& y) {
                        const JetVec dh = l(x, b.h * y);
                        const JetVec dv = l(x, b.v * y);
                        return b.h * dh - b.h * dv - b.v * dh + b.v * dv;
                      };
                    });
}

OneillGray oneill_gray(const Connection& c, const ProjectorPair& pair) {
  require_same_chart(c.dim(), pair.dim());
  Tensor12Field t(c.dim(), "T", [c, pair](std::span<const double> p) -> Tensor12Field::Local {
    auto l = c.at(p);
    auto b = bind_pair(pair, p);
    return [l, b](const JetVec& x, const JetVec& y) {
      const JetVec vx = b.v * x;
      return b.h * l(vx, b.v * y) + b.v * l(vx, b.h * y);
    };
  });
  Tensor12Field a(c.dim(), "A", [c, pair](std::span<const double> p) -> Tensor12Field::Local {
    auto l = c.at(p);
    auto b = bind_pair(pair, p);
    return [l, b](const JetVec& x, const JetVec& y) {
      const JetVec hx = b.h * x;
      return b.v * l(hx, b.h * y) + b.h * l(hx, b.v * y);
    };
  });
  return {std::move(t), std::move(a)};
}

Kirichenko kirichenko_from_projectors(const Connection& c, const ProjectorPair& pair) {
  require_same_chart(c.dim(), pair.dim());
  Tensor12Field cs(c.dim(), "C(h,v)", [c, pair](std::span<const double> p) -> Tensor12Field::Local {
    auto l = c.at(p);
    auto b = bind_pair(pair, p);
    return [l, b](const JetVec& x, const JetVec& y) {
      return 2.0 * (b.h * l(b.v * x, b.v * y) + b.v * l(b.h * x, b.h * y));
    };
  });
  Tensor12Field bs(c.dim(), "B(h,v)", [c, pair](std::span<const double> p) -> Tensor12Field::Local {
    auto l = c.at(p);
    auto b = bind_pair(pair, p);
    return [l, b](const JetVec& x, const JetVec& y) {
      return -2.0 * (b.h * l(b.h * x, b.v * y) + b.v * l(b.v * x, b.h * y));
    };
  });
  return {std::move(cs), std::move(bs)};
}

std::vector<CheckRecord> projector_pair_suite(const Connection& c, const ProjectorPair& pair, const VerifyContext& ctx) {
  require_same_chart(c.dim(), pair.dim());
  std::vector<CheckRecord> out;
  out.push_back(projector_pair_axioms(pair, ctx.points, ctx.tol));
  if (out.back().status != Status::Pass) return out;

  const EndoField e = structure_from_projectors(pair);
  const ProjectorPair back = ProjectorPair::from_structure(e);
  {
    CheckRecord sq = check_almost_product(e, ctx.points, ctx.tol);
    MaxResidual trip;
    for (const auto& p : ctx.points) {
      trip.observe((back.h.eval(p, 0) - pair.h.eval(p, 0)).value_norm(), p, "");
      trip.observe((back.v.eval(p, 0) - pair.v.eval(p, 0)).value_norm(), p, "");
    }
    const bool ok = sq.status == Status::Pass && !std::isnan(trip.value()) && trip.value() <= ctx.tol;
    CheckRecord r = sq.residual >= trip.value() ? sq : trip.record("", Status::Pass);
    r.item = "pair.structure";
    r.status = ok ? Status::Pass : Status::Fail;
    out.push_back(std::move(r));
  }

  const Distribution dh = Distribution::side(pair, Side::Horizontal);
  const Distribution dv = Distribution::side(pair, Side::Vertical);
  out.push_back(renamed(invariance_check(dh, e, ctx), "pair.invariant_h"));
  out.push_back(renamed(invariance_check(dv, e, ctx), "pair.invariant_v"));

  const Connection ce = conjugate(c, e);
  out.push_back(equality_check(ce, conjugate_hv_form(c, pair), ctx, "pair.hv_form"));

  const Connection s = schouten(c, pair);
  out.push_back(renamed(restriction_check(s, dh, ctx), "schouten.restricts_h"));
  out.push_back(renamed(restriction_check(s, dv, ctx), "schouten.restricts_v"));
  out.push_back(renamed(parallel_check(s, e, ctx), "schouten.E_connection"));
  out.push_back(equality_check(conjugate(s, e), s, ctx, "schouten.conjugate_fixed"));
  {
    const CheckRecord rh = restriction_check(c, dh, ctx);
    const CheckRecord rv = restriction_check(c, dv, ctx);
    if (rh.status == Status::Pass && rv.status == Status::Pass) {
      const CheckRecord a = equality_check(ce, c, ctx, "schouten.adapted");
      const CheckRecord b = equality_check(s, c, ctx, "schouten.adapted");
      out.push_back(a.status != Status::Pass || a.residual >= b.residual ? a : b);
    } else {
      out.push_back(skipped("schouten.adapted", "restricts to h side: " + yes_no(rh.status == Status::Pass) +
                                                    "; to v side: " + yes_no(rv.status == Status::Pass)));
    }
  }

  const Kirichenko k = kirichenko(c, e);
  const Kirichenko kp = kirichenko_from_projectors(c, pair);
  out.push_back(tensor_equality_check(kp.structural, k.structural, ctx, "pair.C_projectors"));
  out.push_back(tensor_equality_check(kp.virtual_, k.virtual_, ctx, "pair.B_projectors"));

  const OneillGray og = oneill_gray(c, pair);
  const Tensor12Field c_og = 2.0 * (precompose_second(og.t, pair.v) + precompose_second(og.a, pair.h));
  const Tensor12Field b_og = -2.0 * (precompose_second(og.t, pair.h) + precompose_second(og.a, pair.v));
  out.push_back(tensor_equality_check(c_og, k.structural, ctx, "pair.C_oneill_gray"));
  out.push_back(tensor_equality_check(b_og, k.virtual_, ctx, "pair.B_oneill_gray"));
  {
    CheckRecord tt = tensoriality_check(og.t, ctx);
    CheckRecord ta = tensoriality_check(og.a, ctx);
    out.push_back(renamed(tt.status != Status::Pass || tt.residual >= ta.residual ? tt : ta, "oneill_gray.tensoriality"));
  }

  // Block structure: vanishing mixed/pure blocks, splitting, and the surviving blocks.
  auto blocks = [&](std::string item, auto probe) {
    return over_pairs(ctx, [&](std::span<const double> p) -> PairProbe {
             auto lc = k.structural.at(p);
             auto lb = k.virtual_.at(p);
             auto l = c.at(p);
             auto b = bind_pair(pair, p);
             return [=](const JetVec& x, const JetVec& y) { return probe(lc, lb, l, b, x, y); };
           })
        .record(std::move(item), ctx.tol);
  };
  using TL = Tensor12Field::Local;
  using CL = Connection::Local;
  out.push_back(blocks("pair.vanishing", [](const TL& cc, const TL& bb, const CL&, const BoundPair& b, const JetVec& x,
                                            const JetVec& y) {
    const JetVec hx = b.h * x, vx = b.v * x, hy = b.h * y, vy = b.v * y;
    return std::max({value_norm(cc(hx, vy)), value_norm(cc(vx, hy)), value_norm(bb(hx, hy)), value_norm(bb(vx, vy))});
  }));
  out.push_back(blocks("pair.antisymmetric_blocks", [](const TL& cc, const TL& bb, const CL&, const BoundPair& b,
                                                       const JetVec& x, const JetVec& y) {
    const JetVec hx = b.h * x, vx = b.v * x, hy = b.h * y, vy = b.v * y;
    return std::max(value_norm(cc(hx, vy) + cc(vx, hy)), value_norm(bb(hx, hy) + bb(vx, vy)));
  }));
  out.push_back(blocks("pair.splitting_C", [](const TL& cc, const TL&, const CL&, const BoundPair& b, const JetVec& x,
                                              const JetVec& y) {
    return value_norm(cc(x, y) - cc(b.h * x, b.h * y) - cc(b.v * x, b.v * y));
  }));
  out.push_back(blocks("pair.splitting_B", [](const TL&, const TL& bb, const CL&, const BoundPair& b, const JetVec& x,
                                              const JetVec& y) {
    return value_norm(bb(x, y) - bb(b.h * x, b.v * y) - bb(b.v * x, b.h * y));
  }));
  out.push_back(blocks("pair.blocks", [](const TL& cc, const TL& bb, const CL& l, const BoundPair& b, const JetVec& x,
                                         const JetVec& y) {
    const JetVec hx = b.h * x, vx = b.v * x, hy = b.h * y, vy = b.v * y;
    return std::max({value_norm(cc(hx, hy) - 2.0 * (b.v * l(hx, hy))), value_norm(cc(vx, vy) - 2.0 * (b.h * l(vx, vy))),
                     value_norm(bb(hx, vy) + 2.0 * (b.h * l(hx, vy))), value_norm(bb(vx, hy) + 2.0 * (b.v * l(vx, hy)))});
  }));
  return out;
}

std::vector<CheckRecord> involutivity_suite(const Connection& c, const ProjectorPair& pair, const VerifyContext& ctx) {
  require_same_chart(c.dim(), pair.dim());
  std::vector<CheckRecord> out;
  out.push_back(projector_pair_axioms(pair, ctx.points, ctx.tol));
  if (out.back().status != Status::Pass) return out;

  const Connection ce = conjugate(c, structure_from_projectors(pair));
  CheckRecord hyp = renamed(torsion_free_check(ce, ctx), "involutivity.hypothesis");
  const bool holds = hyp.status == Status::Pass;
  if (!holds) {
    hyp.status = Status::Info;
    hyp.detail = "conjugate has torsion; conclusion not required";
  }
  out.push_back(hyp);

  // h[vX, vY] and v[hX, hY]
  CheckRecord concl = over_pairs(ctx, [&](std::span<const double> p) -> PairProbe {
                        auto b = bind_pair(pair, p);
                        return [b](const JetVec& x, const JetVec& y) {
                          return std::max(value_norm(b.h * lie_bracket(b.v * x, b.v * y)),
                                          value_norm(b.v * lie_bracket(b.h * x, b.h * y)));
                        };
                      }).record("involutivity.conclusion", ctx.tol);
  if (!holds) {
    concl.status = Status::Skip;
    concl.detail = "hypothesis fails";
  }
  out.push_back(concl);
  return out;
}

}  // namespace pcc
