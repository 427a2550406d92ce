#include "pcc/generalized.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace pcc {

namespace {

void require_same_chart(int a, int b) {
  if (a != b) throw ConfigError("chart mismatch: dimensions " + std::to_string(a) + " and " + std::to_string(b));
}

std::string format_rational(Rational r) {
  if (r.den == 1) return std::to_string(r.num);
  return std::to_string(r.num) + "/" + std::to_string(r.den);
}

// Keeps the record that is failing, or else the one with the larger residual.
void keep_worst(CheckRecord& worst, bool& first, const CheckRecord& r) {
  const bool worse = r.status != Status::Pass && worst.status == Status::Pass;
  const bool larger = r.status == worst.status && r.residual > worst.residual;
  if (first || worse || larger || std::isnan(r.residual)) {
    worst = r;
    first = false;
  }
}

Tensor12Field family_tensor(const Connection& c, const EndoField& e, double lambda, double mu) {
  const Tensor12Field ne = nabla_tensor(c, e);
  return lambda * ne + mu * compose(e, ne);
}

}  // namespace

Connection generalized_conjugate(const Connection& c, const EndoField& e, const Tensor12Field& s) {
  require_same_chart(c.dim(), s.dim());
  Connection g = add_tensor(conjugate(c, e), s);
  return Connection(g.dim(), Provenance::Generalized, "gconj(" + c.label() + ", " + s.label() + ")",
                    [g](std::span<const double> p) { return g.at(p); });
}

Connection family_member(const Connection& c, const EndoField& e, double lambda, double mu) {
  return combine(1.0 + mu, conjugate(c, e), lambda, c, "family");
}

Connection family_member_expanded(const Connection& c, const EndoField& e, double lambda, double mu) {
  const Connection ce = conjugate(c, e);
  return Connection(c.dim(), Provenance::Derived, "family'", [c, ce, e, lambda, mu](std::span<const double> p) -> Connection::Local {
    auto l = c.at(p);
    auto le = ce.at(p);
    auto em = bind_structure(e, p);
    return [l, le, em, lambda, mu](const JetVec& x, const JetVec& y) {
      return le(x, y) + lambda * l(x, y) + mu * (em * l(x, em * y));
    };
  });
}

Connection family_twice(const Connection& c, const EndoField& e, double lambda, double mu) {
  return family_member(family_member(c, e, lambda, mu), e, lambda, mu);
}

CheckRecord duality_residual(const EndoField& e, const Tensor12Field& s, const VerifyContext& ctx) {
  require_same_chart(e.dim(), s.dim());
  return over_pairs(ctx, [&](std::span<const double> p) -> PairProbe {
           auto ls = s.at(p);
           auto em = bind_structure(e, p);
           return [ls, em](const JetVec& x, const JetVec& y) { return value_norm(em * ls(x, em * y) + ls(x, y)); };
         })
      .record("duality.equation", ctx.tol);
}

std::vector<CheckRecord> duality_suite(const Connection& c, const EndoField& e, const Tensor12Field& s,
                                       const VerifyContext& ctx) {
  std::vector<CheckRecord> out;
  const CheckRecord eq = duality_residual(e, s, ctx);
  out.push_back(eq);

  const Connection twice = generalized_conjugate(generalized_conjugate(c, e, s), e, s);
  const Connection expansion(c.dim(), Provenance::Derived, "expansion", [c, e, s](std::span<const double> p) -> Connection::Local {
    auto l = c.at(p);
    auto ls = s.at(p);
    auto em = bind_structure(e, p);
    return [l, ls, em](const JetVec& x, const JetVec& y) { return l(x, y) + em * ls(x, em * y) + ls(x, y); };
  });
  out.push_back(equality_check(twice, expansion, ctx, "duality.expansion"));
  out.push_back(equality_check(twice, c, ctx, "duality.involution"));
  out.push_back(renamed(duality_residual(e, nabla_tensor(c, e), ctx), "duality.particular_solution"));
  if (eq.status == Status::Pass) {
    out.push_back(renamed(duality_residual(e, compose(e, s), ctx), "duality.solution_closure"));
  } else {
    out.push_back(skipped("duality.solution_closure", "C is not a solution"));
  }
  return out;
}

std::vector<CheckRecord> family_suite(const Connection& c, const EndoField& e, const VerifyContext& ctx) {
  std::vector<CheckRecord> out;
  const std::vector<std::pair<double, double>> samples = {{0, 0}, {0, -2}, {1, -1}, {-1, -1}, {0.5, 0.25}, {2, -3}, {-0.75, 1.5}};

  CheckRecord forms;
  bool first = true;
  for (const auto& [l, m] : samples) {
    keep_worst(forms, first, equality_check(family_member(c, e, l, m), family_member_expanded(c, e, l, m), ctx, ""));
  }
  out.push_back(renamed(forms, "family.forms"));

  const Connection ce = conjugate(c, e);
  CheckRecord special;
  first = true;
  keep_worst(special, first, equality_check(family_member(c, e, 0, 0), ce, ctx, ""));
  keep_worst(special, first, equality_check(family_member(c, e, 1, -1), c, ctx, ""));
  keep_worst(special, first, equality_check(family_member(c, e, 0, -2), combine(-1.0, ce, 0.0, ce, "-conj"), ctx, ""));
  keep_worst(special, first, equality_check(family_member(c, e, -1, -1), combine(-1.0, c, 0.0, c, "-nabla"), ctx, ""));
  out.push_back(renamed(special, "family.special"));

  CheckRecord leibniz;
  first = true;
  for (const auto& [l, m] : samples) {
    CheckRecord exact;
    exact.status = l + m == 0.0 ? Status::Pass : Status::Fail;
    CheckRecord r = agreement("", exact, leibniz_check(family_member(c, e, l, m), ctx), "affine", "Leibniz");
    keep_worst(leibniz, first, r);
  }
  out.push_back(renamed(leibniz, "family.leibniz"));
  return out;
}

bool family_is_involutive(const FamilyCell& cell) {
  __extension__ typedef __int128 wide;
  const wide ln = cell.lambda.num, ld = cell.lambda.den;
  const wide mn = cell.mu.num, md = cell.mu.den;
  // 1 + mu = (md + mn) / md
  const wide on = md + mn;
  // (on/md)^2 + (ln/ld)^2 == 1  <=>  on^2 ld^2 + ln^2 md^2 == md^2 ld^2
  const bool circle = on * on * ld * ld + ln * ln * md * md == md * md * ld * ld;
  return circle && (ln == 0 || on == 0);
}

std::vector<CheckRecord> family_sweep(const Connection& c, const EndoField& e, const std::vector<FamilyCell>& grid,
                                      const VerifyContext& ctx) {
  require_same_chart(c.dim(), e.dim());
  const Connection ce = conjugate(c, e);
  std::vector<CheckRecord> out;

  // Genericity: nabla_X Y and nabla^E_X Y independent at some sample.
  constexpr double kConditioning = 1e-3;
  bool generic = false;
  for (const auto& p : ctx.points) {
    auto l = c.at(p);
    auto le = ce.at(p);
    const auto frames = eval_frames(ctx, p);
    for (const auto& x : frames) {
      for (const auto& y : frames) {
        const auto u = values(l(x, y));
        const auto w = values(le(x, y));
        Eigen::MatrixXd m(ctx.dim, 2);
        for (int i = 0; i < ctx.dim; ++i) {
          m(i, 0) = u[i];
          m(i, 1) = w[i];
        }
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
        const auto sv = svd.singularValues();
        if (sv(0) > 1e-6 && sv(1) > kConditioning * sv(0)) generic = true;
      }
    }
    if (generic) break;
  }

  CheckRecord coeffs;
  bool first = true;
  for (const auto& cell : grid) {
    const double lambda = cell.lambda.value();
    const double mu = cell.mu.value();
    const bool predicted = family_is_involutive(cell);
    const Connection twice = family_twice(c, e, lambda, mu);
    CheckRecord r = equality_check(twice, c, ctx, "family.duality(" + format_rational(cell.lambda) + "," +
                                                        format_rational(cell.mu) + ")");
    const bool observed = r.status == Status::Pass;
    r.detail = "involutive: " + yes_no(observed) + "; predicted: " + yes_no(predicted);
    if (observed == predicted) {
      r.status = Status::Pass;
    } else {
      r.status = generic ? Status::Fail : Status::Inconclusive;
    }
    out.push_back(std::move(r));

    if (!generic) continue;
    const double a_expected = (1 + mu) * (1 + mu) + lambda * lambda;
    const double b_expected = 2 * lambda * (1 + mu);
    MaxResidual err;
    for (const auto& p : ctx.points) {
      auto l = c.at(p);
      auto le = ce.at(p);
      auto lt = twice.at(p);
      const auto frames = eval_frames(ctx, p);
      for (std::size_t i = 0; i < frames.size(); ++i) {
        for (std::size_t j = 0; j < frames.size(); ++j) {
          const auto u = values(l(frames[i], frames[j]));
          const auto w = values(le(frames[i], frames[j]));
          const auto t = values(lt(frames[i], frames[j]));
          Eigen::MatrixXd m(ctx.dim, 2);
          Eigen::VectorXd rhs(ctx.dim);
          for (int k = 0; k < ctx.dim; ++k) {
            m(k, 0) = u[k];
            m(k, 1) = w[k];
            rhs(k) = t[k];
          }
          const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
          const auto sv = svd.singularValues();
          if (!(sv(0) > 1e-6 && sv(1) > kConditioning * sv(0))) continue;
          const Eigen::Vector2d ab = svd.solve(rhs);
          const double fit = (m * ab - rhs).lpNorm<Eigen::Infinity>();
          const double r = std::max({std::abs(ab(0) - a_expected), std::abs(ab(1) - b_expected), fit});
          if (err.wants(r)) err.observe(r, p, frame_tuple(ctx, {i, j}));
        }
      }
    }
    CheckRecord cr = err.record("family.coefficients", ctx.tol);
    cr.detail = "worst cell (" + format_rational(cell.lambda) + "," + format_rational(cell.mu) + ")";
    keep_worst(coeffs, first, cr);
  }
  if (!generic) {
    out.push_back(skipped("family.coefficients", "nabla_X Y and its conjugate are parallel at every sample"));
    out.back().status = Status::Inconclusive;
  } else if (!first) {
    out.push_back(coeffs);
  }
  return out;
}

std::vector<CheckRecord> generalized_suite(const Connection& c, const EndoField& e, const Tensor12Field& s,
                                           const std::vector<FamilyCell>& membership_pairs, const VerifyContext& ctx) {
  require_same_chart(c.dim(), e.dim());
  require_same_chart(c.dim(), s.dim());
  const Connection ce = conjugate(c, e);
  const Connection gc = generalized_conjugate(c, e, s);
  std::vector<CheckRecord> out;

  // (nabla^(E,C)_X E) Y = -(nabla_X E) Y + C(X, EY) - E C(X, Y)
  out.push_back(over_pairs(ctx, [&](std::span<const double> p) -> PairProbe {
                  auto l = c.at(p);
                  auto lg = gc.at(p);
                  auto ls = s.at(p);
                  auto em = bind_structure(e, p);
                  return [=](const JetVec& x, const JetVec& y) {
                    const JetVec rhs = -nabla_endo(l, em, x, y) + ls(x, em * y) - em * ls(x, y);
                    return value_norm(nabla_endo(lg, em, x, y) - rhs);
                  };
                }).record("generalized.nabla_E", ctx.tol));

  // T' = T + E(d^nabla E) + C(X, Y) - C(Y, X)
  out.push_back(over_pairs(ctx, [&](std::span<const double> p) -> PairProbe {
                  auto l = c.at(p);
                  auto lg = gc.at(p);
                  auto ls = s.at(p);
                  auto em = bind_structure(e, p);
                  return [=](const JetVec& x, const JetVec& y) {
                    const JetVec rhs = torsion(l, x, y) + em * dnabla_endo(l, em, x, y) + ls(x, y) - ls(y, x);
                    return value_norm(torsion(lg, x, y) - rhs);
                  };
                }).record("generalized.torsion", ctx.tol));

  {
    const CheckRecord sym = over_pairs(ctx, [&](std::span<const double> p) -> PairProbe {
                              auto ls = s.at(p);
                              return [ls](const JetVec& x, const JetVec& y) { return value_norm(ls(x, y) - ls(y, x)); };
                            }).record("", ctx.tol);
    const CheckRecord par = parallel_check(c, e, ctx);
    if (sym.status == Status::Pass && par.status == Status::Pass) {
      out.push_back(over_pairs(ctx, [&](std::span<const double> p) -> PairProbe {
                      auto l = c.at(p);
                      auto lg = gc.at(p);
                      return [=](const JetVec& x, const JetVec& y) {
                        return value_norm(torsion(lg, x, y) - torsion(l, x, y));
                      };
                    }).record("generalized.torsion_symmetric", ctx.tol));
    } else {
      out.push_back(skipped("generalized.torsion_symmetric", "C symmetric: " + yes_no(sym.status == Status::Pass) +
                                                                 "; nabla E = 0: " + yes_no(par.status == Status::Pass)));
    }
  }

  // R' = E R(X,Y) EZ + C(X, E nabla_Y EZ) - C(Y, E nabla_X EZ) - C([X,Y], Z)
  //      + E nabla_X (E C(Y,Z)) - E nabla_Y (E C(X,Z)) + C(X, C(Y,Z)) - C(Y, C(X,Z))
  out.push_back(over_triples(ctx, [&](std::span<const double> p) -> TripleProbe {
                  auto l = c.at(p);
                  auto lg = gc.at(p);
                  auto ls = s.at(p);
                  auto em = bind_structure(e, p);
                  return [=](const JetVec& x, const JetVec& y, const JetVec& z) {
                    const JetVec ez = em * z;
                    const JetVec syz = ls(y, z);
                    const JetVec sxz = ls(x, z);
                    const JetVec rhs = em * curvature(l, x, y, ez) + ls(x, em * l(y, ez)) - ls(y, em * l(x, ez)) -
                                       ls(lie_bracket(x, y), z) + em * l(x, em * syz) - em * l(y, em * sxz) +
                                       ls(x, syz) - ls(y, sxz);
                    return value_norm(curvature(lg, x, y, z) - rhs);
                  };
                }).record("generalized.curvature", ctx.tol));

  {
    // The display as printed: its last two terms both differentiate along Y
    // and it has no terms quadratic in C.
    CheckRecord lit = over_triples(ctx, [&](std::span<const double> p) -> TripleProbe {
                        auto l = c.at(p);
                        auto lg = gc.at(p);
                        auto ls = s.at(p);
                        auto em = bind_structure(e, p);
                        return [=](const JetVec& x, const JetVec& y, const JetVec& z) {
                          const JetVec ez = em * z;
                          const JetVec rhs = em * curvature(l, x, y, ez) + ls(x, em * l(y, ez)) -
                                             ls(y, em * l(x, ez)) - ls(lie_bracket(x, y), z) +
                                             em * l(y, em * ls(y, z)) - em * l(y, em * ls(x, z));
                          return value_norm(curvature(lg, x, y, z) - rhs);
                        };
                      }).record("generalized.curvature_literal", ctx.tol);
    lit.detail = lit.status == Status::Pass ? "literal display agrees here" : "literal display disagrees here";
    lit.status = Status::Info;
    out.push_back(std::move(lit));
  }

  if (membership_pairs.empty()) {
    out.push_back(skipped("generalized.membership", "no sample pairs"));
  } else {
    const CheckRecord par = parallel_check(c, e, ctx);
    CheckRecord worst;
    bool first = true;
    for (const auto& cell : membership_pairs) {
      const Connection g = generalized_conjugate(c, e, family_tensor(c, e, cell.lambda.value(), cell.mu.value()));
      CheckRecord r = agreement("", par, parallel_check(g, e, ctx), "nabla E = 0", "generalized E-connection");
      keep_worst(worst, first, r);
    }
    out.push_back(renamed(worst, "generalized.membership"));
  }
  return out;
}

}  // namespace pcc
