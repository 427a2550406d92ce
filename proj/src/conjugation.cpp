#include "pcc/conjugation.hpp"

#include <cmath>

namespace pcc {

namespace {

void require_same_chart(int a, int b) {
  if (a != b) throw ConfigError("chart mismatch: dimensions " + std::to_string(a) + " and " + std::to_string(b));
}

// (X, Y) -> eta(X) Y - eta(Y) X, or with E applied to the moving vector.
Tensor12Field antisymmetrised_form(const OneFormField& eta, const EndoField& a) {
  return form_times_endo(eta, a) - endo_times_form(a, eta);
}

CheckRecord recurrence_check(const Connection& c, const EndoField& e, const OneFormField& eta, const EndoField& target,
                             const VerifyContext& ctx, std::string item) {
  return tensor_equality_check(nabla_tensor(c, e), form_times_endo(eta, target), ctx, std::move(item));
}

}  // namespace

JetMat bind_structure(const EndoField& e, std::span<const double> p) {
  JetMat em = e.eval(p, 2);
  const int n = em.size();
  const JetMat sq = em * em;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) worst = std::max(worst, std::abs(sq(i, j).value() - (i == j ? 1.0 : 0.0)));
  }
  if (!(worst <= 1e-8)) throw ContractError("structure is not almost product at a sample point");
  return em;
}

Connection psi(const Connection& c, const EndoField& e) {
  require_same_chart(c.dim(), e.dim());
  return Connection(c.dim(), Provenance::Derived, "psi(" + c.label() + ")",
                    [c, e](std::span<const double> p) -> Connection::Local {
                      auto l = c.at(p);
                      auto em = bind_structure(e, p);
                      return [l, em](const JetVec& x, const JetVec& y) {
                        return 0.5 * (l(x, y) + em * l(x, em * y));
                      };
                    });
}

Tensor12Field chi(const Tensor12Field& s, const EndoField& e) {
  require_same_chart(s.dim(), e.dim());
  return Tensor12Field(s.dim(), "chi(" + s.label() + ")", [s, e](std::span<const double> p) -> Tensor12Field::Local {
    auto l = s.at(p);
    auto em = bind_structure(e, p);
    return [l, em](const JetVec& x, const JetVec& y) { return 0.5 * (l(x, y) + em * l(x, em * y)); };
  });
}

Connection conjugate(const Connection& c, const EndoField& e) {
  require_same_chart(c.dim(), e.dim());
  return Connection(c.dim(), Provenance::Conjugate, "conj(" + c.label() + ")",
                    [c, e](std::span<const double> p) -> Connection::Local {
                      auto l = c.at(p);
                      auto em = bind_structure(e, p);
                      return [l, em](const JetVec& x, const JetVec& y) { return em * l(x, em * y); };
                    });
}

Connection conjugate_via_nabla_e(const Connection& c, const EndoField& e) {
  require_same_chart(c.dim(), e.dim());
  return Connection(c.dim(), Provenance::Derived, "conj'(" + c.label() + ")",
                    [c, e](std::span<const double> p) -> Connection::Local {
                      auto l = c.at(p);
                      auto em = bind_structure(e, p);
                      return [l, em](const JetVec& x, const JetVec& y) {
                        return l(x, y) + em * nabla_endo(l, em, x, y);
                      };
                    });
}

CheckRecord tensor_equality_check(const Tensor12Field& a, const Tensor12Field& b, const VerifyContext& ctx,
                                  std::string item) {
  return over_pairs(ctx, [&](std::span<const double> p) -> PairProbe {
           auto la = a.at(p);
           auto lb = b.at(p);
           return [la, lb](const JetVec& x, const JetVec& y) { return value_norm(la(x, y) - lb(x, y)); };
         })
      .record(std::move(item), ctx.tol);
}

std::vector<CheckRecord> projector_suite(const Connection& c, const EndoField& e, const Tensor12Field& tau,
                                         const VerifyContext& ctx) {
  require_same_chart(c.dim(), e.dim());
  require_same_chart(c.dim(), tau.dim());
  std::vector<CheckRecord> out;
  const Connection p = psi(c, e);
  out.push_back(equality_check(psi(p, e), p, ctx, "projector.psi_idempotent"));
  const Tensor12Field ct = chi(tau, e);
  out.push_back(tensor_equality_check(chi(ct, e), ct, ctx, "projector.chi_idempotent"));
  out.push_back(equality_check(psi(add_tensor(c, tau), e), add_tensor(p, ct), ctx, "projector.affinity"));
  out.push_back(equality_check(p, combine(0.5, c, 0.5, conjugate(c, e), "mean"), ctx, "projector.mean"));
  out.push_back(equality_check(conjugate(c, e), conjugate_via_nabla_e(c, e), ctx, "projector.closed_forms"));
  out.push_back(agreement("projector.membership", parallel_check(c, e, ctx), equality_check(p, c, ctx, "psi fixes"),
                          "nabla E = 0", "psi(nabla) = nabla"));
  return out;
}

std::vector<CheckRecord> conjugate_suite(const Connection& c, const EndoField& e, const MetricField* g,
                                         const VerifyContext& ctx) {
  require_same_chart(c.dim(), e.dim());
  const Connection ce = conjugate(c, e);
  std::vector<CheckRecord> out;

  out.push_back(over_pairs(ctx, [&](std::span<const double> p) -> PairProbe {
                  auto l = c.at(p);
                  auto le = ce.at(p);
                  auto em = bind_structure(e, p);
                  return [l, le, em](const JetVec& x, const JetVec& y) {
                    return value_norm(nabla_endo(le, em, x, y) + nabla_endo(l, em, x, y));
                  };
                }).record("conjugate.nabla_E", ctx.tol));

  out.push_back(equality_check(conjugate(ce, e), c, ctx, "conjugate.duality"));

  out.push_back(over_pairs(ctx, [&](std::span<const double> p) -> PairProbe {
                  auto l = c.at(p);
                  auto le = ce.at(p);
                  auto em = bind_structure(e, p);
                  return [l, le, em](const JetVec& x, const JetVec& y) {
                    return value_norm(torsion(le, x, y) - torsion(l, x, y) - em * dnabla_endo(l, em, x, y));
                  };
                }).record("conjugate.torsion", ctx.tol));

  out.push_back(over_triples(ctx, [&](std::span<const double> p) -> TripleProbe {
                  auto l = c.at(p);
                  auto le = ce.at(p);
                  auto em = bind_structure(e, p);
                  return [l, le, em](const JetVec& x, const JetVec& y, const JetVec& z) {
                    return value_norm(curvature(le, x, y, z) - em * curvature(l, x, y, em * z));
                  };
                }).record("conjugate.curvature", ctx.tol));

  if (g == nullptr) {
    out.push_back(skipped("conjugate.metric", "no metric given"));
  } else {
    require_same_chart(c.dim(), g->dim());
    const CheckRecord compat = metric_compat_residual(*g, e, ctx.points, ctx.tol);
    if (compat.status != Status::Pass) {
      out.push_back(skipped("conjugate.metric", "metric is not E-compatible"));
    } else {
      out.push_back(over_triples(ctx, [&](std::span<const double> p) -> TripleProbe {
                      auto l = c.at(p);
                      auto le = ce.at(p);
                      auto em = bind_structure(e, p);
                      auto gm = g->eval(p, 2);
                      return [l, le, em, gm](const JetVec& x, const JetVec& y, const JetVec& z) {
                        const Jet lhs = nabla_metric(le, gm, x, em * y, em * z);
                        return std::abs(lhs.value() - nabla_metric(l, gm, x, y, z).value());
                      };
                    }).record("conjugate.metric", ctx.tol));
    }
  }

  out.push_back(agreement("conjugate.flatness_transport", flatness_check(c, ctx), flatness_check(ce, ctx),
                          "nabla flat", "conjugate flat"));
  return out;
}

std::vector<CheckRecord> levi_civita_suite(const MetricField& g, const EndoField* e, const Connection* other,
                                           const VerifyContext& ctx) {
  const Connection lc = levi_civita(g);
  std::vector<CheckRecord> out;
  out.push_back(renamed(torsion_free_check(lc, ctx), "levi_civita.torsion_free"));
  out.push_back(renamed(metricity_check(lc, g, ctx), "levi_civita.metricity"));

  if (other != nullptr) {
    const bool symmetric = torsion_free_check(*other, ctx).status == Status::Pass;
    const bool metric = metricity_check(*other, g, ctx).status == Status::Pass;
    if (symmetric && metric) {
      out.push_back(equality_check(*other, lc, ctx, "levi_civita.uniqueness"));
    } else {
      out.push_back(skipped("levi_civita.uniqueness", "symmetric: " + yes_no(symmetric) + "; metric: " + yes_no(metric)));
    }
  }

  if (e != nullptr) {
    const bool compatible = metric_compat_residual(g, *e, ctx.points, ctx.tol).status == Status::Pass;
    const Connection ce = conjugate(lc, *e);
    if (compatible) {
      out.push_back(renamed(metricity_check(ce, g, ctx), "levi_civita.conjugate_metric"));
    } else {
      out.push_back(skipped("levi_civita.conjugate_metric", "metric is not E-compatible"));
    }
    const bool parallel = parallel_check(lc, *e, ctx).status == Status::Pass;
    if (compatible && parallel) {
      out.push_back(equality_check(ce, lc, ctx, "levi_civita.conjugate_fixed"));
    } else {
      out.push_back(skipped("levi_civita.conjugate_fixed",
                            "compatible: " + yes_no(compatible) + "; nabla E = 0: " + yes_no(parallel)));
    }
  }
  return out;
}

std::vector<CheckRecord> recurrent_suite(const Connection& c, const EndoField& e, const OneFormField& eta,
                                         RecurrenceMode mode, const VerifyContext& ctx) {
  require_same_chart(c.dim(), e.dim());
  require_same_chart(c.dim(), eta.dim());
  const EndoField id = EndoField::identity(c.dim());
  const EndoField& target = mode == RecurrenceMode::Recurrent ? e : id;

  std::vector<CheckRecord> out;
  out.push_back(renamed(torsion_free_check(c, ctx), "recurrent.symmetric"));
  out.push_back(recurrence_check(c, e, eta, target, ctx, "recurrent.hypothesis"));
  if (out[0].status != Status::Pass || out[1].status != Status::Pass) {
    out.push_back(skipped("recurrent.torsion", "hypothesis does not hold"));
    return out;
  }
  // Recurrent: eta(X) Y - eta(Y) X. Identity-recurrent: eta(X) EY - eta(Y) EX.
  const Tensor12Field expected = antisymmetrised_form(eta, mode == RecurrenceMode::Recurrent ? id : e);
  const Connection ce = conjugate(c, e);
  out.push_back(over_pairs(ctx, [&](std::span<const double> p) -> PairProbe {
                  auto le = ce.at(p);
                  auto ex = expected.at(p);
                  return [le, ex](const JetVec& x, const JetVec& y) {
                    return value_norm(torsion(le, x, y) - ex(x, y));
                  };
                }).record("recurrent.torsion", ctx.tol));
  return out;
}

bool on_unit_circle(Rational a, Rational b) {
  if (a.den == 0 || b.den == 0) return false;
  // a.num^2 b.den^2 + b.num^2 a.den^2 == a.den^2 b.den^2
  __extension__ typedef __int128 wide;
  const wide an = a.num, ad = a.den, bn = b.num, bd = b.den;
  return an * an * bd * bd + bn * bn * ad * ad == ad * ad * bd * bd;
}

EndoField pencil_structure(const Pencil& pencil) {
  const int n = pencil.e1.dim();
  require_same_chart(n, pencil.e2.dim());
  return Expr::rational(pencil.alpha.num, pencil.alpha.den) * pencil.e1 +
         Expr::rational(pencil.beta.num, pencil.beta.den) * pencil.e2;
}

Connection pencil_expansion(const Connection& c, const Pencil& pencil) {
  require_same_chart(c.dim(), pencil.e1.dim());
  const double a = pencil.alpha.value();
  const double b = pencil.beta.value();
  const Connection c1 = conjugate(c, pencil.e1);
  const Connection c2 = conjugate(c, pencil.e2);
  return Connection(c.dim(), Provenance::Derived, "pencil expansion",
                    [=](std::span<const double> p) -> Connection::Local {
                      auto l = c.at(p);
                      auto l1 = c1.at(p);
                      auto l2 = c2.at(p);
                      auto m1 = bind_structure(pencil.e1, p);
                      auto m2 = bind_structure(pencil.e2, p);
                      return [=](const JetVec& x, const JetVec& y) {
                        return a * a * l1(x, y) + b * b * l2(x, y) +
                               (a * b) * (m1 * l(x, m2 * y) + m2 * l(x, m1 * y));
                      };
                    });
}

std::vector<CheckRecord> pencil_suite(const Connection& c, const Pencil& pencil, const OneFormField& eta,
                                      const VerifyContext& ctx) {
  const int n = c.dim();
  require_same_chart(n, pencil.e1.dim());
  require_same_chart(n, pencil.e2.dim());
  require_same_chart(n, eta.dim());
  std::vector<CheckRecord> out;

  // Validity: E1, E2 almost product, E1 E2 + E2 E1 = 0, and alpha^2 + beta^2 = 1 exactly.
  MaxResidual skew;
  for (const auto& p : ctx.points) {
    const JetMat a = pencil.e1.eval(p, 0);
    const JetMat b = pencil.e2.eval(p, 0);
    skew.observe((a * b + b * a).value_norm(), p, "");
  }
  const bool e1_ok = check_almost_product(pencil.e1, ctx.points, ctx.tol).status == Status::Pass;
  const bool e2_ok = check_almost_product(pencil.e2, ctx.points, ctx.tol).status == Status::Pass;
  const bool circle = on_unit_circle(pencil.alpha, pencil.beta);
  const bool skew_ok = !std::isnan(skew.value()) && skew.value() <= ctx.tol;
  const bool valid = e1_ok && e2_ok && circle && skew_ok;
  out.push_back(skew.record("pencil.validity", valid ? Status::Pass : Status::Fail,
                            "E1 product: " + yes_no(e1_ok) + "; E2 product: " + yes_no(e2_ok) +
                                "; skew-commuting: " + yes_no(skew_ok) + "; on circle: " + yes_no(circle)));
  if (!valid) {
    for (const char* item : {"pencil.expansion", "pencil.reduction", "pencil.common_recurrent", "pencil.mixed_recurrent"}) {
      out.push_back(skipped(item, "invalid pencil"));
    }
    return out;
  }

  const EndoField eab = pencil_structure(pencil);
  out.push_back(equality_check(conjugate(c, eab), pencil_expansion(c, pencil), ctx, "pencil.expansion"));

  VerifyContext strict = ctx;
  strict.tol = 1e-12;
  CheckRecord worst;
  bool first = true;
  for (const auto& [a, b] : {std::pair<Rational, Rational>{{1, 1}, {0, 1}}, {{0, 1}, {1, 1}}}) {
    const Pencil unit{pencil.e1, pencil.e2, a, b};
    const Connection target = conjugate(c, a.num == 1 ? pencil.e1 : pencil.e2);
    for (const auto& rec : {equality_check(conjugate(c, pencil_structure(unit)), target, strict, ""),
                            equality_check(pencil_expansion(c, unit), target, strict, "")}) {
      if (first || rec.status != Status::Pass || (worst.status == Status::Pass && rec.residual > worst.residual)) {
        worst = rec;
        first = false;
      }
    }
  }
  out.push_back(renamed(worst, "pencil.reduction"));

  const EndoField e12 = pencil.e1 * pencil.e2;
  const Connection c1 = conjugate(c, pencil.e1);
  const Connection c2 = conjugate(c, pencil.e2);
  const Connection cab = conjugate(c, eab);

  // Common recurrence: nabla E_i = eta (x) E_i.
  const bool common = recurrence_check(c, pencil.e1, eta, pencil.e1, ctx, "").status == Status::Pass &&
                      recurrence_check(c, pencil.e2, eta, pencil.e2, ctx, "").status == Status::Pass;
  if (common) {
    CheckRecord same = equality_check(c1, c2, ctx, "pencil.common_recurrent");
    CheckRecord inv = equality_check(cab, c1, ctx, "pencil.common_recurrent");
    out.push_back(same.status != Status::Pass || same.residual >= inv.residual ? same : inv);
  } else {
    out.push_back(skipped("pencil.common_recurrent", "nabla E_i = eta (x) E_i does not hold"));
  }

  // Mixed recurrence: nabla E_1 = eta (x) E_2, nabla E_2 = eta (x) E_1.
  const bool mixed = recurrence_check(c, pencil.e1, eta, pencil.e2, ctx, "").status == Status::Pass &&
                     recurrence_check(c, pencil.e2, eta, pencil.e1, ctx, "").status == Status::Pass;
  if (mixed) {
    const double k = pencil.alpha.value() * pencil.alpha.value() - pencil.beta.value() * pencil.beta.value();
    CheckRecord mean = equality_check(c, combine(0.5, c1, 0.5, c2, "mean"), ctx, "pencil.mixed_recurrent");
    CheckRecord shape =
        equality_check(cab, add_tensor(c, k * form_times_endo(eta, e12)), ctx, "pencil.mixed_recurrent");
    out.push_back(mean.status != Status::Pass || mean.residual >= shape.residual ? mean : shape);
  } else {
    out.push_back(skipped("pencil.mixed_recurrent", "nabla E_i = eta (x) E_j does not hold"));
  }
  return out;
}

Kirichenko kirichenko(const Connection& c, const EndoField& e) {
  require_same_chart(c.dim(), e.dim());
  auto make = [&](double sign, std::string label) {
    return Tensor12Field(c.dim(), std::move(label), [c, e, sign](std::span<const double> p) -> Tensor12Field::Local {
      auto l = c.at(p);
      auto em = bind_structure(e, p);
      return [l, em, sign](const JetVec& x, const JetVec& y) {
        return 0.5 * (nabla_endo(l, em, em * x, y) + sign * nabla_endo(l, em, x, em * y));
      };
    });
  };
  return {make(1.0, "C"), make(-1.0, "B")};
}

std::vector<CheckRecord> kirichenko_suite(const Connection& c, const EndoField& e, const VerifyContext& ctx) {
  const Kirichenko k = kirichenko(c, e);
  const Connection ce = conjugate(c, e);
  const Kirichenko kc = kirichenko(ce, e);
  std::vector<CheckRecord> out;
  out.push_back(tensor_equality_check(kc.structural, -1.0 * k.structural, ctx, "kirichenko.conjugate_C"));
  out.push_back(tensor_equality_check(kc.virtual_, -1.0 * k.virtual_, ctx, "kirichenko.conjugate_B"));
  out.push_back(tensor_equality_check(precompose_both(k.structural, e), k.structural, ctx, "kirichenko.C_invariance"));
  out.push_back(tensor_equality_check(precompose_both(k.virtual_, e), -1.0 * k.virtual_, ctx, "kirichenko.B_anti"));
  out.push_back(equality_check(ce, add_tensor(c, k.virtual_ - k.structural), ctx, "kirichenko.decomposition"));
  return out;
}

std::vector<CheckRecord> projective_suite(const Connection& c, const EndoField& e, const OneFormField& tau,
                                          const VerifyContext& ctx) {
  require_same_chart(c.dim(), tau.dim());
  const Connection changed = add_tensor(c, projective_tensor(tau));
  const Kirichenko k = kirichenko(c, e);
  const Kirichenko kp = kirichenko(changed, e);
  // tau(EY) EX - tau(Y) X
  const Tensor12Field expected(c.dim(), "projective B shift", [e, tau](std::span<const double> p) -> Tensor12Field::Local {
    auto em = bind_structure(e, p);
    auto t = tau.eval(p, 2);
    return [em, t](const JetVec& x, const JetVec& y) {
      return contract(t, em * y) * (em * x) - contract(t, y) * x;
    };
  });
  std::vector<CheckRecord> out;
  out.push_back(tensor_equality_check(kp.structural, k.structural, ctx, "projective.C_invariant"));
  out.push_back(tensor_equality_check(kp.virtual_ - k.virtual_, expected, ctx, "projective.B_difference"));
  return out;
}

}  // namespace pcc
