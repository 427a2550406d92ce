#include "pcc/connection.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace pcc {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Christoffel:
      return "christoffel";
    case Provenance::Conjugate:
      return "conjugate";
    case Provenance::Generalized:
      return "generalized";
    case Provenance::Schouten:
      return "schouten";
    case Provenance::LeviCivita:
      return "levi-civita";
    case Provenance::SumWithTensor:
      return "sum-with-tensor";
    case Provenance::Derived:
      return "derived";
  }
  return "?";
}

Connection::Connection(int dim, Provenance provenance, std::string label, Binder binder)
    : n_(dim), provenance_(provenance), label_(std::move(label)), binder_(std::move(binder)) {}

namespace {

using Table = std::shared_ptr<const std::vector<Jet>>;

// (nabla_X Y)^k = X^i (d_i Y^k + Gamma^k_ij Y^j)
Connection::Local christoffel_local(int n, Table gamma) {
  return [n, gamma](const JetVec& x, const JetVec& y) {
    if (min_order(y) == 0) throw ContractError("covariant derivative needs an order >= 1 argument");
    JetVec r;
    r.reserve(n);
    for (int k = 0; k < n; ++k) {
      Jet acc;
      for (int i = 0; i < n; ++i) {
        Jet term = y[k].partial(i);
        for (int j = 0; j < n; ++j) term += (*gamma)[(k * n + i) * n + j] * y[j];
        acc = i == 0 ? x[0] * term : acc + x[i] * term;
      }
      r.push_back(acc);
    }
    return r;
  };
}

}  // namespace

Connection Connection::christoffel(int dim, std::vector<Expr> gamma, std::string label) {
  auto base = Tensor12Field::from_components(dim, gamma);  // validates shape and coordinates
  (void)base;
  auto comps = std::make_shared<const std::vector<Expr>>(std::move(gamma));
  return Connection(dim, Provenance::Christoffel, std::move(label), [dim, comps](std::span<const double> p) {
    auto table = std::make_shared<std::vector<Jet>>();
    table->reserve(comps->size());
    for (const auto& c : *comps) table->push_back(eval_jet(c, p, 2));
    return christoffel_local(dim, std::move(table));
  });
}

Connection Connection::flat(int dim) {
  return christoffel(dim, std::vector<Expr>(static_cast<std::size_t>(dim) * dim * dim, Expr::rational(0)), "flat");
}

std::vector<double> Connection::materialize(std::span<const double> p) const {
  const auto local = at(p);
  std::vector<double> out(static_cast<std::size_t>(n_) * n_ * n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      const JetVec v = local(basis_vec(n_, 2, i), basis_vec(n_, 2, j));
      for (int k = 0; k < n_; ++k) out[(k * n_ + i) * n_ + j] = v[k].value();
    }
  }
  return out;
}

Connection levi_civita(const MetricField& g) {
  const int n = g.dim();
  return Connection(n, Provenance::LeviCivita, "levi-civita", [g, n](std::span<const double> p) {
    const JetMat gm = g.eval(p, 2);
    JetMat ginv;
    try {
      ginv = inverse(gm);
    } catch (const std::domain_error&) {
      throw EvalError("singular metric", Point(p.begin(), p.end()), "");
    }
    // Gamma^k_ij = 1/2 g^kl (d_i g_lj + d_j g_li - d_l g_ij)
    auto table = std::make_shared<std::vector<Jet>>();
    table->reserve(static_cast<std::size_t>(n) * n * n);
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          Jet s = Jet::constant(n, 1, 0.0);
          for (int l = 0; l < n; ++l) {
            s += ginv(k, l) * (gm(l, j).partial(i) + gm(l, i).partial(j) - gm(i, j).partial(l));
          }
          table->push_back(0.5 * s);
        }
      }
    }
    return christoffel_local(n, std::move(table));
  });
}

Connection add_tensor(const Connection& c, const Tensor12Field& s) {
  if (c.dim() != s.dim()) throw ConfigError("chart mismatch between connection and tensor");
  return Connection(c.dim(), Provenance::SumWithTensor, c.label() + " + " + s.label(),
                    [c, s](std::span<const double> p) -> Connection::Local {
                      auto lc = c.at(p);
                      auto ls = s.at(p);
                      return [lc, ls](const JetVec& x, const JetVec& y) { return lc(x, y) + ls(x, y); };
                    });
}

Connection combine(double a, const Connection& c1, double b, const Connection& c2, std::string label) {
  if (c1.dim() != c2.dim()) throw ConfigError("chart mismatch between connections");
  return Connection(c1.dim(), Provenance::Derived, std::move(label),
                    [a, b, c1, c2](std::span<const double> p) -> Connection::Local {
                      auto l1 = c1.at(p);
                      auto l2 = c2.at(p);
                      return [a, b, l1, l2](const JetVec& x, const JetVec& y) {
                        return a * l1(x, y) + b * l2(x, y);
                      };
                    });
}

Tensor12Field nabla_tensor(const Connection& c, const EndoField& e) {
  if (c.dim() != e.dim()) throw ConfigError("chart mismatch between connection and structure");
  return Tensor12Field(c.dim(), "nabla E", [c, e](std::span<const double> p) -> Tensor12Field::Local {
    auto lc = c.at(p);
    auto em = e.eval(p, 2);
    return [lc, em](const JetVec& x, const JetVec& y) { return nabla_endo(lc, em, x, y); };
  });
}

JetVec nabla_endo(const Connection::Local& nabla, const JetMat& e, const JetVec& x, const JetVec& y) {
  return nabla(x, e * y) - e * nabla(x, y);
}

Jet nabla_metric(const Connection::Local& nabla, const JetMat& g, const JetVec& x, const JetVec& v, const JetVec& w) {
  return directional(x, inner(g, v, w)) - inner(g, nabla(x, v), w) - inner(g, v, nabla(x, w));
}

JetVec torsion(const Connection::Local& nabla, const JetVec& x, const JetVec& y) {
  return nabla(x, y) - nabla(y, x) - lie_bracket(x, y);
}

JetVec curvature(const Connection::Local& nabla, const JetVec& x, const JetVec& y, const JetVec& z) {
  if (min_order(x) < 2 || min_order(y) < 2 || min_order(z) < 2) {
    throw ContractError("curvature needs order-2 arguments");
  }
  return nabla(x, nabla(y, z)) - nabla(y, nabla(x, z)) - nabla(lie_bracket(x, y), z);
}

JetVec dnabla_endo(const Connection::Local& nabla, const JetMat& e, const JetVec& x, const JetVec& y) {
  return nabla_endo(nabla, e, x, y) - nabla_endo(nabla, e, y, x);
}

JetVec symmetric_product(const Connection::Local& nabla, const JetVec& x, const JetVec& y) {
  return nabla(x, y) + nabla(y, x);
}

JetVec nabla_vector(const Connection& c, const VectorField& x, const VectorField& y, std::span<const double> p,
                    int order) {
  return c.at(p)(x.eval(p, order), y.eval(p, order));
}

CheckRecord leibniz_check(const Connection& c, const VerifyContext& ctx) {
  const Expr f = probe_function(ctx.dim);
  return over_pairs(ctx, [&](std::span<const double> p) -> PairProbe {
           const auto nabla = c.at(p);
           const Jet fj = eval_jet(f, p, 2);
           return [nabla, fj](const JetVec& x, const JetVec& y) {
             return value_norm(nabla(x, fj * y) - directional(x, fj) * y - fj * nabla(x, y));
           };
         })
      .record("connection.leibniz", ctx.tol);
}

CheckRecord direction_linearity_check(const Connection& c, const VerifyContext& ctx) {
  const Expr f = probe_function(ctx.dim);
  return over_triples(ctx, [&](std::span<const double> p) -> TripleProbe {
           const auto nabla = c.at(p);
           const Jet fj = eval_jet(f, p, 2);
           return [nabla, fj](const JetVec& x, const JetVec& y, const JetVec& z) {
             return value_norm(nabla(fj * x + y, z) - fj * nabla(x, z) - nabla(y, z));
           };
         })
      .record("connection.direction_linearity", ctx.tol);
}

CheckRecord torsion_tensoriality_check(const Connection& c, const VerifyContext& ctx) {
  const Expr f = probe_function(ctx.dim);
  return over_pairs(ctx, [&](std::span<const double> p) -> PairProbe {
           const auto nabla = c.at(p);
           const Jet fj = eval_jet(f, p, 2);
           return [nabla, fj](const JetVec& x, const JetVec& y) {
             const JetVec t = fj * torsion(nabla, x, y);
             return std::max(value_norm(torsion(nabla, fj * x, y) - t), value_norm(torsion(nabla, x, fj * y) - t));
           };
         })
      .record("connection.torsion_tensorial", ctx.tol);
}

CheckRecord curvature_tensoriality_check(const Connection& c, const VerifyContext& ctx) {
  const Expr f = probe_function(ctx.dim);
  return over_triples(ctx, [&](std::span<const double> p) -> TripleProbe {
           const auto nabla = c.at(p);
           const Jet fj = eval_jet(f, p, 2);
           return [nabla, fj](const JetVec& x, const JetVec& y, const JetVec& z) {
             const JetVec r = fj * curvature(nabla, x, y, z);
             return std::max({value_norm(curvature(nabla, fj * x, y, z) - r),
                              value_norm(curvature(nabla, x, fj * y, z) - r),
                              value_norm(curvature(nabla, x, y, fj * z) - r)});
           };
         })
      .record("connection.curvature_tensorial", ctx.tol);
}

CheckRecord torsion_free_check(const Connection& c, const VerifyContext& ctx) {
  return over_pairs(ctx, [&](std::span<const double> p) -> PairProbe {
           const auto nabla = c.at(p);
           return [nabla](const JetVec& x, const JetVec& y) { return value_norm(torsion(nabla, x, y)); };
         })
      .record("connection.torsion_free", ctx.tol);
}

CheckRecord metricity_check(const Connection& c, const MetricField& g, const VerifyContext& ctx) {
  return over_triples(ctx, [&](std::span<const double> p) -> TripleProbe {
           const auto nabla = c.at(p);
           const JetMat gm = g.eval(p, 2);
           return [nabla, gm](const JetVec& x, const JetVec& v, const JetVec& w) {
             return std::abs(nabla_metric(nabla, gm, x, v, w).value());
           };
         })
      .record("connection.metricity", ctx.tol);
}

CheckRecord flatness_check(const Connection& c, const VerifyContext& ctx) {
  return over_triples(ctx, [&](std::span<const double> p) -> TripleProbe {
           const auto nabla = c.at(p);
           return [nabla](const JetVec& x, const JetVec& y, const JetVec& z) {
             return value_norm(curvature(nabla, x, y, z));
           };
         })
      .record("connection.flat", ctx.tol);
}

CheckRecord parallel_check(const Connection& c, const EndoField& e, const VerifyContext& ctx) {
  return over_pairs(ctx, [&](std::span<const double> p) -> PairProbe {
           const auto nabla = c.at(p);
           const JetMat em = e.eval(p, 2);
           return [nabla, em](const JetVec& x, const JetVec& y) { return value_norm(nabla_endo(nabla, em, x, y)); };
         })
      .record("connection.parallel", ctx.tol);
}

CheckRecord equality_check(const Connection& a, const Connection& b, const VerifyContext& ctx, std::string item) {
  return over_pairs(ctx, [&](std::span<const double> p) -> PairProbe {
           const auto la = a.at(p);
           const auto lb = b.at(p);
           return [la, lb](const JetVec& x, const JetVec& y) { return value_norm(la(x, y) - lb(x, y)); };
         })
      .record(std::move(item), ctx.tol);
}

}  // namespace pcc
