#include "pcc/fields.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace pcc {

namespace {

void require_dim(int dim) {
  if (dim < 2 || dim > kMaxDim) {
    throw ConfigError("chart dimension must lie in [2, " + std::to_string(kMaxDim) + "], got " + std::to_string(dim));
  }
}

void require_coords(const std::vector<Expr>& cs, int dim, const char* what) {
  for (const auto& c : cs) {
    if (c.max_coord() >= dim) {
      throw ConfigError(std::string(what) + " references coordinate " + std::to_string(c.max_coord()) +
                        " on a " + std::to_string(dim) + "-dimensional chart");
    }
  }
}

void require_same_dim(int a, int b) {
  if (a != b) throw ConfigError("chart mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

JetVec eval_list(const std::vector<Expr>& cs, std::span<const double> p, int order) {
  JetVec r;
  r.reserve(cs.size());
  for (const auto& c : cs) r.push_back(eval_jet(c, p, order));
  return r;
}

}  // namespace

void Chart::validate() const {
  require_dim(dim);
  if (!coords.empty() && static_cast<int>(coords.size()) != dim) {
    throw ConfigError("chart has " + std::to_string(coords.size()) + " coordinate names for dimension " +
                      std::to_string(dim));
  }
  for (std::size_t i = 0; i < coords.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (coords[i] == coords[j]) throw ConfigError("chart repeats coordinate name '" + coords[i] + "'");
    }
  }
  if (static_cast<int>(box.size()) != dim) throw ConfigError("chart box must have one interval per coordinate");
  for (const auto& iv : box) {
    if (!(iv.lo < iv.hi)) throw ConfigError("chart box has an empty interval");
  }
}

VectorField::VectorField(std::vector<Expr> components) : c_(std::move(components)) {
  require_dim(dim());
  require_coords(c_, dim(), "vector field");
}

VectorField VectorField::coordinate(int dim, int index) {
  std::vector<Expr> c(dim, Expr::rational(0));
  c[index] = Expr::rational(1);
  return VectorField(std::move(c));
}

JetVec VectorField::eval(std::span<const double> p, int order) const {
  require_same_dim(dim(), static_cast<int>(p.size()));
  return eval_list(c_, p, order);
}

OneFormField::OneFormField(std::vector<Expr> components) : c_(std::move(components)) {
  require_dim(dim());
  require_coords(c_, dim(), "one-form");
}

OneFormField OneFormField::zero(int dim) { return OneFormField(std::vector<Expr>(dim, Expr::rational(0))); }

JetVec OneFormField::eval(std::span<const double> p, int order) const {
  require_same_dim(dim(), static_cast<int>(p.size()));
  return eval_list(c_, p, order);
}

EndoField::EndoField(int dim, std::vector<Expr> components) : n_(dim), c_(std::move(components)) {
  require_dim(dim);
  if (static_cast<int>(c_.size()) != dim * dim) {
    throw ConfigError("endomorphism field needs " + std::to_string(dim * dim) + " components, got " +
                      std::to_string(c_.size()));
  }
  require_coords(c_, dim, "endomorphism field");
}

EndoField EndoField::identity(int dim) {
  std::vector<Expr> c(dim * dim, Expr::rational(0));
  for (int i = 0; i < dim; ++i) c[i * dim + i] = Expr::rational(1);
  return EndoField(dim, std::move(c));
}

JetMat EndoField::eval(std::span<const double> p, int order) const {
  require_same_dim(n_, static_cast<int>(p.size()));
  JetMat m(n_, order);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m(i, j) = eval_jet(at(i, j), p, order);
  return m;
}

namespace {

template <class Op>
EndoField entrywise(const EndoField& a, const EndoField& b, Op op) {
  require_same_dim(a.dim(), b.dim());
  std::vector<Expr> out;
  out.reserve(a.components().size());
  for (std::size_t i = 0; i < a.components().size(); ++i) out.push_back(op(a.components()[i], b.components()[i]));
  return EndoField(a.dim(), std::move(out));
}

}  // namespace

EndoField operator+(const EndoField& a, const EndoField& b) {
  return entrywise(a, b, [](const Expr& x, const Expr& y) { return x + y; });
}

EndoField operator-(const EndoField& a, const EndoField& b) {
  return entrywise(a, b, [](const Expr& x, const Expr& y) { return x - y; });
}

EndoField operator*(const EndoField& a, const EndoField& b) {
  require_same_dim(a.dim(), b.dim());
  const int n = a.dim();
  std::vector<Expr> out;
  out.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      std::vector<Expr> terms;
      for (int k = 0; k < n; ++k) terms.push_back(a.at(i, k) * b.at(k, j));
      out.push_back(Expr::sum(std::move(terms)));
    }
  }
  return EndoField(n, std::move(out));
}

EndoField operator*(const Expr& s, const EndoField& a) {
  std::vector<Expr> out;
  out.reserve(a.components().size());
  for (const auto& c : a.components()) out.push_back(s * c);
  return EndoField(a.dim(), std::move(out));
}

MetricField::MetricField(int dim, std::vector<Expr> upper, bool riemannian)
    : n_(dim), upper_(std::move(upper)), riemannian_(riemannian) {
  require_dim(dim);
  if (static_cast<int>(upper_.size()) != dim * (dim + 1) / 2) {
    throw ConfigError("metric needs " + std::to_string(dim * (dim + 1) / 2) + " upper-triangle components, got " +
                      std::to_string(upper_.size()));
  }
  require_coords(upper_, dim, "metric");
}

MetricField MetricField::euclidean(int dim) {
  std::vector<Expr> u;
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) u.push_back(Expr::rational(i == j ? 1 : 0));
  return MetricField(dim, std::move(u));
}

MetricField MetricField::from_full(int dim, const std::vector<Expr>& full, bool riemannian) {
  if (static_cast<int>(full.size()) != dim * dim) {
    throw ConfigError("metric needs " + std::to_string(dim * dim) + " components, got " + std::to_string(full.size()));
  }
  std::vector<Expr> u;
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      if (to_string(full[i * dim + j]) != to_string(full[j * dim + i])) {
        throw ConfigError("metric components are not symmetric at (" + std::to_string(i) + "," + std::to_string(j) +
                          ")");
      }
      u.push_back(full[i * dim + j]);
    }
  }
  return MetricField(dim, std::move(u), riemannian);
}

const Expr& MetricField::at(int i, int j) const {
  if (i > j) std::swap(i, j);
  // Row i of the upper triangle starts after i rows of lengths n, n-1, ...
  const int offset = i * n_ - i * (i - 1) / 2;
  return upper_[offset + (j - i)];
}

JetMat MetricField::eval(std::span<const double> p, int order) const {
  require_same_dim(n_, static_cast<int>(p.size()));
  JetMat m(n_, order);
  for (int i = 0; i < n_; ++i) {
    for (int j = i; j < n_; ++j) {
      m(i, j) = eval_jet(at(i, j), p, order);
      m(j, i) = m(i, j);
    }
  }
  return m;
}

Jet inner(const JetMat& g, const JetVec& u, const JetVec& v) { return contract(u, g * v); }

Tensor12Field::Tensor12Field(int dim, std::string label, Binder binder)
    : n_(dim), label_(std::move(label)), binder_(std::move(binder)) {}

Tensor12Field Tensor12Field::from_components(int dim, std::vector<Expr> components, std::string label) {
  require_dim(dim);
  if (static_cast<int>(components.size()) != dim * dim * dim) {
    throw ConfigError("(1,2) tensor needs " + std::to_string(dim * dim * dim) + " components, got " +
                      std::to_string(components.size()));
  }
  require_coords(components, dim, "(1,2) tensor");
  auto comps = std::make_shared<const std::vector<Expr>>(std::move(components));
  return Tensor12Field(dim, std::move(label), [dim, comps](std::span<const double> p) -> Local {
    auto table = std::make_shared<std::vector<Jet>>();
    table->reserve(comps->size());
    for (const auto& c : *comps) table->push_back(eval_jet(c, p, 2));
    return [dim, table](const JetVec& x, const JetVec& y) {
      JetVec r;
      r.reserve(dim);
      for (int k = 0; k < dim; ++k) {
        Jet s = Jet::constant(dim, 2, 0.0);
        for (int i = 0; i < dim; ++i) {
          for (int j = 0; j < dim; ++j) {
            s += (*table)[(k * dim + i) * dim + j] * x[i] * y[j];
          }
        }
        r.push_back(s.truncated(std::min(min_order(x), min_order(y))));
      }
      return r;
    };
  });
}

Tensor12Field Tensor12Field::zero(int dim) {
  return Tensor12Field(dim, "zero", [dim](std::span<const double>) -> Local {
    return [dim](const JetVec& x, const JetVec& y) {
      return zero_vec(dim, std::min(min_order(x), min_order(y)));
    };
  });
}

std::vector<double> Tensor12Field::materialize(std::span<const double> p) const {
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

Tensor12Field operator+(const Tensor12Field& a, const Tensor12Field& b) {
  require_same_dim(a.dim(), b.dim());
  return Tensor12Field(a.dim(), "(" + a.label() + " + " + b.label() + ")",
                       [a, b](std::span<const double> p) -> Tensor12Field::Local {
                         auto la = a.at(p);
                         auto lb = b.at(p);
                         return [la, lb](const JetVec& x, const JetVec& y) { return la(x, y) + lb(x, y); };
                       });
}

Tensor12Field operator-(const Tensor12Field& a, const Tensor12Field& b) { return a + (-1.0) * b; }

Tensor12Field operator*(double s, const Tensor12Field& a) {
  return Tensor12Field(a.dim(), std::to_string(s) + "*" + a.label(),
                       [s, a](std::span<const double> p) -> Tensor12Field::Local {
                         auto la = a.at(p);
                         return [s, la](const JetVec& x, const JetVec& y) { return s * la(x, y); };
                       });
}

Tensor12Field compose(const EndoField& e, const Tensor12Field& s) {
  require_same_dim(e.dim(), s.dim());
  return Tensor12Field(s.dim(), "E o " + s.label(), [e, s](std::span<const double> p) -> Tensor12Field::Local {
    auto em = e.eval(p);
    auto ls = s.at(p);
    return [em, ls](const JetVec& x, const JetVec& y) { return em * ls(x, y); };
  });
}

Tensor12Field precompose_second(const Tensor12Field& s, const EndoField& e) {
  require_same_dim(e.dim(), s.dim());
  return Tensor12Field(s.dim(), s.label() + "(., E.)", [e, s](std::span<const double> p) -> Tensor12Field::Local {
    auto em = e.eval(p);
    auto ls = s.at(p);
    return [em, ls](const JetVec& x, const JetVec& y) { return ls(x, em * y); };
  });
}

Tensor12Field precompose_both(const Tensor12Field& s, const EndoField& e) {
  require_same_dim(e.dim(), s.dim());
  return Tensor12Field(s.dim(), s.label() + "(E., E.)", [e, s](std::span<const double> p) -> Tensor12Field::Local {
    auto em = e.eval(p);
    auto ls = s.at(p);
    return [em, ls](const JetVec& x, const JetVec& y) { return ls(em * x, em * y); };
  });
}

Tensor12Field form_times_endo(const OneFormField& eta, const EndoField& a) {
  require_same_dim(eta.dim(), a.dim());
  return Tensor12Field(a.dim(), "eta(x)A", [eta, a](std::span<const double> p) -> Tensor12Field::Local {
    auto w = eta.eval(p);
    auto am = a.eval(p);
    return [w, am](const JetVec& x, const JetVec& y) { return contract(w, x) * (am * y); };
  });
}

Tensor12Field endo_times_form(const EndoField& a, const OneFormField& eta) {
  require_same_dim(eta.dim(), a.dim());
  return Tensor12Field(a.dim(), "A(x)eta", [eta, a](std::span<const double> p) -> Tensor12Field::Local {
    auto w = eta.eval(p);
    auto am = a.eval(p);
    return [w, am](const JetVec& x, const JetVec& y) { return contract(w, y) * (am * x); };
  });
}

Tensor12Field projective_tensor(const OneFormField& tau) {
  const int n = tau.dim();
  return Tensor12Field(n, "tau(x)I+I(x)tau", [tau](std::span<const double> p) -> Tensor12Field::Local {
    auto w = tau.eval(p);
    return [w](const JetVec& x, const JetVec& y) { return contract(w, x) * y + contract(w, y) * x; };
  });
}

JetVec lie_bracket(const VectorField& x, const VectorField& y, std::span<const double> p, int order) {
  require_same_dim(x.dim(), y.dim());
  return lie_bracket(x.eval(p, order), y.eval(p, order));
}

CheckRecord check_almost_product(const EndoField& e, std::span<const Point> points, double tol) {
  MaxResidual acc;
  const int n = e.dim();
  for (const auto& p : points) {
    const JetMat m = e.eval(p, 0);
    const JetMat sq = m * m - JetMat::identity(n, 0);
    acc.observe(sq.value_norm(), p, "");
  }
  return acc.record("structure.involution", tol);
}

CheckRecord metric_compat_residual(const MetricField& g, const EndoField& e, std::span<const Point> points,
                                   double tol) {
  require_same_dim(g.dim(), e.dim());
  MaxResidual acc;
  const int n = g.dim();
  for (const auto& p : points) {
    const JetMat gm = g.eval(p, 0);
    const JetMat em = e.eval(p, 0);
    const JetMat pulled = em.transposed() * gm * em;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        acc.observe(std::abs(pulled(i, j).value() - gm(i, j).value()), p,
                    "d" + std::to_string(i) + ",d" + std::to_string(j));
      }
    }
  }
  return acc.record("metric.compatibility", tol);
}

bool positive_definite_at(const MetricField& g, std::span<const double> p) {
  const JetMat gm = g.eval(p, 0);
  const int n = g.dim();
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = gm(i, j).value();
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  return llt.info() == Eigen::Success;
}

CheckRecord tensoriality_check(const Tensor12Field& s, const VerifyContext& ctx) {
  MaxResidual acc;
  const Expr f = probe_function(ctx.dim);
  for (const auto& p : ctx.points) {
    const auto local = s.at(p);
    const auto frames = eval_frames(ctx, p);
    const Jet fj = eval_jet(f, p, 2);
    for (std::size_t a = 0; a < frames.size(); ++a) {
      for (std::size_t b = 0; b < frames.size(); ++b) {
        const JetVec base = local(frames[a], frames[b]);
        const JetVec scaled = fj * base;
        const double r1 = value_norm(local(fj * frames[a], frames[b]) - scaled);
        const double r2 = value_norm(local(frames[a], fj * frames[b]) - scaled);
        const double r3 =
            value_norm(local(frames[a] + frames[b], frames[b]) - base - local(frames[b], frames[b]));
        acc.observe(std::max({r1, r2, r3}), p, frame_tuple(ctx, {a, b}));
      }
    }
  }
  return acc.record("tensor.tensoriality", ctx.tol);
}

}  // namespace pcc
