#pragma once

#include "pcc/expr.hpp"
#include "pcc/sampling.hpp"
#include "pcc/verify.hpp"

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace pcc {

struct Chart {
  int dim = 2;
  std::vector<std::string> coords;
  Box box;

  /// Throws ConfigError unless dim, names and box agree.
  void validate() const;
};

/// X = X^i d_i.
class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(std::vector<Expr> components);
  static VectorField coordinate(int dim, int index);

  int dim() const { return static_cast<int>(c_.size()); }
  const std::vector<Expr>& components() const { return c_; }
  JetVec eval(std::span<const double> p, int order = 2) const;

 private:
  std::vector<Expr> c_;
};

class OneFormField {
 public:
  OneFormField() = default;
  explicit OneFormField(std::vector<Expr> components);
  static OneFormField zero(int dim);

  int dim() const { return static_cast<int>(c_.size()); }
  const std::vector<Expr>& components() const { return c_; }
  JetVec eval(std::span<const double> p, int order = 2) const;

 private:
  std::vector<Expr> c_;
};

/// Mixed (1,1) tensor field, row-major components E^i_j.
class EndoField {
 public:
  EndoField() = default;
  EndoField(int dim, std::vector<Expr> components);
  static EndoField identity(int dim);

  int dim() const { return n_; }
  const std::vector<Expr>& components() const { return c_; }
  const Expr& at(int i, int j) const { return c_[i * n_ + j]; }
  JetMat eval(std::span<const double> p, int order = 2) const;

 private:
  int n_ = 0;
  std::vector<Expr> c_;
};

// Exact pointwise algebra of endomorphism fields.
EndoField operator+(const EndoField& a, const EndoField& b);
EndoField operator-(const EndoField& a, const EndoField& b);
EndoField operator*(const EndoField& a, const EndoField& b);
EndoField operator*(const Expr& s, const EndoField& a);

/// Symmetric (0,2) field; only the upper triangle is stored, row by row.
class MetricField {
 public:
  MetricField() = default;
  MetricField(int dim, std::vector<Expr> upper, bool riemannian = true);
  static MetricField euclidean(int dim);
  /// Builds from a full n x n list; throws ConfigError if it is not symmetric.
  static MetricField from_full(int dim, const std::vector<Expr>& full, bool riemannian = true);

  int dim() const { return n_; }
  bool riemannian() const { return riemannian_; }
  const Expr& at(int i, int j) const;
  JetMat eval(std::span<const double> p, int order = 2) const;

 private:
  int n_ = 0;
  std::vector<Expr> upper_;
  bool riemannian_ = true;
};

/// g(u, v) = u^i g_ij v^j.
Jet inner(const JetMat& g, const JetVec& u, const JetVec& v);

/// A (1,2) tensor field: either explicit components S^k_ij or a bilinear
/// operator on vector jets. Both are accessed through `at(p)`, which binds the
/// pointwise data once and returns the operator (X, Y) -> S(X, Y).
class Tensor12Field {
 public:
  using Local = std::function<JetVec(const JetVec&, const JetVec&)>;
  using Binder = std::function<Local(std::span<const double>)>;

  Tensor12Field() = default;
  Tensor12Field(int dim, std::string label, Binder binder);

  /// Components ordered k-major: index (k * n + i) * n + j holds S^k_ij.
  static Tensor12Field from_components(int dim, std::vector<Expr> components, std::string label = "components");
  static Tensor12Field zero(int dim);

  int dim() const { return n_; }
  const std::string& label() const { return label_; }
  Local at(std::span<const double> p) const { return binder_(p); }

  /// Components S^k_ij at p (value parts), k-major.
  std::vector<double> materialize(std::span<const double> p) const;

 private:
  int n_ = 0;
  std::string label_;
  Binder binder_;
};

Tensor12Field operator+(const Tensor12Field& a, const Tensor12Field& b);
Tensor12Field operator-(const Tensor12Field& a, const Tensor12Field& b);
Tensor12Field operator*(double s, const Tensor12Field& a);
/// (E o S)(X, Y) = E(S(X, Y)).
Tensor12Field compose(const EndoField& e, const Tensor12Field& s);
/// (X, Y) -> S(X, EY).
Tensor12Field precompose_second(const Tensor12Field& s, const EndoField& e);
/// (X, Y) -> S(EX, EY).
Tensor12Field precompose_both(const Tensor12Field& s, const EndoField& e);
/// eta (x) A : (X, Y) -> eta(X) A Y.
Tensor12Field form_times_endo(const OneFormField& eta, const EndoField& a);
/// A (x) eta : (X, Y) -> eta(Y) A X.
Tensor12Field endo_times_form(const EndoField& a, const OneFormField& eta);
/// tau (x) I + I (x) tau : (X, Y) -> tau(X) Y + tau(Y) X.
Tensor12Field projective_tensor(const OneFormField& tau);

/// Pointwise [X, Y]; the result has one order less than the inputs.
JetVec lie_bracket(const VectorField& x, const VectorField& y, std::span<const double> p, int order = 2);

// Pointwise validity checks.

/// Max over points of ||E(p)^2 - I||_inf; passes iff <= tol.
CheckRecord check_almost_product(const EndoField& e, std::span<const Point> points, double tol);

/// Max of |g(Eu, Ev) - g(u, v)| over points and coordinate basis pairs.
CheckRecord metric_compat_residual(const MetricField& g, const EndoField& e, std::span<const Point> points,
                                   double tol);

/// True iff the value of g at p admits a Cholesky factorisation.
bool positive_definite_at(const MetricField& g, std::span<const double> p);

/// S(fX, Y) = f S(X, Y) and S(X, fY) = f S(X, Y) with f the probe function.
CheckRecord tensoriality_check(const Tensor12Field& s, const VerifyContext& ctx);

}  // namespace pcc
