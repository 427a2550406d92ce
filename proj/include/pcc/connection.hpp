#pragma once

#include "pcc/fields.hpp"
#include "pcc/verify.hpp"

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pcc {

enum class Provenance { Christoffel, Conjugate, Generalized, Schouten, LeviCivita, SumWithTensor, Derived };

std::string_view to_string(Provenance p);

/// A covariant-derivative operator.
///
/// `at(p)` binds all pointwise data once and returns the operator
/// (X, Y) -> nabla_X Y acting on vector jets. The result carries one jet
/// order less than its inputs, so curvature (two nested derivatives) needs
/// order-2 arguments. Derived connections are closures over their
/// constituents; nothing is expanded symbolically.
class Connection {
 public:
  using Local = std::function<JetVec(const JetVec&, const JetVec&)>;
  using Binder = std::function<Local(std::span<const double>)>;

  Connection() = default;
  Connection(int dim, Provenance provenance, std::string label, Binder binder);

  /// Gamma^k_ij with nabla_{d_i} d_j = Gamma^k_ij d_k; k-major like Tensor12Field.
  static Connection christoffel(int dim, std::vector<Expr> gamma, std::string label = "christoffel");
  static Connection flat(int dim);

  int dim() const { return n_; }
  Provenance provenance() const { return provenance_; }
  const std::string& label() const { return label_; }
  Local at(std::span<const double> p) const { return binder_(p); }

  /// Christoffel symbols of this operator at p (value parts), k-major.
  std::vector<double> materialize(std::span<const double> p) const;

 private:
  int n_ = 0;
  Provenance provenance_ = Provenance::Christoffel;
  std::string label_;
  Binder binder_;
};

/// Koszul construction; throws EvalError if g is singular at an evaluated point.
Connection levi_civita(const MetricField& g);

/// (nabla + S)_X Y = nabla_X Y + S(X, Y).
Connection add_tensor(const Connection& c, const Tensor12Field& s);

/// Pointwise linear combination a * nabla1 + b * nabla2 of two operators.
/// Only an affine combination (a + b = 1) is again a connection.
Connection combine(double a, const Connection& c1, double b, const Connection& c2, std::string label);

/// The tensor (X, Y) -> (nabla_X E) Y.
Tensor12Field nabla_tensor(const Connection& c, const EndoField& e);

// Pointwise operators on a bound connection.

/// (nabla_X E) Y = nabla_X (EY) - E(nabla_X Y).
JetVec nabla_endo(const Connection::Local& nabla, const JetMat& e, const JetVec& x, const JetVec& y);
/// (nabla_X g)(V, W) = X(g(V, W)) - g(nabla_X V, W) - g(V, nabla_X W).
Jet nabla_metric(const Connection::Local& nabla, const JetMat& g, const JetVec& x, const JetVec& v, const JetVec& w);
/// T(X, Y) = nabla_X Y - nabla_Y X - [X, Y].
JetVec torsion(const Connection::Local& nabla, const JetVec& x, const JetVec& y);
/// R(X, Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z; needs order-2 inputs.
JetVec curvature(const Connection::Local& nabla, const JetVec& x, const JetVec& y, const JetVec& z);
/// (d^nabla E)(X, Y) = (nabla_X E) Y - (nabla_Y E) X.
JetVec dnabla_endo(const Connection::Local& nabla, const JetMat& e, const JetVec& x, const JetVec& y);
/// <X : Y> = nabla_X Y + nabla_Y X.
JetVec symmetric_product(const Connection::Local& nabla, const JetVec& x, const JetVec& y);

// Field-level conveniences.

JetVec nabla_vector(const Connection& c, const VectorField& x, const VectorField& y, std::span<const double> p,
                    int order = 2);

// Connection axioms as residual checks over a verification context.

/// nabla_X (fY) - X(f) Y - f nabla_X Y.
CheckRecord leibniz_check(const Connection& c, const VerifyContext& ctx);
/// nabla_{fX + Y} Z - f nabla_X Z - nabla_Y Z.
CheckRecord direction_linearity_check(const Connection& c, const VerifyContext& ctx);
/// T(fX, Y) = f T(X, Y) and T(X, fY) = f T(X, Y).
CheckRecord torsion_tensoriality_check(const Connection& c, const VerifyContext& ctx);
/// R(X, Y)Z is f-linear in each of X, Y and Z.
CheckRecord curvature_tensoriality_check(const Connection& c, const VerifyContext& ctx);
/// Max |T(X, Y)|.
CheckRecord torsion_free_check(const Connection& c, const VerifyContext& ctx);
/// Max |(nabla_X g)(V, W)|.
CheckRecord metricity_check(const Connection& c, const MetricField& g, const VerifyContext& ctx);
/// Max |R(X, Y)Z|.
CheckRecord flatness_check(const Connection& c, const VerifyContext& ctx);
/// Max |nabla_X E|, i.e. how far nabla is from parallelising E.
CheckRecord parallel_check(const Connection& c, const EndoField& e, const VerifyContext& ctx);
/// Max |nabla1_X Y - nabla2_X Y|.
CheckRecord equality_check(const Connection& a, const Connection& b, const VerifyContext& ctx, std::string item);

}  // namespace pcc
