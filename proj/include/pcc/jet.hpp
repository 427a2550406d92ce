#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcc {

/// Largest chart dimension the jet storage supports.
inline constexpr int kMaxDim = 6;

/// Raised when an operation needs more derivative data than its inputs carry.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Truncated Taylor data of a scalar at a point: value, gradient and (at
/// order 2) the Hessian, stored as its upper triangle.
///
/// Arithmetic between jets of different order truncates to the smaller one.
/// The value and gradient of a result never depend on second-order data, so
/// evaluating at order 2 and truncating to order 1 is bit-identical to
/// evaluating at order 1 directly.
class Jet {
 public:
  Jet() = default;
  Jet(int dim, int order) : dim_(static_cast<std::uint8_t>(dim)), order_(static_cast<std::uint8_t>(order)) {
    if (dim < 1 || dim > kMaxDim || order < 0 || order > 2) bad_shape(dim, order);
  }

  static Jet constant(int dim, int order, double c);
  /// The coordinate function x_i at a point whose i-th coordinate is `x`.
  static Jet variable(int dim, int order, int index, double x);

  int dim() const { return dim_; }
  int order() const { return order_; }
  double value() const { return value_; }
  double d(int i) const { return grad_[i]; }
  double d2(int i, int j) const { return hess_[tri(i, j)]; }

  void set_value(double v) { value_ = v; }
  void set_d(int i, double v) { grad_[i] = v; }
  void set_d2(int i, int j, double v) { hess_[tri(i, j)] = v; }

  Jet truncated(int order) const;
  /// Partial derivative along coordinate i; the result has one order less.
  Jet partial(int i) const;

  /// f(u) given f(u0), f'(u0), f''(u0).
  Jet compose(double f0, double f1, double f2) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(double s);

  friend Jet operator+(const Jet& a, const Jet& b);
  friend Jet operator-(const Jet& a, const Jet& b);
  friend Jet operator-(const Jet& a);
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator*(double s, const Jet& a);
  friend Jet operator*(const Jet& a, double s) { return s * a; }
  friend Jet operator/(const Jet& a, const Jet& b);

 private:
  static constexpr int tri(int i, int j) {
    return i <= j ? j * (j + 1) / 2 + i : i * (i + 1) / 2 + j;
  }

  [[noreturn]] static void bad_shape(int dim, int order);

  double value_ = 0.0;
  std::array<double, kMaxDim> grad_{};
  std::array<double, kMaxDim*(kMaxDim + 1) / 2> hess_{};
  std::uint8_t dim_ = 0;
  std::uint8_t order_ = 0;
};

Jet sin(const Jet& u);
Jet cos(const Jet& u);
Jet exp(const Jet& u);
Jet pow(const Jet& u, unsigned k);
Jet reciprocal(const Jet& u);

/// Components of a vector (or covector) field at a point, one jet each.
using JetVec = std::vector<Jet>;

int min_order(std::span<const Jet> v);
JetVec operator+(const JetVec& a, const JetVec& b);
JetVec operator-(const JetVec& a, const JetVec& b);
JetVec operator-(const JetVec& a);
JetVec operator*(const Jet& s, const JetVec& v);
JetVec operator*(double s, const JetVec& v);
JetVec truncated(const JetVec& v, int order);
JetVec zero_vec(int dim, int order);
/// Constant coordinate field e_i.
JetVec basis_vec(int dim, int order, int index);

/// Contraction of a 1-form with a vector: w_i X^i.
Jet contract(const JetVec& form, const JetVec& x);
/// Derivative of f along the vector X: X^i d_i f.
Jet directional(const JetVec& x, const Jet& f);
JetVec directional(const JetVec& x, const JetVec& field);
/// [X,Y]^k = X^i d_i Y^k - Y^i d_i X^k.
JetVec lie_bracket(const JetVec& x, const JetVec& y);

/// Max-norm of the value parts.
double value_norm(const JetVec& v);
std::vector<double> values(const JetVec& v);

/// Row-major n x n matrix of jets: the pointwise data of a (1,1) field.
class JetMat {
 public:
  JetMat() = default;
  JetMat(int n, int order);

  static JetMat identity(int n, int order);

  int size() const { return n_; }
  Jet& operator()(int i, int j) { return a_[i * n_ + j]; }
  const Jet& operator()(int i, int j) const { return a_[i * n_ + j]; }

  JetVec operator*(const JetVec& v) const;
  JetMat operator*(const JetMat& o) const;
  JetMat operator+(const JetMat& o) const;
  JetMat operator-(const JetMat& o) const;
  JetMat operator*(double s) const;
  JetMat transposed() const;

  /// Max-norm of the value parts.
  double value_norm() const;

 private:
  int n_ = 0;
  std::vector<Jet> a_;
};

/// Jet-valued inverse; throws std::domain_error when the value is singular.
JetMat inverse(const JetMat& m);

}  // namespace pcc
