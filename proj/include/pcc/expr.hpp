#pragma once

#include "pcc/jet.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pcc {

using Point = std::vector<double>;

/// Evaluation failed at a specific point, e.g. a zero denominator.
class EvalError : public std::runtime_error {
 public:
  EvalError(const std::string& what, Point point, std::string subexpr);
  const Point& point() const { return point_; }
  const std::string& subexpression() const { return subexpr_; }

 private:
  Point point_;
  std::string subexpr_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Immutable scalar expression tree over chart coordinates.
///
/// Nodes share structure; copying an Expr is cheap.
class Expr {
 public:
  enum class Kind { Coord, Const, Sum, Product, Neg, Pow, Quot, Sin, Cos, Exp };

  Expr();  // the constant 0

  static Expr coord(int index);
  static Expr rational(std::int64_t num, std::int64_t den = 1);
  static Expr sum(std::vector<Expr> terms);
  static Expr product(std::vector<Expr> factors);
  static Expr neg(Expr e);
  /// Power by an integer exponent; negative exponents are rejected at evaluation.
  static Expr power(Expr base, std::int64_t exponent);
  static Expr quotient(Expr num, Expr den);
  static Expr sin(Expr e);
  static Expr cos(Expr e);
  static Expr exp(Expr e);

  Kind kind() const;
  std::span<const Expr> children() const;
  int coord_index() const;
  std::int64_t num() const;
  std::int64_t den() const;
  std::int64_t exponent() const;

  /// Largest coordinate index referenced, or -1 for a closed constant.
  int max_coord() const;
  bool is_zero_constant() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Exact truncated Taylor data of `e` at `p` up to `order` (0, 1 or 2).
Jet eval_jet(const Expr& e, std::span<const double> p, int order);

/// Prefix s-expression form, e.g. "(* (coord 0) (sin (coord 1)))".
std::string to_string(const Expr& e);

/// Parses one s-expression. Atoms are numbers (integer, decimal or p/q) or
/// names from `coord_names`; `(coord i)` is always accepted.
Expr parse_expr(std::string_view text, std::span<const std::string> coord_names = {});

/// Parses a whitespace-separated sequence of s-expressions.
std::vector<Expr> parse_expr_list(std::string_view text, std::span<const std::string> coord_names = {});

}  // namespace pcc
