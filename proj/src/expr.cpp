#include "pcc/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

namespace pcc {

EvalError::EvalError(const std::string& what, Point point, std::string subexpr)
    : std::runtime_error(what), point_(std::move(point)), subexpr_(std::move(subexpr)) {}

ParseError::ParseError(const std::string& what, std::size_t offset)
    : std::runtime_error(what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}

struct Expr::Node {
  Kind kind = Kind::Const;
  std::vector<Expr> children;
  int index = 0;
  std::int64_t num = 0;
  std::int64_t den = 1;
  std::int64_t exponent = 0;
  int max_coord = -1;
};

namespace {

int children_max_coord(const std::vector<Expr>& cs) {
  int m = -1;
  for (const auto& c : cs) m = std::max(m, c.max_coord());
  return m;
}

}  // namespace

Expr::Expr() : Expr(rational(0)) {}

Expr Expr::coord(int index) {
  if (index < 0) throw std::invalid_argument("negative coordinate index");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Coord;
  n->index = index;
  n->max_coord = index;
  return Expr(std::move(n));
}

Expr Expr::rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("zero denominator in rational constant");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  auto n = std::make_shared<Node>();
  n->kind = Kind::Const;
  n->num = g ? num / g : num;
  n->den = g ? den / g : den;
  return Expr(std::move(n));
}

Expr Expr::sum(std::vector<Expr> terms) {
  if (terms.empty()) return rational(0);
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sum;
  n->max_coord = children_max_coord(terms);
  n->children = std::move(terms);
  return Expr(std::move(n));
}

Expr Expr::product(std::vector<Expr> factors) {
  if (factors.empty()) return rational(1);
  auto n = std::make_shared<Node>();
  n->kind = Kind::Product;
  n->max_coord = children_max_coord(factors);
  n->children = std::move(factors);
  return Expr(std::move(n));
}

Expr Expr::neg(Expr e) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Neg;
  n->max_coord = e.max_coord();
  n->children = {std::move(e)};
  return Expr(std::move(n));
}

Expr Expr::power(Expr base, std::int64_t exponent) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Pow;
  n->exponent = exponent;
  n->max_coord = base.max_coord();
  n->children = {std::move(base)};
  return Expr(std::move(n));
}

Expr Expr::quotient(Expr num, Expr den) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Quot;
  n->max_coord = std::max(num.max_coord(), den.max_coord());
  n->children = {std::move(num), std::move(den)};
  return Expr(std::move(n));
}

Expr Expr::sin(Expr e) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sin;
  n->max_coord = e.max_coord();
  n->children = {std::move(e)};
  return Expr(std::move(n));
}

Expr Expr::cos(Expr e) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Cos;
  n->max_coord = e.max_coord();
  n->children = {std::move(e)};
  return Expr(std::move(n));
}

Expr Expr::exp(Expr e) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Exp;
  n->max_coord = e.max_coord();
  n->children = {std::move(e)};
  return Expr(std::move(n));
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::sum({a, Expr::neg(b)}); }
Expr operator-(const Expr& a) { return Expr::neg(a); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::product({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::quotient(a, b); }

Expr::Kind Expr::kind() const { return node_->kind; }
std::span<const Expr> Expr::children() const { return node_->children; }
int Expr::coord_index() const { return node_->index; }
std::int64_t Expr::num() const { return node_->num; }
std::int64_t Expr::den() const { return node_->den; }
std::int64_t Expr::exponent() const { return node_->exponent; }
int Expr::max_coord() const { return node_->max_coord; }
bool Expr::is_zero_constant() const { return node_->kind == Kind::Const && node_->num == 0; }

namespace {

Jet eval_rec(const Expr& e, std::span<const double> p, int order) {
  const int n = static_cast<int>(p.size());
  switch (e.kind()) {
    case Expr::Kind::Coord:
      if (e.coord_index() >= n) {
        throw EvalError("coordinate index out of range", Point(p.begin(), p.end()), to_string(e));
      }
      return Jet::variable(n, order, e.coord_index(), p[e.coord_index()]);
    case Expr::Kind::Const:
      return Jet::constant(n, order, static_cast<double>(e.num()) / static_cast<double>(e.den()));
    case Expr::Kind::Sum: {
      auto cs = e.children();
      Jet r = eval_rec(cs[0], p, order);
      for (std::size_t i = 1; i < cs.size(); ++i) r += eval_rec(cs[i], p, order);
      return r;
    }
    case Expr::Kind::Product: {
      auto cs = e.children();
      Jet r = eval_rec(cs[0], p, order);
      for (std::size_t i = 1; i < cs.size(); ++i) r = r * eval_rec(cs[i], p, order);
      return r;
    }
    case Expr::Kind::Neg:
      return -eval_rec(e.children()[0], p, order);
    case Expr::Kind::Pow:
      if (e.exponent() < 0) {
        throw EvalError("domain error: negative exponent in power", Point(p.begin(), p.end()), to_string(e));
      }
      return pow(eval_rec(e.children()[0], p, order), static_cast<unsigned>(e.exponent()));
    case Expr::Kind::Quot: {
      const Jet num = eval_rec(e.children()[0], p, order);
      const Jet den = eval_rec(e.children()[1], p, order);
      if (den.value() == 0.0) {
        throw EvalError("division by zero", Point(p.begin(), p.end()), to_string(e));
      }
      return num / den;
    }
    case Expr::Kind::Sin:
      return sin(eval_rec(e.children()[0], p, order));
    case Expr::Kind::Cos:
      return cos(eval_rec(e.children()[0], p, order));
    case Expr::Kind::Exp:
      return exp(eval_rec(e.children()[0], p, order));
  }
  throw std::logic_error("unknown expression kind");
}

void print(const Expr& e, std::ostream& os) {
  auto list = [&](const char* head) {
    os << '(' << head;
    for (const auto& c : e.children()) {
      os << ' ';
      print(c, os);
    }
    os << ')';
  };
  switch (e.kind()) {
    case Expr::Kind::Coord:
      os << "(coord " << e.coord_index() << ')';
      return;
    case Expr::Kind::Const:
      os << e.num();
      if (e.den() != 1) os << '/' << e.den();
      return;
    case Expr::Kind::Sum:
      return list("+");
    case Expr::Kind::Product:
      return list("*");
    case Expr::Kind::Neg:
      return list("-");
    case Expr::Kind::Pow:
      os << "(pow ";
      print(e.children()[0], os);
      os << ' ' << e.exponent() << ')';
      return;
    case Expr::Kind::Quot:
      return list("/");
    case Expr::Kind::Sin:
      return list("sin");
    case Expr::Kind::Cos:
      return list("cos");
    case Expr::Kind::Exp:
      return list("exp");
  }
}

class Parser {
 public:
  Parser(std::string_view text, std::span<const std::string> names) : text_(text), names_(names) {}

  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

  Expr parse() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
    if (text_[pos_] == '(') return parse_list();
    if (text_[pos_] == ')') throw ParseError("unexpected ')'", pos_);
    const std::size_t start = pos_;
    return parse_atom(read_token(), start);
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string_view read_token() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
           text_[pos_] != ')') {
      ++pos_;
    }
    return text_.substr(start, pos_ - start);
  }

  static bool parse_int(std::string_view s, std::int64_t& out) {
    if (s.empty()) return false;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    if (*b == '+') ++b;
    auto [ptr, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && ptr == e;
  }

  static bool parse_number(std::string_view s, std::int64_t& num, std::int64_t& den) {
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
      if (!parse_int(s.substr(0, slash), num) || !parse_int(s.substr(slash + 1), den) || den == 0) return false;
      return true;
    }
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
      const std::string_view ip = s.substr(0, dot);
      const std::string_view fp = s.substr(dot + 1);
      if (fp.empty() || fp.size() > 15) return false;
      for (char c : fp)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
      const bool negative = !ip.empty() && ip[0] == '-';
      std::int64_t whole = 0;
      if (!ip.empty() && ip != "-" && ip != "+" && !parse_int(ip, whole)) return false;
      std::int64_t frac = 0;
      if (!parse_int(fp, frac)) return false;
      den = 1;
      for (std::size_t i = 0; i < fp.size(); ++i) den *= 10;
      num = (whole < 0 ? -whole : whole) * den + frac;
      if (negative) num = -num;
      return true;
    }
    den = 1;
    return parse_int(s, num);
  }

  Expr parse_atom(std::string_view tok, std::size_t start) {
    std::int64_t num = 0;
    std::int64_t den = 1;
    if (parse_number(tok, num, den)) return Expr::rational(num, den);
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i] == tok) return Expr::coord(static_cast<int>(i));
    }
    throw ParseError("unknown symbol '" + std::string(tok) + "'", start);
  }

  void expect_close() {
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != ')') throw ParseError("expected ')'", pos_);
    ++pos_;
  }

  Expr parse_list() {
    const std::size_t open = pos_;
    ++pos_;
    const std::string_view head = read_token();
    if (head.empty()) throw ParseError("missing operator after '('", open);

    if (head == "coord") {
      const std::size_t at = pos_;
      std::int64_t i = 0;
      if (!parse_int(read_token(), i) || i < 0 || i >= kMaxDim) throw ParseError("invalid coordinate index", at);
      expect_close();
      return Expr::coord(static_cast<int>(i));
    }
    if (head == "pow") {
      Expr base = parse();
      const std::size_t at = pos_;
      std::int64_t k = 0;
      if (!parse_int(read_token(), k) || k < 0) throw ParseError("invalid power: exponent must be a nonnegative integer", at);
      expect_close();
      return Expr::power(std::move(base), k);
    }

    std::vector<Expr> args;
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) throw ParseError("unterminated list", open);
      if (text_[pos_] == ')') {
        ++pos_;
        break;
      }
      args.push_back(parse());
    }

    auto arity = [&](std::size_t lo, std::size_t hi) {
      if (args.size() < lo || args.size() > hi) {
        throw ParseError("wrong number of arguments for '" + std::string(head) + "'", open);
      }
    };
    if (head == "+") {
      arity(1, SIZE_MAX);
      return args.size() == 1 ? args[0] : Expr::sum(std::move(args));
    }
    if (head == "*") {
      arity(1, SIZE_MAX);
      return args.size() == 1 ? args[0] : Expr::product(std::move(args));
    }
    if (head == "-") {
      arity(1, SIZE_MAX);
      if (args.size() == 1) return Expr::neg(args[0]);
      std::vector<Expr> terms{args[0]};
      for (std::size_t i = 1; i < args.size(); ++i) terms.push_back(Expr::neg(args[i]));
      return Expr::sum(std::move(terms));
    }
    if (head == "/") {
      arity(2, 2);
      return Expr::quotient(args[0], args[1]);
    }
    if (head == "sin") {
      arity(1, 1);
      return Expr::sin(args[0]);
    }
    if (head == "cos") {
      arity(1, 1);
      return Expr::cos(args[0]);
    }
    if (head == "exp") {
      arity(1, 1);
      return Expr::exp(args[0]);
    }
    throw ParseError("unknown operator '" + std::string(head) + "'", open);
  }

  std::string_view text_;
  std::span<const std::string> names_;
  std::size_t pos_ = 0;
};

}  // namespace

Jet eval_jet(const Expr& e, std::span<const double> p, int order) {
  if (order < 0 || order > 2) throw ContractError("jet order must be 0, 1 or 2");
  if (p.empty() || p.size() > static_cast<std::size_t>(kMaxDim)) throw ContractError("point dimension out of range");
  return eval_rec(e, p, order);
}

std::string to_string(const Expr& e) {
  std::ostringstream os;
  print(e, os);
  return os.str();
}

Expr parse_expr(std::string_view text, std::span<const std::string> coord_names) {
  Parser p(text, coord_names);
  Expr e = p.parse();
  if (!p.at_end()) throw ParseError("trailing input after expression", text.size());
  return e;
}

std::vector<Expr> parse_expr_list(std::string_view text, std::span<const std::string> coord_names) {
  Parser p(text, coord_names);
  std::vector<Expr> out;
  while (!p.at_end()) out.push_back(p.parse());
  return out;
}

}  // namespace pcc
