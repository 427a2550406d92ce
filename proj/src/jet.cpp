#include "pcc/jet.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace pcc {

void Jet::bad_shape(int dim, int order) {
  if (dim < 1 || dim > kMaxDim) throw ContractError("jet dimension out of range: " + std::to_string(dim));
  throw ContractError("jet order out of range: " + std::to_string(order));
}

Jet Jet::constant(int dim, int order, double c) {
  Jet j(dim, order);
  j.value_ = c;
  return j;
}

Jet Jet::variable(int dim, int order, int index, double x) {
  Jet j(dim, order);
  j.value_ = x;
  if (order >= 1) j.grad_[index] = 1.0;
  return j;
}

Jet Jet::truncated(int order) const {
  if (order >= order_) return *this;
  Jet j(dim_, order);
  j.value_ = value_;
  if (order >= 1) j.grad_ = grad_;
  return j;
}

Jet Jet::partial(int i) const {
  if (order_ == 0) throw ContractError("cannot differentiate an order-0 jet");
  Jet j(dim_, order_ - 1);
  j.value_ = grad_[i];
  if (order_ == 2) {
    for (int k = 0; k < dim_; ++k) j.grad_[k] = hess_[tri(i, k)];
  }
  return j;
}

Jet Jet::compose(double f0, double f1, double f2) const {
  Jet r(dim_, order_);
  r.value_ = f0;
  if (order_ >= 1) {
    for (int i = 0; i < dim_; ++i) r.grad_[i] = f1 * grad_[i];
  }
  if (order_ == 2) {
    for (int j = 0; j < dim_; ++j) {
      for (int i = 0; i <= j; ++i) {
        r.hess_[tri(i, j)] = f1 * hess_[tri(i, j)] + f2 * grad_[i] * grad_[j];
      }
    }
  }
  return r;
}

Jet& Jet::operator+=(const Jet& o) {
  *this = *this + o;
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  *this = *this - o;
  return *this;
}

Jet& Jet::operator*=(double s) {
  *this = s * *this;
  return *this;
}

Jet operator+(const Jet& a, const Jet& b) {
  Jet r(a.dim_, std::min(a.order_, b.order_));
  r.value_ = a.value_ + b.value_;
  if (r.order_ >= 1) {
    for (int i = 0; i < r.dim_; ++i) r.grad_[i] = a.grad_[i] + b.grad_[i];
  }
  if (r.order_ == 2) {
    const int m = r.dim_ * (r.dim_ + 1) / 2;
    for (int k = 0; k < m; ++k) r.hess_[k] = a.hess_[k] + b.hess_[k];
  }
  return r;
}

Jet operator-(const Jet& a) { return -1.0 * a; }

Jet operator-(const Jet& a, const Jet& b) {
  Jet r(a.dim_, std::min(a.order_, b.order_));
  r.value_ = a.value_ - b.value_;
  if (r.order_ >= 1) {
    for (int i = 0; i < r.dim_; ++i) r.grad_[i] = a.grad_[i] - b.grad_[i];
  }
  if (r.order_ == 2) {
    const int m = r.dim_ * (r.dim_ + 1) / 2;
    for (int k = 0; k < m; ++k) r.hess_[k] = a.hess_[k] - b.hess_[k];
  }
  return r;
}

Jet operator*(double s, const Jet& a) {
  Jet r = a;
  r.value_ *= s;
  for (int i = 0; i < a.dim_; ++i) r.grad_[i] *= s;
  const int m = a.dim_ * (a.dim_ + 1) / 2;
  for (int k = 0; k < m; ++k) r.hess_[k] *= s;
  return r;
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet r(a.dim_, std::min(a.order_, b.order_));
  r.value_ = a.value_ * b.value_;
  if (r.order_ >= 1) {
    for (int i = 0; i < r.dim_; ++i) r.grad_[i] = a.value_ * b.grad_[i] + b.value_ * a.grad_[i];
  }
  if (r.order_ == 2) {
    for (int j = 0; j < r.dim_; ++j) {
      for (int i = 0; i <= j; ++i) {
        const int k = Jet::tri(i, j);
        r.hess_[k] = a.value_ * b.hess_[k] + b.value_ * a.hess_[k] + a.grad_[i] * b.grad_[j] +
                     a.grad_[j] * b.grad_[i];
      }
    }
  }
  return r;
}

Jet reciprocal(const Jet& u) {
  const double x = u.value();
  if (x == 0.0) throw std::domain_error("division by zero");
  return u.compose(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x));
}

Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

Jet sin(const Jet& u) {
  const double s = std::sin(u.value());
  const double c = std::cos(u.value());
  return u.compose(s, c, -s);
}

Jet cos(const Jet& u) {
  const double s = std::sin(u.value());
  const double c = std::cos(u.value());
  return u.compose(c, -s, -c);
}

Jet exp(const Jet& u) {
  const double e = std::exp(u.value());
  return u.compose(e, e, e);
}

Jet pow(const Jet& u, unsigned k) {
  const double x = u.value();
  auto ipow = [](double b, unsigned e) {
    double r = 1.0;
    for (unsigned i = 0; i < e; ++i) r *= b;
    return r;
  };
  const double f0 = ipow(x, k);
  const double f1 = k >= 1 ? k * ipow(x, k - 1) : 0.0;
  const double f2 = k >= 2 ? k * (k - 1.0) * ipow(x, k - 2) : 0.0;
  return u.compose(f0, f1, f2);
}

int min_order(std::span<const Jet> v) {
  int o = 2;
  for (const auto& j : v) o = std::min(o, j.order());
  return o;
}

JetVec operator+(const JetVec& a, const JetVec& b) {
  JetVec r;
  r.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r.push_back(a[i] + b[i]);
  return r;
}

JetVec operator-(const JetVec& a, const JetVec& b) {
  JetVec r;
  r.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r.push_back(a[i] - b[i]);
  return r;
}

JetVec operator-(const JetVec& a) { return -1.0 * a; }

JetVec operator*(const Jet& s, const JetVec& v) {
  JetVec r;
  r.reserve(v.size());
  for (const auto& c : v) r.push_back(s * c);
  return r;
}

JetVec operator*(double s, const JetVec& v) {
  JetVec r;
  r.reserve(v.size());
  for (const auto& c : v) r.push_back(s * c);
  return r;
}

JetVec truncated(const JetVec& v, int order) {
  JetVec r;
  r.reserve(v.size());
  for (const auto& c : v) r.push_back(c.truncated(order));
  return r;
}

JetVec zero_vec(int dim, int order) { return JetVec(dim, Jet(dim, order)); }

JetVec basis_vec(int dim, int order, int index) {
  JetVec r = zero_vec(dim, order);
  r[index].set_value(1.0);
  return r;
}

Jet contract(const JetVec& form, const JetVec& x) {
  Jet r = form[0] * x[0];
  for (std::size_t i = 1; i < x.size(); ++i) r += form[i] * x[i];
  return r;
}

Jet directional(const JetVec& x, const Jet& f) {
  Jet r = x[0] * f.partial(0);
  for (std::size_t i = 1; i < x.size(); ++i) r += x[i] * f.partial(static_cast<int>(i));
  return r;
}

JetVec directional(const JetVec& x, const JetVec& field) {
  JetVec r;
  r.reserve(field.size());
  for (const auto& c : field) r.push_back(directional(x, c));
  return r;
}

JetVec lie_bracket(const JetVec& x, const JetVec& y) {
  if (min_order(x) == 0 || min_order(y) == 0) {
    throw ContractError("Lie bracket needs order >= 1 inputs");
  }
  return directional(x, y) - directional(y, x);
}

double value_norm(const JetVec& v) {
  double m = 0.0;
  for (const auto& c : v) {
    const double a = std::abs(c.value());
    if (std::isnan(a)) return a;
    m = std::max(m, a);
  }
  return m;
}

std::vector<double> values(const JetVec& v) {
  std::vector<double> r;
  r.reserve(v.size());
  for (const auto& c : v) r.push_back(c.value());
  return r;
}

JetMat::JetMat(int n, int order) : n_(n), a_(static_cast<std::size_t>(n) * n, Jet(n, order)) {}

JetMat JetMat::identity(int n, int order) {
  JetMat m(n, order);
  for (int i = 0; i < n; ++i) m(i, i).set_value(1.0);
  return m;
}

JetVec JetMat::operator*(const JetVec& v) const {
  JetVec r;
  r.reserve(n_);
  for (int i = 0; i < n_; ++i) {
    Jet s = (*this)(i, 0) * v[0];
    for (int j = 1; j < n_; ++j) s += (*this)(i, j) * v[j];
    r.push_back(s);
  }
  return r;
}

JetMat JetMat::operator*(const JetMat& o) const {
  JetMat r;
  r.n_ = n_;
  r.a_.reserve(a_.size());
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      Jet s = (*this)(i, 0) * o(0, j);
      for (int k = 1; k < n_; ++k) s += (*this)(i, k) * o(k, j);
      r.a_.push_back(s);
    }
  }
  return r;
}

JetMat JetMat::operator+(const JetMat& o) const {
  JetMat r = *this;
  for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] + o.a_[k];
  return r;
}

JetMat JetMat::operator-(const JetMat& o) const {
  JetMat r = *this;
  for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] - o.a_[k];
  return r;
}

JetMat JetMat::operator*(double s) const {
  JetMat r = *this;
  for (auto& c : r.a_) c = s * c;
  return r;
}

JetMat JetMat::transposed() const {
  JetMat r = *this;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) r(i, j) = (*this)(j, i);
  return r;
}

double JetMat::value_norm() const {
  double m = 0.0;
  for (const auto& c : a_) m = std::max(m, std::abs(c.value()));
  return m;
}

JetMat inverse(const JetMat& m) {
  const int n = m.size();
  int order = 2;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) order = std::min(order, m(i, j).order());

  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = m(i, j).value();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
  if (!lu.isInvertible()) throw std::domain_error("singular matrix");
  const Eigen::MatrixXd inv = lu.inverse();

  // d(G^-1) = -G^-1 dG G^-1;
  // dd(G^-1) = G^-1 (da G G^-1 db G + db G G^-1 da G - da db G) G^-1.
  std::vector<Eigen::MatrixXd> dg(n, Eigen::MatrixXd::Zero(n, n));
  std::vector<Eigen::MatrixXd> dinv(n, Eigen::MatrixXd::Zero(n, n));
  if (order >= 1) {
    for (int a = 0; a < n; ++a) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) dg[a](i, j) = m(i, j).d(a);
      dinv[a] = -inv * dg[a] * inv;
    }
  }

  JetMat r(n, order);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      r(i, j).set_value(inv(i, j));
      if (order >= 1)
        for (int a = 0; a < n; ++a) r(i, j).set_d(a, dinv[a](i, j));
    }
  if (order == 2) {
    for (int b = 0; b < n; ++b) {
      for (int a = 0; a <= b; ++a) {
        Eigen::MatrixXd ddg(n, n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) ddg(i, j) = m(i, j).d2(a, b);
        const Eigen::MatrixXd h =
            inv * (dg[a] * inv * dg[b] + dg[b] * inv * dg[a] - ddg) * inv;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) r(i, j).set_d2(a, b, h(i, j));
      }
    }
  }
  return r;
}

}  // namespace pcc
