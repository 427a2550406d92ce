#include "oracles.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace oracle {

double value(const Expr& e, const Point& p) { return pcc::eval_jet(e, p, 0).value(); }

std::vector<double> fd_gradient(const Expr& e, const Point& p, double h) {
  std::vector<double> g(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    Point a = p, b = p;
    a[i] += h;
    b[i] -= h;
    g[i] = (value(e, a) - value(e, b)) / (2 * h);
  }
  return g;
}

std::vector<std::vector<double>> fd_hessian(const Expr& e, const Point& p, double h) {
  const int n = static_cast<int>(p.size());
  std::vector<std::vector<double>> hs(n, std::vector<double>(n));
  for (int j = 0; j < n; ++j) {
    Point a = p, b = p;
    a[j] += h;
    b[j] -= h;
    const pcc::Jet ja = pcc::eval_jet(e, a, 1);
    const pcc::Jet jb = pcc::eval_jet(e, b, 1);
    for (int i = 0; i < n; ++i) hs[i][j] = (ja.d(i) - jb.d(i)) / (2 * h);
  }
  return hs;
}

bool close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

Expr random_expr(std::mt19937_64& rng, int dim, int depth) {
  std::uniform_int_distribution<int> leaf_pick(0, dim);
  auto leaf = [&] {
    const int k = leaf_pick(rng);
    if (k == dim) {
      std::uniform_int_distribution<int> num(-5, 5);
      std::uniform_int_distribution<int> den(1, 4);
      return Expr::rational(num(rng), den(rng));
    }
    return Expr::coord(k);
  };
  if (depth == 0) return leaf();
  std::uniform_int_distribution<int> op(0, 8);
  auto sub = [&] { return random_expr(rng, dim, depth - 1); };
  switch (op(rng)) {
    case 0:
      return sub() + sub();
    case 1:
      return sub() * sub();
    case 2:
      return -sub();
    case 3: {
      std::uniform_int_distribution<int> k(0, 3);
      return Expr::power(sub(), k(rng));
    }
    case 4: {
      // 1 + s^2 >= 1
      const Expr s = sub();
      return sub() / (Expr::rational(1) + s * s);
    }
    case 5:
      return Expr::sin(sub());
    case 6:
      return Expr::cos(sub());
    case 7:
      return Expr::exp(Expr::sin(sub()));
    default:
      return sub() - leaf();
  }
}

Point random_point(std::mt19937_64& rng, int dim, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Point p(dim);
  for (auto& x : p) x = u(rng);
  return p;
}

std::vector<double> riemann_from_christoffel(int n, const std::vector<Expr>& gamma, const Point& p) {
  auto G = [&](int k, int i, int j) -> const Expr& { return gamma[(k * n + i) * n + j]; };
  std::vector<double> g(n * n * n);
  std::vector<double> dg(n * n * n * n);  // d_a G^k_ij at ((a * n + k) * n + i) * n + j
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        g[(k * n + i) * n + j] = value(G(k, i, j), p);
        const auto grad = fd_gradient(G(k, i, j), p);
        for (int a = 0; a < n; ++a) dg[((a * n + k) * n + i) * n + j] = grad[a];
      }
    }
  }
  auto gv = [&](int k, int i, int j) { return g[(k * n + i) * n + j]; };
  auto d = [&](int a, int k, int i, int j) { return dg[((a * n + k) * n + i) * n + j]; };
  std::vector<double> r(n * n * n * n);
  for (int l = 0; l < n; ++l) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          double v = d(i, l, j, k) - d(j, l, i, k);
          for (int m = 0; m < n; ++m) v += gv(l, i, m) * gv(m, j, k) - gv(l, j, m) * gv(m, i, k);
          r[((l * n + i) * n + j) * n + k] = v;
        }
      }
    }
  }
  return r;
}

std::vector<double> christoffel_of_metric(const pcc::MetricField& g, const Point& p) {
  const int n = g.dim();
  Eigen::MatrixXd gm(n, n);
  std::vector<double> dg(n * n * n);  // d_a g_ij at (a * n + i) * n + j
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      gm(i, j) = value(g.at(i, j), p);
      const auto grad = fd_gradient(g.at(i, j), p);
      for (int a = 0; a < n; ++a) dg[(a * n + i) * n + j] = grad[a];
    }
  }
  const Eigen::MatrixXd inv = gm.inverse();
  auto d = [&](int a, int i, int j) { return dg[(a * n + i) * n + j]; };
  std::vector<double> out(n * n * n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double v = 0;
        for (int l = 0; l < n; ++l) v += 0.5 * inv(k, l) * (d(i, j, l) + d(j, i, l) - d(l, i, j));
        out[(k * n + i) * n + j] = v;
      }
    }
  }
  return out;
}

double recurrence_lsq_residual(const std::vector<std::vector<double>>& e, const std::vector<double>& eta) {
  const int n = static_cast<int>(e.size());
  // Unknowns G^k_ij at (k * n + i) * n + j; equations ([G_i, E] - eta_i E)^k_j = 0.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n * n * n, n * n * n);
  Eigen::VectorXd b(n * n * n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j < n; ++j) {
        const int row = (i * n + k) * n + j;
        // (G_i E)^k_j = G^k_im E^m_j ; (E G_i)^k_j = E^k_m G^m_ij
        for (int m = 0; m < n; ++m) {
          a(row, (k * n + i) * n + m) += e[m][j];
          a(row, (m * n + i) * n + j) -= e[k][m];
        }
        b(row) = eta[i] * e[k][j];
      }
    }
  }
  const Eigen::VectorXd x = a.jacobiSvd(Eigen::ComputeFullU | Eigen::ComputeFullV).solve(b);
  return (a * x - b).norm();
}

}  // namespace oracle
