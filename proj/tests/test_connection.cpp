#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support.hpp"

#include "oracles.hpp"
#include "pcc/connection.hpp"

#include <cmath>
#include <random>

using pcc::Connection;
using pcc::EndoField;
using pcc::Expr;
using pcc::MetricField;

namespace {

const Expr x = Expr::coord(0);
const Expr y = Expr::coord(1);
Expr c(std::int64_t n, std::int64_t d = 1) { return Expr::rational(n, d); }

std::vector<Expr> random_gamma(std::mt19937_64& rng, int n) {
  std::vector<Expr> g(n * n * n);
  for (auto& e : g) e = oracle::random_expr(rng, n, 2);
  return g;
}

MetricField sphere() {
  const Expr s = Expr::sin(x);
  return MetricField(2, {c(1), c(0), s * s});
}

}  // namespace

TEST_CASE("Christoffel components come back unchanged") {
  std::mt19937_64 rng(3);
  const auto gamma = random_gamma(rng, 3);
  const Connection nabla = Connection::christoffel(3, gamma);
  const pcc::Point p = oracle::random_point(rng, 3);
  const auto m = nabla.materialize(p);
  for (std::size_t i = 0; i < gamma.size(); ++i) CHECK(m[i] == doctest::Approx(oracle::value(gamma[i], p)));
  // nabla_{d_1} d_2 = Gamma^k_12 d_k
  const auto at = nabla.at(p);
  const auto v = at(pcc::basis_vec(3, 1, 1), pcc::basis_vec(3, 1, 2));
  for (int k = 0; k < 3; ++k) CHECK(v[k].value() == doctest::Approx(oracle::value(gamma[(k * 3 + 1) * 3 + 2], p)));
}

TEST_CASE("curvature matches a brute-force Riemann tensor") {
  std::mt19937_64 rng(17);
  for (int n : {2, 3}) {
    for (int t = 0; t < 5; ++t) {
      const auto gamma = random_gamma(rng, n);
      const Connection nabla = Connection::christoffel(n, gamma);
      const pcc::Point p = oracle::random_point(rng, n);
      const auto r = oracle::riemann_from_christoffel(n, gamma, p);
      const auto at = nabla.at(p);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          for (int k = 0; k < n; ++k) {
            const auto v = pcc::curvature(at, pcc::basis_vec(n, 2, i), pcc::basis_vec(n, 2, j), pcc::basis_vec(n, 2, k));
            for (int l = 0; l < n; ++l) CHECK(oracle::close(v[l].value(), r[((l * n + i) * n + j) * n + k], 1e-6));
          }
        }
      }
    }
  }
}

TEST_CASE("curvature needs second-order arguments") {
  const Connection flat = Connection::flat(2);
  const auto at = flat.at(pcc::Point{0, 0});
  const auto e1 = pcc::basis_vec(2, 1, 0);
  CHECK_THROWS_AS(pcc::curvature(at, e1, e1, e1), pcc::ContractError);
}

TEST_CASE("Levi-Civita connection of the round sphere") {
  const MetricField g = sphere();
  const Connection lc = pcc::levi_civita(g);
  const auto ctx = testing::context(2, 30, 5, 0.6, 2.5);
  for (const auto& p : ctx.points) {
    const auto m = lc.materialize(p);
    const auto o = oracle::christoffel_of_metric(g, p);
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(oracle::close(m[i], o[i], 1e-6));
    // Closed forms: G^x_yy = -sin x cos x, G^y_xy = cot x.
    CHECK(m[3] == doctest::Approx(-std::sin(p[0]) * std::cos(p[0])));
    CHECK(m[5] == doctest::Approx(std::cos(p[0]) / std::sin(p[0])));
  }
  CHECK(pcc::torsion_free_check(lc, ctx).status == pcc::Status::Pass);
  CHECK(pcc::metricity_check(lc, g, ctx).status == pcc::Status::Pass);
  const auto flat = pcc::flatness_check(lc, ctx);
  CHECK(flat.status == pcc::Status::Fail);
  CHECK(flat.residual > 0.1);  // Gaussian curvature 1
}

TEST_CASE("Levi-Civita connections of random metrics") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 10; ++t) {
    // Diagonally dominant, so positive definite on [-1, 1]^2.
    const Expr a = oracle::random_expr(rng, 2, 2);
    const Expr b = oracle::random_expr(rng, 2, 2);
    const Expr off = Expr::sin(oracle::random_expr(rng, 2, 2)) * c(1, 2);
    const MetricField g(2, {c(3) + Expr::sin(a), off, c(3) + Expr::cos(b)});
    const Connection lc = pcc::levi_civita(g);
    const auto ctx = testing::context(2, 10, 100 + t);
    for (const auto& p : ctx.points) {
      const auto m = lc.materialize(p);
      const auto o = oracle::christoffel_of_metric(g, p);
      for (std::size_t i = 0; i < m.size(); ++i) CHECK(oracle::close(m[i], o[i], 1e-6));
    }
    CHECK(pcc::torsion_free_check(lc, ctx).status == pcc::Status::Pass);
    CHECK(pcc::metricity_check(lc, g, ctx).status == pcc::Status::Pass);
  }
}

TEST_CASE("a singular metric is an evaluation error") {
  const MetricField g(2, {c(1), c(0), x});
  const Connection lc = pcc::levi_civita(g);
  CHECK_THROWS_AS(lc.at(pcc::Point{0.0, 0.3}), pcc::EvalError);
}

TEST_CASE("connection axioms hold for every construction") {
  std::mt19937_64 rng(8);
  const auto ctx = testing::context(2, 20);
  const Connection a = Connection::christoffel(2, random_gamma(rng, 2));
  const Connection b = Connection::christoffel(2, random_gamma(rng, 2));
  const pcc::Tensor12Field s = pcc::Tensor12Field::from_components(2, random_gamma(rng, 2));
  for (const Connection& nabla : {a, pcc::add_tensor(a, s), pcc::combine(0.25, a, 0.75, b, "affine"),
                                  pcc::levi_civita(MetricField(2, {c(2), c(0), c(2) + x * y}))}) {
    CAPTURE(nabla.label());
    CHECK(pcc::leibniz_check(nabla, ctx).status == pcc::Status::Pass);
    CHECK(pcc::direction_linearity_check(nabla, ctx).status == pcc::Status::Pass);
    CHECK(pcc::torsion_tensoriality_check(nabla, ctx).status == pcc::Status::Pass);
    CHECK(pcc::curvature_tensoriality_check(nabla, ctx).status == pcc::Status::Pass);
  }
  // a + b is not affine and breaks the Leibniz rule.
  CHECK(pcc::leibniz_check(pcc::combine(1, a, 1, b, "not affine"), ctx).status == pcc::Status::Fail);
}

TEST_CASE("nabla of a tensor difference and parallelism") {
  const auto ctx = testing::context(2, 20);
  const Connection flat = Connection::flat(2);
  const EndoField constant(2, {c(0), c(1), c(1), c(0)});
  const EndoField shear(2, {c(1), x, c(0), c(-1)});
  CHECK(pcc::parallel_check(flat, constant, ctx).status == pcc::Status::Pass);
  CHECK(pcc::parallel_check(flat, shear, ctx).status == pcc::Status::Fail);

  // (nabla_X E) Y for flat nabla: only (d_x E) d_y = d_x survives.
  const auto ne = pcc::nabla_tensor(flat, shear).materialize(pcc::Point{0.2, 0.4});
  for (int k = 0; k < 2; ++k) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) CHECK(ne[(k * 2 + i) * 2 + j] == (k == 0 && i == 0 && j == 1 ? 1.0 : 0.0));
    }
  }

  const auto eq = pcc::equality_check(flat, pcc::add_tensor(flat, pcc::Tensor12Field::zero(2)), ctx, "same");
  CHECK(eq.status == pcc::Status::Pass);
  CHECK(eq.item == "same");
}

TEST_CASE("torsion of a non-symmetric Christoffel array") {
  std::vector<Expr> g(8, c(0));
  g[1] = c(1);  // G^x_xy = 1, G^x_yx = 0
  const Connection nabla = Connection::christoffel(2, g);
  const auto at = nabla.at(pcc::Point{0.1, 0.1});
  const auto t = pcc::torsion(at, pcc::basis_vec(2, 1, 0), pcc::basis_vec(2, 1, 1));
  CHECK(t[0].value() == 1);
  CHECK(t[1].value() == 0);
  CHECK(pcc::torsion_free_check(nabla, testing::context(2, 5)).status == pcc::Status::Fail);
}
