#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support.hpp"

#include "oracles.hpp"
#include "pcc/conjugation.hpp"

#include <cmath>
#include <random>

using pcc::Connection;
using pcc::EndoField;
using pcc::Expr;
using pcc::OneFormField;
using pcc::Status;

namespace {

const Expr x = Expr::coord(0);
const Expr y = Expr::coord(1);
Expr c(std::int64_t n, std::int64_t d = 1) { return Expr::rational(n, d); }

EndoField shear() { return EndoField(2, {c(1), x, c(0), c(-1)}); }
EndoField diag() { return EndoField(2, {c(1), c(0), c(0), c(-1)}); }
EndoField swap() { return EndoField(2, {c(0), c(1), c(1), c(0)}); }
// Reflection across the line at angle xy / 2.
EndoField reflection() {
  const Expr a = x * y;
  return EndoField(2, {Expr::cos(a), Expr::sin(a), Expr::sin(a), -Expr::cos(a)});
}

Connection random_connection(std::mt19937_64& rng, int n = 2) {
  std::vector<Expr> g(n * n * n);
  for (auto& e : g) e = oracle::random_expr(rng, n, 2);
  return Connection::christoffel(n, g, "random");
}

}  // namespace

TEST_CASE("conjugate of the flat connection under the shear structure") {
  const Connection ce = pcc::conjugate(Connection::flat(2), shear());
  const auto ctx = testing::context(2, 10);
  for (const auto& p : ctx.points) {
    const auto g = ce.materialize(p);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(g[i] == (i == 1 ? 1.0 : 0.0));  // only G^x_xy = 1
    const auto t = pcc::torsion(ce.at(p), pcc::basis_vec(2, 1, 0), pcc::basis_vec(2, 1, 1));
    CHECK(t[0].value() == 1);
    CHECK(t[1].value() == 0);
  }
  CHECK(ce.provenance() == pcc::Provenance::Conjugate);
}

TEST_CASE("conjugation is an involution on random connections") {
  std::mt19937_64 rng(12);
  const auto ctx = testing::context(2, 15);
  for (const EndoField& e : {shear(), reflection(), swap()}) {
    const Connection nabla = random_connection(rng);
    const Connection twice = pcc::conjugate(pcc::conjugate(nabla, e), e);
    for (const auto& p : ctx.points) {
      const auto a = nabla.materialize(p);
      const auto b = twice.materialize(p);
      for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("conjugate suite holds for random connections and structures") {
  std::mt19937_64 rng(4);
  const auto ctx = testing::context(2, 15);
  const pcc::MetricField eucl = pcc::MetricField::euclidean(2);
  for (const EndoField& e : {shear(), reflection(), diag()}) {
    const auto rs = pcc::conjugate_suite(random_connection(rng), e, &eucl, ctx);
    testing::require_no_failure(rs);
    CHECK(testing::find(rs, "conjugate.duality").status == Status::Pass);
    CHECK(testing::find(rs, "conjugate.torsion").status == Status::Pass);
    CHECK(testing::find(rs, "conjugate.curvature").status == Status::Pass);
  }
  // The reflection preserves the Euclidean metric, so the metric item runs.
  const auto lc = pcc::levi_civita(eucl);
  const auto rs = pcc::conjugate_suite(lc, reflection(), &eucl, ctx);
  testing::require_all_pass(rs);
  CHECK(testing::find(rs, "conjugate.metric").status == Status::Pass);
}

TEST_CASE("projector suite holds for random connections and tensors") {
  std::mt19937_64 rng(41);
  const auto ctx = testing::context(2, 15);
  for (const EndoField& e : {shear(), reflection(), swap()}) {
    std::vector<Expr> tc(8);
    for (auto& t : tc) t = oracle::random_expr(rng, 2, 2);
    const auto tau = pcc::Tensor12Field::from_components(2, tc);
    const auto rs = pcc::projector_suite(random_connection(rng), e, tau, ctx);
    testing::require_all_pass(rs);
  }
  // psi fixes nabla exactly when nabla E = 0.
  const auto rs = pcc::projector_suite(Connection::flat(2), swap(), pcc::Tensor12Field::zero(2), ctx);
  testing::require_all_pass(rs);
}

TEST_CASE("psi averages nabla and its conjugate") {
  std::mt19937_64 rng(2);
  const Connection nabla = random_connection(rng);
  const pcc::Point p{0.3, 0.6};
  const auto a = nabla.materialize(p);
  const auto b = pcc::conjugate(nabla, shear()).materialize(p);
  const auto m = pcc::psi(nabla, shear()).materialize(p);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(m[i] == doctest::Approx((a[i] + b[i]) / 2));
}

TEST_CASE("binding a non-involutive structure is a contract violation") {
  const EndoField bad(2, {c(1), x, c(0), c(1)});
  CHECK_THROWS_AS(pcc::bind_structure(bad, pcc::Point{0.5, 0.5}), pcc::ContractError);
  const Connection ce = pcc::conjugate(Connection::flat(2), bad);
  CHECK_THROWS_AS(ce.at(pcc::Point{0.5, 0.5}), pcc::ContractError);
  CHECK_NOTHROW(ce.at(pcc::Point{0.0, 0.5}));  // E = I on x = 0
}

TEST_CASE("Levi-Civita suite") {
  const auto ctx = testing::context(2, 20);
  const pcc::MetricField warped(2, {c(1), c(0), c(1) + x * x});
  const EndoField d = diag();
  const Connection flat = Connection::flat(2);
  const auto rs = pcc::levi_civita_suite(warped, &d, &flat, ctx);
  CHECK(testing::find(rs, "levi_civita.torsion_free").status == Status::Pass);
  CHECK(testing::find(rs, "levi_civita.metricity").status == Status::Pass);
  CHECK(testing::find(rs, "levi_civita.uniqueness").status == Status::Skip);  // flat is not metric here
  CHECK(testing::find(rs, "levi_civita.conjugate_metric").status == Status::Pass);

  const pcc::MetricField eucl = pcc::MetricField::euclidean(2);
  const EndoField s = swap();
  const auto es = pcc::levi_civita_suite(eucl, &s, &flat, ctx);
  testing::require_all_pass(es);
  CHECK(testing::find(es, "levi_civita.uniqueness").status == Status::Pass);
  CHECK(testing::find(es, "levi_civita.conjugate_fixed").status == Status::Pass);
}

TEST_CASE("recurrent suite on a constructed recurrent pair") {
  // nabla E = 0 for constant E and the flat connection: recurrent with eta = 0.
  const auto ctx = testing::context(2, 20);
  const auto rs = pcc::recurrent_suite(Connection::flat(2), diag(), OneFormField::zero(2),
                                       pcc::RecurrenceMode::Recurrent, ctx);
  testing::require_all_pass(rs);
  const auto is = pcc::recurrent_suite(Connection::flat(2), swap(), OneFormField::zero(2),
                                       pcc::RecurrenceMode::IdentityRecurrent, ctx);
  testing::require_all_pass(is);

  // A nonzero eta is not attainable for constant E: the hypothesis fails.
  const auto bad = pcc::recurrent_suite(Connection::flat(2), diag(), OneFormField({c(1), c(0)}),
                                        pcc::RecurrenceMode::Recurrent, ctx);
  CHECK(testing::find(bad, "recurrent.hypothesis").status == Status::Fail);
  CHECK(testing::find(bad, "recurrent.torsion").status == Status::Skip);
}

TEST_CASE("constant structures admit no recurrence with nonzero eta") {
  // [G_i, E] = eta_i E has no solution G unless eta = 0: the trace of a
  // commutator vanishes while tr(E E) = n.
  const std::vector<std::vector<double>> d{{1, 0}, {0, -1}};
  const std::vector<std::vector<double>> s{{0, 1}, {1, 0}};
  CHECK(oracle::recurrence_lsq_residual(d, {0, 0}) < 1e-12);
  CHECK(oracle::recurrence_lsq_residual(s, {0, 0}) < 1e-12);
  CHECK(oracle::recurrence_lsq_residual(d, {1, 0}) > 0.1);
  CHECK(oracle::recurrence_lsq_residual(s, {0, 0.5}) > 0.1);
}

TEST_CASE("pencils") {
  CHECK(pcc::on_unit_circle({3, 5}, {4, 5}));
  CHECK(pcc::on_unit_circle({-1, 1}, {0, 1}));
  CHECK(pcc::on_unit_circle({5, 13}, {-12, 13}));
  CHECK_FALSE(pcc::on_unit_circle({1, 2}, {1, 2}));
  CHECK_FALSE(pcc::on_unit_circle({1, 0}, {0, 1}));
  // Close in floating point, not exactly on the circle.
  CHECK_FALSE(pcc::on_unit_circle({1000000, 1000001}, {1414, 1000000}));

  const auto ctx = testing::context(2, 15);
  std::mt19937_64 rng(77);
  const pcc::Pencil good{diag(), swap(), {3, 5}, {4, 5}};
  const auto rs = pcc::pencil_suite(random_connection(rng), good, OneFormField::zero(2), ctx);
  CHECK(testing::find(rs, "pencil.validity").status == Status::Pass);
  CHECK(testing::find(rs, "pencil.expansion").status == Status::Pass);
  CHECK(testing::find(rs, "pencil.reduction").status == Status::Pass);

  // Flat nabla: both structures are parallel, so the common case applies.
  const auto fs = pcc::pencil_suite(Connection::flat(2), good, OneFormField::zero(2), ctx);
  testing::require_all_pass(fs);
  CHECK(testing::find(fs, "pencil.common_recurrent").status == Status::Pass);

  const pcc::Pencil off{diag(), swap(), {1, 2}, {1, 2}};
  const auto os = pcc::pencil_suite(Connection::flat(2), off, OneFormField::zero(2), ctx);
  CHECK(testing::find(os, "pencil.validity").status == Status::Fail);
  CHECK(testing::find(os, "pencil.expansion").status == Status::Skip);

  const pcc::Pencil commuting{diag(), diag(), {3, 5}, {4, 5}};
  const auto cs = pcc::pencil_suite(Connection::flat(2), commuting, OneFormField::zero(2), ctx);
  CHECK(testing::find(cs, "pencil.validity").status == Status::Fail);
}

TEST_CASE("Kirichenko tensors and projective changes") {
  std::mt19937_64 rng(19);
  const auto ctx = testing::context(2, 15);
  for (const EndoField& e : {shear(), reflection()}) {
    const Connection nabla = random_connection(rng);
    testing::require_all_pass(pcc::kirichenko_suite(nabla, e, ctx));
    const OneFormField tau({oracle::random_expr(rng, 2, 2), oracle::random_expr(rng, 2, 2)});
    testing::require_all_pass(pcc::projective_suite(nabla, e, tau, ctx));
  }
  // Both tensors vanish when nabla E = 0.
  const auto k = pcc::kirichenko(Connection::flat(2), swap());
  for (double v : k.structural.materialize(pcc::Point{0.1, 0.2})) CHECK(v == 0);
  for (double v : k.virtual_.materialize(pcc::Point{0.1, 0.2})) CHECK(v == 0);
}
