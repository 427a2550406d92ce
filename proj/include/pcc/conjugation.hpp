#pragma once

#include "pcc/connection.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace pcc {

/// psi_E(nabla)_X Y = 1/2 [nabla_X Y + E(nabla_X (EY))].
Connection psi(const Connection& c, const EndoField& e);

/// chi_E(S)(X, Y) = 1/2 [S(X, Y) + E(S(X, EY))].
Tensor12Field chi(const Tensor12Field& s, const EndoField& e);

/// The product conjugate nabla^E_X Y = E(nabla_X (EY)).
///
/// Every binding checks E(p)^2 = I and throws ContractError otherwise.
Connection conjugate(const Connection& c, const EndoField& e);

/// nabla + E o (nabla E): the same operator written through nabla E.
Connection conjugate_via_nabla_e(const Connection& c, const EndoField& e);

/// Evaluates E at p and throws ContractError unless E(p)^2 = I.
JetMat bind_structure(const EndoField& e, std::span<const double> p);

/// Max |a(X, Y) - b(X, Y)| over the context, recorded under `item`.
CheckRecord tensor_equality_check(const Tensor12Field& a, const Tensor12Field& b, const VerifyContext& ctx,
                                  std::string item);

/// psi/chi idempotence, affinity under nabla + tau, the arithmetic-mean
/// decomposition, agreement of the two conjugate forms, and the
/// E-connection membership criterion.
std::vector<CheckRecord> projector_suite(const Connection& c, const EndoField& e, const Tensor12Field& tau,
                                         const VerifyContext& ctx);

/// Behaviour of nabla E, torsion, curvature and metric under conjugation, the
/// involution nabla^EE = nabla, and flatness transport. The metric item runs
/// only when g is given and E-compatible.
std::vector<CheckRecord> conjugate_suite(const Connection& c, const EndoField& e, const MetricField* g,
                                         const VerifyContext& ctx);

/// Levi-Civita facts: torsion-free and metric; uniqueness against `other` when
/// it is symmetric and metric; nabla^E metric when g is E-compatible; and
/// nabla^E = nabla when additionally nabla E = 0.
std::vector<CheckRecord> levi_civita_suite(const MetricField& g, const EndoField* e, const Connection* other,
                                           const VerifyContext& ctx);

enum class RecurrenceMode {
  Recurrent,          // nabla E = eta (x) E
  IdentityRecurrent,  // nabla E = eta (x) I
};

/// Torsion of nabla^E for a symmetric recurrent pair. The torsion item is
/// skipped when either hypothesis fails.
std::vector<CheckRecord> recurrent_suite(const Connection& c, const EndoField& e, const OneFormField& eta,
                                         RecurrenceMode mode, const VerifyContext& ctx);

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// E_{a,b} = a E1 + b E2.
struct Pencil {
  EndoField e1;
  EndoField e2;
  Rational alpha{1, 1};
  Rational beta{0, 1};
};

/// alpha^2 + beta^2 == 1, decided exactly.
bool on_unit_circle(Rational alpha, Rational beta);

/// The pencil member as an exact expression field.
EndoField pencil_structure(const Pencil& pencil);

/// alpha^2 nabla^E1 + beta^2 nabla^E2 + alpha beta [E1(nabla_X E2 Y) + E2(nabla_X E1 Y)].
Connection pencil_expansion(const Connection& c, const Pencil& pencil);

/// Validity, expansion against direct conjugation, reductions at (1,0) and
/// (0,1) (tolerance 1e-12), and the common- and mixed-recurrent cases for the
/// recurrence form eta. Dependent items are skipped when validity or a
/// hypothesis fails.
std::vector<CheckRecord> pencil_suite(const Connection& c, const Pencil& pencil, const OneFormField& eta,
                                      const VerifyContext& ctx);

struct Kirichenko {
  Tensor12Field structural;  // C(X, Y) = 1/2 [(nabla_EX E)Y + (nabla_X E)EY]
  Tensor12Field virtual_;    // B(X, Y) = 1/2 [(nabla_EX E)Y - (nabla_X E)EY]
};

Kirichenko kirichenko(const Connection& c, const EndoField& e);

/// Sign flips under conjugation, E-(anti)invariance, and
/// nabla^E = nabla - C + B.
std::vector<CheckRecord> kirichenko_suite(const Connection& c, const EndoField& e, const VerifyContext& ctx);

/// For nabla' = nabla + tau (x) I + I (x) tau: C is unchanged and
/// (B' - B)(X, Y) = tau(EY) EX - tau(Y) X.
std::vector<CheckRecord> projective_suite(const Connection& c, const EndoField& e, const OneFormField& tau,
                                          const VerifyContext& ctx);

}  // namespace pcc
