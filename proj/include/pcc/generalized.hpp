#pragma once

#include "pcc/conjugation.hpp"

#include <vector>

namespace pcc {

/// nabla^(E,C) = nabla^E + C.
Connection generalized_conjugate(const Connection& c, const EndoField& e, const Tensor12Field& s);

/// The family member (1 + mu) nabla^E + lambda nabla. It is an affine
/// combination, and so a connection, only when lambda + mu = 0.
Connection family_member(const Connection& c, const EndoField& e, double lambda, double mu);

/// The same member assembled as nabla^E + lambda nabla + mu E o nabla o E.
Connection family_member_expanded(const Connection& c, const EndoField& e, double lambda, double mu);

/// The family map applied twice.
Connection family_twice(const Connection& c, const EndoField& e, double lambda, double mu);

/// Residual of E(C(X, EY)) + C(X, Y) = 0, the condition for
/// (nabla^(E,C))^(E,C) = nabla; item "duality.equation".
CheckRecord duality_residual(const EndoField& e, const Tensor12Field& s, const VerifyContext& ctx);

/// The duality equation, the double-conjugation expansion
/// nabla_X Y + E(C(X, EY)) + C(X, Y), the involution itself, the particular
/// solution C = nabla E, and closure of solutions under C -> E o C.
std::vector<CheckRecord> duality_suite(const Connection& c, const EndoField& e, const Tensor12Field& s,
                                       const VerifyContext& ctx);

/// Agreement of both assembly forms, the four special members, and whether
/// the Leibniz rule holds exactly when lambda + mu = 0.
std::vector<CheckRecord> family_suite(const Connection& c, const EndoField& e, const VerifyContext& ctx);

struct FamilyCell {
  Rational lambda;
  Rational mu;
};

/// (1 + mu)^2 + lambda^2 = 1 and lambda (1 + mu) = 0, decided exactly.
bool family_is_involutive(const FamilyCell& cell);

/// One record per cell: pass iff the observed involution matches the exact
/// predicate. Then a genericity-gated extraction of the coefficients of
/// nabla and nabla^E in the double application, compared against
/// [(1 + mu)^2 + lambda^2, 2 lambda (1 + mu)].
std::vector<CheckRecord> family_sweep(const Connection& c, const EndoField& e, const std::vector<FamilyCell>& grid,
                                      const VerifyContext& ctx);

/// nabla^(E,C) E, torsion and curvature of nabla^(E,C), the equal-torsion
/// corollary, the literal curvature display (informational) and the
/// E-connection criterion for C = lambda nabla E + mu E o nabla E on the given
/// sample pairs.
std::vector<CheckRecord> generalized_suite(const Connection& c, const EndoField& e, const Tensor12Field& s,
                                           const std::vector<FamilyCell>& membership_pairs, const VerifyContext& ctx);

}  // namespace pcc
