#include "pcc/checks.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace pcc {

namespace {

using P = ParamType;

ParamSpec req(std::string name, ParamType t) { return {std::move(name), t, true}; }
ParamSpec opt(std::string name, ParamType t) { return {std::move(name), t, false}; }

std::vector<CheckKind> make_kinds() {
  const ParamSpec conn = req("connection", P::Connection);
  const ParamSpec st = req("structure", P::Structure);
  return {
      {"almost_product", "E^2 = I at every sample", {st}, {"structure.involution"}},
      {"metric_compat", "g is E-compatible", {req("metric", P::Metric), st}, {"metric.compatibility"}},
      {"connection_axioms",
       "Leibniz rule, direction linearity, tensoriality of torsion and curvature",
       {conn},
       {"connection.leibniz", "connection.direction_linearity", "connection.torsion_tensorial",
        "connection.curvature_tensorial"}},
      {"torsion_free", "T = 0", {conn}, {"connection.torsion_free"}},
      {"flat", "R = 0", {conn}, {"connection.flat"}},
      {"metric_connection", "nabla g = 0", {conn, req("metric", P::Metric)}, {"connection.metricity"}},
      {"parallel", "nabla E = 0", {conn, st}, {"connection.parallel"}},
      {"equal", "two operators agree", {conn, req("other", P::Connection)}, {"connection.equal"}},
      {"tensor_axioms", "C^inf-linearity of a (1,2) tensor", {req("tensor", P::Tensor)}, {"tensor.tensoriality"}},
      {"projector",
       "psi_E and chi_E projector algebra",
       {conn, st, req("tensor", P::Tensor)},
       {"projector.psi_idempotent", "projector.chi_idempotent", "projector.affinity", "projector.mean",
        "projector.closed_forms", "projector.membership"}},
      {"conjugate",
       "behaviour of nabla E, T, R and g under conjugation",
       {conn, st, opt("metric", P::Metric)},
       {"conjugate.nabla_E", "conjugate.duality", "conjugate.torsion", "conjugate.curvature", "conjugate.metric",
        "conjugate.flatness_transport"}},
      {"levi_civita",
       "Levi-Civita connection and its conjugate",
       {req("metric", P::Metric), opt("structure", P::Structure), opt("other", P::Connection)},
       {"levi_civita.torsion_free", "levi_civita.metricity", "levi_civita.uniqueness", "levi_civita.conjugate_metric",
        "levi_civita.conjugate_fixed"}},
      {"recurrent",
       "torsion of the conjugate of a symmetric recurrent pair",
       {conn, st, req("form", P::Form), req("mode", P::Mode)},
       {"recurrent.symmetric", "recurrent.hypothesis", "recurrent.torsion"}},
      {"pencil",
       "conjugation by a pencil alpha E1 + beta E2",
       {conn, req("pencil", P::Pencil), req("form", P::Form)},
       {"pencil.validity", "pencil.expansion", "pencil.reduction", "pencil.common_recurrent",
        "pencil.mixed_recurrent"}},
      {"kirichenko",
       "structural and virtual tensors",
       {conn, st},
       {"kirichenko.conjugate_C", "kirichenko.conjugate_B", "kirichenko.C_invariance", "kirichenko.B_anti",
        "kirichenko.decomposition"}},
      {"projective",
       "structural and virtual tensors under a projective change",
       {conn, st, req("form", P::Form)},
       {"projective.C_invariant", "projective.B_difference"}},
      {"invariant", "E maps D into D", {req("distribution", P::Distribution), st}, {"distribution.invariant"}},
      {"restricts", "nabla restricts to D", {conn, req("distribution", P::Distribution)}, {"distribution.restricts"}},
      {"geodesic", "D is geodesically invariant", {conn, req("distribution", P::Distribution)},
       {"distribution.geodesic"}},
      {"conjugate_restriction",
       "restriction and geodesic invariance pass to the conjugate",
       {conn, st, req("distribution", P::Distribution)},
       {"distribution.invariant", "distribution.restricts", "distribution.conjugate_restricts",
        "distribution.conjugate_geodesic"}},
      {"pair",
       "conjugation by E = h - v for a projector pair",
       {conn, req("pair", P::Pair)},
       {"pair.axioms", "pair.structure", "pair.invariant_h", "pair.invariant_v", "pair.hv_form",
        "schouten.restricts_h", "schouten.restricts_v", "schouten.E_connection", "schouten.conjugate_fixed",
        "schouten.adapted", "pair.C_projectors", "pair.B_projectors", "pair.C_oneill_gray", "pair.B_oneill_gray",
        "oneill_gray.tensoriality", "pair.vanishing", "pair.antisymmetric_blocks", "pair.splitting_C",
        "pair.splitting_B", "pair.blocks"}},
      {"involutivity",
       "torsion-free conjugate forces both sides involutive",
       {conn, req("pair", P::Pair)},
       {"pair.axioms", "involutivity.hypothesis", "involutivity.conclusion"}},
      {"duality",
       "generalized conjugates in duality",
       {conn, st, req("tensor", P::Tensor)},
       {"duality.equation", "duality.expansion", "duality.involution", "duality.particular_solution",
        "duality.solution_closure"}},
      {"family", "the (lambda, mu) family of operators", {conn, st},
       {"family.forms", "family.special", "family.leibniz"}},
      {"family_sweep",
       "which family members are in duality",
       {conn, st, req("cells", P::Cells)},
       {"family.duality", "family.coefficients"}},
      {"generalized",
       "nabla E, torsion and curvature of a generalized conjugate",
       {conn, st, req("tensor", P::Tensor), opt("membership", P::Cells)},
       {"generalized.nabla_E", "generalized.torsion", "generalized.torsion_symmetric", "generalized.curvature",
        "generalized.curvature_literal", "generalized.membership"}},
  };
}

const std::map<std::string, std::string>& anchors() {
  static const std::map<std::string, std::string> a = {
      {"structure.involution", "plumbing: E^2 = I"},
      {"metric.compatibility", "g(EX, EY) = g(X, Y)"},
      {"tensor.tensoriality", "plumbing: S(fX, Y) = S(X, fY) = f S(X, Y)"},
      {"connection.leibniz", "plumbing: nabla_X(fY) = X(f) Y + f nabla_X Y"},
      {"connection.direction_linearity", "plumbing: nabla_{fX+Y} Z = f nabla_X Z + nabla_Y Z"},
      {"connection.torsion_tensorial", "plumbing: T(fX, Y) = T(X, fY) = f T(X, Y)"},
      {"connection.curvature_tensorial", "plumbing: R(X, Y)Z is f-linear in X, Y, Z"},
      {"connection.torsion_free", "T(X, Y) = nabla_X Y - nabla_Y X - [X, Y] = 0"},
      {"connection.flat", "R(X, Y)Z = 0"},
      {"connection.metricity", "nabla g = 0"},
      {"connection.parallel", "nabla E = 0"},
      {"connection.equal", "plumbing: nabla1_X Y = nabla2_X Y"},
      {"projector.psi_idempotent", "psi_E(psi_E(nabla)) = psi_E(nabla), psi_E(nabla) = 1/2 [nabla + E nabla E]"},
      {"projector.chi_idempotent", "chi_E(chi_E(S)) = chi_E(S), chi_E(S) = 1/2 [S + E S(., E.)]"},
      {"projector.affinity", "psi_E(nabla + S) = psi_E(nabla) + chi_E(S)"},
      {"projector.mean", "psi_E(nabla) = 1/2 [nabla + nabla^E]"},
      {"projector.closed_forms", "E nabla_X (EY) = nabla_X Y + E (nabla_X E) Y"},
      {"projector.membership", "nabla E = 0 iff psi_E(nabla) = nabla"},
      {"conjugate.nabla_E", "nabla^E E = -nabla E"},
      {"conjugate.duality", "(nabla^E)^E = nabla"},
      {"conjugate.torsion", "T^E(X, Y) = T(X, Y) + E (d^nabla E)(X, Y)"},
      {"conjugate.curvature", "R^E(X, Y)Z = E R(X, Y) EZ"},
      {"conjugate.metric", "E-compatible g: (nabla^E_X g)(EY, EZ) = (nabla_X g)(Y, Z)"},
      {"conjugate.flatness_transport", "R = 0 iff R^E = 0"},
      {"levi_civita.torsion_free", "Koszul connection: T = 0"},
      {"levi_civita.metricity", "Koszul connection: nabla g = 0"},
      {"levi_civita.uniqueness", "symmetric metric connection = Koszul connection"},
      {"levi_civita.conjugate_metric", "E-compatible g: nabla^E g = 0"},
      {"levi_civita.conjugate_fixed", "E-compatible g and nabla E = 0: nabla^E = nabla"},
      {"recurrent.symmetric", "recurrent pair: T = 0"},
      {"recurrent.hypothesis", "nabla E = eta (x) E or nabla E = eta (x) I"},
      {"recurrent.torsion",
       "T^E(X, Y) = eta(X) Y - eta(Y) X or eta(X) EY - eta(Y) EX"},
      {"pencil.validity", "E1^2 = E2^2 = I, E1 E2 = -E2 E1, alpha^2 + beta^2 = 1"},
      {"pencil.expansion",
       "nabla^{E_ab} = a^2 nabla^E1 + b^2 nabla^E2 + ab [E1 (nabla E2) + E2 (nabla E1)]"},
      {"pencil.reduction", "E_{1,0} = E1, E_{0,1} = E2"},
      {"pencil.common_recurrent", "nabla E_i = eta (x) E_i: nabla^E1 = nabla^E2 = nabla^{E_ab}"},
      {"pencil.mixed_recurrent",
       "nabla E1 = eta (x) E2, nabla E2 = eta (x) E1: nabla = 1/2 [nabla^E1 + nabla^E2], "
       "nabla^{E_ab} = nabla + (a^2 - b^2) eta (x) E1 E2"},
      {"kirichenko.conjugate_C", "C^E = -C, C(X, Y) = 1/2 [(nabla_EX E)Y + (nabla_X E)EY]"},
      {"kirichenko.conjugate_B", "B^E = -B, B(X, Y) = 1/2 [(nabla_EX E)Y - (nabla_X E)EY]"},
      {"kirichenko.C_invariance", "C(EX, EY) = C(X, Y)"},
      {"kirichenko.B_anti", "B(EX, EY) = -B(X, Y)"},
      {"kirichenko.decomposition", "nabla^E = nabla - C + B"},
      {"projective.C_invariant", "nabla' = nabla + tau (x) I + I (x) tau: C' = C"},
      {"projective.B_difference", "(B' - B)(X, Y) = tau(EY) EX - tau(Y) X"},
      {"distribution.invariant", "E D = D"},
      {"distribution.restricts", "Y in D: nabla_X Y in D"},
      {"distribution.geodesic", "X, Y in D: nabla_X Y + nabla_Y X in D"},
      {"distribution.conjugate_restricts", "E D = D and nabla restricts to D: nabla^E restricts to D"},
      {"distribution.conjugate_geodesic", "E D = D and nabla restricts to D: D geodesically invariant for nabla^E"},
      {"pair.axioms", "h + v = I, h^2 = h, v^2 = v, hv = vh = 0"},
      {"pair.structure", "E = h - v: E^2 = I"},
      {"pair.invariant_h", "E(hX) = hX"},
      {"pair.invariant_v", "E(vX) = -vX"},
      {"pair.hv_form", "nabla^E_X Y = h nabla_X hY - h nabla_X vY - v nabla_X hY + v nabla_X vY"},
      {"schouten.restricts_h", "Schouten h nabla h + v nabla v restricts to h"},
      {"schouten.restricts_v", "Schouten h nabla h + v nabla v restricts to v"},
      {"schouten.E_connection", "Schouten connection parallelises E = h - v"},
      {"schouten.conjugate_fixed", "(Schouten)^E = Schouten"},
      {"schouten.adapted", "nabla restricts to h and v: nabla = nabla^E = Schouten"},
      {"pair.C_projectors", "C = 2 [h nabla_vX vY + v nabla_hX hY]"},
      {"pair.B_projectors", "B = -2 [h nabla_hX vY + v nabla_vX hY]"},
      {"pair.C_oneill_gray", "C = 2 [h T(vX, vY) + v A(hX, hY)]"},
      {"pair.B_oneill_gray", "B = -2 [h A(hX, vY) + v T(vX, hY)]"},
      {"oneill_gray.tensoriality",
       "T(X, Y) = h nabla_vX vY + v nabla_vX hY, A(X, Y) = v nabla_hX hY + h nabla_hX vY are tensors"},
      {"pair.vanishing", "C(hX, vY) = C(vX, hY) = 0, B(hX, hY) = B(vX, vY) = 0"},
      {"pair.antisymmetric_blocks", "C(hX, vY) + C(vX, hY) = 0, B(hX, hY) + B(vX, vY) = 0"},
      {"pair.splitting_C", "C(X, Y) = C(hX, hY) + C(vX, vY)"},
      {"pair.splitting_B", "B(X, Y) = B(hX, vY) + B(vX, hY)"},
      {"pair.blocks",
       "C(hX, hY) = 2 v nabla_hX hY, C(vX, vY) = 2 h nabla_vX vY, "
       "B(hX, vY) = -2 h nabla_hX vY, B(vX, hY) = -2 v nabla_vX hY"},
      {"involutivity.hypothesis", "E = h - v: T^E = 0"},
      {"involutivity.conclusion", "T^E = 0: h[vX, vY] = 0 and v[hX, hY] = 0"},
      {"duality.equation", "E C(X, EY) + C(X, Y) = 0"},
      {"duality.expansion", "(nabla^(E,C))^(E,C)_X Y = nabla_X Y + E C(X, EY) + C(X, Y)"},
      {"duality.involution", "(nabla^(E,C))^(E,C) = nabla, nabla^(E,C) = nabla^E + C"},
      {"duality.particular_solution", "C = nabla E solves E C(X, EY) + C(X, Y) = 0"},
      {"duality.solution_closure", "C solution: E o C solution"},
      {"family.forms", "(1 + mu) nabla^E + lambda nabla = nabla^E + lambda nabla + mu E nabla E"},
      {"family.special", "(l, m) = (0, 0): nabla^E; (1, -1): nabla; (0, -2): -nabla^E; (-1, -1): -nabla"},
      {"family.leibniz", "family member is a connection iff lambda + mu = 0"},
      {"family.duality", "member in duality iff (1 + mu)^2 + lambda^2 = 1 and lambda (1 + mu) = 0"},
      {"family.coefficients",
       "twice applied = [(1 + mu)^2 + lambda^2] nabla + 2 lambda (1 + mu) nabla^E"},
      {"generalized.nabla_E", "(nabla^(E,C)_X E)Y = -(nabla_X E)Y + C(X, EY) - E C(X, Y)"},
      {"generalized.torsion", "T^(E,C)(X, Y) = T(X, Y) + E (d^nabla E)(X, Y) + C(X, Y) - C(Y, X)"},
      {"generalized.torsion_symmetric", "C symmetric and nabla E = 0: T^(E,C) = T"},
      {"generalized.curvature",
       "R^(E,C)(X, Y)Z = E R(X, Y) EZ + C(X, E nabla_Y EZ) - C(Y, E nabla_X EZ) - C([X, Y], Z) "
       "+ E nabla_X (E C(Y, Z)) - E nabla_Y (E C(X, Z)) + C(X, C(Y, Z)) - C(Y, C(X, Z))"},
      {"generalized.curvature_literal", "informational: curvature display with both derivatives along Y"},
      {"generalized.membership",
       "C = lambda nabla E + mu E o nabla E: nabla^(E,C) E = 0 iff nabla E = 0"},
  };
  return a;
}

template <class Map>
const typename Map::mapped_type& get(const Map& m, const CheckSpec& spec, const std::string& key) {
  return m.at(spec.params.at(key));
}

template <class Map>
const typename Map::mapped_type* get_opt(const Map& m, const CheckSpec& spec, const std::string& key) {
  auto it = spec.params.find(key);
  return it == spec.params.end() ? nullptr : &m.at(it->second);
}

}  // namespace

const std::vector<CheckKind>& check_kinds() {
  static const std::vector<CheckKind> kinds = make_kinds();
  return kinds;
}

const CheckKind* find_check_kind(std::string_view name) {
  for (const auto& k : check_kinds()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = [] {
    std::map<std::string, CatalogEntry> byid;
    for (const auto& k : check_kinds()) {
      for (const auto& item : k.items) {
        if (!byid.count(item)) byid[item] = {item, k.name, anchor_for(item)};
      }
    }
    std::vector<CatalogEntry> out;
    for (auto& [id, e] : byid) out.push_back(std::move(e));
    return out;
  }();
  return entries;
}

std::string anchor_for(std::string_view item) {
  std::string id(item);
  if (const auto paren = id.find('('); paren != std::string::npos) id.erase(paren);
  const auto& a = anchors();
  auto it = a.find(id);
  return it == a.end() ? std::string("plumbing") : it->second;
}

std::optional<ParamType> param_type(std::string_view name) {
  for (const auto& k : check_kinds()) {
    for (const auto& p : k.params) {
      if (p.name == name) return p.type;
    }
  }
  return std::nullopt;
}

std::vector<FamilyCell> parse_cells(std::string_view text) {
  std::vector<FamilyCell> out;
  std::istringstream in{std::string(text)};
  std::string w;
  while (in >> w) {
    const auto comma = w.find(',');
    if (comma == std::string::npos) throw ConfigError("expected lambda,mu but got '" + w + "'");
    out.push_back({parse_rational(w.substr(0, comma)), parse_rational(w.substr(comma + 1))});
  }
  return out;
}

std::vector<CheckRecord> run_check(const Scenario& s, const CheckSpec& spec, const VerifyContext& ctx) {
  const std::string& k = spec.kind;
  auto conn = [&](const std::string& key = "connection") -> const Connection& { return get(s.connections, spec, key); };
  auto endo = [&](const std::string& key = "structure") -> const EndoField& { return get(s.endos, spec, key); };
  auto metric = [&] () -> const MetricField& { return get(s.metrics, spec, "metric"); };
  auto tensor = [&]() -> const Tensor12Field& { return get(s.tensors, spec, "tensor"); };
  auto form = [&]() -> const OneFormField& { return get(s.forms, spec, "form"); };
  auto pair = [&]() -> const ProjectorPair& { return get(s.pairs, spec, "pair"); };
  auto dist = [&]() -> const Distribution& { return get(s.distributions, spec, "distribution"); };

  if (k == "almost_product") return {check_almost_product(endo(), ctx.points, ctx.tol)};
  if (k == "metric_compat") return {metric_compat_residual(metric(), endo(), ctx.points, ctx.tol)};
  if (k == "connection_axioms") {
    return {leibniz_check(conn(), ctx), direction_linearity_check(conn(), ctx),
            torsion_tensoriality_check(conn(), ctx), curvature_tensoriality_check(conn(), ctx)};
  }
  if (k == "torsion_free") return {torsion_free_check(conn(), ctx)};
  if (k == "flat") return {flatness_check(conn(), ctx)};
  if (k == "metric_connection") return {metricity_check(conn(), metric(), ctx)};
  if (k == "parallel") return {parallel_check(conn(), endo(), ctx)};
  if (k == "equal") return {equality_check(conn(), conn("other"), ctx, "connection.equal")};
  if (k == "tensor_axioms") return {tensoriality_check(tensor(), ctx)};
  if (k == "projector") return projector_suite(conn(), endo(), tensor(), ctx);
  if (k == "conjugate") return conjugate_suite(conn(), endo(), get_opt(s.metrics, spec, "metric"), ctx);
  if (k == "levi_civita") {
    return levi_civita_suite(metric(), get_opt(s.endos, spec, "structure"), get_opt(s.connections, spec, "other"),
                             ctx);
  }
  if (k == "recurrent") {
    const auto mode = spec.params.at("mode") == "identity" ? RecurrenceMode::IdentityRecurrent
                                                            : RecurrenceMode::Recurrent;
    return recurrent_suite(conn(), endo(), form(), mode, ctx);
  }
  if (k == "pencil") return pencil_suite(conn(), get(s.pencils, spec, "pencil"), form(), ctx);
  if (k == "kirichenko") return kirichenko_suite(conn(), endo(), ctx);
  if (k == "projective") return projective_suite(conn(), endo(), form(), ctx);
  if (k == "invariant") return {invariance_check(dist(), endo(), ctx)};
  if (k == "restricts") return {restriction_check(conn(), dist(), ctx)};
  if (k == "geodesic") return {geodesic_invariance_check(conn(), dist(), ctx)};
  if (k == "conjugate_restriction") return conjugate_restriction_suite(conn(), endo(), dist(), ctx);
  if (k == "pair") return projector_pair_suite(conn(), pair(), ctx);
  if (k == "involutivity") return involutivity_suite(conn(), pair(), ctx);
  if (k == "duality") return duality_suite(conn(), endo(), tensor(), ctx);
  if (k == "family") return family_suite(conn(), endo(), ctx);
  if (k == "family_sweep") return family_sweep(conn(), endo(), parse_cells(spec.params.at("cells")), ctx);
  if (k == "generalized") {
    const auto it = spec.params.find("membership");
    return generalized_suite(conn(), endo(), tensor(),
                             it == spec.params.end() ? std::vector<FamilyCell>{} : parse_cells(it->second), ctx);
  }
  throw ConfigError("unknown check kind '" + k + "'");
}

}  // namespace pcc
