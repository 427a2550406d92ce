#pragma once

#include "pcc/scenario.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace pcc {

enum class ParamType { Connection, Structure, Metric, Tensor, Form, Pair, Distribution, Pencil, Mode, Cells };

struct ParamSpec {
  std::string name;
  ParamType type;
  bool required = true;
};

/// A check kind usable in a scenario's [check] section.
struct CheckKind {
  std::string name;
  std::string summary;
  std::vector<ParamSpec> params;
  std::vector<std::string> items;  // item ids it reports, catalog order
};

/// One reportable identity with the formula it verifies.
struct CatalogEntry {
  std::string item;
  std::string kind;
  std::string anchor;
};

const std::vector<CheckKind>& check_kinds();
const CheckKind* find_check_kind(std::string_view name);

/// Every item, sorted by id.
const std::vector<CatalogEntry>& catalog();

/// Anchor of an item id; a parenthesised parameter suffix is ignored.
std::string anchor_for(std::string_view item);

/// Type of a named parameter wherever it appears.
std::optional<ParamType> param_type(std::string_view name);

/// Parses "l,m l,m ..." where each entry is a rational.
std::vector<FamilyCell> parse_cells(std::string_view text);

/// Runs one check against a loaded scenario.
std::vector<CheckRecord> run_check(const Scenario& s, const CheckSpec& spec, const VerifyContext& ctx);

}  // namespace pcc
