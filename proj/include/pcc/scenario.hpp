#pragma once

#include "pcc/conjugation.hpp"
#include "pcc/distributions.hpp"
#include "pcc/generalized.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pcc {

/// Every problem found while loading a scenario, each prefixed with its line.
class ScenarioError : public ConfigError {
 public:
  explicit ScenarioError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

struct CheckSpec {
  std::string label;
  std::string kind;
  std::map<std::string, std::string> params;
  /// Items that must come out above tolerance (and at least min_residual).
  std::vector<std::string> expect_fail;
  double min_residual = 0.0;
  int line = 0;
};

struct Scenario {
  std::string name;
  Chart chart;
  std::uint64_t seed = 1;
  int count = 200;
  double tol = 1e-9;
  /// Vector fields used as test directions in addition to the coordinate frame.
  std::vector<std::string> frames;

  std::map<std::string, VectorField> vectors;
  std::map<std::string, OneFormField> forms;
  std::map<std::string, EndoField> endos;
  std::map<std::string, MetricField> metrics;
  std::map<std::string, Tensor12Field> tensors;
  std::map<std::string, Connection> connections;
  std::map<std::string, ProjectorPair> pairs;
  std::map<std::string, Distribution> distributions;
  std::map<std::string, Pencil> pencils;
  std::vector<CheckSpec> checks;
};

/// Parses and validates a scenario. Throws ScenarioError listing every
/// problem: syntax, unresolved or cyclic references, dimension mismatches,
/// structures with E^2 != I, non-positive Riemannian metrics and invalid
/// projector pairs at the sample points, and unknown check kinds or
/// parameters.
Scenario load_scenario(std::string_view text, std::string name = "scenario");
Scenario load_scenario_file(const std::filesystem::path& path);

/// Integer, decimal or p/q, reduced.
Rational parse_rational(std::string_view text);

}  // namespace pcc
