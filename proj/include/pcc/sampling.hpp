#pragma once

#include "pcc/expr.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace pcc {

/// Invalid configuration (bad box, bad counts, unresolved names, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

using Box = std::vector<Interval>;

struct SamplePlan {
  std::uint64_t seed = 1;
  int count = 200;
  Box box;
};

/// Deterministic points strictly inside the box. The stream is a 64-bit
/// Mersenne twister, whose output sequence is fixed by the standard, mapped to
/// the open unit interval without library distributions.
std::vector<Point> sample_points(const SamplePlan& plan);

}  // namespace pcc
