#include "pcc/sampling.hpp"

#include <cmath>
#include <random>

namespace pcc {

std::vector<Point> sample_points(const SamplePlan& plan) {
  if (plan.count < 1) throw ConfigError("sample count must be positive");
  if (plan.box.empty()) throw ConfigError("sample box is empty");
  for (const auto& iv : plan.box) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi)) {
      throw ConfigError("sample box has an empty or degenerate interval");
    }
  }

  std::mt19937_64 rng(plan.seed);
  // (k + 0.5) / 2^52 with k < 2^52 lies in the open interval (0, 1).
  auto unit = [&rng] { return (static_cast<double>(rng() >> 12) + 0.5) * 0x1.0p-52; };

  std::vector<Point> points;
  points.reserve(plan.count);
  for (int s = 0; s < plan.count; ++s) {
    Point p(plan.box.size());
    for (std::size_t i = 0; i < plan.box.size(); ++i) {
      const auto& iv = plan.box[i];
      double x = iv.lo + unit() * (iv.hi - iv.lo);
      while (!(x > iv.lo && x < iv.hi)) x = iv.lo + unit() * (iv.hi - iv.lo);
      p[i] = x;
    }
    points.push_back(std::move(p));
  }
  return points;
}

}  // namespace pcc
