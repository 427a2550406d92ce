#pragma once

#include "pcc/fields.hpp"

#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

namespace testing {

inline pcc::VerifyContext context(int dim, int count = 40, std::uint64_t seed = 1, double lo = -1.0,
                                  double hi = 1.0) {
  pcc::VerifyContext ctx;
  ctx.dim = dim;
  ctx.points = pcc::sample_points({seed, count, pcc::Box(dim, {lo, hi})});
  ctx.frames = pcc::coordinate_frames(dim);
  return ctx;
}

inline const pcc::CheckRecord& find(const std::vector<pcc::CheckRecord>& rs, const std::string& item) {
  auto it = std::find_if(rs.begin(), rs.end(), [&](const pcc::CheckRecord& r) { return r.item == item; });
  REQUIRE_MESSAGE(it != rs.end(), "missing item " << item);
  return *it;
}

/// Every record passes, except those reported as informational.
inline void require_all_pass(const std::vector<pcc::CheckRecord>& rs) {
  for (const auto& r : rs) {
    if (r.status == pcc::Status::Info) continue;
    CHECK_MESSAGE(r.status == pcc::Status::Pass, r.item << " " << pcc::to_string(r.status) << " residual "
                                                        << r.residual << " " << r.detail);
  }
}

/// Nothing fails; skipped and informational records are allowed.
inline void require_no_failure(const std::vector<pcc::CheckRecord>& rs) {
  for (const auto& r : rs) {
    CHECK_MESSAGE((r.status != pcc::Status::Fail && r.status != pcc::Status::Inconclusive),
                  r.item << " " << pcc::to_string(r.status) << " residual " << r.residual << " " << r.detail);
  }
}

}  // namespace testing
