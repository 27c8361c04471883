#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ibptc {

using Bit = std::uint8_t;
using BitVec = std::vector<Bit>;

// All LLRs are natural-log domain with LLR = ln P(bit=0) / P(bit=1),
// so positive means bit 0 is more likely. Lanes are clamped to +/-kLlrClamp
// on ingest; metrics are renormalized per trellis step.
inline constexpr double kLlrClamp = 50.0;

// Stand-in for -infinity in path metrics. Large enough to never win a max,
// small enough that sums of a few of them stay finite.
inline constexpr double kNegMetric = -1e30;

inline double clamp_llr(double v) { return std::clamp(v, -kLlrClamp, kLlrClamp); }

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace ibptc
