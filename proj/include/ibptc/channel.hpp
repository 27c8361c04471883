#pragma once

#include <cstdint>
#include <vector>

#include "ibptc/common.hpp"
#include "ibptc/rng.hpp"

namespace ibptc {

// Lane indices for the counter-based noise/data streams. Each (seed, trial,
// lane) triple is an independent stream, so batch boundaries and thread
// counts cannot change any drawn value.
enum class RngLane : std::uint64_t {
  Data = 0,
  Systematic = 1,
  Parity1 = 2,
  Parity2 = 3,
  TailSys1 = 4,
  TailPar1 = 5,
  TailSys2 = 6,
  TailPar2 = 7,
  Apriori1 = 8,
  Apriori2 = 9,
};

struct ChannelConfig {
  double ebn0_db = 0.0;
  double code_rate = 1.0;  // information bits / transmitted bits, tails included
  std::uint64_t seed = 0;

  // sigma^2 = 1 / (2 R 10^(ebn0/10)); code_rate must be in (0, 1].
  double noise_variance() const;
  void validate() const;
};

std::vector<double> modulate(const BitVec& bits);

// y = x + n with n ~ N(0, sigma^2) drawn from the (seed, trial, lane) stream
// starting at counter `index0`.
std::vector<double> transmit(const std::vector<double>& symbols,
                             const ChannelConfig& cfg, std::uint64_t trial,
                             RngLane lane, std::uint64_t index0 = 0);

// Channel LLR 2y/sigma^2 under the bit0 -> +1 mapping, clamped; sigma^2 = 0
// saturates to +/-kLlrClamp with the sign of y.
double to_llr(double y, double sigma_sq);
std::vector<double> to_llr(const std::vector<double>& y, double sigma_sq);

}  // namespace ibptc
