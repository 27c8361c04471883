#include "ibptc/channel.hpp"

#include <cmath>
#include <limits>

namespace ibptc {

void ChannelConfig::validate() const {
  require(code_rate > 0.0 && code_rate <= 1.0, "code_rate must be in (0, 1]");
  // +inf is the noiseless (sigma^2 = 0) mode; NaN and -inf are rejected.
  require(!std::isnan(ebn0_db) && ebn0_db != -std::numeric_limits<double>::infinity(),
          "ebn0_db must be a number or +inf");
}

double ChannelConfig::noise_variance() const {
  validate();
  return 1.0 / (2.0 * code_rate * std::pow(10.0, ebn0_db / 10.0));
}

std::vector<double> modulate(const BitVec& bits) {
  std::vector<double> x(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) x[i] = bits[i] ? -1.0 : 1.0;
  return x;
}

std::vector<double> transmit(const std::vector<double>& symbols,
                             const ChannelConfig& cfg, std::uint64_t trial,
                             RngLane lane, std::uint64_t index0) {
  const double sigma = std::sqrt(cfg.noise_variance());
  std::vector<double> y(symbols.size());
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    y[i] = symbols[i] +
           sigma * gaussian_sample(cfg.seed, trial,
                                   static_cast<std::uint64_t>(lane), index0 + i);
  }
  return y;
}

double to_llr(double y, double sigma_sq) {
  if (sigma_sq <= 0.0) {
    if (y > 0.0) return kLlrClamp;
    if (y < 0.0) return -kLlrClamp;
    return 0.0;
  }
  return clamp_llr(2.0 * y / sigma_sq);
}

std::vector<double> to_llr(const std::vector<double>& y, double sigma_sq) {
  std::vector<double> l(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) l[i] = to_llr(y[i], sigma_sq);
  return l;
}

}  // namespace ibptc
