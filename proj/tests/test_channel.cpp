#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "ibptc/channel.hpp"

using namespace ibptc;

TEST_CASE("modulation maps bit 0 to +1") {
  CHECK(modulate({0, 1, 0}) == std::vector<double>{1.0, -1.0, 1.0});
  CHECK(modulate(BitVec(5, 0)) == std::vector<double>(5, 1.0));
  // Threshold demodulation round trip.
  const BitVec bits{1, 0, 0, 1, 1, 0};
  const auto sym = modulate(bits);
  for (std::size_t i = 0; i < bits.size(); ++i)
    CHECK((sym[i] < 0.0 ? 1 : 0) == bits[i]);
}

TEST_CASE("noise variance formula") {
  ChannelConfig cfg{0.0, 1.0 / 3.0, 1};
  CHECK(cfg.noise_variance() == doctest::Approx(1.5).epsilon(1e-12));
  cfg.ebn0_db = 10.0;
  cfg.code_rate = 0.5;
  CHECK(cfg.noise_variance() == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("config validation") {
  ChannelConfig bad{0.0, 0.0, 1};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.code_rate = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  ChannelConfig nan_cfg{std::nan(""), 0.5, 1};
  CHECK_THROWS_AS(nan_cfg.validate(), std::invalid_argument);
  ChannelConfig inf_cfg{std::numeric_limits<double>::infinity(), 0.5, 1};
  CHECK_NOTHROW(inf_cfg.validate());
  CHECK(inf_cfg.noise_variance() == 0.0);
}

TEST_CASE("noiseless mode is exact") {
  ChannelConfig cfg{std::numeric_limits<double>::infinity(), 0.5, 3};
  const std::vector<double> x{1.0, -1.0, 1.0, 1.0};
  CHECK(transmit(x, cfg, 0, RngLane::Systematic) == x);
}

TEST_CASE("noise sample statistics match sigma^2 within 1%") {
  ChannelConfig cfg{0.0, 1.0 / 3.0, 42};
  const double s2 = cfg.noise_variance();
  const long n = 1000000;
  const std::vector<double> zeros(n, 0.0);
  const auto y = transmit(zeros, cfg, 0, RngLane::Parity1);
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n - 1);
  CHECK(std::abs(var - s2) / s2 < 0.01);
  CHECK(std::abs(mean) < 0.01);
}

TEST_CASE("LLR formula") {
  CHECK(to_llr(1.0, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(to_llr(0.0, 2.0) == 0.0);
  CHECK(to_llr(-0.5, 1.5) == doctest::Approx(-2.0 / 3.0).epsilon(1e-12));
  // sigma^2 = 0 saturates with the sign of y.
  CHECK(to_llr(0.25, 0.0) == kLlrClamp);
  CHECK(to_llr(-3.0, 0.0) == -kLlrClamp);
  CHECK(to_llr(0.0, 0.0) == 0.0);
  // Large magnitudes clamp.
  CHECK(to_llr(100.0, 0.01) == kLlrClamp);
}

TEST_CASE("LLR consistency: mean = sigma_L^2 / 2 with sigma_L^2 = 4/sigma^2") {
  ChannelConfig cfg{1.0, 0.5, 7};
  const double s2 = cfg.noise_variance();
  const long n = 1000000;
  // All-zero codeword: transmit +1 symbols.
  const std::vector<double> ones(n, 1.0);
  const auto y = transmit(ones, cfg, 3, RngLane::Systematic);
  const auto llr = to_llr(y, s2);
  double mean = 0.0;
  for (double v : llr) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : llr) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n - 1);
  const double sig_l2 = 4.0 / s2;
  CHECK(std::abs(mean - sig_l2 / 2.0) / (sig_l2 / 2.0) < 0.02);
  CHECK(std::abs(var - sig_l2) / sig_l2 < 0.02);
}

TEST_CASE("noise streams are independent of batching") {
  ChannelConfig cfg{2.0, 0.5, 99};
  const std::vector<double> x(64, 1.0);
  const auto whole = transmit(x, cfg, 5, RngLane::Parity2);
  const std::vector<double> x1(24, 1.0), x2(40, 1.0);
  auto part = transmit(x1, cfg, 5, RngLane::Parity2, 0);
  const auto rest = transmit(x2, cfg, 5, RngLane::Parity2, 24);
  part.insert(part.end(), rest.begin(), rest.end());
  CHECK(whole == part);
}

TEST_CASE("distinct seeds, trials and lanes give distinct streams") {
  const std::vector<double> x(16, 0.0);
  ChannelConfig a{0.0, 0.5, 1}, b{0.0, 0.5, 2};
  CHECK(transmit(x, a, 0, RngLane::Systematic) != transmit(x, b, 0, RngLane::Systematic));
  CHECK(transmit(x, a, 0, RngLane::Systematic) != transmit(x, a, 1, RngLane::Systematic));
  CHECK(transmit(x, a, 0, RngLane::Systematic) != transmit(x, a, 0, RngLane::Parity1));
  CHECK(transmit(x, a, 0, RngLane::Systematic) == transmit(x, a, 0, RngLane::Systematic));
}

TEST_CASE("gaussian sampler covers both Box-Muller halves deterministically") {
  const double g0 = gaussian_sample(11, 0, 0, 0);
  const double g1 = gaussian_sample(11, 0, 0, 1);
  CHECK(g0 == gaussian_sample(11, 0, 0, 0));
  CHECK(g1 != g0);
  CHECK(std::isfinite(g0));
  CHECK(std::isfinite(g1));
}
