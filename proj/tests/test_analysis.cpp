#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>

#include "ibptc/analysis.hpp"
#include "oracles.hpp"

using namespace ibptc;

namespace {

TurboConfig small_config(int L, int S, int B, int iters = 5) {
  TurboConfig cfg;
  cfg.interleaver.intra = IntraKind::SRandom;
  cfg.interleaver.seed = 3;
  cfg.interleaver.ibp = {L, S, 0, 1, B, BoundaryMode::Wrap};
  cfg.iterations = iters;
  return cfg;
}

}  // namespace

TEST_CASE("noiseless grid point has zero errors and is flagged undersampled") {
  const TurboConfig cfg = small_config(24, 1, 4, 2);
  const double inf = std::numeric_limits<double>::infinity();
  const auto res = run_ber(cfg, {inf}, {20, 100}, 7);
  REQUIRE(res.size() == 1);
  CHECK(res[0].bit_errors == 0);
  CHECK(res[0].ber == 0.0);
  CHECK(res[0].frame_errors == 0);
  CHECK(res[0].fer == 0.0);
  CHECK(res[0].undersampled);
  CHECK(res[0].bits == res[0].frames * cfg.interleaver.ibp.block_len *
                           cfg.interleaver.ibp.num_blocks);
}

TEST_CASE("run_ber is deterministic and independent of the worker count") {
  const TurboConfig cfg = small_config(32, 1, 4, 3);
  setenv("IBPTC_THREADS", "1", 1);
  const auto a = run_ber(cfg, {0.0, 1.0}, {40, 25}, 11);
  setenv("IBPTC_THREADS", "3", 1);
  const auto b = run_ber(cfg, {0.0, 1.0}, {40, 25}, 11);
  setenv("IBPTC_THREADS", "0", 1);
  const auto c = run_ber(cfg, {0.0, 1.0}, {40, 25}, 11);
  unsetenv("IBPTC_THREADS");
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].bit_errors == b[i].bit_errors);
    CHECK(a[i].frame_errors == b[i].frame_errors);
    CHECK(a[i].bits == b[i].bits);
    CHECK(a[i].ber == b[i].ber);
    CHECK(a[i].bit_errors == c[i].bit_errors);
    CHECK(a[i].mean_iterations == c[i].mean_iterations);
  }
}

TEST_CASE("stopping rule: early stop on errors, budget cap otherwise") {
  const TurboConfig cfg = small_config(32, 0, 4, 2);
  // At a very low SNR, 10 errors arrive almost immediately.
  const auto low = run_ber(cfg, {-2.0}, {400, 10}, 5);
  CHECK(low[0].bit_errors >= 10);
  CHECK_FALSE(low[0].undersampled);
  CHECK(low[0].frames < 100);
  // At a high SNR the budget is exhausted first.
  const auto high = run_ber(cfg, {8.0}, {12, 1000000}, 5);
  CHECK(high[0].undersampled);
  CHECK(high[0].frames == 3);  // 12 blocks / 4 per frame
}

TEST_CASE("BER decreases with Eb/N0 on well-sampled points") {
  const TurboConfig cfg = small_config(48, 1, 4, 5);
  const auto res = run_ber(cfg, {-1.0, 0.5, 2.0}, {600, 150}, 13);
  for (std::size_t i = 0; i + 1 < res.size(); ++i) {
    if (res[i].bit_errors >= 100 && res[i + 1].bit_errors >= 100)
      CHECK(res[i].ber >= res[i + 1].ber);
  }
  CHECK(res[0].ber > res[2].ber);  // end-to-end drop across 3 dB
}

TEST_CASE("J function: limits, monotonicity, and round trip") {
  CHECK(j_function(1e-9) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(j_function(50.0) > 0.9999);
  double prev = -1.0;
  for (double s = 0.1; s < 10.0; s += 0.3) {
    const double v = j_function(s);
    CHECK(v > prev);
    prev = v;
  }
  for (double v = 0.1; v < 0.95; v += 0.1) {
    CHECK(j_function(j_inverse(v)) == doctest::Approx(v).epsilon(1e-4));
  }
}

TEST_CASE("J function agrees with a Monte-Carlo oracle") {
  for (double sigma : {0.7, 1.5, 3.0}) {
    const double mc = oracles::mc_j_function(sigma, 2000000, 99);
    CHECK(std::abs(j_function(sigma) - mc) < 3e-3);
  }
}

TEST_CASE("ie estimator reproduces J on synthetic consistent-Gaussian LLRs") {
  std::mt19937_64 gen(17);
  for (double sigma : {0.8, 1.6, 2.8}) {
    const long n = 100000;
    BitVec truth(n);
    std::vector<double> llr(n);
    std::normal_distribution<double> nd(0.0, sigma);
    for (long i = 0; i < n; ++i) {
      truth[i] = static_cast<Bit>(gen() & 1u);
      const double x = truth[i] ? -1.0 : 1.0;
      llr[i] = sigma * sigma / 2.0 * x + nd(gen);
    }
    CHECK(std::abs(mutual_information_estimate(llr, truth) - j_function(sigma)) < 0.01);
  }
}

TEST_CASE("exit chart: strong a priori saturates ie; output is structured") {
  const TurboConfig cfg = small_config(32, 1, 4, 1);
  const auto pts = exit_chart(cfg, 0.5, {0.0, 0.5, 0.999}, 20000, 23);
  REQUIRE(pts.size() == 6);  // 3 grid points x 2 constituents
  for (const auto& p : pts) {
    CHECK(p.ia >= 0.0);
    CHECK(p.ie >= 0.0);
    CHECK(p.ie <= 1.0);
    CHECK(p.snr_db == 0.5);
  }
  // ia -> 1 limit. At 0.5 dB the right endpoint stays below 1: the bit's own
  // a priori is excluded from its extrinsic, so ie is capped by the channel's
  // parity evidence. A stronger channel lifts the endpoint toward 1.
  CHECK(pts[4].ia == 0.999);
  CHECK(pts[4].ie >= 0.95);
  CHECK(pts[5].ie >= 0.95);
  const auto hi = exit_chart(cfg, 3.0, {0.999}, 20000, 23);
  CHECK(hi[0].ie >= 0.99);
  CHECK(hi[1].ie >= 0.99);
  // More a priori information never hurts a constituent decoder.
  CHECK(pts[2].ie > pts[0].ie);
}

TEST_CASE("exit chart rejects out-of-range grids") {
  const TurboConfig cfg = small_config(32, 1, 4, 1);
  CHECK_THROWS_AS(exit_chart(cfg, 0.5, {0.0, 1.0}, 1000, 1), std::invalid_argument);
  CHECK_THROWS_AS(exit_chart(cfg, 0.5, {-0.1}, 1000, 1), std::invalid_argument);
}

TEST_CASE("snr evolution saturates at the cap on a noiseless channel") {
  const TurboConfig cfg = small_config(24, 1, 4, 3);
  const double inf = std::numeric_limits<double>::infinity();
  const EvolutionTrace tr = snr_evolution(cfg, inf, 4, 31);
  for (int c = 0; c < 2; ++c) {
    REQUIRE(tr.snr[c].size() == 3);
    for (double v : tr.snr[c]) CHECK(v == kSnrCap);
  }
}

TEST_CASE("snr evolution grows through the waterfall and traces are sized") {
  const TurboConfig cfg = small_config(48, 1, 5, 4);
  const EvolutionTrace tr = snr_evolution(cfg, 1.0, 30, 17);
  for (int c = 0; c < 2; ++c) {
    REQUIRE(tr.snr[c].size() == 4);
    REQUIRE(tr.corr[c].size() == 4);
    CHECK(tr.snr[c].back() > tr.snr[c].front());
    for (double v : tr.snr[c]) CHECK(v >= 0.0);
    for (double v : tr.corr[c]) CHECK(std::abs(v) <= 1.0 + 1e-12);
  }
}

TEST_CASE("covariance trace: first-iteration constituent 1 is exactly zero") {
  const TurboConfig cfg = small_config(32, 1, 4, 3);
  const EvolutionTrace tr = extrinsic_covariance(cfg, 0.5, 10, 19);
  CHECK(tr.corr[0][0] == 0.0);  // a priori lane is identically zero
  // Later iterations correlate.
  CHECK(tr.corr[0][2] > 0.1);
  CHECK(tr.corr[1][2] > 0.1);
}

TEST_CASE("random_info_bits is deterministic per (seed, trial)") {
  const BitVec a = random_info_bits(256, 5, 7);
  const BitVec b = random_info_bits(256, 5, 7);
  const BitVec c = random_info_bits(256, 5, 8);
  CHECK(a == b);
  CHECK(a != c);
  long ones = 0;
  for (Bit x : a) ones += x;
  CHECK(ones > 96);
  CHECK(ones < 160);
}

TEST_CASE("transmit_codeword keys lanes independently of frame batching") {
  const TurboConfig cfg = small_config(16, 1, 4, 1);
  const TurboCodec codec(cfg);
  const BitVec info = random_info_bits(codec.info_bits(), 3, 0);
  const StreamCodeword cw = codec.encode(info);
  ChannelConfig ch{1.0, codec.effective_rate(), 101};
  const ChannelLanes x = transmit_codeword(cw, codec, ch, 4);
  const ChannelLanes y = transmit_codeword(cw, codec, ch, 4);
  CHECK(x.systematic == y.systematic);
  CHECK(x.parity1 == y.parity1);
  const ChannelLanes z = transmit_codeword(cw, codec, ch, 5);
  CHECK(x.systematic != z.systematic);
}

TEST_CASE("mean_iterations reports the configured schedule") {
  const TurboConfig cfg = small_config(24, 1, 4, 6);
  const auto res = run_ber(cfg, {1.0}, {8, 1000}, 3);
  CHECK(res[0].mean_iterations == 6.0);
}
