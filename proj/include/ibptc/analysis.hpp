#pragma once

#include <cstdint>
#include <vector>

#include "ibptc/channel.hpp"
#include "ibptc/turbo.hpp"

namespace ibptc {

// Degenerate-pool SNR cap: reported when the extrinsic pool has zero (or
// numerically vanishing) variance, e.g. on a noiseless channel.
inline constexpr double kSnrCap = 1e12;

struct StopRule {
  long max_blocks = 1000;      // budget per grid point, in L-bit blocks
  long min_bit_errors = 100;   // stop early once this many errors are seen
};

struct BerResult {
  double ebn0_db = 0.0;
  long bits = 0;
  long bit_errors = 0;
  double ber = 0.0;
  long frames = 0;
  long frame_errors = 0;
  double fer = 0.0;
  double mean_iterations = 0.0;
  double wall_seconds = 0.0;
  bool undersampled = false;  // budget exhausted before min_bit_errors
};

// Deterministic info-bit generator for trial `trial` of a seeded experiment.
BitVec random_info_bits(long n, std::uint64_t seed, std::uint64_t trial);

// Modulates, adds AWGN per lane, converts to LLRs, zeroes punctured
// positions. Lane streams are keyed by RngLane so results are independent of
// batching.
ChannelLanes transmit_codeword(const StreamCodeword& cw, const TurboCodec& codec,
                               const ChannelConfig& ch, std::uint64_t trial);

// Monte-Carlo BER/FER sweep. Frames are simulated in fixed-size chunks and
// reduced in trial order, so results are bit-identical for any worker count.
// Errors are counted on information bits only.
std::vector<BerResult> run_ber(const TurboConfig& cfg,
                               const std::vector<double>& ebn0_grid,
                               const StopRule& stop, std::uint64_t master_seed);

struct ExitPoint {
  double ia = 0.0;
  double ie = 0.0;
  double snr_db = 0.0;  // channel Eb/N0 of the probe
  int constituent = 0;  // 0 = natural order, 1 = permuted order
};

// J(sigma): mutual information of a consistent Gaussian LLR with std sigma.
double j_function(double sigma);
// Inverse by bisection; throws if |J(sigma) - target| > 1e-6 at convergence.
double j_inverse(double target);

// Sample estimator 1 - mean log2(1 + exp(-L*x)), clamped to [0, 1].
double mutual_information_estimate(const std::vector<double>& llr,
                                   const BitVec& truth);

// Single-constituent transfer curve at one channel point: a priori LLRs are
// synthetic consistent-Gaussian with mutual information ia.
std::vector<ExitPoint> exit_chart(const TurboConfig& cfg, double ebn0_db,
                                  const std::vector<double>& ia_grid,
                                  long samples_per_point,
                                  std::uint64_t master_seed);

struct EvolutionTrace {
  // [constituent][iteration]; SNR = squared mean / variance of the pooled
  // sign-adjusted extrinsics, corr = pooled Pearson(a priori, extrinsic).
  std::vector<double> snr[2];
  std::vector<double> corr[2];
};

EvolutionTrace snr_evolution(const TurboConfig& cfg, double ebn0_db, int trials,
                             std::uint64_t master_seed);
EvolutionTrace extrinsic_covariance(const TurboConfig& cfg, double ebn0_db,
                                    int trials, std::uint64_t master_seed);

}  // namespace ibptc
