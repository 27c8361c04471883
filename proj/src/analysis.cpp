#include "ibptc/analysis.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "ibptc/parallel.hpp"

namespace ibptc {

namespace {

// Frames per scheduling chunk. The stopping rule is evaluated only at chunk
// boundaries, so the set of simulated frames is a fixed function of the
// counters, never of the worker count.
constexpr long kChunkFrames = 8;

std::uint64_t point_seed(std::uint64_t master, std::size_t point_index) {
  return mix64(master ^ static_cast<std::uint64_t>(point_index + 1));
}

// log2(1 + e^t) without overflow.
double softplus2(double t) {
  constexpr double kInvLn2 = 1.4426950408889634074;
  if (t > 0) return t * kInvLn2 + std::log1p(std::exp(-t)) * kInvLn2;
  return std::log1p(std::exp(t)) * kInvLn2;
}

}  // namespace

BitVec random_info_bits(long n, std::uint64_t seed, std::uint64_t trial) {
  BitVec bits(n);
  for (long i = 0; i < n; ++i)
    bits[i] = bit_sample(seed, trial, static_cast<std::uint64_t>(RngLane::Data),
                         static_cast<std::uint64_t>(i));
  return bits;
}

ChannelLanes transmit_codeword(const StreamCodeword& cw, const TurboCodec& codec,
                               const ChannelConfig& ch, std::uint64_t trial) {
  const double sigma_sq = ch.noise_variance();
  auto lane = [&](const BitVec& bits, RngLane rl) {
    return to_llr(transmit(modulate(bits), ch, trial, rl), sigma_sq);
  };
  ChannelLanes out;
  out.systematic = lane(cw.systematic, RngLane::Systematic);
  out.parity1 = lane(cw.parity1, RngLane::Parity1);
  out.parity2 = lane(cw.parity2, RngLane::Parity2);
  const CodeRate rate = codec.config().rate;
  for (std::size_t x = 0; x < out.parity1.size(); ++x) {
    if (!parity1_transmitted(rate, static_cast<long>(x))) out.parity1[x] = 0.0;
    if (!parity2_transmitted(rate, static_cast<long>(x))) out.parity2[x] = 0.0;
  }
  out.tail_sys1 = lane(cw.tail_sys1, RngLane::TailSys1);
  out.tail_par1 = lane(cw.tail_par1, RngLane::TailPar1);
  out.tail_sys2 = lane(cw.tail_sys2, RngLane::TailSys2);
  out.tail_par2 = lane(cw.tail_par2, RngLane::TailPar2);
  return out;
}

std::vector<BerResult> run_ber(const TurboConfig& cfg,
                               const std::vector<double>& ebn0_grid,
                               const StopRule& stop, std::uint64_t master_seed) {
  require(!ebn0_grid.empty(), "ebn0 grid is empty");
  require(stop.max_blocks >= 1 && stop.min_bit_errors >= 1, "stop rule is not sane");
  const TurboCodec codec(cfg);
  const long n_info = codec.info_bits();
  const int blocks_per_frame = codec.num_blocks();
  const long max_frames =
      (stop.max_blocks + blocks_per_frame - 1) / blocks_per_frame;

  struct FrameOutcome {
    long bit_errors = 0;
    bool frame_error = false;
  };

  std::vector<BerResult> results;
  results.reserve(ebn0_grid.size());

  for (std::size_t pi = 0; pi < ebn0_grid.size(); ++pi) {
    const auto t_start = std::chrono::steady_clock::now();
    ChannelConfig ch;
    ch.ebn0_db = ebn0_grid[pi];
    ch.code_rate = codec.effective_rate();
    ch.seed = point_seed(master_seed, pi);

    BerResult r;
    r.ebn0_db = ebn0_grid[pi];
    r.mean_iterations = cfg.iterations;

    std::vector<FrameOutcome> slots(kChunkFrames);
    long frame = 0;
    while (frame < max_frames && r.bit_errors < stop.min_bit_errors) {
      const long batch = std::min(kChunkFrames, max_frames - frame);
      parallel_for(batch, [&](long k) {
        const std::uint64_t trial = static_cast<std::uint64_t>(frame + k);
        const BitVec info = random_info_bits(n_info, ch.seed, trial);
        const StreamCodeword cw = codec.encode(info);
        const ChannelLanes lanes = transmit_codeword(cw, codec, ch, trial);
        const DecodeResult res = codec.decode(lanes, &info);
        long errs = 0;
        for (long i = 0; i < n_info; ++i) errs += res.bits[i] != info[i];
        slots[k] = {errs, errs > 0};
      });
      for (long k = 0; k < batch; ++k) {
        r.bit_errors += slots[k].bit_errors;
        r.frame_errors += slots[k].frame_error ? 1 : 0;
      }
      frame += batch;
      r.frames = frame;
      r.bits = frame * n_info;
    }

    r.ber = r.bits > 0 ? static_cast<double>(r.bit_errors) / r.bits : 0.0;
    r.fer = r.frames > 0 ? static_cast<double>(r.frame_errors) / r.frames : 0.0;
    r.undersampled = r.bit_errors < stop.min_bit_errors;
    r.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    results.push_back(r);
  }
  return results;
}

double j_function(double sigma) {
  require(sigma >= 0.0 && std::isfinite(sigma), "sigma must be finite and >= 0");
  if (sigma == 0.0) return 0.0;
  // 1 - E[log2(1 + e^-L)], L ~ N(sigma^2/2, sigma^2); Simpson over z in
  // [-10, 10] standard deviations.
  constexpr int kSteps = 4000;  // even
  constexpr double kZmax = 10.0;
  const double h = 2.0 * kZmax / kSteps;
  const double mu = 0.5 * sigma * sigma;
  auto f = [&](double z) {
    const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
    return phi * softplus2(-(mu + sigma * z));
  };
  double acc = f(-kZmax) + f(kZmax);
  for (int i = 1; i < kSteps; ++i) {
    acc += f(-kZmax + i * h) * ((i % 2) ? 4.0 : 2.0);
  }
  const double expected = acc * h / 3.0;
  return std::min(1.0, std::max(0.0, 1.0 - expected));
}

double j_inverse(double target) {
  require(target >= 0.0 && target < 1.0, "J target must be in [0, 1)");
  if (target == 0.0) return 0.0;
  double lo = 0.0, hi = 100.0;
  require(j_function(hi) >= target, "J target too close to 1");
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (j_function(mid) < target) lo = mid; else hi = mid;
  }
  const double sigma = 0.5 * (lo + hi);
  if (std::abs(j_function(sigma) - target) > 1e-6)
    throw std::runtime_error("J inversion did not converge to tolerance");
  return sigma;
}

double mutual_information_estimate(const std::vector<double>& llr,
                                   const BitVec& truth) {
  require(llr.size() == truth.size() && !llr.empty(),
          "mutual information estimator needs matched non-empty lanes");
  double acc = 0.0;
  for (std::size_t i = 0; i < llr.size(); ++i) {
    const double lx = truth[i] ? -llr[i] : llr[i];
    acc += softplus2(-lx);
  }
  const double ie = 1.0 - acc / static_cast<double>(llr.size());
  return std::min(1.0, std::max(0.0, ie));
}

std::vector<ExitPoint> exit_chart(const TurboConfig& cfg, double ebn0_db,
                                  const std::vector<double>& ia_grid,
                                  long samples_per_point,
                                  std::uint64_t master_seed) {
  require(samples_per_point >= 1, "samples_per_point must be >= 1");
  TurboConfig probe_cfg = cfg;
  probe_cfg.iterations = 1;
  const TurboCodec codec(probe_cfg);
  const long n_info = codec.info_bits();
  const long frames = (samples_per_point + n_info - 1) / n_info;

  std::vector<ExitPoint> points;
  points.reserve(ia_grid.size() * 2);

  for (std::size_t pi = 0; pi < ia_grid.size(); ++pi) {
    const double ia = ia_grid[pi];
    require(ia >= 0.0 && ia < 1.0, "ia grid values must be in [0, 1)");
    const double sigma_a = j_inverse(ia);
    const double mu_a = 0.5 * sigma_a * sigma_a;

    ChannelConfig ch;
    ch.ebn0_db = ebn0_db;
    ch.code_rate = codec.effective_rate();
    ch.seed = point_seed(master_seed, pi);

    // Pool extrinsics across frames, one decode per constituent per frame.
    std::vector<double> pool[2];
    BitVec pool_truth[2];
    for (int c = 0; c < 2; ++c) {
      pool[c].reserve(frames * n_info);
      pool_truth[c].reserve(frames * n_info);
    }

    for (long frame = 0; frame < frames; ++frame) {
      const auto trial = static_cast<std::uint64_t>(frame);
      const BitVec info = random_info_bits(n_info, ch.seed, trial);
      const StreamCodeword cw = codec.encode(info);
      const ChannelLanes lanes = transmit_codeword(cw, codec, ch, trial);

      // Synthetic a priori consistent with the true bits of each domain.
      const auto& inv = codec.stream_perm().perm.inverse;
      BitVec info2(n_info);
      for (long x = 0; x < n_info; ++x) info2[x] = info[inv[x]];

      for (int c = 0; c < 2; ++c) {
        const BitVec& domain_truth = (c == 0) ? info : info2;
        const RngLane lane = (c == 0) ? RngLane::Apriori1 : RngLane::Apriori2;
        std::vector<double> apriori(n_info);
        for (long i = 0; i < n_info; ++i) {
          const double x = domain_truth[i] ? -1.0 : 1.0;
          apriori[i] = mu_a * x +
                       sigma_a * gaussian_sample(ch.seed, trial,
                                                 static_cast<std::uint64_t>(lane),
                                                 static_cast<std::uint64_t>(i));
        }
        const std::vector<double> ext =
            codec.constituent_extrinsics(lanes, apriori, c);
        pool[c].insert(pool[c].end(), ext.begin(), ext.end());
        pool_truth[c].insert(pool_truth[c].end(), domain_truth.begin(),
                             domain_truth.end());
      }
    }

    for (int c = 0; c < 2; ++c) {
      ExitPoint p;
      p.ia = ia;
      p.ie = mutual_information_estimate(pool[c], pool_truth[c]);
      p.snr_db = ebn0_db;
      p.constituent = c;
      points.push_back(p);
    }
  }
  return points;
}

namespace {

struct PooledMoments {
  double n = 0, sum = 0, sq = 0;
  void add(double count, double mean, double var) {
    n += count;
    sum += count * mean;
    sq += count * (var + mean * mean);
  }
  double mean() const { return n > 0 ? sum / n : 0.0; }
  double var() const {
    if (n <= 0) return 0.0;
    const double m = mean();
    return std::max(0.0, sq / n - m * m);
  }
};

}  // namespace

static EvolutionTrace evolve(const TurboConfig& cfg, double ebn0_db, int trials,
                             std::uint64_t master_seed) {
  require(trials >= 1, "trials must be >= 1");
  const TurboCodec codec(cfg);
  const long n_info = codec.info_bits();

  ChannelConfig ch;
  ch.ebn0_db = ebn0_db;
  ch.code_rate = codec.effective_rate();
  ch.seed = point_seed(master_seed, 0);

  std::vector<DecodeDiagnostics> slots(trials);
  parallel_for(trials, [&](long t) {
    const auto trial = static_cast<std::uint64_t>(t);
    const BitVec info = random_info_bits(n_info, ch.seed, trial);
    const StreamCodeword cw = codec.encode(info);
    const ChannelLanes lanes = transmit_codeword(cw, codec, ch, trial);
    slots[t] = codec.decode(lanes, &info).diagnostics;
  });

  EvolutionTrace trace;
  const int iters = cfg.iterations;
  for (int c = 0; c < 2; ++c) {
    trace.snr[c].resize(iters);
    trace.corr[c].resize(iters);
  }
  const double count = static_cast<double>(n_info);
  for (int it = 0; it < iters; ++it) {
    for (int c = 0; c < 2; ++c) {
      PooledMoments adj, apr, ext;
      double cross_sum = 0.0, cross_n = 0.0;
      for (int t = 0; t < trials; ++t) {  // fixed trial order: deterministic
        const IterationStats& st = slots[t].iterations[it];
        adj.add(count, st.adj_mean[c], st.adj_var[c]);
        apr.add(count, st.apr_mean[c], st.apr_var[c]);
        ext.add(count, st.ext_mean[c], st.ext_var[c]);
        cross_sum += count * st.cross_mean[c];
        cross_n += count;
      }
      const double m = adj.mean(), v = adj.var();
      trace.snr[c][it] = (v > 0.0) ? std::min(m * m / v, kSnrCap) : kSnrCap;
      trace.corr[c][it] = pearson_from_moments(
          apr.mean(), apr.var(), ext.mean(), ext.var(), cross_sum / cross_n);
    }
  }
  return trace;
}

EvolutionTrace snr_evolution(const TurboConfig& cfg, double ebn0_db, int trials,
                             std::uint64_t master_seed) {
  return evolve(cfg, ebn0_db, trials, master_seed);
}

EvolutionTrace extrinsic_covariance(const TurboConfig& cfg, double ebn0_db,
                                    int trials, std::uint64_t master_seed) {
  return evolve(cfg, ebn0_db, trials, master_seed);
}

}  // namespace ibptc
