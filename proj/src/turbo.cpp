#include "ibptc/turbo.hpp"

#include <cmath>
#include <cstring>
#include <numeric>
#include <span>

namespace ibptc {

int InterleaverSpec::resolved_spread() const {
  if (spread > 0) return spread;
  // 85% of the feasibility guideline floor(sqrt(L/2)): the randomized
  // construction succeeds essentially always there, while values at or just
  // below the guideline itself are a coin flip for some lengths.
  const int len = ibp.block_len;
  const int s = static_cast<int>(std::floor(0.85 * std::sqrt(len / 2.0)));
  return std::max(1, s);
}

void TurboConfig::validate() const {
  generator.validate();
  interleaver.ibp.validate();
  require(iterations >= 1, "iterations must be >= 1");
  if (interleaver.intra == IntraKind::Rectangular) {
    require(interleaver.rect_rows >= 1 &&
                interleaver.ibp.block_len % interleaver.rect_rows == 0,
            "rect_rows must divide block_len");
  }
  if (interleaver.intra == IntraKind::File) {
    require(!interleaver.path.empty(), "intra file path is empty");
  }
}

bool parity1_transmitted(CodeRate rate, long position) {
  return rate == CodeRate::R13 || (position % 2) == 1;
}

bool parity2_transmitted(CodeRate rate, long position) {
  return rate == CodeRate::R13 || (position % 2) == 0;
}

ReleaseSchedule release_schedule(const TurboConfig& cfg) {
  cfg.validate();
  const int off = 2 * cfg.interleaver.ibp.span * cfg.iterations;
  const int horizon = std::min(off, cfg.interleaver.ibp.num_blocks / 2);
  return ReleaseSchedule{off, horizon};
}

namespace {

Permutation build_intra(const InterleaverSpec& spec) {
  const int L = spec.ibp.block_len;
  switch (spec.intra) {
    case IntraKind::Identity:
      return Permutation::identity(L);
    case IntraKind::Rectangular:
      return make_rectangular(spec.rect_rows, L / spec.rect_rows);
    case IntraKind::File: {
      Permutation p = load_permutation(spec.path);
      require(p.size() == L, "intra permutation file length != block_len");
      return p;
    }
    case IntraKind::SRandom:
      break;
  }
  return make_srandom_ibp(L, spec.resolved_spread(), spec.seed, spec.ibp);
}

}  // namespace

TurboCodec::TurboCodec(const TurboConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  trellis_ = build_trellis(cfg_.generator);
  intra_ = build_intra(cfg_.interleaver);
  stream_ = compose_stream(intra_, cfg_.interleaver.ibp);

  if (cfg_.variant == Variant::TB) {
    // Tail-biting initial state: encoding from state s gives final state
    // A^L s xor f0, where f0 is the zero-state response to the data. The
    // fixed point s = A^L s xor f0 exists for all f0 iff s -> A^L s xor s
    // is a bijection.
    const int L = block_len();
    const int ns = trellis_.num_states;
    std::vector<int> power(ns);  // A^L s: L steps with all-zero data
    for (int s = 0; s < ns; ++s) {
      int st = s;
      for (int t = 0; t < L; ++t) st = trellis_.edges[st][0].next_state;
      power[s] = st;
    }
    tb_init_.assign(ns, -1);
    for (int s = 0; s < ns; ++s) {
      const int f0 = power[s] ^ s;
      require(tb_init_[f0] == -1,
              "tail-biting is singular for this block length (L is a multiple "
              "of the encoder period)");
      tb_init_[f0] = s;
    }
  }
}

long TurboCodec::transmitted_bits() const {
  const long n = info_bits();
  const long parity = (cfg_.rate == CodeRate::R13) ? 2 * n : n;
  long tails = 0;
  if (cfg_.variant == Variant::TP) {
    tails = 4L * cfg_.generator.memory * num_blocks();
  }
  return n + parity + tails;
}

double TurboCodec::effective_rate() const {
  return static_cast<double>(info_bits()) / static_cast<double>(transmitted_bits());
}

BitVec TurboCodec::permute_info(const BitVec& info) const {
  BitVec u2(info.size());
  const auto& inv = stream_.perm.inverse;
  for (std::size_t x = 0; x < info.size(); ++x) u2[x] = info[inv[x]];
  return u2;
}

void TurboCodec::encode_constituent(const BitVec& stream_bits, BitVec& parity,
                                    BitVec& tail_sys, BitVec& tail_par) const {
  const int L = block_len();
  const int B = num_blocks();
  const int m = cfg_.generator.memory;
  parity.clear();
  parity.reserve(stream_bits.size());
  tail_sys.clear();
  tail_par.clear();

  switch (cfg_.variant) {
    case Variant::TP: {
      tail_sys.reserve(static_cast<std::size_t>(B) * m);
      tail_par.reserve(static_cast<std::size_t>(B) * m);
      for (int b = 0; b < B; ++b) {
        auto blk = encode_block(
            std::span<const Bit>(stream_bits.data() + static_cast<std::size_t>(b) * L, L),
            0, true, trellis_);
        parity.insert(parity.end(), blk.parity.begin(), blk.parity.end());
        tail_sys.insert(tail_sys.end(), blk.tail_systematic.begin(),
                        blk.tail_systematic.end());
        tail_par.insert(tail_par.end(), blk.tail_parity.begin(),
                        blk.tail_parity.end());
      }
      break;
    }
    case Variant::TB: {
      for (int b = 0; b < B; ++b) {
        const std::span<const Bit> bits(
            stream_bits.data() + static_cast<std::size_t>(b) * L, L);
        const auto probe = encode_block(bits, 0, false, trellis_);
        const int s0 = tb_init_[probe.final_state];
        auto blk = encode_block(bits, s0, false, trellis_);
        require(blk.final_state == s0, "tail-biting fixed point violated");
        parity.insert(parity.end(), blk.parity.begin(), blk.parity.end());
      }
      break;
    }
    case Variant::C: {
      auto blk = encode_block(std::span<const Bit>(stream_bits), 0, false, trellis_);
      parity = std::move(blk.parity);
      break;
    }
  }
}

StreamCodeword TurboCodec::encode(const BitVec& info) const {
  require(static_cast<long>(info.size()) == info_bits(),
          "info length must equal num_blocks * block_len");
  StreamCodeword cw;
  cw.systematic = info;
  encode_constituent(info, cw.parity1, cw.tail_sys1, cw.tail_par1);
  const BitVec u2 = permute_info(info);
  encode_constituent(u2, cw.parity2, cw.tail_sys2, cw.tail_par2);
  return cw;
}

ChannelLanes TurboCodec::noiseless_lanes(const StreamCodeword& cw,
                                         double magnitude) const {
  auto lane = [&](const BitVec& bits) {
    std::vector<double> l(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i)
      l[i] = bits[i] ? -magnitude : magnitude;
    return l;
  };
  ChannelLanes ch;
  ch.systematic = lane(cw.systematic);
  ch.parity1 = lane(cw.parity1);
  ch.parity2 = lane(cw.parity2);
  for (std::size_t x = 0; x < ch.parity1.size(); ++x) {
    if (!parity1_transmitted(cfg_.rate, static_cast<long>(x))) ch.parity1[x] = 0.0;
    if (!parity2_transmitted(cfg_.rate, static_cast<long>(x))) ch.parity2[x] = 0.0;
  }
  ch.tail_sys1 = lane(cw.tail_sys1);
  ch.tail_par1 = lane(cw.tail_par1);
  ch.tail_sys2 = lane(cw.tail_sys2);
  ch.tail_par2 = lane(cw.tail_par2);
  return ch;
}

namespace {

struct LaneStats {
  double mean = 0, var = 0;
};

// Message moments are taken over the lane as the next constituent ingests
// it, i.e. after the +-kLlrClamp saturation. This keeps the statistics
// finite and makes a noiseless exchange (every magnitude past the clamp) a
// genuinely degenerate pool.
LaneStats moments(const std::vector<double>& v) {
  if (v.empty()) return {};
  double s = 0;
  for (double x : v) s += clamp_llr(x);
  const double mean = s / static_cast<double>(v.size());
  double q = 0;
  for (double x : v) q += (clamp_llr(x) - mean) * (clamp_llr(x) - mean);
  return {mean, q / static_cast<double>(v.size())};
}

LaneStats adjusted_moments(const std::vector<double>& v, const BitVec& truth) {
  std::vector<double> adj(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) adj[i] = truth[i] ? -v[i] : v[i];
  return moments(adj);
}

double cross_moment(const std::vector<double>& a, const std::vector<double>& b) {
  double c = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    c += clamp_llr(a[i]) * clamp_llr(b[i]);
  return c / static_cast<double>(a.size());
}

}  // namespace

double pearson_from_moments(double mean_a, double var_a, double mean_b,
                            double var_b, double mean_ab) {
  if (var_a <= 0.0 || var_b <= 0.0) return 0.0;
  return (mean_ab - mean_a * mean_b) / std::sqrt(var_a * var_b);
}

// One constituent half-iteration over the whole stream, in that
// constituent's own bit order. `post` may be null when the posterior is not
// needed.
void TurboCodec::run_half(const std::vector<double>& sys,
                          const std::vector<double>& par,
                          const std::vector<double>& tsys,
                          const std::vector<double>& tpar,
                          const std::vector<double>& apr,
                          std::vector<double>& ext,
                          std::vector<double>* post) const {
  const int L = block_len();
  const int B = num_blocks();
  const int m = cfg_.generator.memory;

  switch (cfg_.variant) {
    case Variant::TP: {
      SisoInput in;
      in.llr_systematic.resize(L + m);
      in.llr_parity.resize(L + m);
      in.llr_apriori.assign(L + m, 0.0);
      for (int b = 0; b < B; ++b) {
        const long o = static_cast<long>(b) * L;
        for (int t = 0; t < L; ++t) {
          in.llr_systematic[t] = sys[o + t];
          in.llr_parity[t] = par[o + t];
          in.llr_apriori[t] = apr[o + t];
        }
        for (int t = 0; t < m; ++t) {
          in.llr_systematic[L + t] = tsys[static_cast<long>(b) * m + t];
          in.llr_parity[L + t] = tpar[static_cast<long>(b) * m + t];
          in.llr_apriori[L + t] = 0.0;
        }
        in.initial = StateBoundary::known_zero();
        in.terminal = StateBoundary::known_zero();
        auto out = app_decode(in, trellis_, cfg_.decoder_mode);
        for (int t = 0; t < L; ++t) {
          ext[o + t] = out.llr_extrinsic[t];
          if (post) (*post)[o + t] = out.llr_posterior[t];
        }
      }
      break;
    }
    case Variant::TB: {
      SisoInput in;
      in.llr_systematic.resize(L);
      in.llr_parity.resize(L);
      in.llr_apriori.resize(L);
      for (int b = 0; b < B; ++b) {
        const long o = static_cast<long>(b) * L;
        std::copy(sys.begin() + o, sys.begin() + o + L, in.llr_systematic.begin());
        std::copy(par.begin() + o, par.begin() + o + L, in.llr_parity.begin());
        std::copy(apr.begin() + o, apr.begin() + o + L, in.llr_apriori.begin());
        // Circular recursion approximated by one warmup lap: the first pass
        // starts equiprobable and its terminal metrics wrap around to seed
        // the second, consumed pass.
        in.initial = StateBoundary::equiprobable();
        in.terminal = StateBoundary::equiprobable();
        const auto lap = app_decode(in, trellis_, cfg_.decoder_mode);
        in.initial = StateBoundary::provided(lap.alpha_terminal);
        in.terminal = StateBoundary::provided(lap.beta_initial);
        auto out = app_decode(in, trellis_, cfg_.decoder_mode);
        for (int t = 0; t < L; ++t) {
          ext[o + t] = out.llr_extrinsic[t];
          if (post) (*post)[o + t] = out.llr_posterior[t];
        }
      }
      break;
    }
    case Variant::C: {
      SisoInput in;
      in.llr_systematic = sys;
      in.llr_parity = par;
      in.llr_apriori = apr;
      in.initial = StateBoundary::known_zero();
      in.terminal = StateBoundary::equiprobable();
      DecoderMode mode = cfg_.decoder_mode;
      if (!mode.window) mode.window = WindowSpec{};
      auto out = sliding_window_decode(in, trellis_, mode);
      ext = std::move(out.llr_extrinsic);
      if (post) *post = std::move(out.llr_posterior);
      break;
    }
  }
}

std::vector<double> TurboCodec::constituent_extrinsics(
    const ChannelLanes& lanes, const std::vector<double>& apriori,
    int constituent) const {
  const long N = info_bits();
  require(constituent == 0 || constituent == 1, "constituent must be 0 or 1");
  require(static_cast<long>(apriori.size()) == N, "a-priori lane length mismatch");
  require(static_cast<long>(lanes.systematic.size()) == N,
          "channel lane length mismatch");
  std::vector<double> ext(N, 0.0);
  if (constituent == 0) {
    run_half(lanes.systematic, lanes.parity1, lanes.tail_sys1, lanes.tail_par1,
             apriori, ext, nullptr);
  } else {
    std::vector<double> sys2(N);
    const auto& inv = stream_.perm.inverse;
    for (long x = 0; x < N; ++x) sys2[x] = lanes.systematic[inv[x]];
    run_half(sys2, lanes.parity2, lanes.tail_sys2, lanes.tail_par2, apriori,
             ext, nullptr);
  }
  return ext;
}

DecodeResult TurboCodec::decode(const ChannelLanes& lanes,
                                const BitVec* truth) const {
  const int L = block_len();
  const int B = num_blocks();
  const int m = cfg_.generator.memory;
  const long N = info_bits();
  require(static_cast<long>(lanes.systematic.size()) == N &&
              static_cast<long>(lanes.parity1.size()) == N &&
              static_cast<long>(lanes.parity2.size()) == N,
          "channel lane length mismatch");
  const std::size_t tail_len =
      cfg_.variant == Variant::TP ? static_cast<std::size_t>(B) * m : 0;
  require(lanes.tail_sys1.size() == tail_len && lanes.tail_par1.size() == tail_len &&
              lanes.tail_sys2.size() == tail_len && lanes.tail_par2.size() == tail_len,
          "tail lane length mismatch");
  if (truth) {
    require(static_cast<long>(truth->size()) == N, "truth length mismatch");
  }

  const auto& map = stream_.perm.map;
  const auto& inv = stream_.perm.inverse;

  // Constituent-2 systematic lane and truth live in the permuted domain.
  std::vector<double> sys2(N);
  for (long x = 0; x < N; ++x) sys2[x] = lanes.systematic[inv[x]];
  BitVec truth2;
  if (truth) {
    truth2.resize(N);
    for (long x = 0; x < N; ++x) truth2[x] = (*truth)[inv[x]];
  }

  std::vector<double> apr1(N, 0.0), ext1(N, 0.0), apr2(N, 0.0), ext2(N, 0.0);
  std::vector<double> post2(N, 0.0), post_info(N, 0.0), prev_fb(N, 0.0);

  DecodeDiagnostics diag;
  diag.iterations.resize(cfg_.iterations);
  diag.release_iteration.assign(B, 0);
  diag.has_truth = truth != nullptr;

  for (int it = 0; it < cfg_.iterations; ++it) {
    run_half(lanes.systematic, lanes.parity1, lanes.tail_sys1, lanes.tail_par1,
             apr1, ext1, nullptr);
    for (long i = 0; i < N; ++i) apr2[map[i]] = ext1[i];
    run_half(sys2, lanes.parity2, lanes.tail_sys2, lanes.tail_par2, apr2, ext2,
             &post2);

    IterationStats& st = diag.iterations[it];
    {
      const std::vector<double>* aprs[2] = {&apr1, &apr2};
      const std::vector<double>* exts[2] = {&ext1, &ext2};
      for (int c = 0; c < 2; ++c) {
        const auto me = moments(*exts[c]);
        const auto ma = moments(*aprs[c]);
        st.ext_mean[c] = me.mean;
        st.ext_var[c] = me.var;
        st.apr_mean[c] = ma.mean;
        st.apr_var[c] = ma.var;
        st.cross_mean[c] = cross_moment(*aprs[c], *exts[c]);
        st.apriori_ext_corr[c] = pearson_from_moments(
            ma.mean, ma.var, me.mean, me.var, st.cross_mean[c]);
      }
      if (truth) {
        const auto a1 = adjusted_moments(ext1, *truth);
        const auto a2 = adjusted_moments(ext2, truth2);
        st.adj_mean[0] = a1.mean; st.adj_var[0] = a1.var;
        st.adj_mean[1] = a2.mean; st.adj_var[1] = a2.var;
      }
    }

    // Feedback to constituent 1 and per-iteration decision metrics.
    long errors = 0;
    for (long i = 0; i < N; ++i) {
      apr1[i] = ext2[map[i]];
      post_info[i] = post2[map[i]];
      if (truth) errors += ((post_info[i] < 0.0) ? 1 : 0) != (*truth)[i];
    }
    if (truth) st.ber = static_cast<double>(errors) / static_cast<double>(N);

    for (int b = 0; b < B; ++b) {
      const long o = static_cast<long>(b) * L;
      if (!std::equal(apr1.begin() + o, apr1.begin() + o + L, prev_fb.begin() + o)) {
        diag.release_iteration[b] = it + 1;
      }
    }
    std::copy(apr1.begin(), apr1.end(), prev_fb.begin());
  }

  diag.final_extrinsic.resize(N);
  for (long i = 0; i < N; ++i) diag.final_extrinsic[i] = ext2[map[i]];

  DecodeResult res;
  res.diagnostics = std::move(diag);
  res.bits.resize(N);
  for (long i = 0; i < N; ++i) res.bits[i] = post_info[i] < 0.0 ? 1 : 0;
  return res;
}

StreamCodeword turbo_encode_stream(const BitVec& bits, const TurboConfig& cfg) {
  return TurboCodec(cfg).encode(bits);
}

std::pair<BitVec, DecodeDiagnostics> turbo_decode_stream(
    const ChannelLanes& lanes, const TurboConfig& cfg, const BitVec* truth) {
  auto res = TurboCodec(cfg).decode(lanes, truth);
  return {std::move(res.bits), std::move(res.diagnostics)};
}

}  // namespace ibptc
