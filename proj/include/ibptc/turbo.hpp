#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ibptc/common.hpp"
#include "ibptc/interleave.hpp"
#include "ibptc/rsc.hpp"
#include "ibptc/siso.hpp"

namespace ibptc {

enum class Variant { TP, TB, C };  // tail-padded / tail-biting / continuous
enum class CodeRate { R13, R12 };

enum class IntraKind { SRandom, Rectangular, Identity, File };

struct InterleaverSpec {
  IntraKind intra = IntraKind::SRandom;
  int spread = 0;            // s-random spread; 0 = 85% of sqrt(L/2)
  std::uint64_t seed = 1;    // s-random construction seed
  int rect_rows = 0;         // rectangular: row count (must divide L)
  std::string path;          // File: permutation text file
  IbpConfig ibp;             // block/stream geometry incl. span and period

  int resolved_spread() const;
};

struct TurboConfig {
  GeneratorConfig generator;
  InterleaverSpec interleaver;
  CodeRate rate = CodeRate::R13;
  Variant variant = Variant::TP;
  int iterations = 10;
  DecoderMode decoder_mode;

  void validate() const;
};

// Puncture pattern for rate 1/2: parity1 survives at odd stream positions,
// parity2 at even ones; systematic and tails always survive.
bool parity1_transmitted(CodeRate rate, long position);
bool parity2_transmitted(CodeRate rate, long position);

// Full (unpunctured) encoder output. Tail lanes are used by TP only and hold
// m bits per block per constituent.
struct StreamCodeword {
  BitVec systematic;  // B*L
  BitVec parity1;     // B*L, natural-order constituent
  BitVec parity2;     // B*L, permuted-order constituent
  BitVec tail_sys1, tail_par1;  // B*m (TP), else empty
  BitVec tail_sys2, tail_par2;
};

// Decoder input: channel LLRs, punctured positions already zeroed.
struct ChannelLanes {
  std::vector<double> systematic;
  std::vector<double> parity1;
  std::vector<double> parity2;
  std::vector<double> tail_sys1, tail_par1, tail_sys2, tail_par2;
};

// All moments below are measured on the exchanged messages as the receiving
// constituent ingests them, i.e. after saturation at +-kLlrClamp. A fully
// saturated (e.g. noiseless) exchange is therefore a zero-variance pool.
struct IterationStats {
  double ext_mean[2] = {0, 0};  // extrinsic moments per constituent
  double ext_var[2] = {0, 0};
  double apr_mean[2] = {0, 0};  // a-priori input moments
  double apr_var[2] = {0, 0};
  double cross_mean[2] = {0, 0};        // E[a-priori * extrinsic]
  double adj_mean[2] = {0, 0};          // sign-adjusted by true bits (truth runs)
  double adj_var[2] = {0, 0};
  double apriori_ext_corr[2] = {0, 0};  // Pearson(a priori, extrinsic)
  double ber = -1.0;                    // vs truth; -1 when truth absent
};

struct DecodeDiagnostics {
  std::vector<IterationStats> iterations;  // length = cfg.iterations
  // Last iteration (1-based) whose pass still changed the block's fed-back
  // extrinsic, relative to the all-zero state before iteration 1; 0 = the
  // extrinsic stayed identically zero throughout.
  std::vector<int> release_iteration;
  // Constituent-2 extrinsic after the last iteration, in information order.
  std::vector<double> final_extrinsic;
  bool has_truth = false;
};

struct DecodeResult {
  BitVec bits;  // B*L information decisions
  DecodeDiagnostics diagnostics;
};

// Pearson correlation from raw first/second moments of two pooled lanes;
// a (numerically) constant lane is defined as correlation 0.
double pearson_from_moments(double mean_a, double var_a, double mean_b,
                            double var_b, double mean_ab);

// Structural locality bound of the message-passing schedule.
struct ReleaseSchedule {
  int offset;        // 2*S*I: influence radius in blocks, wrap-free
  int wrap_horizon;  // min(offset, floor(B/2)): meaningful radius on a ring
};
ReleaseSchedule release_schedule(const TurboConfig& cfg);

class TurboCodec {
 public:
  explicit TurboCodec(const TurboConfig& cfg);

  const TurboConfig& config() const { return cfg_; }
  const Trellis& trellis() const { return trellis_; }
  const Permutation& intra() const { return intra_; }
  const StreamPermutation& stream_perm() const { return stream_; }

  int block_len() const { return cfg_.interleaver.ibp.block_len; }
  int num_blocks() const { return cfg_.interleaver.ibp.num_blocks; }
  long info_bits() const { return static_cast<long>(block_len()) * num_blocks(); }
  long transmitted_bits() const;
  double effective_rate() const;

  StreamCodeword encode(const BitVec& info) const;
  DecodeResult decode(const ChannelLanes& lanes, const BitVec* truth = nullptr) const;

  // One constituent APP pass (0 = natural order, 1 = permuted order) with an
  // explicit a-priori lane in that constituent's own domain; returns the
  // extrinsic lane. This is a half-iteration of decode(), exposed for
  // transfer-curve probing.
  std::vector<double> constituent_extrinsics(const ChannelLanes& lanes,
                                             const std::vector<double>& apriori,
                                             int constituent) const;

  // Noiseless channel lanes (LLR = +/-magnitude, punctured -> 0); test and
  // analysis plumbing.
  ChannelLanes noiseless_lanes(const StreamCodeword& cw, double magnitude) const;

 private:
  TurboConfig cfg_;
  Trellis trellis_;
  Permutation intra_;
  StreamPermutation stream_;
  std::vector<int> tb_init_;  // tail-biting: zero-state final state -> initial

  BitVec permute_info(const BitVec& info) const;
  void encode_constituent(const BitVec& stream_bits, BitVec& parity,
                          BitVec& tail_sys, BitVec& tail_par) const;
  void run_half(const std::vector<double>& sys, const std::vector<double>& par,
                const std::vector<double>& tsys, const std::vector<double>& tpar,
                const std::vector<double>& apr, std::vector<double>& ext,
                std::vector<double>* post) const;
};

StreamCodeword turbo_encode_stream(const BitVec& bits, const TurboConfig& cfg);
std::pair<BitVec, DecodeDiagnostics> turbo_decode_stream(
    const ChannelLanes& lanes, const TurboConfig& cfg,
    const BitVec* truth = nullptr);

}  // namespace ibptc
