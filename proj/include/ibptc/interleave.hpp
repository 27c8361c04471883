#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ibptc/common.hpp"

namespace ibptc {

// Bijection on [0, N). map[i] is the destination of position i.
struct Permutation {
  std::vector<std::int32_t> map;
  std::vector<std::int32_t> inverse;

  int size() const { return static_cast<int>(map.size()); }

  static Permutation identity(int n);
  // Validates bijectivity and fills the inverse; throws on duplicates or
  // out-of-range entries.
  static Permutation from_map(std::vector<std::int32_t> m);
};

// Classical s-random construction: any two positions closer than `spread`
// map at least `spread` apart. Randomized draw-and-retry; deterministic for
// a given (len, spread, seed). Throws after max_restarts failed attempts.
Permutation make_srandom(int len, int spread, std::uint64_t seed,
                         int max_restarts = 1000);

// Write-by-rows, read-by-columns block interleaver; rows*cols = len.
Permutation make_rectangular(int rows, int cols);

enum class BoundaryMode { Wrap, Clamp };

// Inter-block permutation parameters. span S bounds the block displacement;
// period T_s (default 2S+1) is the period of the displacement pattern.
struct IbpConfig {
  int block_len = 0;   // L
  int span = 0;        // S
  int period = 0;      // T_s; 0 selects the default 2S+1
  int step = 1;        // multiplier, must be coprime to 2S+1
  int num_blocks = 0;  // B
  BoundaryMode boundary = BoundaryMode::Wrap;

  int effective_period() const { return period > 0 ? period : 2 * span + 1; }
  void validate() const;
};

// Displacement rule delta(j) in [-S, S], period T_s in j. Depends only on the
// in-block position, so each column of the stream map is a pure block shift.
struct IbpRule {
  int span = 0;
  int period = 1;
  int step = 1;

  int displacement(int position) const {
    if (span == 0) return 0;
    const int modulus = 2 * span + 1;
    return static_cast<int>((static_cast<long long>(position % period) * step) % modulus) - span;
  }
};

IbpRule make_ibp(const IbpConfig& cfg);

// Composite stream permutation: intra-block permute, then shift each
// position's block by delta(j).
struct StreamPermutation {
  Permutation perm;  // length B*L
  int block_len = 0;
  int num_blocks = 0;
  int span = 0;
  long srid_bits = 0;         // (1+S)*L
  long avg_latency_bits = 0;  // (1+S)*L
  int clamp_repairs = 0;      // boundary fixups applied in clamp mode
};

StreamPermutation compose_stream(const Permutation& intra, const IbpConfig& cfg);

struct LatencyReport {
  long srid_bits;
  long avg_latency_bits;
  long classic_equivalent_block;
};

LatencyReport latency_report(const IbpConfig& cfg);

// s-random construction that additionally applies the spread rule to pairs
// the IBP sends into the same destination block across a block boundary.
Permutation make_srandom_ibp(int len, int spread, std::uint64_t seed,
                             const IbpConfig& cfg, int max_restarts = 1000);

// True iff every pair of positions closer than `spread` maps at least
// `spread` apart. O(N * spread).
bool check_spread(const Permutation& p, int spread);

// Largest block displacement |b - b'| of any index when the permutation is
// read as B blocks of block_len; circular distance in wrap mode.
int max_block_displacement(const Permutation& p, int block_len,
                           BoundaryMode boundary);

// Text format: first line N, then N lines "i map[i]".
void save_permutation(const Permutation& p, std::ostream& os);
void save_permutation(const Permutation& p, const std::string& path);
// Throws std::runtime_error naming the offending line on malformed input.
Permutation load_permutation(std::istream& is);
Permutation load_permutation(const std::string& path);

}  // namespace ibptc
