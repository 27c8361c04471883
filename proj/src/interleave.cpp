#include "ibptc/interleave.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "ibptc/rng.hpp"

namespace ibptc {

Permutation Permutation::identity(int n) {
  require(n >= 1, "permutation length must be positive");
  Permutation p;
  p.map.resize(n);
  p.inverse.resize(n);
  std::iota(p.map.begin(), p.map.end(), 0);
  std::iota(p.inverse.begin(), p.inverse.end(), 0);
  return p;
}

Permutation Permutation::from_map(std::vector<std::int32_t> m) {
  const auto n = static_cast<std::int32_t>(m.size());
  require(n >= 1, "permutation length must be positive");
  Permutation p;
  p.inverse.assign(n, -1);
  for (std::int32_t i = 0; i < n; ++i) {
    const std::int32_t v = m[i];
    require(v >= 0 && v < n, "permutation entry out of range");
    require(p.inverse[v] == -1, "permutation entry duplicated");
    p.inverse[v] = i;
  }
  p.map = std::move(m);
  return p;
}

namespace {

// One greedy placement attempt with bounded backtracking. Values are tried
// in the shuffled pool order; when position i has no admissible value the
// last placements are returned to the pool and redrawn (a limited number of
// times) before the attempt is abandoned. Positions are always filled in
// increasing order, so every admissibility check sees a fully placed window.
// The optional IBP rule adds the cross-boundary composite constraint.
std::vector<std::int32_t> srandom_attempt(int len, int spread, std::mt19937_64& gen,
                                          const IbpRule* ibp) {
  std::vector<std::int32_t> pool(len);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = len - 1; i > 0; --i) {
    std::swap(pool[i], pool[rng_below(gen, static_cast<std::uint32_t>(i + 1))]);
  }

  std::vector<std::int32_t> map(len, -1);
  int rollbacks_left = 40;
  for (int i = 0; i < len; ++i) {
    bool placed = false;
    for (std::size_t k = 0; k < pool.size(); ++k) {
      const std::int32_t v = pool[k];
      bool ok = true;
      for (int j = std::max(0, i - spread + 1); j < i && ok; ++j) {
        ok = std::abs(v - map[j]) >= spread;
      }
      if (ok && ibp) {
        // Late position i and early position j of the next block are
        // spread-close in the stream when (len - i) + j < spread. If the IBP
        // lands both in the same destination block, the intra images must
        // also be spread apart.
        const int dv = ibp->displacement(v);
        for (int j = 0; j < i + spread - len && ok; ++j) {
          if (dv == ibp->displacement(map[j]) + 1) {
            ok = std::abs(v - map[j]) >= spread;
          }
        }
      }
      if (ok) {
        map[i] = v;
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));
        placed = true;
        break;
      }
    }
    if (!placed) {
      if (--rollbacks_left < 0) return {};
      const int back = std::min(i, 2 * spread);
      for (int j = i - back; j < i; ++j) {
        pool.push_back(map[j]);
        map[j] = -1;
      }
      for (std::size_t k = pool.size() - 1; k > 0; --k) {
        std::swap(pool[k], pool[rng_below(gen, static_cast<std::uint32_t>(k + 1))]);
      }
      i = i - back - 1;  // loop increment re-enters at the rollback point
    }
  }
  return map;
}

Permutation srandom_build(int len, int spread, std::uint64_t seed, int max_restarts,
                          const IbpRule* ibp) {
  require(len >= 1, "interleaver length must be positive");
  require(spread >= 1, "spread must be >= 1");
  require(spread <= len / 2, "spread larger than len/2 is rejected");
  require(max_restarts >= 1, "max_restarts must be >= 1");

  std::mt19937_64 gen(seed);
  for (int attempt = 0; attempt < max_restarts; ++attempt) {
    auto map = srandom_attempt(len, spread, gen, ibp);
    if (!map.empty()) return Permutation::from_map(std::move(map));
  }
  throw std::runtime_error("s-random construction failed after " +
                           std::to_string(max_restarts) +
                           " restarts (spread too large for this length)");
}

}  // namespace

Permutation make_srandom(int len, int spread, std::uint64_t seed, int max_restarts) {
  return srandom_build(len, spread, seed, max_restarts, nullptr);
}

Permutation make_srandom_ibp(int len, int spread, std::uint64_t seed,
                             const IbpConfig& cfg, int max_restarts) {
  require(cfg.block_len == len, "IbpConfig.block_len must match interleaver length");
  const IbpRule rule = make_ibp(cfg);
  return srandom_build(len, spread, seed, max_restarts, &rule);
}

Permutation make_rectangular(int rows, int cols) {
  require(rows >= 1 && cols >= 1, "rectangular dimensions must be positive");
  std::vector<std::int32_t> map(static_cast<std::size_t>(rows) * cols);
  // Position (r, c) written row-major is read out column-major.
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      map[static_cast<std::size_t>(r) * cols + c] = c * rows + r;
    }
  }
  return Permutation::from_map(std::move(map));
}

void IbpConfig::validate() const {
  require(block_len >= 1, "block_len must be >= 1");
  require(span >= 0, "span must be >= 0");
  require(effective_period() >= 1, "period must be >= 1");
  require(num_blocks >= 1, "num_blocks must be >= 1");
  if (boundary == BoundaryMode::Wrap) {
    require(num_blocks >= 2 * span + 1, "wrap mode requires B >= 2S+1");
  }
  if (span > 0) {
    require(std::gcd(step, 2 * span + 1) == 1, "step must be coprime to 2S+1");
  }
}

IbpRule make_ibp(const IbpConfig& cfg) {
  cfg.validate();
  return IbpRule{cfg.span, cfg.effective_period(), cfg.step};
}

LatencyReport latency_report(const IbpConfig& cfg) {
  cfg.validate();
  const long srid = static_cast<long>(1 + cfg.span) * cfg.block_len;
  return LatencyReport{srid, srid, srid};
}

StreamPermutation compose_stream(const Permutation& intra, const IbpConfig& cfg) {
  cfg.validate();
  require(intra.size() == cfg.block_len, "intra permutation length != block_len");

  const int L = cfg.block_len;
  const int B = cfg.num_blocks;
  const IbpRule rule = make_ibp(cfg);
  const std::size_t n = static_cast<std::size_t>(B) * L;

  std::vector<std::int32_t> map(n, -1);
  std::vector<std::int32_t> homeless;  // sources whose shifted block leaves [0, B)
  for (int b = 0; b < B; ++b) {
    for (int i = 0; i < L; ++i) {
      const int j = intra.map[i];
      const int d = rule.displacement(j);
      int bp = b + d;
      if (cfg.boundary == BoundaryMode::Wrap) {
        bp = ((bp % B) + B) % B;
      } else if (bp < 0 || bp >= B) {
        homeless.push_back(static_cast<std::int32_t>(b) * L + i);
        continue;
      }
      map[static_cast<std::size_t>(b) * L + i] =
          static_cast<std::int32_t>(bp) * L + j;
    }
  }

  int repairs = 0;
  if (!homeless.empty()) {
    // Clamp repair: a slot (b', j) is vacant iff its natural source block
    // b' - delta(j) falls outside the stream. Homeless top sources pair with
    // top vacancies and bottom with bottom, which keeps |b - b'| < S.
    std::vector<std::int32_t> vacant_low, vacant_high;
    for (int bp = 0; bp < B; ++bp) {
      for (int j = 0; j < L; ++j) {
        const int src = bp - rule.displacement(j);
        if (src < 0) {
          vacant_low.push_back(static_cast<std::int32_t>(bp) * L + j);
        } else if (src >= B) {
          vacant_high.push_back(static_cast<std::int32_t>(bp) * L + j);
        }
      }
    }
    std::size_t lo = 0, hi = 0;
    for (const std::int32_t x : homeless) {
      const int b = x / L;
      const int j = intra.map[x % L];
      const bool overflow = b + rule.displacement(j) >= B;
      std::int32_t slot;
      if (overflow) {
        if (hi >= vacant_high.size())
          throw std::runtime_error("clamp boundary not repairable for this IBP");
        slot = vacant_high[hi++];
      } else {
        if (lo >= vacant_low.size())
          throw std::runtime_error("clamp boundary not repairable for this IBP");
        slot = vacant_low[lo++];
      }
      map[static_cast<std::size_t>(x)] = slot;
      ++repairs;
    }
    if (lo != vacant_low.size() || hi != vacant_high.size())
      throw std::runtime_error("clamp boundary not repairable for this IBP");
  }

  StreamPermutation sp;
  sp.perm = Permutation::from_map(std::move(map));
  sp.block_len = L;
  sp.num_blocks = B;
  sp.span = cfg.span;
  sp.srid_bits = static_cast<long>(1 + cfg.span) * L;
  sp.avg_latency_bits = sp.srid_bits;
  sp.clamp_repairs = repairs;
  return sp;
}

bool check_spread(const Permutation& p, int spread) {
  require(spread >= 1, "spread must be >= 1");
  const int n = p.size();
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(0, i - spread + 1); j < i; ++j) {
      if (std::abs(p.map[i] - p.map[j]) < spread) return false;
    }
  }
  return true;
}

int max_block_displacement(const Permutation& p, int block_len,
                           BoundaryMode boundary) {
  require(block_len >= 1 && p.size() % block_len == 0,
          "block_len must divide the permutation length");
  const int num_blocks = p.size() / block_len;
  int worst = 0;
  for (int i = 0; i < p.size(); ++i) {
    const int b = i / block_len;
    const int bp = p.map[i] / block_len;
    int d = std::abs(b - bp);
    if (boundary == BoundaryMode::Wrap) d = std::min(d, num_blocks - d);
    worst = std::max(worst, d);
  }
  return worst;
}

void save_permutation(const Permutation& p, std::ostream& os) {
  os << p.size() << '\n';
  for (int i = 0; i < p.size(); ++i) os << i << ' ' << p.map[i] << '\n';
}

void save_permutation(const Permutation& p, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  save_permutation(p, os);
}

namespace {

[[noreturn]] void bad_line(int line, const std::string& why) {
  throw std::runtime_error("permutation file line " + std::to_string(line) + ": " + why);
}

}  // namespace

Permutation load_permutation(std::istream& is) {
  std::string text;
  int line = 0;
  if (!std::getline(is, text)) bad_line(1, "missing length header");
  ++line;
  long n = 0;
  try {
    n = std::stol(text);
  } catch (const std::exception&) {
    bad_line(line, "length header is not a number");
  }
  if (n < 1 || n > (1L << 30)) bad_line(line, "length out of range");

  std::vector<std::int32_t> map(n, -1);
  std::vector<bool> seen(n, false);
  for (long k = 0; k < n; ++k) {
    if (!std::getline(is, text)) bad_line(line + 1, "unexpected end of file");
    ++line;
    std::istringstream row(text);
    long i = -1, v = -1;
    if (!(row >> i >> v)) bad_line(line, "expected \"index value\"");
    if (i < 0 || i >= n) bad_line(line, "index out of range");
    if (v < 0 || v >= n) bad_line(line, "value out of range");
    if (map[i] != -1) bad_line(line, "index repeated");
    if (seen[v]) bad_line(line, "value duplicated");
    map[i] = static_cast<std::int32_t>(v);
    seen[v] = true;
  }
  return Permutation::from_map(std::move(map));
}

Permutation load_permutation(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return load_permutation(is);
}

}  // namespace ibptc
