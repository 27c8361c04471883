#include "ibptc/rsc.hpp"

#include <bit>
#include <numeric>

namespace ibptc {
namespace {

inline Bit parity_of(unsigned v) { return static_cast<Bit>(std::popcount(v) & 1); }

}  // namespace

void GeneratorConfig::validate() const {
  require(memory >= 1 && memory <= 16, "generator memory must be in [1, 16]");
  require((feedback_taps & 1u) != 0, "feedback polynomial must include D^0");
  require((forward_taps & 1u) != 0, "forward polynomial must include D^0");
  const unsigned mask = (memory >= 31) ? ~0u : ((2u << memory) - 1u);
  require((feedback_taps & ~mask) == 0, "feedback taps exceed generator memory");
  require((forward_taps & ~mask) == 0, "forward taps exceed generator memory");
}

Bit Trellis::feedback_bit(int state) const {
  return parity_of((gen.feedback_taps >> 1) & static_cast<unsigned>(state));
}

Trellis build_trellis(const GeneratorConfig& g) {
  g.validate();
  Trellis t;
  t.gen = g;
  t.num_states = g.num_states();
  t.edges.assign(t.num_states, {});
  t.reverse_edges.assign(t.num_states, {-1, -1});

  const unsigned state_mask = static_cast<unsigned>(t.num_states - 1);
  for (int s = 0; s < t.num_states; ++s) {
    for (int u = 0; u < 2; ++u) {
      const Bit a = static_cast<Bit>(u ^ t.feedback_bit(s));
      const Bit p = static_cast<Bit>((a & (g.forward_taps & 1u)) ^
                                     parity_of((g.forward_taps >> 1) & static_cast<unsigned>(s)));
      const int ns = static_cast<int>(((static_cast<unsigned>(s) << 1) | a) & state_mask);
      t.edges[s][u] = {ns, p};
      t.reverse_edges[ns][u] = s;
    }
  }

  // T_c: least common multiple of the zero-input state cycles through
  // nonzero states. States that never return (possible for degenerate taps
  // without the D^m coefficient) are transient and do not contribute.
  long long period = 1;
  for (int s0 = 1; s0 < t.num_states; ++s0) {
    int s = s0;
    int len = 0;
    bool returned = false;
    for (int step = 0; step < t.num_states + 1; ++step) {
      s = t.edges[s][0].next_state;
      ++len;
      if (s == s0) {
        returned = true;
        break;
      }
    }
    if (returned) period = std::lcm(period, static_cast<long long>(len));
  }
  t.encoder_period = static_cast<int>(period);
  return t;
}

EncodedBlock encode_block(std::span<const Bit> bits, int initial_state,
                          bool terminate, const Trellis& t) {
  require(!bits.empty(), "encode_block requires at least one bit");
  require(initial_state >= 0 && initial_state < t.num_states,
          "initial_state out of range");

  EncodedBlock out;
  out.systematic.assign(bits.begin(), bits.end());
  out.parity.resize(bits.size());

  int s = initial_state;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    const auto& e = t.edges[s][bits[i] & 1];
    out.parity[i] = e.parity;
    s = e.next_state;
  }

  if (terminate) {
    const int m = t.gen.memory;
    out.tail_systematic.resize(m);
    out.tail_parity.resize(m);
    for (int i = 0; i < m; ++i) {
      const Bit u = t.tail_input(s);
      const auto& e = t.edges[s][u];
      out.tail_systematic[i] = u;
      out.tail_parity[i] = e.parity;
      s = e.next_state;
    }
  }
  out.final_state = s;
  return out;
}

}  // namespace ibptc
