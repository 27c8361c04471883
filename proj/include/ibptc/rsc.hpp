#pragma once

#include <array>
#include <span>
#include <vector>

#include "ibptc/common.hpp"

namespace ibptc {

// Recursive systematic convolutional component code. Tap masks use bit i for
// the D^i coefficient; D^0 is the current input. Defaults are the 3GPP code
// G(D) = (1 + D + D^3) / (1 + D^2 + D^3).
struct GeneratorConfig {
  unsigned feedback_taps = 0b1101;  // 1 + D^2 + D^3
  unsigned forward_taps = 0b1011;   // 1 + D + D^3
  int memory = 3;

  int num_states() const { return 1 << memory; }
  void validate() const;
};

// Precomputed state-transition tables. State bit k holds the feedback-node
// value from k+1 steps ago, so the update is next = ((s << 1) | a) & mask.
struct Trellis {
  struct Edge {
    int next_state;
    Bit parity;
  };

  GeneratorConfig gen;
  int num_states = 0;
  int encoder_period = 0;  // T_c of the feedback recurrence
  std::vector<std::array<Edge, 2>> edges;        // [state][input]
  std::vector<std::array<int, 2>> reverse_edges; // [state][input] -> predecessor

  // Feedback value of a state; the input that cancels it drives the state
  // toward zero (tail convention).
  Bit feedback_bit(int state) const;
  Bit tail_input(int state) const { return feedback_bit(state); }
};

Trellis build_trellis(const GeneratorConfig& g);

struct EncodedBlock {
  BitVec systematic;
  BitVec parity;
  BitVec tail_systematic;  // present iff termination was requested
  BitVec tail_parity;
  int final_state = 0;     // 0 when terminated
};

EncodedBlock encode_block(std::span<const Bit> bits, int initial_state,
                          bool terminate, const Trellis& t);

}  // namespace ibptc
