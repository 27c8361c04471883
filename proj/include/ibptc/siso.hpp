#pragma once

#include <optional>
#include <vector>

#include "ibptc/common.hpp"
#include "ibptc/rsc.hpp"

namespace ibptc {

enum class SisoAlgo { LogMAP, MaxLogMAP };

// max*(a,b) = ln(e^a + e^b) exactly (LogMAP) or its max approximation.
double max_star(double a, double b, SisoAlgo algo);

struct WindowSpec {
  int window_len = 32;  // W
  int warmup_len = 32;  // W0; 0 allowed (degenerate, no warmup)
};

struct DecoderMode {
  SisoAlgo algo = SisoAlgo::LogMAP;
  std::optional<WindowSpec> window;  // absent = full-block recursion
};

// State metric boundary condition for one end of the recursion, log domain.
struct StateBoundary {
  enum class Kind { KnownZero, Equiprobable, Provided };
  Kind kind = Kind::KnownZero;
  std::vector<double> metrics;  // used only when kind == Provided

  static StateBoundary known_zero() { return {Kind::KnownZero, {}}; }
  static StateBoundary equiprobable() { return {Kind::Equiprobable, {}}; }
  static StateBoundary provided(std::vector<double> m) {
    return {Kind::Provided, std::move(m)};
  }
};

// LLR convention throughout: L = ln P(bit=0) / P(bit=1), so positive means
// bit 0 and the BPSK symbol of bit 0 is +1.
struct SisoInput {
  std::vector<double> llr_systematic;
  std::vector<double> llr_parity;
  std::vector<double> llr_apriori;
  StateBoundary initial = StateBoundary::known_zero();   // alpha at position 0
  StateBoundary terminal = StateBoundary::known_zero();  // beta at position K
};

struct SisoOutput {
  std::vector<double> llr_posterior;
  std::vector<double> llr_extrinsic;  // posterior - apriori - systematic
  std::vector<double> alpha_terminal;  // forward metrics after position K-1
  std::vector<double> beta_initial;    // backward metrics at position 0
};

// Full-block BCJR. Inputs are clamped to +/-kLlrClamp on ingestion; NaNs are
// rejected. With LogMAP the posterior is the exact bitwise MAP posterior.
SisoOutput app_decode(const SisoInput& input, const Trellis& trellis,
                      const DecoderMode& mode);

// Windowed BCJR: alpha runs continuously, beta restarts equiprobable W0
// positions past each window (or at the true final boundary when that is
// closer). mode.window must be set and K >= W.
SisoOutput sliding_window_decode(const SisoInput& input, const Trellis& trellis,
                                 const DecoderMode& mode);

}  // namespace ibptc
