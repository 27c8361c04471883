#include "ibptc/siso.hpp"

#include <algorithm>
#include <cmath>

namespace ibptc {

double max_star(double a, double b, SisoAlgo algo) {
  const double m = std::max(a, b);
  if (algo == SisoAlgo::MaxLogMAP) return m;
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

namespace {

void seed_metrics(std::vector<double>& m, const StateBoundary& b, int num_states,
                  const char* which) {
  m.assign(num_states, kNegMetric);
  switch (b.kind) {
    case StateBoundary::Kind::KnownZero:
      m[0] = 0.0;
      break;
    case StateBoundary::Kind::Equiprobable:
      std::fill(m.begin(), m.end(), 0.0);
      break;
    case StateBoundary::Kind::Provided:
      require(static_cast<int>(b.metrics.size()) == num_states,
              std::string(which) + " boundary metric vector has wrong length");
      m = b.metrics;
      break;
  }
}

void renormalize(std::vector<double>& m) {
  const double peak = *std::max_element(m.begin(), m.end());
  for (double& v : m) v -= peak;
}

std::vector<double> clamped(const std::vector<double>& lane, const char* name) {
  std::vector<double> out(lane.size());
  for (std::size_t i = 0; i < lane.size(); ++i) {
    require(!std::isnan(lane[i]), std::string(name) + " lane contains NaN");
    out[i] = clamp_llr(lane[i]);
  }
  return out;
}

// One engine serves both entry points: the full-block recursion is the
// degenerate window W = K, W0 = 0, where beta starts from the true terminal
// boundary. For real windows, beta restarts equiprobable warmup_len positions
// beyond the window unless that crosses K, in which case the terminal
// boundary is reached and used exactly.
template <SisoAlgo Algo>
SisoOutput run_bcjr(const SisoInput& input, const Trellis& trellis,
                    int window_len, int warmup_len) {
  const int K = static_cast<int>(input.llr_systematic.size());
  require(static_cast<int>(input.llr_parity.size()) == K &&
              static_cast<int>(input.llr_apriori.size()) == K,
          "siso lanes must have equal length");
  require(K >= 1, "siso input is empty");
  require(window_len >= 1 && warmup_len >= 0, "window lengths must be nonnegative");
  require(K >= window_len, "block shorter than the window");

  const int ns = trellis.num_states;
  const std::vector<double> lsys = clamped(input.llr_systematic, "systematic");
  const std::vector<double> lpar = clamped(input.llr_parity, "parity");
  const std::vector<double> lapr = clamped(input.llr_apriori, "apriori");

  auto mstar = [](double a, double b) {
    const double m = std::max(a, b);
    if constexpr (Algo == SisoAlgo::MaxLogMAP) return m;
    return m + std::log1p(std::exp(-std::abs(a - b)));
  };
  // gamma(t; s, a) = gu + gp where gu = +/-0.5(lsys+lapr), gp = +/-0.5 lpar.
  auto half_metrics = [&](int t, double g_u[2], double g_p[2]) {
    const double lu = 0.5 * (lsys[t] + lapr[t]);
    const double lp = 0.5 * lpar[t];
    g_u[0] = lu;
    g_u[1] = -lu;
    g_p[0] = lp;
    g_p[1] = -lp;
  };

  SisoOutput out;
  out.llr_posterior.resize(K);
  out.llr_extrinsic.resize(K);

  std::vector<double> alpha_carry(ns);
  seed_metrics(alpha_carry, input.initial, ns, "initial");

  std::vector<double> alpha_rows(static_cast<std::size_t>(window_len) * ns);
  std::vector<double> beta(ns), beta_next(ns), alpha_step(ns);

  auto beta_step_down = [&](int t) {
    double gu[2], gp[2];
    half_metrics(t, gu, gp);
    for (int s = 0; s < ns; ++s) {
      const auto& e0 = trellis.edges[s][0];
      const auto& e1 = trellis.edges[s][1];
      beta[s] = mstar(beta_next[e0.next_state] + gu[0] + gp[e0.parity],
                      beta_next[e1.next_state] + gu[1] + gp[e1.parity]);
    }
    renormalize(beta);
    beta_next = beta;
  };

  for (int t0 = 0; t0 < K; t0 += window_len) {
    const int t1 = std::min(t0 + window_len, K);

    // Forward pass: record alpha(t) for t in [t0, t1), carry alpha(t1) out.
    for (int t = t0; t < t1; ++t) {
      double* row = alpha_rows.data() + static_cast<std::size_t>(t - t0) * ns;
      std::copy(alpha_carry.begin(), alpha_carry.end(), row);
      double gu[2], gp[2];
      half_metrics(t, gu, gp);
      std::fill(alpha_step.begin(), alpha_step.end(), kNegMetric);
      for (int s = 0; s < ns; ++s) {
        const double base = row[s];
        if (base <= kNegMetric) continue;
        for (int a = 0; a < 2; ++a) {
          const auto& e = trellis.edges[s][a];
          double& slot = alpha_step[e.next_state];
          slot = mstar(slot, base + gu[a] + gp[e.parity]);
        }
      }
      renormalize(alpha_step);
      alpha_carry = alpha_step;
    }

    // Backward seed: the true terminal boundary if the warmup span reaches K.
    const int tb = (t1 + warmup_len >= K) ? K : t1 + warmup_len;
    if (tb == K) {
      seed_metrics(beta_next, input.terminal, ns, "terminal");
    } else {
      beta_next.assign(ns, 0.0);
    }
    for (int t = tb - 1; t >= t1; --t) beta_step_down(t);  // warmup only

    // Consume: posterior at t needs alpha(t), gamma(t), beta(t+1).
    for (int t = t1 - 1; t >= t0; --t) {
      const double* row = alpha_rows.data() + static_cast<std::size_t>(t - t0) * ns;
      double gu[2], gp[2];
      half_metrics(t, gu, gp);
      double p0 = kNegMetric, p1 = kNegMetric;
      for (int s = 0; s < ns; ++s) {
        const double base = row[s];
        if (base <= kNegMetric) continue;
        const auto& e0 = trellis.edges[s][0];
        const auto& e1 = trellis.edges[s][1];
        p0 = mstar(p0, base + gp[e0.parity] + beta_next[e0.next_state]);
        p1 = mstar(p1, base + gp[e1.parity] + beta_next[e1.next_state]);
      }
      // gu[a] is constant over states for fixed a, so it joins after the max*.
      out.llr_posterior[t] = (p0 + gu[0]) - (p1 + gu[1]);
      out.llr_extrinsic[t] = out.llr_posterior[t] - lapr[t] - lsys[t];
      beta_step_down(t);
      if (t == 0) out.beta_initial = beta;
    }
  }

  out.alpha_terminal = alpha_carry;
  return out;
}

SisoOutput dispatch(const SisoInput& input, const Trellis& trellis, SisoAlgo algo,
                    int window_len, int warmup_len) {
  if (algo == SisoAlgo::MaxLogMAP)
    return run_bcjr<SisoAlgo::MaxLogMAP>(input, trellis, window_len, warmup_len);
  return run_bcjr<SisoAlgo::LogMAP>(input, trellis, window_len, warmup_len);
}

}  // namespace

SisoOutput app_decode(const SisoInput& input, const Trellis& trellis,
                      const DecoderMode& mode) {
  const int K = static_cast<int>(input.llr_systematic.size());
  return dispatch(input, trellis, mode.algo, std::max(K, 1), 0);
}

SisoOutput sliding_window_decode(const SisoInput& input, const Trellis& trellis,
                                 const DecoderMode& mode) {
  require(mode.window.has_value(), "sliding_window_decode needs mode.window");
  return dispatch(input, trellis, mode.algo, mode.window->window_len,
                  mode.window->warmup_len);
}

}  // namespace ibptc
