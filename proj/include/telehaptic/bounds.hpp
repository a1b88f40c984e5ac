#pragma once

#include <cmath>
#include <stdexcept>

#include "telehaptic/dpm.hpp"

namespace telehaptic {

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DelayBoundInputs {
  double mu_kbps = 1500;
  double tau_ms = 15;        // one-way propagation delay
  int window_len = 8;        // feedback trigger window
  double cross_kbps = 0;     // steady cross-traffic intensity on the channel
  RateModel rate_model;
  int max_merge = 4;
};

// Smallest merge count whose source rate fits beside the cross traffic.
inline int feasible_merge(const DelayBoundInputs& in) {
  for (int k = 1; k <= in.max_merge; ++k) {
    if (rate_kbps(in.rate_model, k) + in.cross_kbps <= in.mu_kbps) return k;
  }
  throw InfeasibleError(
      "network overloaded: even the maximum merge count does not fit");
}

struct DelayBound {
  int k_opt = 1;
  double trigger_latency_ms = 0;  // time until the congestion trigger returns
  double queue_buildup_kbit = 0;  // backlog accumulated in that time
  double bound_ms = 0;            // maximum end-to-end haptic delay
};

// Steady-state ceiling on the haptic delay under CBR cross traffic. The worst
// backlog forms while the controller probes one merge step below the feasible
// operating point: the queue grows at the excess rate until the trigger makes
// the round trip, and the deepest-queued packet then pays propagation,
// queueing and packetization. With k_opt = 1 no such probe exists and the
// bound degenerates to propagation plus one packet transmission.
inline DelayBound haptic_delay_bound(const DelayBoundInputs& in) {
  DelayBound out;
  out.k_opt = feasible_merge(in);
  if (out.k_opt == 1) {
    out.bound_ms = in.tau_ms + rate_kbps(in.rate_model, 1) / in.mu_kbps;
    return out;
  }
  const double below = rate_kbps(in.rate_model, out.k_opt - 1);
  const double rho = (in.cross_kbps + below - in.mu_kbps) / in.mu_kbps;
  const double n = static_cast<double>(in.window_len);
  const double step = static_cast<double>(out.k_opt - 1);  // ms per packet
  out.trigger_latency_ms = n * step * (1.0 + rho) + 2.0 * in.tau_ms + 1.0;
  out.queue_buildup_kbit = rho * in.mu_kbps * out.trigger_latency_ms / 1000.0;
  out.bound_ms = in.tau_ms + step +
                 (n * step + 2.0 * in.tau_ms + 1.0) * rho +
                 n * step * rho * rho;
  return out;
}

// Audio and video delay ceilings given the haptic ceiling: multiplexing wait,
// packetization, then the same network path.
inline double audio_delay_bound(double haptic_bound_ms, double audio_frame_bytes,
                                double av_budget_bytes, int max_merge) {
  if (av_budget_bytes <= 0)
    throw std::invalid_argument("channel carries no audio");
  return haptic_bound_ms + audio_frame_bytes / av_budget_bytes +
         static_cast<double>(max_merge - 1);
}

inline double video_delay_bound(double haptic_bound_ms, double video_fps,
                                int max_merge) {
  if (video_fps <= 0) throw std::invalid_argument("channel carries no video");
  return haptic_bound_ms + 1000.0 / video_fps +
         static_cast<double>(max_merge - 1);
}

// Worst added display jitter of a 1 -> max merge switch: three ticks of
// packetization plus the spread between the transmission delays, with
// comparable queueing on both sides.
inline double merge_switch_jitter_bound_ms(const RateModel& model,
                                           double mu_kbps) {
  const double gamma1 = model.packet_bytes(1) * 8.0 / mu_kbps;  // ms
  return 3.0 * (1.0 + gamma1);
}

}  // namespace telehaptic
