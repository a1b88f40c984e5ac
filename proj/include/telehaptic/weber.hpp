#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace telehaptic {

struct WeberParams {
  double threshold = 0.12;  // relative deadband

  void validate() const {
    if (!(threshold > 0.0 && threshold < 1.0))
      throw std::invalid_argument("weber threshold must be in (0,1)");
  }
};

// Perceptual deadband transmit mask: sample i is sent iff it deviates from
// the most recently *sent* value by more than threshold * |last sent|. The
// first sample is always sent; from a last-sent value of zero any nonzero
// sample is significant.
inline std::vector<uint8_t> weber_mask(std::span<const double> signal,
                                       const WeberParams& params) {
  params.validate();
  std::vector<uint8_t> mask(signal.size(), 0);
  if (signal.empty()) return mask;
  mask[0] = 1;
  double last_sent = signal[0];
  for (size_t i = 1; i < signal.size(); ++i) {
    const bool significant =
        last_sent == 0.0
            ? signal[i] != 0.0
            : std::abs(signal[i] - last_sent) >
                  params.threshold * std::abs(last_sent);
    if (significant) {
      mask[i] = 1;
      last_sent = signal[i];
    }
  }
  return mask;
}

struct TimedSample {
  double time_ms = 0;
  double value = 0;
};

// Zero-order hold at a 1 kHz display clock: each tick shows the latest sample
// whose timestamp is at or before it. Ticks before the first sample hold 0.
// `received` must be sorted by time.
inline std::vector<double> zoh_reconstruct(std::span<const TimedSample> received,
                                           int64_t start_tick_ms,
                                           int64_t num_ticks) {
  if (received.empty()) throw std::invalid_argument("no samples to hold");
  std::vector<double> out(static_cast<size_t>(num_ticks), 0.0);
  size_t next = 0;
  double held = 0.0;
  bool have = false;
  for (int64_t i = 0; i < num_ticks; ++i) {
    const double tick = static_cast<double>(start_tick_ms + i);
    while (next < received.size() && received[next].time_ms <= tick) {
      held = received[next].value;
      have = true;
      ++next;
    }
    out[static_cast<size_t>(i)] = have ? held : 0.0;
  }
  return out;
}

}  // namespace telehaptic
