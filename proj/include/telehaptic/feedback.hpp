#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "telehaptic/wire.hpp"

namespace telehaptic {

struct FeedbackParams {
  double alpha = 0.2;      // EWMA weight on the newest measurement
  int window_len = 8;      // trend window length
  double tolerance = 0.10; // relative steady-state band

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0))
      throw std::invalid_argument("alpha must be in (0,1)");
    if (window_len < 2) throw std::invalid_argument("window_len must be >= 2");
    if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be > 0");
  }
};

enum class Trigger : uint8_t {
  Congestion,  // delays trending up, cut the rate
  Steady,      // delays flat, probe a higher rate
};

inline const char* to_string(Trigger t) {
  return t == Trigger::Congestion ? "congestion" : "steady";
}

struct DelayMeasurement {
  double delay_ms = 0;
  bool clamped = false;
};

// End-to-end delay of a received packet: local reception time minus the
// generation timestamp of the earliest haptic sample it carries. A negative
// result (clock skew exceeding the true delay) clamps to zero.
inline DelayMeasurement measure_delay(double recv_time_ms,
                                      const PacketHeader& header,
                                      double clock_offset_ms) {
  const double local_recv = recv_time_ms + clock_offset_ms;
  const double raw = local_recv - static_cast<double>(header.haptic_timestamp_ms);
  if (raw < 0.0) return {0.0, true};
  return {raw, false};
}

struct Notification {
  uint32_t delay_us = 0;
  bool repetitive = true;  // header D bit
};

// Receiver-side half of the feedback loop: remembers the delay of the latest
// received packet and hands it out for piggybacking on each transmitted
// packet. The first transmission after a new measurement is flagged fresh,
// repeats carry the D bit. With report_interval_ms > 0 the monitor only
// releases a fresh value once per report interval, which models report-based
// feedback such as RTCP.
class DelayMonitor {
 public:
  explicit DelayMonitor(double report_interval_ms = 0.0)
      : report_interval_ms_(report_interval_ms),
        next_report_ms_(report_interval_ms) {}

  void record(const DelayMeasurement& m) {
    last_delay_us_ = static_cast<uint32_t>(std::min<long long>(
        std::llround(m.delay_ms * 1000.0),
        static_cast<long long>(kMaxNotificationUs)));
    if (m.clamped) ++clamped_;
    if (report_interval_ms_ <= 0.0) fresh_ = true;
  }

  Notification next_notification(double now_ms) {
    if (!last_delay_us_) return {0, true};  // start-up sentinel
    if (report_interval_ms_ > 0.0) {
      if (now_ms >= next_report_ms_) {
        while (next_report_ms_ <= now_ms) next_report_ms_ += report_interval_ms_;
        last_report_ms_ = now_ms;
        return {*last_delay_us_, false};
      }
      return {*last_delay_us_, true};
    }
    const bool was_fresh = fresh_;
    fresh_ = false;
    return {*last_delay_us_, !was_fresh};
  }

  int clamped_count() const { return clamped_; }
  std::optional<double> last_report_ms() const { return last_report_ms_; }

 private:
  std::optional<uint32_t> last_delay_us_;
  bool fresh_ = false;
  int clamped_ = 0;
  double report_interval_ms_;
  double next_report_ms_;
  std::optional<double> last_report_ms_;
};

// Trend test over a full window of smoothed delays.
// Congestion: strictly increasing throughout. Steady: neither strictly
// increasing nor strictly decreasing, and every later entry within the
// relative tolerance band around the first. A strictly decreasing window
// (delays draining) yields nothing.
inline std::optional<Trigger> evaluate_window(std::span<const double> window,
                                              double tolerance) {
  bool increasing = true;
  bool decreasing = true;
  for (size_t i = 1; i < window.size(); ++i) {
    if (window[i] <= window[i - 1]) increasing = false;
    if (window[i] >= window[i - 1]) decreasing = false;
  }
  if (increasing) return Trigger::Congestion;
  if (decreasing) return std::nullopt;
  const double band = tolerance * std::abs(window.front());
  for (size_t i = 1; i < window.size(); ++i) {
    if (std::abs(window[i] - window.front()) > band) return std::nullopt;
  }
  return Trigger::Steady;
}

// Transmitter-side half: EWMA filter over fresh delay notifications plus the
// trigger window. Repetitive notifications (D bit set) leave the state
// untouched so one measurement never updates the filter twice. The window is
// cleared after every emitted trigger.
class TriggerDetector {
 public:
  explicit TriggerDetector(FeedbackParams params = {}) : params_(params) {
    params_.validate();
    window_.reserve(static_cast<size_t>(params_.window_len));
  }

  std::optional<Trigger> ingest(uint32_t delay_us, bool repetitive) {
    return ingest_ms(static_cast<double>(delay_us) / 1000.0, repetitive);
  }

  std::optional<Trigger> ingest_ms(double delay_ms, bool repetitive) {
    if (repetitive) return std::nullopt;
    if (avg_ms_)
      avg_ms_ = params_.alpha * delay_ms + (1.0 - params_.alpha) * *avg_ms_;
    else
      avg_ms_ = delay_ms;
    // Window entries are rounded to 1 ns so that a constant input produces
    // exactly equal entries; raw EWMA arithmetic can wobble by an ulp, which
    // would read as a strict trend.
    const double entry = std::round(*avg_ms_ * 1e6) / 1e6;
    window_.push_back(entry);
    if (window_.size() > static_cast<size_t>(params_.window_len))
      window_.erase(window_.begin());
    if (window_.size() < static_cast<size_t>(params_.window_len))
      return std::nullopt;
    auto trigger = evaluate_window(window_, params_.tolerance);
    if (trigger) window_.clear();
    return trigger;
  }

  const FeedbackParams& params() const { return params_; }
  std::optional<double> smoothed_delay_ms() const { return avg_ms_; }
  const std::vector<double>& window() const { return window_; }

 private:
  FeedbackParams params_;
  std::optional<double> avg_ms_;
  std::vector<double> window_;
};

}  // namespace telehaptic
