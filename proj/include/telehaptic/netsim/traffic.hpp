#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "telehaptic/types.hpp"

namespace telehaptic {

struct OnOffInterval {
  int64_t start_ms = 0;
  int64_t stop_ms = 0;  // <= 0 means active until the end of the run
};

// One exogenous cross-traffic source. Rates are on-the-wire rates: packet
// spacing is computed from the full packet size (payload plus the 54 B of
// lower-layer headers), so a source configured at R kbps loads the bottleneck
// with exactly R kbps.
struct CrossTrafficConfig {
  enum class Kind : uint8_t { Cbr, Vbr };

  Kind kind = Kind::Cbr;
  double rate_kbps = 0;                     // CBR
  double rate_lo_kbps = 0, rate_hi_kbps = 0;  // VBR range, mean (lo+hi)/2
  int payload_bytes = 1000;
  int64_t redraw_ms = 50;  // VBR rate redraw interval
  std::vector<OnOffInterval> schedule;

  int wire_bytes() const { return payload_bytes + kLowerLayerOverheadBytes; }

  double scheduled_rate(int64_t t_ms, int64_t duration_ms) const {
    for (const auto& iv : schedule) {
      const int64_t stop = iv.stop_ms <= 0 ? duration_ms : iv.stop_ms;
      if (t_ms >= iv.start_ms && t_ms < stop)
        return kind == Kind::Cbr ? rate_kbps
                                 : (rate_lo_kbps + rate_hi_kbps) / 2.0;
    }
    return 0.0;
  }

  void validate() const {
    if (kind == Kind::Cbr) {
      if (rate_kbps <= 0) throw std::invalid_argument("cbr rate must be > 0");
    } else {
      if (!(rate_lo_kbps > 0 && rate_hi_kbps >= rate_lo_kbps))
        throw std::invalid_argument("vbr range must satisfy 0 < lo <= hi");
      if (redraw_ms <= 0) throw std::invalid_argument("vbr redraw must be > 0");
    }
    if (payload_bytes <= 0)
      throw std::invalid_argument("payload bytes must be > 0");
    for (size_t i = 1; i < schedule.size(); ++i) {
      const auto& prev = schedule[i - 1];
      if (prev.stop_ms <= 0 || schedule[i].start_ms < prev.stop_ms)
        throw std::invalid_argument("on/off intervals overlap");
    }
  }
};

// Scheduled cross-traffic intensity at time t on one channel; VBR sources are
// counted at their mean (their instantaneous rate is a seeded draw).
inline double offered_cross_traffic(const std::vector<CrossTrafficConfig>& srcs,
                                    int64_t t_ms, int64_t duration_ms) {
  double total = 0;
  for (const auto& s : srcs) total += s.scheduled_rate(t_ms, duration_ms);
  return total;
}

// Deterministic packet emission stream for one source. Each interval starts
// at a seeded phase within one packet spacing; a VBR source redraws its rate
// uniformly from [lo, hi] every redraw_ms.
class CrossSource {
 public:
  CrossSource(const CrossTrafficConfig& cfg, uint64_t seed, int64_t end_ms)
      : cfg_(cfg), end_ns_(end_ms * kNsPerMs), rng_(seed) {
    cfg_.validate();
    interval_ = 0;
    enter_interval();
  }

  const CrossTrafficConfig& config() const { return cfg_; }

  // Emission time of the next packet, or nullopt when the source is done.
  std::optional<TimeNs> next_emission() {
    while (interval_ < cfg_.schedule.size()) {
      if (next_ns_ < interval_stop_ns_) {
        const TimeNs t = next_ns_;
        next_ns_ += spacing_ns(current_rate(t));
        return t;
      }
      ++interval_;
      enter_interval();
    }
    return std::nullopt;
  }

 private:
  double u01() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
  }

  void enter_interval() {
    if (interval_ >= cfg_.schedule.size()) return;
    const auto& iv = cfg_.schedule[interval_];
    interval_start_ns_ = iv.start_ms * kNsPerMs;
    interval_stop_ns_ =
        iv.stop_ms <= 0 ? end_ns_ : std::min(end_ns_, iv.stop_ms * kNsPerMs);
    vbr_window_ = -1;
    const double rate = current_rate(interval_start_ns_);
    next_ns_ = interval_start_ns_ +
               static_cast<TimeNs>(u01() * static_cast<double>(spacing_ns(rate)));
  }

  double current_rate(TimeNs t) {
    if (cfg_.kind == CrossTrafficConfig::Kind::Cbr) return cfg_.rate_kbps;
    const int64_t window =
        (t - interval_start_ns_) / (cfg_.redraw_ms * kNsPerMs);
    while (vbr_window_ < window) {
      vbr_rate_ = cfg_.rate_lo_kbps +
                  u01() * (cfg_.rate_hi_kbps - cfg_.rate_lo_kbps);
      ++vbr_window_;
    }
    return vbr_rate_;
  }

  TimeNs spacing_ns(double rate_kbps) const {
    return transmission_ns(cfg_.wire_bytes(), rate_kbps);
  }

  CrossTrafficConfig cfg_;
  TimeNs end_ns_;
  std::mt19937_64 rng_;
  size_t interval_ = 0;
  TimeNs interval_start_ns_ = 0;
  TimeNs interval_stop_ns_ = 0;
  TimeNs next_ns_ = 0;
  int64_t vbr_window_ = -1;
  double vbr_rate_ = 0;
};

}  // namespace telehaptic
