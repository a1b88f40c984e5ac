#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "telehaptic/feedback.hpp"
#include "telehaptic/mux.hpp"
#include "telehaptic/types.hpp"
#include "telehaptic/wire.hpp"

namespace telehaptic {

struct DpmParams {
  int max_merge = 4;       // upper limit for the merge count, 1..7
  double holdup_ms = 0.0;  // steady-trigger hold-up window; 0 disables it

  void validate() const {
    if (max_merge < 1 || max_merge > 7)
      throw std::invalid_argument("max_merge must be in 1..7");
    if (holdup_ms < 0.0) throw std::invalid_argument("holdup_ms must be >= 0");
  }
};

// Source rate model: payload rate plus the no-merge overhead rate. Merging k
// fragments per packet divides the overhead rate by k.
struct RateModel {
  double payload_kbps = 0;
  double overhead_kbps = 0;

  // overhead_bytes is the full per-packet header cost (lower layers plus the
  // application header); at the 1 kHz no-merge packet rate the overhead rate
  // in kbps is simply bytes * 8.
  static RateModel from_packet_overhead(double payload_kbps,
                                        int overhead_bytes) {
    return {payload_kbps, static_cast<double>(overhead_bytes) * 8.0};
  }

  // Bytes on the wire of one k-merge packet.
  double packet_bytes(int merge_count) const {
    return (static_cast<double>(merge_count) * payload_kbps + overhead_kbps) /
           8.0;
  }
};

inline double rate_kbps(const RateModel& model, int merge_count) {
  if (merge_count < 1 || merge_count > 7)
    throw std::invalid_argument("merge count outside 1..7");
  return model.payload_kbps +
         model.overhead_kbps / static_cast<double>(merge_count);
}

enum class RatePolicy : uint8_t {
  Simd,              // congestion: jump to max; steady: step down by one
  MultistepIncrease, // congestion: step up by one; steady: step down by one
  Fixed,             // ignores triggers
};

// Maps feedback triggers to the merge count. The hold-up variant remembers
// the merge count in force at the last congestion trigger and, once the
// controller has stepped back down to one above it, ignores steady triggers
// for holdup_ms. Congestion triggers always act.
class MergeController {
 public:
  MergeController(RatePolicy policy, DpmParams params, int initial_merge = 1)
      : policy_(policy), params_(params), merge_(initial_merge) {
    params_.validate();
    if (initial_merge < 1 || initial_merge > params_.max_merge)
      throw std::invalid_argument("initial merge outside 1..max_merge");
  }

  int merge_count() const { return merge_; }
  RatePolicy policy() const { return policy_; }

  // Returns true if the merge count changed.
  bool on_trigger(Trigger t, double now_ms) {
    if (policy_ == RatePolicy::Fixed) return false;
    const int before = merge_;
    if (t == Trigger::Congestion) {
      if (policy_ == RatePolicy::Simd) {
        pre_congestion_merge_ = merge_;
        merge_ = params_.max_merge;
        if (holdup_enabled()) {
          if (merge_ == pre_congestion_merge_ + 1)
            start_hold(now_ms);
          else
            hold_armed_ = true;
        }
      } else {
        merge_ = std::min(merge_ + 1, params_.max_merge);
      }
    } else {
      if (in_hold(now_ms)) return false;
      if (merge_ > 1) {
        --merge_;
        if (policy_ == RatePolicy::Simd && holdup_enabled() && hold_armed_ &&
            merge_ == pre_congestion_merge_ + 1) {
          start_hold(now_ms);
        }
      }
    }
    return merge_ != before;
  }

 private:
  bool holdup_enabled() const {
    return policy_ == RatePolicy::Simd && params_.holdup_ms > 0.0;
  }
  bool in_hold(double now_ms) const {
    return holdup_enabled() && merge_ == pre_congestion_merge_ + 1 &&
           now_ms < hold_until_ms_;
  }
  void start_hold(double now_ms) {
    hold_until_ms_ = now_ms + params_.holdup_ms;
    hold_armed_ = false;
  }

  RatePolicy policy_;
  DpmParams params_;
  int merge_ = 1;
  int pre_congestion_merge_ = 0;
  bool hold_armed_ = false;
  double hold_until_ms_ = -std::numeric_limits<double>::infinity();
};

struct MergedPacket {
  std::vector<TelehapticFragment> fragments;
  uint32_t earliest_timestamp_ms = 0;

  int merge_count() const { return static_cast<int>(fragments.size()); }
  int payload_bytes() const {
    int total = 0;
    for (const auto& f : fragments) total += f.payload_bytes();
    return total;
  }
  bool has_audio() const {
    for (const auto& f : fragments)
      if (f.has_audio()) return true;
    return false;
  }
  bool has_video() const {
    for (const auto& f : fragments)
      if (f.has_video()) return true;
    return false;
  }
  MediaKind media_kind() const {
    // One A/V subheader per packet; audio content takes precedence.
    if (has_audio()) return MediaKind::HapticAudio;
    if (has_video()) return MediaKind::HapticVideo;
    return MediaKind::Haptic;
  }
};

// Buffers fragments until the target merge count is reached. When the target
// drops below the number already buffered (a downward merge switch), the
// buffer is flushed immediately as a smaller packet so no sample waits past
// the new schedule.
class Packetizer {
 public:
  std::optional<MergedPacket> submit(TelehapticFragment fragment,
                                     int target_merge) {
    pending_.push_back(std::move(fragment));
    if (static_cast<int>(pending_.size()) >= target_merge) return emit();
    return std::nullopt;
  }

  std::optional<MergedPacket> flush_if_at_least(int target_merge) {
    if (!pending_.empty() &&
        static_cast<int>(pending_.size()) >= target_merge)
      return emit();
    return std::nullopt;
  }

  int pending_count() const { return static_cast<int>(pending_.size()); }

 private:
  MergedPacket emit() {
    MergedPacket p;
    p.fragments = std::move(pending_);
    pending_.clear();
    p.earliest_timestamp_ms = p.fragments.front().haptic.timestamp_ms;
    for (const auto& f : p.fragments)
      p.earliest_timestamp_ms =
          std::min(p.earliest_timestamp_ms, f.haptic.timestamp_ms);
    return p;
  }

  std::vector<TelehapticFragment> pending_;
};

}  // namespace telehaptic
