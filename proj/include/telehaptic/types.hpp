#pragma once

#include <cstdint>
#include <string>

namespace telehaptic {

// Simulation time is kept in integer nanoseconds so that event ordering is
// exact and runs are bit-reproducible.
using TimeNs = int64_t;

constexpr TimeNs kNsPerMs = 1'000'000;
constexpr TimeNs kNsPerUs = 1'000;

constexpr TimeNs ms_to_ns(double ms) {
  return static_cast<TimeNs>(ms * static_cast<double>(kNsPerMs) + 0.5);
}

constexpr double ns_to_ms(TimeNs ns) {
  return static_cast<double>(ns) / static_cast<double>(kNsPerMs);
}

// Transmission time of `bytes` on a link of `rate_kbps`, rounded to 1 ns.
constexpr TimeNs transmission_ns(int64_t bytes, double rate_kbps) {
  return static_cast<TimeNs>(static_cast<double>(bytes) * 8.0e6 / rate_kbps +
                             0.5);
}

enum class Channel : uint8_t { Forward = 0, Backward = 1 };

inline const char* to_string(Channel c) {
  return c == Channel::Forward ? "fwd" : "bwd";
}

inline Channel opposite(Channel c) {
  return c == Channel::Forward ? Channel::Backward : Channel::Forward;
}

enum class Media : uint8_t { Haptic = 0, Audio = 1, Video = 2 };

inline const char* to_string(Media m) {
  switch (m) {
    case Media::Haptic: return "haptic";
    case Media::Audio: return "audio";
    default: return "video";
  }
}

// Fixed lower-layer header cost per packet: 26 B link + 20 B network +
// 8 B transport. Application-layer header bytes come from the wire codec.
constexpr int kLowerLayerOverheadBytes = 54;

}  // namespace telehaptic
