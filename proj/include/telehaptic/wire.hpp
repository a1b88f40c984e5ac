#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace telehaptic {

// Application-layer packet header codec. The layout is fixed and big-endian,
// most significant bit first:
//
//   byte 0        M(3) | k(3) | D(1) | X(1)
//   bytes 1..3    notification delay, microseconds (24 bit)
//   bytes 4..7    haptic sample timestamp, milliseconds (32 bit)
//   bytes 8..12   A/V subheader, present iff M != Haptic:
//                 frame number (16), payload size in bytes (16),
//                 fragment number (8)
//
// A haptic-only header is 8 bytes, a haptic+audio or haptic+video header is
// 13 bytes.

enum class MediaKind : uint8_t {
  Haptic = 0,
  HapticAudio = 1,
  HapticVideo = 2,
};

constexpr int kHapticHeaderBytes = 8;
constexpr int kAvHeaderBytes = 13;
constexpr uint32_t kMaxNotificationUs = (1u << 24) - 1;

struct AvSubheader {
  uint16_t frame_no = 0;
  uint16_t payload_size_bytes = 0;
  uint8_t fragment_no = 0;

  bool operator==(const AvSubheader&) const = default;
};

struct PacketHeader {
  MediaKind media = MediaKind::Haptic;
  uint8_t merge_count = 1;          // field k, 1..7
  bool delay_indicator = false;     // field D: 0 fresh, 1 repetitive
  bool reserved_x = false;          // field X: carried verbatim, senders use 0
  uint32_t notification_delay_us = 0;
  uint32_t haptic_timestamp_ms = 0;
  std::optional<AvSubheader> av;    // present iff media != Haptic

  bool operator==(const PacketHeader&) const = default;
};

class WireError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr int encoded_size(MediaKind media) {
  return media == MediaKind::Haptic ? kHapticHeaderBytes : kAvHeaderBytes;
}

inline std::vector<uint8_t> encode_header(const PacketHeader& h) {
  const uint8_t media = static_cast<uint8_t>(h.media);
  if (media > 2) throw WireError("invalid media kind");
  if (h.merge_count < 1 || h.merge_count > 7)
    throw WireError("merge count outside 1..7");
  if (h.notification_delay_us > kMaxNotificationUs)
    throw WireError("notification delay exceeds 24 bits");
  const bool want_av = h.media != MediaKind::Haptic;
  if (want_av != h.av.has_value())
    throw WireError("A/V subheader presence must match media kind");

  std::vector<uint8_t> out;
  out.reserve(encoded_size(h.media));
  out.push_back(static_cast<uint8_t>((media << 5) | (h.merge_count << 2) |
                                     (h.delay_indicator ? 0x02 : 0) |
                                     (h.reserved_x ? 0x01 : 0)));
  out.push_back(static_cast<uint8_t>(h.notification_delay_us >> 16));
  out.push_back(static_cast<uint8_t>(h.notification_delay_us >> 8));
  out.push_back(static_cast<uint8_t>(h.notification_delay_us));
  out.push_back(static_cast<uint8_t>(h.haptic_timestamp_ms >> 24));
  out.push_back(static_cast<uint8_t>(h.haptic_timestamp_ms >> 16));
  out.push_back(static_cast<uint8_t>(h.haptic_timestamp_ms >> 8));
  out.push_back(static_cast<uint8_t>(h.haptic_timestamp_ms));
  if (want_av) {
    out.push_back(static_cast<uint8_t>(h.av->frame_no >> 8));
    out.push_back(static_cast<uint8_t>(h.av->frame_no));
    out.push_back(static_cast<uint8_t>(h.av->payload_size_bytes >> 8));
    out.push_back(static_cast<uint8_t>(h.av->payload_size_bytes));
    out.push_back(h.av->fragment_no);
  }
  return out;
}

// Decodes one header from the front of `bytes`; consumes 8 or 13 bytes
// depending on the decoded media kind.
inline PacketHeader decode_header(std::span<const uint8_t> bytes) {
  if (bytes.size() < kHapticHeaderBytes)
    throw WireError("truncated header: need at least 8 bytes");
  const uint8_t b0 = bytes[0];
  const uint8_t media = b0 >> 5;
  if (media > 2) throw WireError("invalid media code on decode");
  const uint8_t merge = (b0 >> 2) & 0x07;
  if (merge == 0) throw WireError("merge count 0 is invalid");

  PacketHeader h;
  h.media = static_cast<MediaKind>(media);
  h.merge_count = merge;
  h.delay_indicator = (b0 & 0x02) != 0;
  h.reserved_x = (b0 & 0x01) != 0;
  h.notification_delay_us = (static_cast<uint32_t>(bytes[1]) << 16) |
                            (static_cast<uint32_t>(bytes[2]) << 8) |
                            static_cast<uint32_t>(bytes[3]);
  h.haptic_timestamp_ms = (static_cast<uint32_t>(bytes[4]) << 24) |
                          (static_cast<uint32_t>(bytes[5]) << 16) |
                          (static_cast<uint32_t>(bytes[6]) << 8) |
                          static_cast<uint32_t>(bytes[7]);
  if (h.media != MediaKind::Haptic) {
    if (bytes.size() < kAvHeaderBytes)
      throw WireError("truncated header: A/V subheader missing");
    AvSubheader av;
    av.frame_no =
        static_cast<uint16_t>((static_cast<uint16_t>(bytes[8]) << 8) | bytes[9]);
    av.payload_size_bytes = static_cast<uint16_t>(
        (static_cast<uint16_t>(bytes[10]) << 8) | bytes[11]);
    av.fragment_no = bytes[12];
    h.av = av;
  }
  return h;
}

}  // namespace telehaptic
