#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <vector>

#include "telehaptic/types.hpp"

namespace telehaptic {

// Per-channel media generation parameters. The haptic clock is fixed at
// 1 kHz; audio/video are described by peak frame rate and peak frame size.
struct MediaConfig {
  uint32_t haptic_rate_hz = 1000;
  uint32_t haptic_sample_bytes = 12;
  uint32_t audio_fps = 0;
  uint32_t audio_frame_bytes = 0;
  uint32_t video_fps = 0;
  uint32_t video_frame_bytes = 0;

  bool has_av() const { return audio_fps > 0 || video_fps > 0; }
};

struct DerivedRates {
  double payload_rate_kbps = 0;  // total payload generation rate
  uint32_t fragment_bytes = 0;   // payload bytes multiplexed per 1 ms
  uint32_t av_budget_bytes = 0;  // fragment_bytes minus one haptic sample
};

// Payload rate and per-tick fragment size. The fragment size must come out
// integral; configurations that do not divide evenly are rejected.
inline DerivedRates derive_rates(const MediaConfig& cfg) {
  if (cfg.haptic_rate_hz != 1000)
    throw std::invalid_argument("haptic rate is fixed at 1 kHz");
  if (cfg.haptic_sample_bytes < 1)
    throw std::invalid_argument("haptic sample must be at least 1 byte");
  const uint64_t bytes_per_sec =
      static_cast<uint64_t>(cfg.haptic_rate_hz) * cfg.haptic_sample_bytes +
      static_cast<uint64_t>(cfg.audio_fps) * cfg.audio_frame_bytes +
      static_cast<uint64_t>(cfg.video_fps) * cfg.video_frame_bytes;
  if (bytes_per_sec % 1000 != 0)
    throw std::invalid_argument(
        "media configuration does not yield an integral fragment size");
  DerivedRates r;
  r.payload_rate_kbps = static_cast<double>(bytes_per_sec) * 8.0 / 1000.0;
  r.fragment_bytes = static_cast<uint32_t>(bytes_per_sec / 1000);
  if (cfg.haptic_sample_bytes > r.fragment_bytes)
    throw std::invalid_argument("haptic sample exceeds fragment budget");
  r.av_budget_bytes = r.fragment_bytes - cfg.haptic_sample_bytes;
  return r;
}

struct HapticSample {
  uint32_t timestamp_ms = 0;
  double value = 0.0;
};

// A contiguous run of bytes belonging to one (frame, fragment) of one A/V
// medium. A fragment of a frame may be delivered as more than one span when
// the per-tick budget boundary cuts through it.
struct AvSpan {
  Media kind = Media::Audio;
  uint16_t frame_no = 0;
  uint8_t fragment_no = 0;
  uint16_t bytes = 0;
  bool frame_last_byte = false;  // span carries the final byte of its frame
  int64_t frame_gen_ms = 0;
  uint32_t frame_bytes = 0;  // total size of the frame this span belongs to
};

struct TelehapticFragment {
  HapticSample haptic;
  uint16_t haptic_bytes = 0;
  std::vector<AvSpan> av;  // audio spans always precede video spans

  int payload_bytes() const {
    int total = haptic_bytes;
    for (const auto& s : av) total += s.bytes;
    return total;
  }
  bool has_audio() const {
    for (const auto& s : av)
      if (s.kind == Media::Audio) return true;
    return false;
  }
  bool has_video() const {
    for (const auto& s : av)
      if (s.kind == Media::Video) return true;
    return false;
  }
};

// Priority multiplexer: one fragment per 1 ms haptic tick, carrying the tick's
// haptic sample plus up to av_budget_bytes of pending audio/video data, audio
// strictly first. Frames are FIFO within each medium and split into
// ceil(size / budget) numbered fragments at enqueue time. The byte budget is
// filled exactly whenever enough A/V data is pending, so a tick's A/V load may
// close out one frame and begin the next.
class Multiplexer {
 public:
  explicit Multiplexer(const MediaConfig& cfg)
      : cfg_(cfg), rates_(derive_rates(cfg)) {}

  const MediaConfig& config() const { return cfg_; }
  const DerivedRates& rates() const { return rates_; }

  // Returns the number of fragments the frame was split into.
  int enqueue_frame(Media kind, uint32_t frame_bytes, int64_t t_ms) {
    if (kind == Media::Haptic)
      throw std::invalid_argument("haptic data is not framed");
    if (rates_.av_budget_bytes == 0)
      throw std::logic_error("channel carries no audio/video");
    const uint32_t limit = kind == Media::Audio ? cfg_.audio_frame_bytes
                                                : cfg_.video_frame_bytes;
    if (frame_bytes > limit)
      throw std::invalid_argument("frame exceeds configured peak size");
    if (frame_bytes == 0) return 0;

    auto& q = queue_for(kind);
    auto& frame_no = next_frame_no_[kind == Media::Audio ? 0 : 1];
    const uint32_t budget = rates_.av_budget_bytes;
    const int n_fragments =
        static_cast<int>((frame_bytes + budget - 1) / budget);
    uint32_t remaining = frame_bytes;
    for (int i = 0; i < n_fragments; ++i) {
      Chunk c;
      c.frame_no = frame_no;
      c.fragment_no = static_cast<uint8_t>(i);
      c.size = remaining < budget ? remaining : budget;
      c.gen_ms = t_ms;
      c.frame_bytes = frame_bytes;
      c.last_of_frame = (i == n_fragments - 1);
      q.push_back(c);
      remaining -= c.size;
    }
    ++frame_no;
    enqueued_bytes_[kind == Media::Audio ? 0 : 1] += frame_bytes;
    return n_fragments;
  }

  // Called once per 1 ms tick with the tick's haptic sample.
  TelehapticFragment next_fragment(int64_t t_ms, double haptic_value = 0.0) {
    TelehapticFragment f;
    f.haptic.timestamp_ms = static_cast<uint32_t>(t_ms);
    f.haptic.value = haptic_value;
    f.haptic_bytes = static_cast<uint16_t>(cfg_.haptic_sample_bytes);
    uint32_t budget = rates_.av_budget_bytes;
    budget -= fill(audio_q_, Media::Audio, budget, f);
    fill(video_q_, Media::Video, budget, f);
    return f;
  }

  // Pulls up to `budget` pending A/V bytes without a haptic sample, audio
  // first. Used by transmitters that batch A/V separately from force updates.
  std::vector<AvSpan> take_av(uint32_t budget) {
    TelehapticFragment tmp;
    budget -= fill(audio_q_, Media::Audio, budget, tmp);
    fill(video_q_, Media::Video, budget, tmp);
    return std::move(tmp.av);
  }

  int64_t enqueued_bytes(Media kind) const {
    return enqueued_bytes_[kind == Media::Audio ? 0 : 1];
  }
  int64_t emitted_bytes(Media kind) const {
    return emitted_bytes_[kind == Media::Audio ? 0 : 1];
  }
  int64_t pending_bytes(Media kind) const {
    int64_t total = 0;
    for (const auto& c : kind == Media::Audio ? audio_q_ : video_q_)
      total += c.size - c.consumed;
    return total;
  }

 private:
  struct Chunk {
    uint16_t frame_no = 0;
    uint8_t fragment_no = 0;
    uint32_t size = 0;
    uint32_t consumed = 0;
    int64_t gen_ms = 0;
    uint32_t frame_bytes = 0;
    bool last_of_frame = false;
  };

  std::deque<Chunk>& queue_for(Media kind) {
    return kind == Media::Audio ? audio_q_ : video_q_;
  }

  uint32_t fill(std::deque<Chunk>& q, Media kind, uint32_t budget,
                TelehapticFragment& f) {
    uint32_t used = 0;
    while (budget > used && !q.empty()) {
      Chunk& c = q.front();
      const uint32_t take = std::min(budget - used, c.size - c.consumed);
      AvSpan span;
      span.kind = kind;
      span.frame_no = c.frame_no;
      span.fragment_no = c.fragment_no;
      span.bytes = static_cast<uint16_t>(take);
      span.frame_gen_ms = c.gen_ms;
      span.frame_bytes = c.frame_bytes;
      c.consumed += take;
      span.frame_last_byte = c.last_of_frame && c.consumed == c.size;
      f.av.push_back(span);
      used += take;
      if (c.consumed == c.size) q.pop_front();
    }
    emitted_bytes_[kind == Media::Audio ? 0 : 1] += used;
    return used;
  }

  MediaConfig cfg_;
  DerivedRates rates_;
  std::deque<Chunk> audio_q_;
  std::deque<Chunk> video_q_;
  uint16_t next_frame_no_[2] = {0, 0};
  int64_t enqueued_bytes_[2] = {0, 0};
  int64_t emitted_bytes_[2] = {0, 0};
};

}  // namespace telehaptic
