#pragma once

#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "telehaptic/feedback.hpp"
#include "telehaptic/types.hpp"

namespace telehaptic {

enum class StreamKind : uint8_t { Telehaptic = 0, Cross = 1, Probe = 2, Echo = 3 };

inline const char* to_string(StreamKind s) {
  switch (s) {
    case StreamKind::Telehaptic: return "telehaptic";
    case StreamKind::Cross: return "cross";
    case StreamKind::Probe: return "probe";
    default: return "echo";
  }
}

struct StreamId {
  Channel channel = Channel::Forward;
  StreamKind kind = StreamKind::Telehaptic;
  int index = 0;  // cross-source index within the channel

  auto tie() const { return std::tuple(channel, kind, index); }
  bool operator<(const StreamId& o) const { return tie() < o.tie(); }
  bool operator==(const StreamId& o) const { return tie() == o.tie(); }

  std::string label() const {
    std::string s = std::string(telehaptic::to_string(channel)) + "." +
                    telehaptic::to_string(kind);
    if (kind == StreamKind::Cross) s += "." + std::to_string(index);
    return s;
  }
};

struct SampleRecord {
  Channel channel = Channel::Backward;
  Media media = Media::Haptic;
  int64_t gen_ms = 0;
  TimeNs recv_ns = -1;  // -1 when dropped
  uint8_t merge_count = 1;
  bool dropped = false;

  double delay_ms() const {
    return dropped ? 0.0 : ns_to_ms(recv_ns) - static_cast<double>(gen_ms);
  }
};

struct PacketRecord {
  StreamId stream;
  TimeNs send_ns = 0;
  int size_bytes = 0;
  uint8_t merge_count = 0;  // 0 for non-telehaptic packets
  bool dropped = false;
};

struct QueueSample {
  Channel channel = Channel::Forward;
  TimeNs t = 0;
  int packets = 0;
  int64_t bytes = 0;
};

struct MergeChange {
  Channel channel = Channel::Backward;  // channel whose transmitter changed
  TimeNs t = 0;
  int from = 1;
  int to = 1;
};

struct TriggerRecord {
  Channel channel = Channel::Backward;  // channel whose rate the trigger steers
  TimeNs t = 0;
  Trigger kind = Trigger::Steady;
  bool acted = false;  // controller changed its merge count
};

struct StreamCounters {
  int64_t sent_packets = 0;
  int64_t sent_bytes = 0;
  int64_t delivered_packets = 0;
  int64_t delivered_bytes = 0;
  int64_t dropped_packets = 0;
  int64_t dropped_bytes = 0;
};

struct Trace {
  int64_t duration_ms = 0;
  uint64_t seed = 0;

  std::vector<SampleRecord> samples;
  std::vector<PacketRecord> packets;
  std::vector<QueueSample> queue_samples;
  std::vector<MergeChange> merge_changes;
  std::vector<TriggerRecord> triggers;
  std::map<StreamId, StreamCounters> streams;
  std::vector<double> feedback_report_ms;  // report-mode fresh notifications
  int clamped_measurements[2] = {0, 0};    // per receiving endpoint (fwd, bwd)
  int max_queue_packets[2] = {0, 0};       // per bottleneck queue
};

// One row per delivered or dropped sample. Times in ms; the receive time and
// delay columns are empty for dropped samples.
inline void write_samples_csv(std::ostream& os, const Trace& trace) {
  os << "t_gen_ms,t_recv_ms,channel,media,delay_ms,k,dropped\n";
  char buf[160];
  for (const auto& s : trace.samples) {
    if (s.dropped) {
      std::snprintf(buf, sizeof(buf), "%lld,,%s,%s,,%d,1\n",
                    static_cast<long long>(s.gen_ms), to_string(s.channel),
                    to_string(s.media), static_cast<int>(s.merge_count));
    } else {
      std::snprintf(buf, sizeof(buf), "%lld,%.6f,%s,%s,%.6f,%d,0\n",
                    static_cast<long long>(s.gen_ms), ns_to_ms(s.recv_ns),
                    to_string(s.channel), to_string(s.media), s.delay_ms(),
                    static_cast<int>(s.merge_count));
    }
    os << buf;
  }
}

inline void write_packets_csv(std::ostream& os, const Trace& trace) {
  os << "t_send_ms,stream,size_bytes,k,dropped\n";
  char buf[160];
  for (const auto& p : trace.packets) {
    std::snprintf(buf, sizeof(buf), "%.6f,%s,%d,%d,%d\n", ns_to_ms(p.send_ns),
                  p.stream.label().c_str(), p.size_bytes,
                  static_cast<int>(p.merge_count), p.dropped ? 1 : 0);
    os << buf;
  }
}

inline void write_merge_timeline_csv(std::ostream& os, const Trace& trace) {
  os << "t_ms,channel,from_k,to_k\n";
  char buf[96];
  for (const auto& c : trace.merge_changes) {
    std::snprintf(buf, sizeof(buf), "%.6f,%s,%d,%d\n", ns_to_ms(c.t),
                  to_string(c.channel), c.from, c.to);
    os << buf;
  }
}

}  // namespace telehaptic
