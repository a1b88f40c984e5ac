#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <map>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "telehaptic/trace.hpp"
#include "telehaptic/types.hpp"

namespace telehaptic {

// Per-media one-way delay / jitter ceilings, both in ms.
struct QosLimit {
  double delay_ms;
  double jitter_ms;
};

inline QosLimit qos_limit(Media m) {
  switch (m) {
    case Media::Haptic: return {30.0, 10.0};
    case Media::Audio: return {150.0, 30.0};
    default: return {400.0, 30.0};
  }
}

struct MediaStats {
  int64_t delivered = 0;
  int64_t dropped = 0;
  double max_delay_ms = 0;
  double mean_delay_ms = 0;
  double max_jitter_ms = 0;
  double mean_jitter_ms = 0;
  bool qos_delay_ok = true;
  bool qos_jitter_ok = true;

  bool qos_ok() const { return qos_delay_ok && qos_jitter_ok; }
};

struct StreamStats {
  int64_t sent_packets = 0;
  int64_t delivered_packets = 0;
  int64_t dropped_packets = 0;
  double delivered_kbps = 0;
  double loss_fraction = 0;
};

struct Summary {
  int64_t window_start_ms = 0;
  int64_t window_end_ms = 0;
  MediaStats media[2][3];  // [channel][media]
  std::map<StreamId, StreamStats> streams;

  const MediaStats& of(Channel c, Media m) const {
    return media[static_cast<int>(c)][static_cast<int>(m)];
  }
  bool qos_ok(Channel c) const {
    const auto& m = media[static_cast<int>(c)];
    return m[0].qos_ok() && m[1].qos_ok() && m[2].qos_ok();
  }
};

// Playout instants for an ordered sample sequence: each sample is displayed
// as soon as it has arrived but never earlier than its generation spacing
// after its predecessor. This reproduces a 1 kHz display clock feeding from
// the receive buffer; under a constant merge count it spaces samples exactly
// like the source did.
inline std::vector<double> playout_display_ms(
    const std::vector<const SampleRecord*>& ordered) {
  std::vector<double> display(ordered.size(), 0.0);
  for (size_t i = 0; i < ordered.size(); ++i) {
    const double recv = ns_to_ms(ordered[i]->recv_ns);
    if (i == 0) {
      display[i] = recv;
    } else {
      const double gap = static_cast<double>(ordered[i]->gen_ms -
                                             ordered[i - 1]->gen_ms);
      display[i] = std::max(recv, display[i - 1] + gap);
    }
  }
  return display;
}

namespace detail {

// Haptic jitter is deviation of playout spacing from generation spacing;
// audio/video jitter is deviation of the raw delivery spacing, frames being
// consumed at the frame rate without a sample-level playout buffer.
inline void jitter_stats(const std::vector<const SampleRecord*>& ordered,
                         bool use_playout, MediaStats& out) {
  if (ordered.size() < 2) return;
  std::vector<double> times;
  if (use_playout) {
    times = playout_display_ms(ordered);
  } else {
    times.reserve(ordered.size());
    for (const auto* s : ordered) times.push_back(ns_to_ms(s->recv_ns));
  }
  double total = 0;
  for (size_t i = 1; i < ordered.size(); ++i) {
    const double gen_gap =
        static_cast<double>(ordered[i]->gen_ms - ordered[i - 1]->gen_ms);
    const double j = std::abs((times[i] - times[i - 1]) - gen_gap);
    out.max_jitter_ms = std::max(out.max_jitter_ms, j);
    total += j;
  }
  out.mean_jitter_ms = total / static_cast<double>(ordered.size() - 1);
}

}  // namespace detail

inline Summary compute_metrics(const Trace& trace, int64_t window_start_ms,
                               int64_t window_end_ms = -1) {
  if (window_end_ms < 0) window_end_ms = trace.duration_ms;
  if (window_end_ms <= window_start_ms)
    throw std::invalid_argument("empty metrics window");

  Summary sum;
  sum.window_start_ms = window_start_ms;
  sum.window_end_ms = window_end_ms;

  std::vector<const SampleRecord*> delivered[2][3];
  for (const auto& s : trace.samples) {
    if (s.gen_ms < window_start_ms || s.gen_ms >= window_end_ms) continue;
    auto& m = sum.media[static_cast<int>(s.channel)][static_cast<int>(s.media)];
    if (s.dropped) {
      ++m.dropped;
      continue;
    }
    ++m.delivered;
    delivered[static_cast<int>(s.channel)][static_cast<int>(s.media)].push_back(
        &s);
  }

  for (int c = 0; c < 2; ++c) {
    for (int med = 0; med < 3; ++med) {
      auto& list = delivered[c][med];
      std::sort(list.begin(), list.end(),
                [](const SampleRecord* a, const SampleRecord* b) {
                  return a->gen_ms < b->gen_ms;
                });
      MediaStats& m = sum.media[c][med];
      double total = 0;
      for (const auto* s : list) {
        const double d = s->delay_ms();
        m.max_delay_ms = std::max(m.max_delay_ms, d);
        total += d;
      }
      if (!list.empty()) m.mean_delay_ms = total / static_cast<double>(list.size());
      detail::jitter_stats(list, med == static_cast<int>(Media::Haptic), m);
      const QosLimit q = qos_limit(static_cast<Media>(med));
      m.qos_delay_ok = m.max_delay_ms <= q.delay_ms && m.dropped == 0;
      m.qos_jitter_ok = m.max_jitter_ms <= q.jitter_ms;
    }
  }

  const double window_s =
      static_cast<double>(window_end_ms - window_start_ms) / 1000.0;
  for (const auto& [id, counters] : trace.streams) {
    StreamStats st;
    for (const auto& p : trace.packets) {
      if (!(p.stream == id)) continue;
      const double t = ns_to_ms(p.send_ns);
      if (t < static_cast<double>(window_start_ms) ||
          t >= static_cast<double>(window_end_ms))
        continue;
      ++st.sent_packets;
      if (p.dropped)
        ++st.dropped_packets;
      else {
        ++st.delivered_packets;
        st.delivered_kbps += static_cast<double>(p.size_bytes) * 8.0;
      }
    }
    st.delivered_kbps /= window_s * 1000.0;
    st.loss_fraction =
        st.sent_packets == 0
            ? 0.0
            : static_cast<double>(st.dropped_packets) /
                  static_cast<double>(st.sent_packets);
    sum.streams[id] = st;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Merge-count timeline utilities.

struct MergeSegment {
  TimeNs start = 0;
  TimeNs end = 0;
  int merge = 1;
};

inline std::vector<MergeSegment> merge_timeline(const Trace& trace, Channel ch) {
  std::vector<MergeSegment> segs;
  TimeNs t = 0;
  int k = 1;
  for (const auto& c : trace.merge_changes) {
    if (c.channel != ch) continue;
    segs.push_back({t, c.t, k});
    t = c.t;
    k = c.to;
  }
  segs.push_back({t, trace.duration_ms * kNsPerMs, k});
  return segs;
}

// Time-weighted most common merge count in [start_ms, end_ms).
inline int modal_merge(const std::vector<MergeSegment>& segs, int64_t start_ms,
                       int64_t end_ms) {
  double weight[8] = {};
  for (const auto& s : segs) {
    const TimeNs a = std::max(s.start, start_ms * kNsPerMs);
    const TimeNs b = std::min(s.end, end_ms * kNsPerMs);
    if (b > a && s.merge >= 1 && s.merge <= 7)
      weight[s.merge] += static_cast<double>(b - a);
  }
  int best = 1;
  for (int k = 2; k <= 7; ++k)
    if (weight[k] > weight[best]) best = k;
  return best;
}

// Fraction of [start_ms, end_ms) spent at merge counts in `set`.
inline double merge_time_fraction(const std::vector<MergeSegment>& segs,
                                  int64_t start_ms, int64_t end_ms,
                                  std::initializer_list<int> set) {
  double in = 0, total = 0;
  for (const auto& s : segs) {
    const TimeNs a = std::max(s.start, start_ms * kNsPerMs);
    const TimeNs b = std::min(s.end, end_ms * kNsPerMs);
    if (b <= a) continue;
    total += static_cast<double>(b - a);
    for (int k : set)
      if (s.merge == k) in += static_cast<double>(b - a);
  }
  return total == 0 ? 0.0 : in / total;
}

// Playout jitter of the first sample affected by each from->to merge switch.
inline std::vector<double> switch_jitters_ms(const Trace& trace, Channel ch,
                                             int from, int to) {
  std::vector<const SampleRecord*> haptic;
  for (const auto& s : trace.samples)
    if (s.channel == ch && s.media == Media::Haptic && !s.dropped)
      haptic.push_back(&s);
  std::sort(haptic.begin(), haptic.end(),
            [](const SampleRecord* a, const SampleRecord* b) {
              return a->gen_ms < b->gen_ms;
            });
  const auto display = playout_display_ms(haptic);
  std::vector<double> out;
  for (size_t i = 1; i < haptic.size(); ++i) {
    if (haptic[i - 1]->merge_count == from && haptic[i]->merge_count == to &&
        from != to) {
      const double gen_gap =
          static_cast<double>(haptic[i]->gen_ms - haptic[i - 1]->gen_ms);
      out.push_back(std::abs((display[i] - display[i - 1]) - gen_gap));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Signal reconstruction quality.

inline double snr_db(std::span<const double> reference,
                     std::span<const double> reconstructed) {
  if (reference.size() != reconstructed.size())
    throw std::invalid_argument("signal lengths differ");
  double signal = 0, noise = 0;
  for (size_t i = 0; i < reference.size(); ++i) {
    signal += reference[i] * reference[i];
    const double e = reference[i] - reconstructed[i];
    noise += e * e;
  }
  if (signal == 0) throw std::invalid_argument("zero-energy reference");
  if (noise == 0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(signal / noise);
}

inline void write_summary_csv(std::ostream& os, const Summary& sum) {
  os << "channel,media,delivered,dropped,max_delay_ms,mean_delay_ms,"
        "max_jitter_ms,mean_jitter_ms,qos_delay_ms,qos_jitter_ms,qos_ok\n";
  char buf[256];
  for (int c = 0; c < 2; ++c) {
    for (int med = 0; med < 3; ++med) {
      const MediaStats& m = sum.media[c][med];
      if (m.delivered == 0 && m.dropped == 0) continue;
      const QosLimit q = qos_limit(static_cast<Media>(med));
      std::snprintf(buf, sizeof(buf),
                    "%s,%s,%lld,%lld,%.6f,%.6f,%.6f,%.6f,%g,%g,%d\n",
                    to_string(static_cast<Channel>(c)),
                    to_string(static_cast<Media>(med)),
                    static_cast<long long>(m.delivered),
                    static_cast<long long>(m.dropped), m.max_delay_ms,
                    m.mean_delay_ms, m.max_jitter_ms, m.mean_jitter_ms,
                    q.delay_ms, q.jitter_ms, m.qos_ok() ? 1 : 0);
      os << buf;
    }
  }
  os << "\nstream,sent,delivered,dropped,throughput_kbps,loss_fraction\n";
  for (const auto& [id, st] : sum.streams) {
    std::snprintf(buf, sizeof(buf), "%s,%lld,%lld,%lld,%.3f,%.6f\n",
                  id.label().c_str(), static_cast<long long>(st.sent_packets),
                  static_cast<long long>(st.delivered_packets),
                  static_cast<long long>(st.dropped_packets),
                  st.delivered_kbps, st.loss_fraction);
    os << buf;
  }
}

}  // namespace telehaptic
