#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "telehaptic/dpm.hpp"
#include "telehaptic/feedback.hpp"
#include "telehaptic/mux.hpp"
#include "telehaptic/netsim/events.hpp"
#include "telehaptic/netsim/traffic.hpp"
#include "telehaptic/scenario.hpp"
#include "telehaptic/signal.hpp"
#include "telehaptic/trace.hpp"
#include "telehaptic/types.hpp"
#include "telehaptic/weber.hpp"
#include "telehaptic/wire.hpp"

namespace telehaptic {

// Discrete-event simulation of the single-bottleneck dumbbell. The two
// directions are independent unidirectional paths; queueing happens only at
// the bottleneck ingress of each direction, access links contribute
// propagation delay only. One-way propagation is 3 * link_prop_ms: ingress
// access link before the queue, bottleneck link and egress access link after
// service.
class Simulator {
 public:
  explicit Simulator(Scenario scenario, bool record_queue_samples = false)
      : sc_(std::move(scenario)), record_queue_samples_(record_queue_samples) {
    sc_.validate();
  }

  // Runs the scenario to completion. Generation stops at duration_ms and the
  // event queue then drains, so every packet is either delivered or dropped.
  Trace run() {
    if (ran_) throw std::logic_error("Simulator::run may only be called once");
    ran_ = true;
    setup();
    events_.run();
    trace_.max_queue_packets[0] = queues_[0].max_occupancy;
    trace_.max_queue_packets[1] = queues_[1].max_occupancy;
    return std::move(trace_);
  }

  // Force signal used on the backward channel for this scenario.
  static std::vector<double> force_signal(const Scenario& sc) {
    SignalParams p = sc.signal;
    p.duration_ms = sc.duration_ms;
    return make_force_signal(p);
  }

 private:
  // ------------------------------------------------------------------ types
  struct Packet {
    StreamId stream;
    int wire_bytes = 0;
    TimeNs send_ns = 0;
    size_t record_index = 0;
    std::vector<TelehapticFragment> fragments;
    std::vector<uint8_t> header_bytes;
    TimeNs probe_origin_ns = -1;
  };

  struct Queue {
    std::deque<Packet> waiting;
    std::optional<Packet> serving;
    int64_t waiting_bytes = 0;
    int max_occupancy = 0;
  };

  enum class TriggerSource : uint8_t { None, Notifications, ProbeRtt };

  struct Endpoint {
    Channel tx_channel = Channel::Forward;
    MediaConfig media;
    std::unique_ptr<Multiplexer> mux;
    std::unique_ptr<MergeController> controller;
    Packetizer packetizer;
    std::unique_ptr<DelayMonitor> incoming_delay;
    std::unique_ptr<TriggerDetector> detector;
    TriggerSource trigger_source = TriggerSource::Notifications;
    bool weber_tx = false;
    double clock_offset_ms = 0;
    int64_t audio_period_ms = 0;
    int64_t video_period_ms = 0;
  };

  struct FrameProgress {
    uint32_t remaining = 0;
    int64_t gen_ms = 0;
    bool dropped = false;
  };

  // ------------------------------------------------------------------ setup
  void setup() {
    trace_.duration_ms = sc_.duration_ms;
    trace_.seed = sc_.seed;

    configure_endpoint(op_, Channel::Forward, sc_.media_fwd);
    configure_endpoint(top_, Channel::Backward, sc_.media_bwd);
    op_.clock_offset_ms = static_cast<double>(sc_.clock_offset_ms);

    switch (sc_.protocol) {
      case Protocol::Dpm:
        break;
      case Protocol::DpmHoldup:
        break;  // holdup_ms already carried in sc_.dpm
      case Protocol::NoMerge:
        set_policy(op_, RatePolicy::Fixed);
        set_policy(top_, RatePolicy::Fixed);
        break;
      case Protocol::Multistep:
        set_policy(op_, RatePolicy::MultistepIncrease);
        set_policy(top_, RatePolicy::MultistepIncrease);
        break;
      case Protocol::RtpFeedback:
        set_policy(op_, RatePolicy::Fixed);
        set_policy(top_, RatePolicy::Fixed);
        op_.incoming_delay =
            std::make_unique<DelayMonitor>(sc_.rtp_report_interval_ms);
        top_.incoming_delay =
            std::make_unique<DelayMonitor>(sc_.rtp_report_interval_ms);
        break;
      case Protocol::Nafcah:
        set_policy(op_, RatePolicy::MultistepIncrease);
        op_.trigger_source = TriggerSource::ProbeRtt;
        break;
      case Protocol::WeberMux:
        top_.weber_tx = true;
        top_.trigger_source = TriggerSource::None;
        set_policy(top_, RatePolicy::Fixed);
        break;
    }

    force_ = force_signal(sc_);
    if (top_.weber_tx) weber_mask_ = weber_mask(force_, sc_.weber);

    // Media ticks.
    schedule_tick(op_, 0);
    schedule_tick(top_, 0);

    // Cross traffic.
    for (size_t i = 0; i < sc_.cross_fwd.size(); ++i)
      start_cross_source(Channel::Forward, static_cast<int>(i),
                         sc_.cross_fwd[i]);
    for (size_t i = 0; i < sc_.cross_bwd.size(); ++i)
      start_cross_source(Channel::Backward, static_cast<int>(i),
                         sc_.cross_bwd[i]);

    // Congestion probes.
    if (sc_.protocol == Protocol::Nafcah) schedule_probe(0);
  }

  void configure_endpoint(Endpoint& ep, Channel ch, const MediaConfig& media) {
    ep.tx_channel = ch;
    ep.media = media;
    ep.mux = std::make_unique<Multiplexer>(media);
    ep.controller =
        std::make_unique<MergeController>(RatePolicy::Simd, sc_.dpm);
    ep.incoming_delay = std::make_unique<DelayMonitor>();
    ep.detector = std::make_unique<TriggerDetector>(sc_.feedback);
    ep.trigger_source = TriggerSource::Notifications;
    if (media.audio_fps > 0) {
      if (1000 % media.audio_fps != 0)
        throw ConfigError("audio_fps must divide 1000");
      ep.audio_period_ms = 1000 / media.audio_fps;
    }
    if (media.video_fps > 0) {
      if (1000 % media.video_fps != 0)
        throw ConfigError("video_fps must divide 1000");
      ep.video_period_ms = 1000 / media.video_fps;
    }
  }

  void set_policy(Endpoint& ep, RatePolicy policy) {
    ep.controller = std::make_unique<MergeController>(policy, sc_.dpm);
  }

  static uint64_t mix_seed(uint64_t seed, uint64_t tag) {
    uint64_t x = seed * 0x9E3779B97F4A7C15ull + tag;
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
  }

  void start_cross_source(Channel ch, int index, const CrossTrafficConfig& cfg) {
    const uint64_t seed =
        mix_seed(sc_.seed, 0x1000u * (static_cast<int>(ch) + 1) + index);
    cross_.push_back(std::make_unique<CrossSource>(cfg, seed, sc_.duration_ms));
    CrossSource* src = cross_.back().get();
    schedule_cross_emission(ch, index, src);
  }

  void schedule_cross_emission(Channel ch, int index, CrossSource* src) {
    auto next = src->next_emission();
    if (!next) return;
    events_.schedule(*next, EventClass::Tick, [this, ch, index, src] {
      Packet p;
      p.stream = {ch, StreamKind::Cross, index};
      p.wire_bytes = src->config().wire_bytes();
      p.send_ns = events_.now();
      send_packet(std::move(p));
      schedule_cross_emission(ch, index, src);
    });
  }

  void schedule_tick(Endpoint& ep, int64_t t_ms) {
    if (t_ms >= sc_.duration_ms) return;
    events_.schedule(t_ms * kNsPerMs, EventClass::Tick, [this, &ep, t_ms] {
      on_tick(ep, t_ms);
      schedule_tick(ep, t_ms + 1);
    });
  }

  void schedule_probe(int64_t n) {
    const TimeNs at =
        static_cast<TimeNs>(static_cast<double>(n) * 1000.0 / sc_.probe_hz *
                            static_cast<double>(kNsPerMs));
    if (at >= sc_.duration_ms * kNsPerMs) return;
    events_.schedule(at, EventClass::Tick, [this, n] {
      Packet p;
      p.stream = {Channel::Forward, StreamKind::Probe, 0};
      p.wire_bytes = sc_.probe_wire_bytes;
      p.send_ns = events_.now();
      p.probe_origin_ns = events_.now();
      send_packet(std::move(p));
      schedule_probe(n + 1);
    });
  }

  // ------------------------------------------------------------- generation
  void on_tick(Endpoint& ep, int64_t t_ms) {
    if (ep.audio_period_ms > 0 && t_ms % ep.audio_period_ms == 0)
      ep.mux->enqueue_frame(Media::Audio, ep.media.audio_frame_bytes, t_ms);
    if (ep.video_period_ms > 0 && t_ms % ep.video_period_ms == 0)
      ep.mux->enqueue_frame(Media::Video, ep.media.video_frame_bytes, t_ms);

    if (ep.weber_tx) {
      weber_tick(ep, t_ms);
      return;
    }

    const double value =
        ep.tx_channel == Channel::Backward &&
                t_ms < static_cast<int64_t>(force_.size())
            ? force_[static_cast<size_t>(t_ms)]
            : 0.0;
    TelehapticFragment frag = ep.mux->next_fragment(t_ms, value);
    auto packet = ep.packetizer.submit(std::move(frag),
                                       ep.controller->merge_count());
    if (packet) send_telehaptic(ep, std::move(*packet));
  }

  // Visual-haptic multiplexing with a perceptual deadband on force samples:
  // a perceptually significant sample goes out immediately with whatever A/V
  // bytes fit alongside; otherwise A/V alone is batched four ticks per packet.
  // No congestion control.
  void weber_tick(Endpoint& ep, int64_t t_ms) {
    const bool significant =
        t_ms < static_cast<int64_t>(weber_mask_.size()) &&
        weber_mask_[static_cast<size_t>(t_ms)] != 0;
    if (significant) {
      TelehapticFragment frag =
          ep.mux->next_fragment(t_ms, force_[static_cast<size_t>(t_ms)]);
      MergedPacket pkt;
      pkt.fragments.push_back(std::move(frag));
      pkt.earliest_timestamp_ms = static_cast<uint32_t>(t_ms);
      send_telehaptic(ep, std::move(pkt));
      return;
    }
    if (t_ms % 4 == 3) {
      auto spans = ep.mux->take_av(4 * ep.mux->rates().av_budget_bytes);
      if (spans.empty()) return;
      TelehapticFragment frag;
      frag.haptic_bytes = 0;
      frag.haptic.timestamp_ms = static_cast<uint32_t>(t_ms);
      frag.av = std::move(spans);
      MergedPacket pkt;
      pkt.fragments.push_back(std::move(frag));
      pkt.earliest_timestamp_ms = static_cast<uint32_t>(t_ms);
      send_telehaptic(ep, std::move(pkt));
    }
  }

  // ----------------------------------------------------------- transmission
  void send_telehaptic(Endpoint& ep, MergedPacket merged) {
    PacketHeader header;
    header.media = merged.media_kind();
    header.merge_count = static_cast<uint8_t>(merged.merge_count());
    header.haptic_timestamp_ms = merged.earliest_timestamp_ms;
    const Notification notif =
        ep.incoming_delay->next_notification(ns_to_ms(events_.now()));
    header.notification_delay_us = notif.delay_us;
    header.delay_indicator = notif.repetitive;
    if (sc_.protocol == Protocol::RtpFeedback && !notif.repetitive)
      trace_.feedback_report_ms.push_back(ns_to_ms(events_.now()));
    if (header.media != MediaKind::Haptic) {
      const AvSpan* first = nullptr;
      for (const auto& f : merged.fragments) {
        for (const auto& s : f.av) {
          const bool match =
              (header.media == MediaKind::HapticAudio) ==
              (s.kind == Media::Audio);
          if (match) {
            first = &s;
            break;
          }
        }
        if (first) break;
      }
      AvSubheader av;
      av.frame_no = first->frame_no;
      av.fragment_no = first->fragment_no;
      av.payload_size_bytes = static_cast<uint16_t>(first->frame_bytes);
      header.av = av;
    }

    Packet p;
    p.stream = {ep.tx_channel, StreamKind::Telehaptic, 0};
    p.header_bytes = encode_header(header);
    p.wire_bytes = merged.payload_bytes() + kLowerLayerOverheadBytes +
                   static_cast<int>(p.header_bytes.size());
    p.send_ns = events_.now();
    p.fragments = std::move(merged.fragments);
    send_packet(std::move(p));
  }

  void send_packet(Packet p) {
    auto& counters = trace_.streams[p.stream];
    ++counters.sent_packets;
    counters.sent_bytes += p.wire_bytes;
    PacketRecord rec;
    rec.stream = p.stream;
    rec.send_ns = p.send_ns;
    rec.size_bytes = p.wire_bytes;
    rec.merge_count = p.fragments.empty()
                          ? 0
                          : static_cast<uint8_t>(p.fragments.size());
    p.record_index = trace_.packets.size();
    trace_.packets.push_back(rec);

    // Ingress access link: propagation only.
    const TimeNs at = events_.now() + ms_to_ns(sc_.link_prop_ms);
    events_.schedule(at, EventClass::Arrival,
                     [this, pkt = std::move(p)]() mutable {
                       on_queue_arrival(std::move(pkt));
                     });
  }

  // ------------------------------------------------------------- bottleneck
  void on_queue_arrival(Packet p) {
    const int qi = static_cast<int>(p.stream.channel);
    Queue& q = queues_[qi];
    if (!q.serving) {
      q.serving = std::move(p);
      start_service(qi);
    } else if (static_cast<int>(q.waiting.size()) < sc_.queue_capacity_pkts) {
      q.waiting_bytes += p.wire_bytes;
      q.waiting.push_back(std::move(p));
    } else {
      drop_packet(std::move(p));
    }
    note_queue(qi);
  }

  void start_service(int qi) {
    Queue& q = queues_[qi];
    const TimeNs done =
        events_.now() + transmission_ns(q.serving->wire_bytes, sc_.mu_kbps);
    events_.schedule(done, EventClass::Departure,
                     [this, qi] { on_departure(qi); });
  }

  void on_departure(int qi) {
    Queue& q = queues_[qi];
    Packet p = std::move(*q.serving);
    q.serving.reset();

    if (p.stream.kind == StreamKind::Cross) {
      auto& counters = trace_.streams[p.stream];
      ++counters.delivered_packets;
      counters.delivered_bytes += p.wire_bytes;
    } else {
      // Bottleneck link + egress access link propagation to the endpoint.
      const TimeNs at = events_.now() + ms_to_ns(2.0 * sc_.link_prop_ms);
      events_.schedule(at, EventClass::Arrival,
                       [this, pkt = std::move(p)]() mutable {
                         on_endpoint_arrival(std::move(pkt));
                       });
    }

    if (!q.waiting.empty()) {
      q.serving = std::move(q.waiting.front());
      q.waiting.pop_front();
      q.waiting_bytes -= q.serving->wire_bytes;
      start_service(qi);
    }
    note_queue(qi);
  }

  void drop_packet(Packet p) {
    auto& counters = trace_.streams[p.stream];
    ++counters.dropped_packets;
    counters.dropped_bytes += p.wire_bytes;
    trace_.packets[p.record_index].dropped = true;
    for (const auto& frag : p.fragments) record_fragment(frag, p, true);
  }

  void note_queue(int qi) {
    Queue& q = queues_[qi];
    const int occupancy =
        static_cast<int>(q.waiting.size()) + (q.serving ? 1 : 0);
    q.max_occupancy = std::max(q.max_occupancy, occupancy);
    if (record_queue_samples_) {
      trace_.queue_samples.push_back(
          {static_cast<Channel>(qi), events_.now(), occupancy,
           q.waiting_bytes + (q.serving ? q.serving->wire_bytes : 0)});
    }
  }

  // --------------------------------------------------------------- receiver
  Endpoint& receiver_of(Channel ch) {
    return ch == Channel::Forward ? top_ : op_;
  }

  void on_endpoint_arrival(Packet p) {
    if (p.stream.kind == StreamKind::Probe) {
      auto& counters = trace_.streams[p.stream];
      ++counters.delivered_packets;
      counters.delivered_bytes += p.wire_bytes;
      Packet echo;
      echo.stream = {Channel::Backward, StreamKind::Echo, 0};
      echo.wire_bytes = sc_.probe_wire_bytes;
      echo.send_ns = events_.now();
      echo.probe_origin_ns = p.probe_origin_ns;
      send_packet(std::move(echo));
      return;
    }
    if (p.stream.kind == StreamKind::Echo) {
      auto& counters = trace_.streams[p.stream];
      ++counters.delivered_packets;
      counters.delivered_bytes += p.wire_bytes;
      Endpoint& ep = op_;
      if (ep.trigger_source == TriggerSource::ProbeRtt) {
        const double rtt_ms = ns_to_ms(events_.now() - p.probe_origin_ns);
        auto trig = ep.detector->ingest_ms(rtt_ms / 2.0, false);
        if (trig) handle_trigger(ep, *trig);
      }
      return;
    }

    auto& counters = trace_.streams[p.stream];
    ++counters.delivered_packets;
    counters.delivered_bytes += p.wire_bytes;

    Endpoint& rx = receiver_of(p.stream.channel);
    const PacketHeader header = decode_header(p.header_bytes);

    for (const auto& frag : p.fragments) record_fragment(frag, p, false);

    const DelayMeasurement m =
        measure_delay(ns_to_ms(events_.now()), header, rx.clock_offset_ms);
    if (m.clamped)
      ++trace_.clamped_measurements[static_cast<int>(p.stream.channel)];
    rx.incoming_delay->record(m);

    if (rx.trigger_source == TriggerSource::Notifications) {
      auto trig =
          rx.detector->ingest(header.notification_delay_us, header.delay_indicator);
      if (trig) handle_trigger(rx, *trig);
    }
  }

  void handle_trigger(Endpoint& ep, Trigger trig) {
    const int before = ep.controller->merge_count();
    const bool acted = ep.controller->on_trigger(trig, ns_to_ms(events_.now()));
    trace_.triggers.push_back({ep.tx_channel, events_.now(), trig, acted});
    if (!acted) return;
    const int after = ep.controller->merge_count();
    trace_.merge_changes.push_back({ep.tx_channel, events_.now(), before, after});
    auto flushed = ep.packetizer.flush_if_at_least(after);
    if (flushed) send_telehaptic(ep, std::move(*flushed));
  }

  // ------------------------------------------------------------- accounting
  void record_fragment(const TelehapticFragment& frag, const Packet& p,
                       bool dropped) {
    const Channel ch = p.stream.channel;
    const uint8_t k = static_cast<uint8_t>(p.fragments.size());
    if (frag.haptic_bytes > 0) {
      SampleRecord s;
      s.channel = ch;
      s.media = Media::Haptic;
      s.gen_ms = frag.haptic.timestamp_ms;
      s.recv_ns = dropped ? -1 : events_.now();
      s.merge_count = k;
      s.dropped = dropped;
      trace_.samples.push_back(s);
    }
    for (const auto& span : frag.av) {
      auto& progress =
          frames_[static_cast<int>(ch)][{span.kind, span.frame_no}];
      if (progress.remaining == 0 && !progress.dropped)
        progress = {span.frame_bytes, span.frame_gen_ms, false};
      progress.remaining -= span.bytes;
      if (dropped && !progress.dropped) {
        progress.dropped = true;
        SampleRecord s;
        s.channel = ch;
        s.media = span.kind;
        s.gen_ms = span.frame_gen_ms;
        s.recv_ns = -1;
        s.merge_count = k;
        s.dropped = true;
        trace_.samples.push_back(s);
      }
      if (progress.remaining == 0) {
        if (!progress.dropped) {
          SampleRecord s;
          s.channel = ch;
          s.media = span.kind;
          s.gen_ms = span.frame_gen_ms;
          s.recv_ns = events_.now();
          s.merge_count = k;
          s.dropped = false;
          trace_.samples.push_back(s);
        }
        frames_[static_cast<int>(ch)].erase({span.kind, span.frame_no});
      }
    }
  }

  // ----------------------------------------------------------------- fields
  Scenario sc_;
  bool record_queue_samples_ = false;
  bool ran_ = false;
  EventQueue events_;
  Trace trace_;
  Endpoint op_;   // transmits on the forward channel
  Endpoint top_;  // transmits on the backward channel
  Queue queues_[2];
  std::vector<std::unique_ptr<CrossSource>> cross_;
  std::vector<double> force_;
  std::vector<uint8_t> weber_mask_;
  std::map<std::pair<Media, uint16_t>, FrameProgress> frames_[2];
};

inline Trace run_scenario(const Scenario& sc, bool record_queue_samples = false) {
  return Simulator(sc, record_queue_samples).run();
}

}  // namespace telehaptic
