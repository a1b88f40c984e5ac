#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "telehaptic/dpm.hpp"
#include "telehaptic/feedback.hpp"
#include "telehaptic/mux.hpp"
#include "telehaptic/netsim/traffic.hpp"
#include "telehaptic/signal.hpp"
#include "telehaptic/weber.hpp"

namespace telehaptic {

enum class Protocol : uint8_t {
  Dpm,
  DpmHoldup,
  NoMerge,
  Multistep,
  RtpFeedback,
  Nafcah,
  WeberMux,
};

inline const char* to_string(Protocol p) {
  switch (p) {
    case Protocol::Dpm: return "dpm";
    case Protocol::DpmHoldup: return "dpm_holdup";
    case Protocol::NoMerge: return "no_merge";
    case Protocol::Multistep: return "multistep";
    case Protocol::RtpFeedback: return "rtp_feedback";
    case Protocol::Nafcah: return "nafcah";
    default: return "weber_mux";
  }
}

inline Protocol protocol_from_string(const std::string& s) {
  if (s == "dpm") return Protocol::Dpm;
  if (s == "dpm_holdup") return Protocol::DpmHoldup;
  if (s == "no_merge") return Protocol::NoMerge;
  if (s == "multistep") return Protocol::Multistep;
  if (s == "rtp_feedback") return Protocol::RtpFeedback;
  if (s == "nafcah") return Protocol::Nafcah;
  if (s == "weber_mux") return Protocol::WeberMux;
  throw std::invalid_argument("unknown protocol: " + s);
}

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Full description of one simulation run on the dumbbell topology. All links
// share the bottleneck capacity; the one-way path crosses three links, so the
// one-way propagation delay is 3 * link_prop_ms.
struct Scenario {
  double mu_kbps = 1500.0;
  double link_prop_ms = 5.0;
  int queue_capacity_pkts = 100;

  // Forward: operator commands, haptic only. Backward: force + audio + video.
  MediaConfig media_fwd{1000, 24, 0, 0, 0, 0};
  MediaConfig media_bwd{1000, 12, 50, 160, 25, 2000};
  std::vector<CrossTrafficConfig> cross_fwd;
  std::vector<CrossTrafficConfig> cross_bwd;

  Protocol protocol = Protocol::Dpm;
  int64_t duration_ms = 50000;
  uint64_t seed = 1;
  int clock_offset_ms = 0;

  FeedbackParams feedback{};
  DpmParams dpm{};
  double rtp_report_interval_ms = 500.0;
  double probe_hz = 100.0;
  int probe_wire_bytes = 64;
  WeberParams weber{};
  SignalParams signal{};

  int64_t metrics_start_ms = 500;

  double one_way_prop_ms() const { return 3.0 * link_prop_ms; }

  void validate() const {
    if (mu_kbps <= 0) throw ConfigError("mu_kbps must be > 0");
    if (duration_ms <= 0) throw ConfigError("duration_ms must be > 0");
    if (link_prop_ms < 0) throw ConfigError("link_prop_ms must be >= 0");
    if (queue_capacity_pkts < 1)
      throw ConfigError("queue_capacity_pkts must be >= 1");
    try {
      derive_rates(media_fwd);
      derive_rates(media_bwd);
      feedback.validate();
      dpm.validate();
      weber.validate();
      for (const auto& c : cross_fwd) c.validate();
      for (const auto& c : cross_bwd) c.validate();
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    if (protocol == Protocol::Nafcah && (probe_hz <= 0 || probe_wire_bytes <= 0))
      throw ConfigError("nafcah probes need positive rate and size");
  }
};

// ---------------------------------------------------------------------------
// Flat key/value scenario files. Sections group keys; cross-traffic sources
// are numbered sections. Unknown keys are rejected.

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (...) {
    throw ConfigError("bad numeric value for " + key + ": " + v);
  }
}

inline int64_t to_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const long long n = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return n;
  } catch (...) {
    throw ConfigError("bad integer value for " + key + ": " + v);
  }
}

inline void apply_media_key(MediaConfig& m, const std::string& key,
                            const std::string& value) {
  if (key == "haptic_sample_bytes")
    m.haptic_sample_bytes = static_cast<uint32_t>(to_int(key, value));
  else if (key == "audio_fps")
    m.audio_fps = static_cast<uint32_t>(to_int(key, value));
  else if (key == "audio_frame_bytes")
    m.audio_frame_bytes = static_cast<uint32_t>(to_int(key, value));
  else if (key == "video_fps")
    m.video_fps = static_cast<uint32_t>(to_int(key, value));
  else if (key == "video_frame_bytes")
    m.video_frame_bytes = static_cast<uint32_t>(to_int(key, value));
  else
    throw ConfigError("unknown media key: " + key);
}

inline void apply_cross_key(CrossTrafficConfig& c, const std::string& key,
                            const std::string& value) {
  if (key == "kind") {
    if (value == "cbr") c.kind = CrossTrafficConfig::Kind::Cbr;
    else if (value == "vbr") c.kind = CrossTrafficConfig::Kind::Vbr;
    else throw ConfigError("cross kind must be cbr or vbr");
  } else if (key == "rate_kbps") {
    c.rate_kbps = to_double(key, value);
  } else if (key == "rate_lo_kbps") {
    c.rate_lo_kbps = to_double(key, value);
  } else if (key == "rate_hi_kbps") {
    c.rate_hi_kbps = to_double(key, value);
  } else if (key == "payload_bytes") {
    c.payload_bytes = static_cast<int>(to_int(key, value));
  } else if (key == "redraw_ms") {
    c.redraw_ms = to_int(key, value);
  } else if (key == "on_ms") {
    if (c.schedule.empty()) c.schedule.push_back({});
    c.schedule.back().start_ms = to_int(key, value);
  } else if (key == "off_ms") {
    if (c.schedule.empty()) c.schedule.push_back({});
    c.schedule.back().stop_ms = to_int(key, value);
  } else {
    throw ConfigError("unknown cross-traffic key: " + key);
  }
}

}  // namespace detail

// Applies one dotted override, e.g. "scenario.duration_ms=20000",
// "cross.backward.0.rate_kbps=260" or the short form "duration_ms=20000".
inline void apply_override(Scenario& s, const std::string& dotted_key,
                           const std::string& value) {
  using detail::apply_cross_key;
  using detail::apply_media_key;
  using detail::to_double;
  using detail::to_int;

  std::vector<std::string> parts;
  std::string rest = dotted_key;
  while (true) {
    const auto dot = rest.find('.');
    if (dot == std::string::npos) {
      parts.push_back(rest);
      break;
    }
    parts.push_back(rest.substr(0, dot));
    rest = rest.substr(dot + 1);
  }

  if (parts.size() == 1 || (parts.size() == 2 && parts[0] == "scenario")) {
    const std::string& key = parts.back();
    if (key == "mu_kbps") s.mu_kbps = to_double(key, value);
    else if (key == "link_prop_ms") s.link_prop_ms = to_double(key, value);
    else if (key == "queue_capacity_pkts")
      s.queue_capacity_pkts = static_cast<int>(to_int(key, value));
    else if (key == "protocol") s.protocol = protocol_from_string(value);
    else if (key == "duration_ms") s.duration_ms = to_int(key, value);
    else if (key == "seed") s.seed = static_cast<uint64_t>(to_int(key, value));
    else if (key == "clock_offset_ms")
      s.clock_offset_ms = static_cast<int>(to_int(key, value));
    else if (key == "alpha") s.feedback.alpha = to_double(key, value);
    else if (key == "window_len")
      s.feedback.window_len = static_cast<int>(to_int(key, value));
    else if (key == "tolerance") s.feedback.tolerance = to_double(key, value);
    else if (key == "k_max")
      s.dpm.max_merge = static_cast<int>(to_int(key, value));
    else if (key == "holdup_ms") s.dpm.holdup_ms = to_double(key, value);
    else if (key == "rtp_report_interval_ms")
      s.rtp_report_interval_ms = to_double(key, value);
    else if (key == "probe_hz") s.probe_hz = to_double(key, value);
    else if (key == "probe_wire_bytes")
      s.probe_wire_bytes = static_cast<int>(to_int(key, value));
    else if (key == "weber_threshold")
      s.weber.threshold = to_double(key, value);
    else if (key == "metrics_start_ms") s.metrics_start_ms = to_int(key, value);
    else if (key == "signal_seed")
      s.signal.seed = static_cast<uint64_t>(to_int(key, value));
    else if (key == "signal_segment_ms") s.signal.segment_ms = to_int(key, value);
    else throw ConfigError("unknown scenario key: " + key);
    return;
  }

  if (parts[0] == "media" && parts.size() == 3) {
    MediaConfig& m = parts[1] == "forward" ? s.media_fwd
                   : parts[1] == "backward"
                       ? s.media_bwd
                       : throw ConfigError("media section must be forward or backward");
    apply_media_key(m, parts[2], value);
    return;
  }

  if (parts[0] == "cross" && parts.size() == 4) {
    std::vector<CrossTrafficConfig>& list =
        parts[1] == "forward" ? s.cross_fwd
        : parts[1] == "backward"
            ? s.cross_bwd
            : throw ConfigError("cross section must be forward or backward");
    const size_t idx = static_cast<size_t>(to_int("cross index", parts[2]));
    while (list.size() <= idx) list.push_back({});
    apply_cross_key(list[idx], parts[3], value);
    return;
  }

  throw ConfigError("unknown configuration key: " + dotted_key);
}

inline Scenario scenario_from_stream(std::istream& is) {
  Scenario s;
  s.cross_fwd.clear();
  s.cross_bwd.clear();
  std::string line;
  std::string section = "scenario";
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    line = detail::trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    apply_override(s, section == "scenario" ? key : section + "." + key, value);
  }
  s.validate();
  return s;
}

inline Scenario scenario_from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open scenario file: " + path);
  return scenario_from_stream(f);
}

inline void write_scenario(std::ostream& os, const Scenario& s) {
  os << "[scenario]\n";
  os << "protocol = " << to_string(s.protocol) << "\n";
  os << "duration_ms = " << s.duration_ms << "\n";
  os << "seed = " << s.seed << "\n";
  os << "mu_kbps = " << s.mu_kbps << "\n";
  os << "link_prop_ms = " << s.link_prop_ms << "\n";
  os << "queue_capacity_pkts = " << s.queue_capacity_pkts << "\n";
  os << "clock_offset_ms = " << s.clock_offset_ms << "\n";
  os << "alpha = " << s.feedback.alpha << "\n";
  os << "window_len = " << s.feedback.window_len << "\n";
  os << "tolerance = " << s.feedback.tolerance << "\n";
  os << "k_max = " << s.dpm.max_merge << "\n";
  os << "holdup_ms = " << s.dpm.holdup_ms << "\n";
  os << "metrics_start_ms = " << s.metrics_start_ms << "\n";
  for (int side = 0; side < 2; ++side) {
    const MediaConfig& m = side == 0 ? s.media_fwd : s.media_bwd;
    os << "\n[media." << (side == 0 ? "forward" : "backward") << "]\n";
    os << "haptic_sample_bytes = " << m.haptic_sample_bytes << "\n";
    os << "audio_fps = " << m.audio_fps << "\n";
    os << "audio_frame_bytes = " << m.audio_frame_bytes << "\n";
    os << "video_fps = " << m.video_fps << "\n";
    os << "video_frame_bytes = " << m.video_frame_bytes << "\n";
  }
  for (int side = 0; side < 2; ++side) {
    const auto& list = side == 0 ? s.cross_fwd : s.cross_bwd;
    for (size_t i = 0; i < list.size(); ++i) {
      const auto& c = list[i];
      os << "\n[cross." << (side == 0 ? "forward" : "backward") << "." << i
         << "]\n";
      os << "kind = "
         << (c.kind == CrossTrafficConfig::Kind::Cbr ? "cbr" : "vbr") << "\n";
      if (c.kind == CrossTrafficConfig::Kind::Cbr) {
        os << "rate_kbps = " << c.rate_kbps << "\n";
      } else {
        os << "rate_lo_kbps = " << c.rate_lo_kbps << "\n";
        os << "rate_hi_kbps = " << c.rate_hi_kbps << "\n";
        os << "redraw_ms = " << c.redraw_ms << "\n";
      }
      os << "payload_bytes = " << c.payload_bytes << "\n";
      for (const auto& iv : c.schedule) {
        os << "on_ms = " << iv.start_ms << "\n";
        os << "off_ms = " << iv.stop_ms << "\n";
      }
    }
  }
}

inline std::string scenario_schema() {
  return R"(Scenario file: INI-style sections of key = value lines.
Lines starting with # or ; are comments.

[scenario]
  protocol               dpm | dpm_holdup | no_merge | multistep |
                         rtp_feedback | nafcah | weber_mux
  duration_ms            simulated time (generation stops here; in-flight
                         packets drain)
  seed                   master RNG seed (cross traffic, signal)
  mu_kbps                capacity of every link (default 1500)
  link_prop_ms           per-link propagation; one-way path = 3 links
  queue_capacity_pkts    droptail limit of each bottleneck queue
  clock_offset_ms        operator clock error, applied in delay measurement
  alpha                  EWMA weight (default 0.2)
  window_len             trigger window length (default 8)
  tolerance              steady-state band, relative (default 0.10)
  k_max                  merge-count ceiling (default 4)
  holdup_ms              hold-up window for dpm_holdup (default 0)
  rtp_report_interval_ms report spacing for rtp_feedback (default 500)
  probe_hz               nafcah probe rate (default 100)
  probe_wire_bytes       nafcah probe packet size (default 64)
  weber_threshold        weber deadband for weber_mux (default 0.12)
  metrics_start_ms       metrics window start (default 500)
  signal_seed            force-signal seed (default 1)
  signal_segment_ms      force-signal segment length (default 1000)

[media.forward] / [media.backward]
  haptic_sample_bytes  audio_fps  audio_frame_bytes  video_fps
  video_frame_bytes

[cross.forward.N] / [cross.backward.N]   (N = 0,1,...)
  kind            cbr | vbr
  rate_kbps       cbr rate, on the wire
  rate_lo_kbps    vbr range low
  rate_hi_kbps    vbr range high
  redraw_ms       vbr redraw interval (default 50)
  payload_bytes   packet payload (default 1000; +54 B headers on the wire)
  on_ms / off_ms  activity interval; repeat the pair for multiple intervals;
                  off_ms = 0 means active until the end
)";
}

}  // namespace telehaptic
