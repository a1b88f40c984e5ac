#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace telehaptic {

// Synthetic 1 kHz force trace: alternating slow sinusoid segments and fast
// chirp segments. Slow segments keep the value well away from zero so a
// relative deadband discards most samples; fast segments sweep through zero
// crossings quickly enough that nearly every sample is perceptually
// significant at a 12% deadband.
struct SignalParams {
  uint64_t seed = 1;
  int64_t duration_ms = 50000;
  int64_t segment_ms = 1000;
  double slow_freq_lo_hz = 0.3;
  double slow_freq_hi_hz = 0.8;
  double fast_freq_lo_hz = 10.0;
  double fast_freq_hi_hz = 45.0;

  void validate() const {
    if (duration_ms <= 0 || segment_ms <= 0)
      throw std::invalid_argument("signal durations must be positive");
  }
};

inline std::vector<double> make_force_signal(const SignalParams& p) {
  p.validate();
  std::mt19937_64 rng(p.seed * 0x9E3779B97F4A7C15ull + 0x2545F4914F6CDD1Dull);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  std::vector<double> out;
  out.reserve(static_cast<size_t>(p.duration_ms));
  int64_t t = 0;
  int segment = 0;
  while (t < p.duration_ms) {
    const int64_t seg_len = std::min(p.segment_ms, p.duration_ms - t);
    const bool fast = (segment % 2) == 1;
    const double phase = u01(rng) * 2.0 * M_PI;
    if (!fast) {
      const double freq =
          p.slow_freq_lo_hz + u01(rng) * (p.slow_freq_hi_hz - p.slow_freq_lo_hz);
      for (int64_t i = 0; i < seg_len; ++i) {
        const double s = static_cast<double>(i) / 1000.0;
        out.push_back(1.5 + 0.6 * std::sin(2.0 * M_PI * freq * s + phase));
      }
    } else {
      // Linear chirp across the segment, biased slightly off zero.
      const double f0 = p.fast_freq_lo_hz;
      const double f1 = p.fast_freq_hi_hz;
      const double seg_s = static_cast<double>(seg_len) / 1000.0;
      for (int64_t i = 0; i < seg_len; ++i) {
        const double s = static_cast<double>(i) / 1000.0;
        const double inst = f0 + (f1 - f0) * s / (2.0 * seg_s);
        out.push_back(0.15 + std::sin(2.0 * M_PI * inst * s + phase));
      }
    }
    t += seg_len;
    ++segment;
  }
  return out;
}

// Generation times of fast segments for a given parameter set, as
// [start_ms, end_ms) pairs. Used when a metric is evaluated per segment kind.
inline std::vector<std::pair<int64_t, int64_t>> fast_segments(
    const SignalParams& p) {
  std::vector<std::pair<int64_t, int64_t>> out;
  int64_t t = 0;
  int segment = 0;
  while (t < p.duration_ms) {
    const int64_t seg_len = std::min(p.segment_ms, p.duration_ms - t);
    if (segment % 2 == 1) out.emplace_back(t, t + seg_len);
    t += seg_len;
    ++segment;
  }
  return out;
}

inline void write_signal_csv(std::ostream& os,
                             const std::vector<double>& signal) {
  os << "t_ms,value\n";
  char buf[64];
  for (size_t i = 0; i < signal.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.9g\n", i, signal[i]);
    os << buf;
  }
}

inline std::vector<double> read_signal_csv(std::istream& is) {
  std::vector<double> out;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty signal file");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("malformed signal row: " + line);
    out.push_back(std::stod(line.substr(comma + 1)));
  }
  return out;
}

}  // namespace telehaptic
