#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "telehaptic/signal.hpp"
#include "telehaptic/weber.hpp"

using namespace telehaptic;

TEST_CASE("constant signal transmits only the first sample") {
  const std::vector<double> sig(100, 2.5);
  const auto mask = weber_mask(sig, {});
  CHECK(mask[0] == 1);
  for (size_t i = 1; i < mask.size(); ++i) CHECK(mask[i] == 0);
}

TEST_CASE("deadband threshold arithmetic") {
  // From a last-sent value of 1.0 at 12%: 1.13 crosses, 1.10 does not.
  const std::vector<double> sig{1.0, 1.10, 1.13, 1.13};
  const auto mask = weber_mask(sig, {0.12});
  CHECK(mask[0] == 1);
  CHECK(mask[1] == 0);
  CHECK(mask[2] == 1);
  CHECK(mask[3] == 0);
}

TEST_CASE("zero last-sent value makes any nonzero sample significant") {
  const std::vector<double> sig{0.0, 0.0, 0.001};
  const auto mask = weber_mask(sig, {0.12});
  CHECK(mask[0] == 1);
  CHECK(mask[1] == 0);
  CHECK(mask[2] == 1);
}

TEST_CASE("a ramp whose steps all exceed the deadband transmits everything") {
  std::vector<double> sig{1.0};
  for (int i = 0; i < 50; ++i) sig.push_back(sig.back() * 1.15);
  const auto mask = weber_mask(sig, {0.12});
  for (const auto m : mask) CHECK(m == 1);
}

TEST_CASE("masking an already-masked-and-held signal adds nothing") {
  SignalParams p;
  p.duration_ms = 4000;
  const auto sig = make_force_signal(p);
  const auto mask = weber_mask(sig, {});
  std::vector<TimedSample> sent;
  for (size_t i = 0; i < sig.size(); ++i)
    if (mask[i]) sent.push_back({static_cast<double>(i), sig[i]});
  const auto held =
      zoh_reconstruct(sent, 0, static_cast<int64_t>(sig.size()));
  const auto mask2 = weber_mask(held, {});
  size_t extra = 0;
  for (size_t i = 1; i < mask2.size(); ++i)
    if (mask2[i] && !mask[i]) ++extra;
  CHECK(extra == 0);
}

TEST_CASE("zero-order hold follows arrivals and holds across gaps") {
  const std::vector<TimedSample> rx{{2.0, 1.0}, {3.0, 2.0}, {6.0, 3.0}};
  const auto out = zoh_reconstruct(rx, 0, 8);
  const std::vector<double> expect{0, 0, 1, 2, 2, 2, 3, 3};
  CHECK(out == expect);
}

TEST_CASE("on-time delivery reproduces the source shifted by the delay") {
  SignalParams p;
  p.duration_ms = 2000;
  const auto sig = make_force_signal(p);
  const int delay = 15;
  std::vector<TimedSample> rx;
  for (size_t i = 0; i < sig.size(); ++i)
    rx.push_back({static_cast<double>(i + delay), sig[i]});
  const auto out =
      zoh_reconstruct(rx, 0, static_cast<int64_t>(sig.size()) + delay);
  for (size_t i = 0; i < sig.size(); ++i)
    CHECK(out[i + delay] == sig[i]);
}

TEST_CASE("zoh requires at least one sample") {
  CHECK_THROWS_AS(zoh_reconstruct({}, 0, 10), std::invalid_argument);
}

TEST_CASE("weber parameters are validated") {
  std::vector<double> sig{1.0};
  CHECK_THROWS_AS(weber_mask(sig, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(weber_mask(sig, {1.0}), std::invalid_argument);
}

TEST_CASE("force signal: fast segments are almost entirely significant") {
  SignalParams p;
  p.duration_ms = 20000;
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    p.seed = seed;
    const auto sig = make_force_signal(p);
    const auto mask = weber_mask(sig, {0.12});
    int64_t fast_total = 0, fast_sent = 0, slow_total = 0, slow_sent = 0;
    const auto fast = fast_segments(p);
    size_t fi = 0;
    for (size_t i = 0; i < sig.size(); ++i) {
      while (fi < fast.size() && static_cast<int64_t>(i) >= fast[fi].second)
        ++fi;
      const bool in_fast = fi < fast.size() &&
                           static_cast<int64_t>(i) >= fast[fi].first;
      if (in_fast) {
        ++fast_total;
        fast_sent += mask[i];
      } else {
        ++slow_total;
        slow_sent += mask[i];
      }
    }
    CAPTURE(seed);
    CHECK(static_cast<double>(fast_sent) / static_cast<double>(fast_total) >
          0.88);
    // Slow segments must discard most samples or the comparison is moot.
    CHECK(static_cast<double>(slow_sent) / static_cast<double>(slow_total) <
          0.5);
  }
}

TEST_CASE("signal csv round trip") {
  SignalParams p;
  p.duration_ms = 100;
  const auto sig = make_force_signal(p);
  std::stringstream ss;
  write_signal_csv(ss, sig);
  const auto back = read_signal_csv(ss);
  REQUIRE(back.size() == sig.size());
  for (size_t i = 0; i < sig.size(); ++i)
    CHECK(back[i] == Catch::Approx(sig[i]).epsilon(1e-7));
}

TEST_CASE("signal generation is deterministic in the seed") {
  SignalParams p;
  p.duration_ms = 3000;
  p.seed = 9;
  CHECK(make_force_signal(p) == make_force_signal(p));
  p.seed = 10;
  CHECK(make_force_signal(p) != make_force_signal({9, 3000, 1000}));
}
