#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "telehaptic/dpm.hpp"

using namespace telehaptic;

namespace {

RateModel backward_model() { return RateModel::from_packet_overhead(560.0, 67); }
RateModel forward_model() { return RateModel::from_packet_overhead(192.0, 62); }

TelehapticFragment fragment_at(int64_t t_ms) {
  TelehapticFragment f;
  f.haptic.timestamp_ms = static_cast<uint32_t>(t_ms);
  f.haptic_bytes = 12;
  return f;
}

}  // namespace

TEST_CASE("source rates for the standard channels are exact") {
  const RateModel bwd = backward_model();
  CHECK(bwd.overhead_kbps == 536.0);
  CHECK(rate_kbps(bwd, 1) == 1096.0);
  CHECK(rate_kbps(bwd, 2) == 828.0);
  CHECK(rate_kbps(bwd, 3) == 560.0 + 536.0 / 3.0);
  CHECK(rate_kbps(bwd, 3) == Catch::Approx(738.67).margin(0.005));
  CHECK(rate_kbps(bwd, 4) == 694.0);

  const RateModel fwd = forward_model();
  CHECK(fwd.overhead_kbps == 496.0);
  CHECK(rate_kbps(fwd, 1) == 688.0);
}

TEST_CASE("rates are strictly decreasing in the merge count") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> payload(50.0, 2000.0);
  std::uniform_int_distribution<int> overhead(55, 80);
  for (int trial = 0; trial < 200; ++trial) {
    const RateModel m =
        RateModel::from_packet_overhead(payload(rng), overhead(rng));
    for (int k = 1; k < 7; ++k) CHECK(rate_kbps(m, k) > rate_kbps(m, k + 1));
  }
}

TEST_CASE("rate_kbps rejects out-of-range merge counts") {
  CHECK_THROWS_AS(rate_kbps(backward_model(), 0), std::invalid_argument);
  CHECK_THROWS_AS(rate_kbps(backward_model(), 8), std::invalid_argument);
}

TEST_CASE("one-merge packet size matches the wire accounting") {
  CHECK(backward_model().packet_bytes(1) == 137.0);  // 70 payload + 67 headers
  CHECK(backward_model().packet_bytes(4) == 347.0);
  CHECK(forward_model().packet_bytes(1) == 86.0);    // 24 payload + 62 headers
}

TEST_CASE("step increase to the ceiling on congestion") {
  MergeController c(RatePolicy::Simd, {4, 0.0}, 2);
  CHECK(c.on_trigger(Trigger::Congestion, 0));
  CHECK(c.merge_count() == 4);
}

TEST_CASE("single step down on steady, saturating at one") {
  MergeController c(RatePolicy::Simd, {4, 0.0}, 4);
  CHECK(c.on_trigger(Trigger::Steady, 0));
  CHECK(c.merge_count() == 3);
  MergeController floor(RatePolicy::Simd, {4, 0.0}, 1);
  CHECK_FALSE(floor.on_trigger(Trigger::Steady, 0));
  CHECK(floor.merge_count() == 1);
}

TEST_CASE("from any state, congestion then repeated steady returns to one") {
  for (int start = 1; start <= 4; ++start) {
    MergeController c(RatePolicy::Simd, {4, 0.0}, start);
    c.on_trigger(Trigger::Congestion, 0);
    CHECK(c.merge_count() == 4);
    for (int i = 0; i < 3; ++i) c.on_trigger(Trigger::Steady, 0);
    CHECK(c.merge_count() == 1);
  }
}

TEST_CASE("hold-up suppresses steady triggers one step above the old point") {
  // Congestion seen at merge 1: after stepping back down to 2, steady
  // triggers are ignored for the hold-up window.
  MergeController c(RatePolicy::Simd, {4, 500.0}, 1);
  c.on_trigger(Trigger::Congestion, 1000.0);  // remembers 1, jumps to 4
  CHECK(c.merge_count() == 4);
  c.on_trigger(Trigger::Steady, 1100.0);
  CHECK(c.merge_count() == 3);
  c.on_trigger(Trigger::Steady, 1200.0);  // reaches 2, hold starts here
  CHECK(c.merge_count() == 2);
  CHECK_FALSE(c.on_trigger(Trigger::Steady, 1400.0));  // inside hold window
  CHECK(c.merge_count() == 2);
  CHECK_FALSE(c.on_trigger(Trigger::Steady, 1699.9));
  CHECK(c.on_trigger(Trigger::Steady, 1700.1));  // window expired
  CHECK(c.merge_count() == 1);
}

TEST_CASE("hold-up starts immediately when congestion hits one below max") {
  MergeController c(RatePolicy::Simd, {4, 500.0}, 3);
  c.on_trigger(Trigger::Congestion, 0.0);  // 3 remembered, 4 == 3+1
  CHECK(c.merge_count() == 4);
  CHECK_FALSE(c.on_trigger(Trigger::Steady, 400.0));
  CHECK(c.merge_count() == 4);
  CHECK(c.on_trigger(Trigger::Steady, 500.5));
  CHECK(c.merge_count() == 3);
}

TEST_CASE("hold-up never engages when congestion hits at the ceiling") {
  MergeController c(RatePolicy::Simd, {4, 500.0}, 4);
  c.on_trigger(Trigger::Congestion, 0.0);  // remembered 4; 5 is unreachable
  CHECK(c.on_trigger(Trigger::Steady, 10.0));
  CHECK(c.merge_count() == 3);
  CHECK(c.on_trigger(Trigger::Steady, 20.0));
  CHECK(c.merge_count() == 2);
}

TEST_CASE("congestion always acts, also inside a hold window") {
  MergeController c(RatePolicy::Simd, {4, 500.0}, 1);
  c.on_trigger(Trigger::Congestion, 0.0);
  c.on_trigger(Trigger::Steady, 10.0);
  c.on_trigger(Trigger::Steady, 20.0);  // merge 2, hold until 520
  CHECK(c.merge_count() == 2);
  CHECK(c.on_trigger(Trigger::Congestion, 100.0));
  CHECK(c.merge_count() == 4);
}

TEST_CASE("multistep policy moves one step in both directions") {
  MergeController c(RatePolicy::MultistepIncrease, {4, 0.0}, 1);
  CHECK(c.on_trigger(Trigger::Congestion, 0));
  CHECK(c.merge_count() == 2);
  c.on_trigger(Trigger::Congestion, 0);
  c.on_trigger(Trigger::Congestion, 0);
  CHECK(c.merge_count() == 4);
  CHECK_FALSE(c.on_trigger(Trigger::Congestion, 0));  // saturates
  CHECK(c.on_trigger(Trigger::Steady, 0));
  CHECK(c.merge_count() == 3);
}

TEST_CASE("fixed policy ignores every trigger") {
  MergeController c(RatePolicy::Fixed, {4, 0.0}, 1);
  for (int i = 0; i < 10; ++i) {
    CHECK_FALSE(c.on_trigger(Trigger::Congestion, i));
    CHECK_FALSE(c.on_trigger(Trigger::Steady, i));
  }
  CHECK(c.merge_count() == 1);
}

TEST_CASE("packetizer emits on reaching the target merge count") {
  Packetizer p;
  CHECK(p.submit(fragment_at(0), 1).has_value());  // no-merge: every tick

  Packetizer p4;
  CHECK_FALSE(p4.submit(fragment_at(0), 4).has_value());
  CHECK_FALSE(p4.submit(fragment_at(1), 4).has_value());
  CHECK_FALSE(p4.submit(fragment_at(2), 4).has_value());
  const auto pkt = p4.submit(fragment_at(3), 4);
  REQUIRE(pkt.has_value());
  CHECK(pkt->merge_count() == 4);
  CHECK(pkt->earliest_timestamp_ms == 0);  // 3 ms packetization wait
  CHECK(p4.pending_count() == 0);
}

TEST_CASE("lowering the target flushes the pending buffer immediately") {
  Packetizer p;
  p.submit(fragment_at(0), 4);
  p.submit(fragment_at(1), 4);
  p.submit(fragment_at(2), 4);
  const auto flushed = p.flush_if_at_least(2);
  REQUIRE(flushed.has_value());
  CHECK(flushed->merge_count() == 3);
  CHECK(flushed->earliest_timestamp_ms == 0);
  CHECK_FALSE(p.flush_if_at_least(1).has_value());  // nothing left
}

TEST_CASE("losslessness: every submitted fragment leaves in exactly one packet") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> target(1, 4);
  Packetizer p;
  int k = 1;
  int64_t submitted = 0, emitted = 0;
  std::vector<bool> seen(5000, false);
  auto account = [&](const MergedPacket& pkt) {
    for (const auto& f : pkt.fragments) {
      REQUIRE_FALSE(seen[f.haptic.timestamp_ms]);
      seen[f.haptic.timestamp_ms] = true;
      ++emitted;
    }
  };
  for (int64_t t = 0; t < 5000; ++t) {
    if (t % 7 == 3) {
      k = target(rng);
      if (auto pkt = p.flush_if_at_least(k)) account(*pkt);
    }
    ++submitted;
    if (auto pkt = p.submit(fragment_at(t), k)) account(*pkt);
  }
  if (auto pkt = p.flush_if_at_least(1)) account(*pkt);
  CHECK(submitted == emitted);
}

TEST_CASE("dpm parameter validation") {
  CHECK_THROWS_AS(MergeController(RatePolicy::Simd, {0, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(MergeController(RatePolicy::Simd, {8, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(MergeController(RatePolicy::Simd, {4, -1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(MergeController(RatePolicy::Simd, {4, 0.0}, 5),
                  std::invalid_argument);
}
