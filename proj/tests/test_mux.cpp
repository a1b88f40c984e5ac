#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "telehaptic/mux.hpp"

using namespace telehaptic;

namespace {

MediaConfig backward_config() { return {1000, 12, 50, 160, 25, 2000}; }
MediaConfig forward_config() { return {1000, 24, 0, 0, 0, 0}; }

}  // namespace

TEST_CASE("derived rates for the standard backward channel") {
  const DerivedRates r = derive_rates(backward_config());
  CHECK(r.payload_rate_kbps == 560.0);
  CHECK(r.fragment_bytes == 70);
  CHECK(r.av_budget_bytes == 58);
}

TEST_CASE("derived rates for the haptic-only forward channel") {
  const DerivedRates r = derive_rates(forward_config());
  CHECK(r.payload_rate_kbps == 192.0);
  CHECK(r.fragment_bytes == 24);
  CHECK(r.av_budget_bytes == 0);
}

TEST_CASE("derive_rates rejects bad configurations") {
  MediaConfig c = backward_config();
  c.haptic_rate_hz = 500;
  CHECK_THROWS_AS(derive_rates(c), std::invalid_argument);

  c = backward_config();
  c.haptic_sample_bytes = 0;
  CHECK_THROWS_AS(derive_rates(c), std::invalid_argument);

  c = backward_config();
  c.audio_frame_bytes = 161;  // 50*161 leaves a non-integral per-ms size
  CHECK_THROWS_AS(derive_rates(c), std::invalid_argument);
}

TEST_CASE("frame fragmentation counts") {
  Multiplexer mux(backward_config());
  CHECK(mux.enqueue_frame(Media::Video, 2000, 0) == 35);  // ceil(2000/58)
  CHECK(mux.enqueue_frame(Media::Audio, 160, 0) == 3);    // 58 + 58 + 44
  CHECK(mux.enqueue_frame(Media::Audio, 0, 0) == 0);
}

TEST_CASE("enqueue_frame error paths") {
  Multiplexer haptic_only(forward_config());
  CHECK_THROWS_AS(haptic_only.enqueue_frame(Media::Audio, 10, 0),
                  std::logic_error);
  Multiplexer mux(backward_config());
  CHECK_THROWS_AS(mux.enqueue_frame(Media::Audio, 161, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(mux.enqueue_frame(Media::Haptic, 12, 0),
                  std::invalid_argument);
}

TEST_CASE("every fragment carries exactly one haptic sample") {
  Multiplexer mux(backward_config());
  mux.enqueue_frame(Media::Audio, 160, 0);
  for (int64_t t = 0; t < 5; ++t) {
    const TelehapticFragment f = mux.next_fragment(t, 0.5);
    CHECK(f.haptic_bytes == 12);
    CHECK(f.haptic.timestamp_ms == t);
    CHECK(f.payload_bytes() <= 70);
  }
}

TEST_CASE("audio takes priority over pending video") {
  Multiplexer mux(backward_config());
  mux.enqueue_frame(Media::Video, 2000, 0);
  mux.enqueue_frame(Media::Audio, 160, 0);
  const TelehapticFragment f = mux.next_fragment(0);
  REQUIRE(f.av.size() == 1);
  CHECK(f.av[0].kind == Media::Audio);
  CHECK(f.av[0].bytes == 58);
}

TEST_CASE("a lone audio frame drains in exactly three ticks") {
  Multiplexer mux(backward_config());
  mux.enqueue_frame(Media::Audio, 160, 0);
  const auto f0 = mux.next_fragment(0);
  const auto f1 = mux.next_fragment(1);
  const auto f2 = mux.next_fragment(2);
  const auto f3 = mux.next_fragment(3);
  REQUIRE(f0.av.size() == 1);
  REQUIRE(f1.av.size() == 1);
  REQUIRE(f2.av.size() == 1);
  CHECK(f0.av[0].bytes == 58);
  CHECK(f1.av[0].bytes == 58);
  CHECK(f2.av[0].bytes == 44);
  CHECK(f2.av[0].frame_last_byte);
  CHECK(f0.av[0].fragment_no == 0);
  CHECK(f1.av[0].fragment_no == 1);
  CHECK(f2.av[0].fragment_no == 2);
  CHECK(f3.av.empty());
  CHECK(mux.pending_bytes(Media::Audio) == 0);
}

TEST_CASE("both queues empty yields a haptic-only fragment") {
  Multiplexer mux(backward_config());
  const auto f = mux.next_fragment(0);
  CHECK(f.av.empty());
  CHECK(f.payload_bytes() == 12);
}

TEST_CASE("audio tail shares its tick with video head") {
  // With video pending behind an audio tail, the full 58 B budget is used:
  // 44 B closing the audio frame plus 14 B opening the video frame.
  Multiplexer mux(backward_config());
  mux.enqueue_frame(Media::Audio, 160, 0);
  mux.enqueue_frame(Media::Video, 2000, 0);
  mux.next_fragment(0);
  mux.next_fragment(1);
  const auto f = mux.next_fragment(2);
  REQUIRE(f.av.size() == 2);
  CHECK(f.av[0].kind == Media::Audio);
  CHECK(f.av[0].bytes == 44);
  CHECK(f.av[0].frame_last_byte);
  CHECK(f.av[1].kind == Media::Video);
  CHECK(f.av[1].bytes == 14);
  CHECK(f.payload_bytes() == 70);
}

TEST_CASE("conservation: bytes in equal bytes out plus pending") {
  Multiplexer mux(backward_config());
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> audio_size(0, 160);
  std::uniform_int_distribution<int> video_size(0, 2000);
  int64_t emitted = 0;
  for (int64_t t = 0; t < 2000; ++t) {
    if (t % 20 == 0) mux.enqueue_frame(Media::Audio, audio_size(rng), t);
    if (t % 40 == 0) mux.enqueue_frame(Media::Video, video_size(rng), t);
    const auto f = mux.next_fragment(t);
    for (const auto& s : f.av) emitted += s.bytes;
  }
  const int64_t enqueued =
      mux.enqueued_bytes(Media::Audio) + mux.enqueued_bytes(Media::Video);
  const int64_t pending =
      mux.pending_bytes(Media::Audio) + mux.pending_bytes(Media::Video);
  CHECK(emitted == enqueued - pending);
  CHECK(emitted ==
        mux.emitted_bytes(Media::Audio) + mux.emitted_bytes(Media::Video));
}

TEST_CASE("steady-state drain bounds under the standard configuration") {
  // Audio must clear within ceil(160/58) = 3 ticks of generation and video
  // within one frame interval (40 ms).
  Multiplexer mux(backward_config());
  int64_t worst_audio = 0;
  int64_t worst_video = 0;
  int64_t last_audio_gen = -1, last_audio_done = -1;
  int64_t last_video_gen = -1, last_video_done = -1;
  for (int64_t t = 0; t < 4000; ++t) {
    if (t % 20 == 0) mux.enqueue_frame(Media::Audio, 160, t);
    if (t % 40 == 0) mux.enqueue_frame(Media::Video, 2000, t);
    const auto f = mux.next_fragment(t);
    for (const auto& s : f.av) {
      if (!s.frame_last_byte) continue;
      if (s.kind == Media::Audio) {
        last_audio_gen = s.frame_gen_ms;
        last_audio_done = t;
        worst_audio = std::max(worst_audio, t - s.frame_gen_ms);
      } else {
        last_video_gen = s.frame_gen_ms;
        last_video_done = t;
        worst_video = std::max(worst_video, t - s.frame_gen_ms);
      }
    }
  }
  CHECK(last_audio_done > last_audio_gen - 1);  // frames actually completed
  CHECK(last_video_done > last_video_gen - 1);
  CHECK(worst_audio <= 3);
  CHECK(worst_video <= 40);
}

TEST_CASE("take_av pulls batched bytes without a haptic sample") {
  Multiplexer mux(backward_config());
  mux.enqueue_frame(Media::Audio, 160, 0);
  const auto spans = mux.take_av(4 * 58);
  int64_t total = 0;
  for (const auto& s : spans) total += s.bytes;
  CHECK(total == 160);
  CHECK(mux.pending_bytes(Media::Audio) == 0);
}
