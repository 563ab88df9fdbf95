#include <gtest/gtest.h>

#include <random>

#include "corae/error.hpp"
#include "corae/timeline.hpp"

namespace corae {
namespace {

TEST(TimecodeTest, ParseTotals) {
  EXPECT_DOUBLE_EQ(Timecode::parse("00:00:00:00").total_seconds(), 0.0);
  EXPECT_DOUBLE_EQ(Timecode::parse("00:00:02:12").total_seconds(), 2.4);
  EXPECT_DOUBLE_EQ(Timecode::parse("00:01:30:15").total_seconds(), 90.5);
  EXPECT_EQ(Timecode::parse("00:01:30:15").total_frames(), 90 * 30 + 15);
}

TEST(TimecodeTest, ParseRejectsMalformed) {
  for (const char* bad : {"", "00:00:00", "0:00:00:00", "00:0:00:00", "00:00:00:0", "aa:00:00:00", "00:00:00:00:00",
                          "00:00:00:-1", "00-00-00-00", " 00:00:00:00", "00:00:00:00 "}) {
    EXPECT_THROW(Timecode::parse(bad), TimecodeError) << bad;
  }
}

TEST(TimecodeTest, ParseRejectsOutOfRangeFields) {
  EXPECT_THROW(Timecode::parse("00:00:00:30"), TimecodeError);
  EXPECT_THROW(Timecode::parse("00:60:00:00"), TimecodeError);
  EXPECT_THROW(Timecode::parse("00:00:60:00"), TimecodeError);
  EXPECT_NO_THROW(Timecode::parse("00:00:00:24", FrameRate(25)));
  EXPECT_THROW(Timecode::parse("00:00:00:25", FrameRate(25)), TimecodeError);
}

TEST(TimecodeTest, LongHoursUseMoreDigits) {
  const auto tc = Timecode(123, 4, 5, 6);
  EXPECT_EQ(tc.to_string(), "123:04:05:06");
  EXPECT_EQ(Timecode::parse("123:04:05:06"), tc);
}

TEST(TimecodeTest, FromSecondsFloorsToFrame) {
  EXPECT_EQ(Timecode::from_seconds(0.0).to_string(), "00:00:00:00");
  // floor(2.43 * 30) = 72 frames = 2 s + 12 frames
  EXPECT_EQ(Timecode::from_seconds(2.43).to_string(), "00:00:02:12");
  EXPECT_EQ(Timecode::from_seconds(90.5).to_string(), "00:01:30:15");
  EXPECT_THROW(Timecode::from_seconds(-0.01), TimecodeError);
}

TEST(TimecodeTest, FromSecondsNeverPassesThePlayhead) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> t(0.0, 7200.0);
  for (int fps : {24, 25, 30, 60}) {
    for (int i = 0; i < 2000; ++i) {
      const double s = t(rng);
      const auto tc = Timecode::from_seconds(s, FrameRate(fps));
      EXPECT_LE(tc.total_seconds(), s + 1e-9);
      EXPECT_LT(s - tc.total_seconds(), 1.0 / fps);
    }
  }
}

TEST(TimecodeTest, RoundTripAndOrderingProperties) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::int64_t> frames(0, 30LL * 3600 * 3);
  for (int i = 0; i < 5000; ++i) {
    const auto a = Timecode::from_frames(frames(rng));
    const auto b = Timecode::from_frames(frames(rng));
    EXPECT_EQ(Timecode::parse(a.to_string()), a);
    EXPECT_EQ(a < b, a.total_seconds() < b.total_seconds());
    EXPECT_EQ(a == b, a.total_frames() == b.total_frames());
  }
}

TEST(TimecodeTest, MixedRatesCompareByTime) {
  EXPECT_LT(Timecode::parse("00:00:01:00", FrameRate(25)), Timecode::parse("00:00:01:01", FrameRate(30)));
  EXPECT_NE(Timecode::parse("00:00:01:00", FrameRate(25)), Timecode::parse("00:00:01:00", FrameRate(30)));
}

TEST(FrameRateTest, RejectsNonPositive) {
  EXPECT_THROW(FrameRate(0), TimecodeError);
  EXPECT_THROW(FrameRate(-30), TimecodeError);
  EXPECT_EQ(FrameRate().fps(), 30);
}

TEST(RatingScaleTest, Defaults) {
  RatingScale scale;
  EXPECT_EQ(scale.point_count(), 15);
  EXPECT_EQ(scale.min_label, "Disagreeable");
  EXPECT_EQ(scale.max_label, "Agreeable");
  EXPECT_NO_THROW(scale.validate());
  EXPECT_THROW((RatingScale{0, 7}.validate()), ConfigError);
  EXPECT_THROW((RatingScale{-7, 0}.validate()), ConfigError);
  EXPECT_NO_THROW((RatingScale{-3, 5}.validate()));
}

TEST(RatingClampTest, Examples) {
  RatingScale scale;
  EXPECT_EQ(rating_clamp(9, scale).value, 7);
  EXPECT_EQ(rating_clamp(-9, scale).value, -7);
  EXPECT_EQ(rating_clamp(0, scale).value, 0);
}

TEST(RatingClampTest, BoundedAndIdempotent) {
  RatingScale scale{-3, 5};
  for (int v = -1000; v <= 1000; ++v) {
    const auto r = rating_clamp(v, scale);
    EXPECT_TRUE(scale.contains(r.value));
    EXPECT_EQ(rating_clamp(r.value, scale), r);
  }
}

}  // namespace
}  // namespace corae
