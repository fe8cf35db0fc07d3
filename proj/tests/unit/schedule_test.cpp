#include <gtest/gtest.h>

#include "treehash/error.hpp"
#include "treehash/schedule.hpp"
#include "treehash/topology.hpp"

using namespace treehash;

namespace {

ModeParams mode(Mode m) {
  ModeParams p;
  p.mode = m;
  return p;
}

// Children of a 4L node of arity k have arities 2..k+1. Enumerates one level
// of the unpruned tree from the arities of the level above.
std::vector<std::uint64_t> expand_4l(const std::vector<std::uint64_t>& above, std::size_t want) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t k : above) {
    for (std::uint64_t a = 2; a <= k + 1 && out.size() < want; ++a) out.push_back(a);
    if (out.size() >= want) break;
  }
  return out;
}

}  // namespace

TEST(ParseMode, Names) {
  EXPECT_EQ(parse_mode("4S"), Mode::M4S);
  EXPECT_EQ(parse_mode("m4s"), Mode::M4S);
  EXPECT_EQ(parse_mode("M6L"), Mode::M6L);
  EXPECT_EQ(parse_mode("wc"), Mode::WC);
  EXPECT_EQ(parse_mode("1"), Mode::M1);
  EXPECT_THROW(parse_mode("7S"), ConfigError);
  for (Mode m : all_modes()) EXPECT_EQ(parse_mode(mode_name(m)), m);
  EXPECT_EQ(all_modes().size(), 14u);
}

TEST(ParseMode, LiveModes) {
  for (Mode m : {Mode::M2S, Mode::M4S, Mode::M5S, Mode::M6S}) EXPECT_FALSE(is_live(m));
  for (Mode m : {Mode::M1, Mode::M2L, Mode::M3, Mode::M4L, Mode::M5L, Mode::M6L, Mode::WC, Mode::B1, Mode::B2,
                 Mode::B3})
    EXPECT_TRUE(is_live(m));
}

TEST(Rational, Parse) {
  EXPECT_DOUBLE_EQ(Rational::parse("1/2").value(), 0.5);
  EXPECT_DOUBLE_EQ(Rational::parse("0.25").value(), 0.25);
  EXPECT_DOUBLE_EQ(Rational::parse("1/3").value(), 1.0 / 3);
  EXPECT_THROW(Rational::parse("1/0"), ConfigError);
  EXPECT_THROW(Rational::parse("abc"), ConfigError);
}

TEST(Validate, Rejections) {
  ModeParams p = mode(Mode::M4S);
  p.epsilon = {2, 5};
  EXPECT_THROW(p.validate(), ConfigError);  // 1/eps not an integer
  p.epsilon = {1, 1};
  EXPECT_THROW(p.validate(), ConfigError);
  p = mode(Mode::M6S);
  p.c = 1;
  EXPECT_THROW(p.validate(), ConfigError);
  p = mode(Mode::WC);
  p.k = 6;
  EXPECT_THROW(p.validate(), ConfigError);
  p = mode(Mode::M3);
  p.d = 0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = mode(Mode::M3);
  p.group_size = 4;
  EXPECT_THROW(p.validate(), ConfigError);
  p = mode(Mode::M4L);
  p.h = 3;
  p.group_size = 4;
  EXPECT_THROW(p.validate(), ConfigError);
  p = mode(Mode::M2L);
  p.interleave_bits = 12;
  EXPECT_THROW(p.validate(), ConfigError);
  p.interleave_bits = 64;
  EXPECT_NO_THROW(p.validate());
}

TEST(Helpers, IntegerMath) {
  EXPECT_EQ(ceil_div(10, 4), 3u);
  EXPECT_EQ(ceil_log(2, 1), 0u);
  EXPECT_EQ(ceil_log(2, 1024), 10u);
  EXPECT_EQ(ceil_log(2, 1025), 11u);
  EXPECT_EQ(ceil_log(3, 10), 3u);
  EXPECT_EQ(ceil_log(2, ~0ull), 64u);
  EXPECT_EQ(ceil_root(10, 2), 4u);
  EXPECT_EQ(ceil_root(16, 2), 4u);
  EXPECT_EQ(ceil_root(27, 3), 3u);
  EXPECT_EQ(ceil_root(28, 3), 4u);
  EXPECT_EQ(floor_log2(1), 0u);
  EXPECT_EQ(floor_log2(1023), 9u);
  EXPECT_EQ(binomial(5, 2), 10u);
  EXPECT_EQ(binomial(60, 30), 118264581564861424ull);
  EXPECT_EQ(binomial(3, 5), 0u);
  EXPECT_EQ(checked_ceil(3.0000000001L), 3u);
  EXPECT_EQ(checked_ceil(3.01L), 4u);
}

TEST(Stored, Mode4S) {
  ModeParams p = mode(Mode::M4S);
  AritySchedule s(p);
  EXPECT_EQ(s.arity(1, 1, 10), 4u);
  EXPECT_EQ(s.arity(2, 1, 10), 4u);
  EXPECT_EQ(s.declared_height(10), 2u);
}

TEST(Stored, Mode6S) {
  ModeParams p = mode(Mode::M6S);
  AritySchedule s(p);
  EXPECT_EQ(s.arity(1, 1, 16), 4u);
  EXPECT_EQ(s.arity(2, 1, 16), 2u);
  EXPECT_EQ(s.arity(5, 1, 16), 2u);
  EXPECT_EQ(s.declared_height(16), 3u);
}

TEST(Stored, Mode5S) {
  AritySchedule s(mode(Mode::M5S));
  EXPECT_EQ(s.arity(1, 1, 1024), 10u);
  EXPECT_EQ(s.arity(2, 1, 1024), 4u);
  EXPECT_EQ(s.declared_height(1024), 6u);
}

TEST(Live, Mode6L) {
  AritySchedule s(mode(Mode::M6L));
  EXPECT_EQ(s.arity(1, 1, 0), 2u);
  EXPECT_EQ(s.arity(1, 3, 0), 3u);
  EXPECT_EQ(s.arity(2, 9, 0), 2u);
}

TEST(Live, BModes) {
  AritySchedule b1(mode(Mode::B1)), b2(mode(Mode::B2)), b3(mode(Mode::B3));
  for (std::uint64_t i = 1; i <= 6; ++i) {
    EXPECT_EQ(b1.arity(i, 1, 0), 1ull << i);
    EXPECT_EQ(b2.arity(i, 1, 0), i + 1);
    EXPECT_EQ(b3.arity(i, 1, 0), floor_log2(i + 3));
  }
  EXPECT_EQ(b3.arity(1, 1, 0), 2u);
  EXPECT_EQ(b3.arity(5, 1, 0), 3u);
}

TEST(Mode4L, RecursionMatchesExpansion) {
  for (std::uint64_t h : {2, 3, 4, 5}) {
    std::vector<std::uint64_t> level(200);
    for (std::uint64_t j = 1; j <= 200; ++j) level[j - 1] = j + 1;  // level h-1 under the unbounded root
    for (std::uint64_t i = h - 1; i >= 1; --i) {
      for (std::uint64_t j = 1; j <= level.size(); ++j) EXPECT_EQ(arity_4l(h, i, j), level[j - 1]) << h << " " << i;
      level = expand_4l(level, 200);
    }
    EXPECT_EQ(arity_4l(h, h, 1), kUnbounded);
  }
}

TEST(Mode4L, ClosedFormUpperLevels) {
  EXPECT_EQ(arity_4l_closed_form_h4(2, 5), 4u);
  for (std::uint64_t j = 1; j <= 2000; ++j) {
    EXPECT_EQ(arity_4l_closed_form_h4(3, j), arity_4l(4, 3, j));
    EXPECT_EQ(arity_4l_closed_form_h4(2, j), arity_4l(4, 2, j)) << j;
  }
  for (std::uint64_t j = 1; j <= 3; ++j) EXPECT_EQ(arity_4l_closed_form_h4(1, j), arity_4l(4, 1, j));
}

TEST(Mode4L, NMax) {
  EXPECT_EQ(n_max_4l(3, 2), 9u);
  EXPECT_EQ(n_max_4l(1, 2), 2u);
  EXPECT_EQ(n_max_4l(4, 3), 30u);
}

TEST(Mode4L, BlockCapacityMatchesTrees) {
  // 2+3+4 at h=2; (2+3)+(2+3+4)+(2+3+4+5)+(2+..+6) = 48 at h=3, x=4
  EXPECT_EQ(n_blocks_4l(3, 2), 9u);
  EXPECT_EQ(n_blocks_4l(4, 3), 48u);
  for (std::uint64_t x = 1; x <= 30; ++x) EXPECT_EQ(n_blocks_4l(x, 2), n_max_4l(x, 2));
  for (std::uint64_t h : {2, 3, 4}) {
    ModeParams p = mode(Mode::M4L);
    p.h = h;
    AritySchedule s(p);
    for (std::uint64_t x = 2; x <= 6; ++x) {
      std::uint64_t n = n_blocks_4l(x, h);
      Topology full = build_topology(s, n);
      ASSERT_EQ(full.height(), h);
      EXPECT_EQ(full.arity(h, 1), x) << "h=" << h << " x=" << x;
      EXPECT_EQ(build_topology(s, n + 1).arity(h, 1), x + 1);
    }
  }
}

TEST(Mode4L, CursorMatchesIndexedArity) {
  ModeParams p = mode(Mode::M4L);
  p.h = 4;
  AritySchedule s(p);
  for (std::uint64_t i = 1; i <= 3; ++i) {
    ArityCursor c = s.cursor(i, 0);
    for (std::uint64_t j = 1; j <= 500; ++j) ASSERT_EQ(c.next(), arity_4l(4, i, j));
  }
}

TEST(Uniform, StoredAndLive) {
  EXPECT_EQ(AritySchedule(mode(Mode::M3)).uniform_arity(3, 0), 2u);
  EXPECT_EQ(AritySchedule(mode(Mode::M6L)).uniform_arity(1, 0), std::nullopt);
  EXPECT_EQ(AritySchedule(mode(Mode::M6L)).uniform_arity(2, 0), 2u);
  EXPECT_EQ(AritySchedule(mode(Mode::M4S)).uniform_arity(1, 10), 4u);
  EXPECT_EQ(AritySchedule(mode(Mode::M1)).uniform_arity(2, 10), std::nullopt);
}

TEST(ReduceProcessors, Mode3Example) {
  AritySchedule s(mode(Mode::M3));
  AritySchedule r = reduce_processors(s, 1024, [](std::uint64_t) { return 10; });
  EXPECT_TRUE(r.is_reduced());
  Topology t = build_topology(r, 1024);
  EXPECT_EQ(t.level_size(1), 103u);
  EXPECT_EQ(t.arity(1, 1), 10u);
  EXPECT_EQ(t.arity(1, 103), 4u);
  for (std::size_t i = 2; i < t.height(); ++i)
    for (std::uint64_t j = 1; j < t.level_size(i); ++j) EXPECT_EQ(t.arity(i, j), 2u);
}

TEST(ReduceProcessors, SingleBaseNode) {
  AritySchedule r = reduce_processors(AritySchedule(mode(Mode::M3)), 4, [](std::uint64_t) { return 4; });
  Topology t = build_topology(r, 4);
  EXPECT_EQ(t.height(), 1u);
  EXPECT_EQ(t.arity(1, 1), 4u);
}

TEST(ReduceProcessors, NeedsUniformFanout) {
  ModeParams p = mode(Mode::M4L);
  p.h = 3;
  EXPECT_THROW(reduce_processors(AritySchedule(p), 1000, [](std::uint64_t) { return 10; }), ConfigError);
}
