#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "mfa/csv.hpp"
#include "mfa/error.hpp"
#include "mfa/ingest.hpp"

using namespace mfa;

namespace {

TimeSeries prices(std::vector<double> v, SeriesKind kind = SeriesKind::price) {
  return TimeSeries::from_values(std::move(v), "p", kind);
}

std::vector<Timestamp> grid(Timestamp start, Timestamp step, std::size_t n) {
  std::vector<Timestamp> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = start + static_cast<Timestamp>(i) * step;
  return t;
}

TimeSeries on(std::vector<Timestamp> t) {
  std::vector<double> v(t.size());
  std::iota(v.begin(), v.end(), 1.0);
  return TimeSeries(std::move(t), std::move(v));
}

}  // namespace

TEST(TimeSeries, RejectsUnsortedAndNonFinite) {
  EXPECT_THROW(TimeSeries({0, 2, 1}, {1, 2, 3}), InvalidInput);
  EXPECT_THROW(TimeSeries({0, 1, 1}, {1, 2, 3}), InvalidInput);
  EXPECT_THROW(TimeSeries({0, 1}, {1, NAN}), InvalidInput);
  EXPECT_THROW(TimeSeries({0, 1}, {1, INFINITY}), InvalidInput);
  EXPECT_THROW(TimeSeries({0, 1}, {1}), InvalidInput);
}

TEST(TimeSeries, SliceIsInclusive) {
  const auto s = TimeSeries({10, 20, 30, 40}, {1, 2, 3, 4});
  const auto part = s.slice(20, 30);
  ASSERT_EQ(part.size(), 2u);
  EXPECT_EQ(part.timestamps()[0], 20);
  EXPECT_EQ(part.values()[1], 3.0);
}

TEST(LogReturns, ConstantPrice) {
  const auto r = log_returns(prices({100, 100, 100}));
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r.values()[0], 0.0);
  EXPECT_EQ(r.values()[1], 0.0);
  EXPECT_EQ(r.kind(), SeriesKind::log_return);
}

TEST(LogReturns, UnitLog) {
  const auto r = log_returns(prices({1.0, std::exp(1.0)}));
  EXPECT_NEAR(r.values()[0], 1.0, 1e-15);
}

TEST(LogReturns, MatchesHighPrecisionOracle) {
  // 40-digit decimal evaluations of ln(110/100) and ln(99/110).
  const auto r = log_returns(prices({100, 110, 99}));
  EXPECT_NEAR(r.values()[0], 0.09531017980432486004, 1e-15);
  EXPECT_NEAR(r.values()[1], -0.10536051565782630123, 1e-15);
}

TEST(LogReturns, StampedAtLaterObservation) {
  const auto r = log_returns(TimeSeries({5, 7, 9}, {1, 2, 4}, "p", SeriesKind::price));
  EXPECT_EQ(r.timestamps()[0], 7);
  EXPECT_EQ(r.timestamps()[1], 9);
}

TEST(LogReturns, RejectsNonPositiveWithIndex) {
  try {
    log_returns(prices({1, 2, 0, 3}));
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
  }
  EXPECT_THROW(log_returns(prices({1, -1})), InvalidInput);
  EXPECT_THROW(log_returns(prices({1, 2}, SeriesKind::volume)), InvalidInput);
  EXPECT_THROW(log_returns(prices({1})), InvalidInput);
}

TEST(LogReturns, RecoversCumulatedReturns) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal(0.0, 0.01);
  std::vector<double> r(500);
  for (double& v : r) v = normal(rng);
  std::vector<double> p(r.size() + 1);
  p[0] = std::exp(3.7);
  double acc = 3.7;
  for (std::size_t i = 0; i < r.size(); ++i) {
    acc += r[i];
    p[i + 1] = std::exp(acc);
  }
  const auto back = log_returns(prices(p));
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(back.values()[i], r[i], 1e-10);
}

TEST(VolumeChanges, Examples) {
  const auto v = [](std::vector<double> x) { return prices(std::move(x), SeriesKind::volume); };
  EXPECT_EQ(volume_changes(v({500, 500})).values()[0], 0.0);
  EXPECT_NEAR(volume_changes(v({100, 200})).values()[0], 0.69314718055994530942, 1e-15);
  const auto r = volume_changes(v({200, 100, 400}));
  EXPECT_NEAR(r.values()[0], -0.69314718055994530942, 1e-15);
  EXPECT_NEAR(r.values()[1], 1.38629436111989061883, 1e-15);
  EXPECT_EQ(r.kind(), SeriesKind::volume_change);
}

TEST(VolumeChanges, ZeroBarListsTimestamp) {
  const auto v = TimeSeries({100, 200, 300}, {5, 0, 7}, "v", SeriesKind::volume);
  try {
    volume_changes(v);
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find(format_timestamp(200)), std::string::npos);
  }
  const auto d = drop_nonpositive_volume(v);
  ASSERT_EQ(d.dropped.size(), 1u);
  EXPECT_EQ(d.dropped[0], 200);
  EXPECT_EQ(d.cleaned.size(), 2u);
  std::size_t dropped = 0;
  const auto inc = to_increments(v, &dropped);
  EXPECT_EQ(dropped, 1u);
  ASSERT_EQ(inc.size(), 1u);
  EXPECT_NEAR(inc.values()[0], std::log(7.0 / 5.0), 1e-15);
}

TEST(Align, Intersection) {
  const auto x = on({1, 2, 3});
  const auto y = on({2, 3, 4});
  const auto p = align(x, y, 2);
  EXPECT_EQ(p.common_timestamps, (std::vector<Timestamp>{2, 3}));
  EXPECT_EQ(p.x.values()[0], 2.0);
  EXPECT_EQ(p.y.values()[0], 1.0);
}

TEST(Align, IdenticalGridsUnchanged) {
  const auto x = on(grid(0, 300, 200));
  const auto p = align(x, x);
  EXPECT_EQ(p.x, x);
  EXPECT_EQ(p.y, x);
}

TEST(Align, MissingBlockCountedByEnumeration) {
  // 09:00-12:00 on a 5-minute grid is 37 bars; y lacks 10:00-10:30, 7 bars.
  const Timestamp nine = 9 * 3600;
  auto xt = grid(nine, 300, 37);
  std::vector<Timestamp> yt;
  for (Timestamp t : xt)
    if (t < 10 * 3600 || t > 10 * 3600 + 1800) yt.push_back(t);
  EXPECT_EQ(align(on(xt), on(yt), 2).common_timestamps.size(), 37u - 7u);
}

TEST(Align, RejectsShortOverlapStatingSizes) {
  const auto x = on(grid(0, 1, 300));
  const auto y = on(grid(200, 1, 300));
  try {
    align(x, y);
    FAIL();
  } catch (const InvalidInput& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("300"), std::string::npos);
    EXPECT_NE(msg.find("100"), std::string::npos);
  }
}

TEST(Align, CommutativeAndIdempotent) {
  std::mt19937_64 rng(5);
  std::bernoulli_distribution keep(0.8);
  std::vector<Timestamp> a, b;
  for (Timestamp t = 0; t < 1000; ++t) {
    if (keep(rng)) a.push_back(t);
    if (keep(rng)) b.push_back(t);
  }
  const auto xy = align(on(a), on(b));
  const auto yx = align(on(b), on(a));
  EXPECT_EQ(xy.common_timestamps, yx.common_timestamps);
  const auto again = align(xy.x, xy.y);
  EXPECT_EQ(again.x, xy.x);
  EXPECT_EQ(again.y, xy.y);
}
