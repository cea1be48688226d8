#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mfa/error.hpp"
#include "mfa/scaling.hpp"
#include "mfa/synth.hpp"

using namespace mfa;

namespace {

std::vector<double> gaussian(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> v(n);
  for (double& x : v) x = normal(rng);
  return v;
}

// Residuals of y on 0..n-1 from the closed-form simple regression.
std::vector<double> linear_residuals(const std::vector<double>& y) {
  const double n = static_cast<double>(y.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double x = static_cast<double>(i);
    sx += x;
    sy += y[i];
    sxx += x * x;
    sxy += x * y[i];
  }
  const double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double a = (sy - b * sx) / n;
  std::vector<double> r(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) r[i] = y[i] - (a + b * static_cast<double>(i));
  return r;
}

// Straightforward first-order MF-DFA, bidirectional, written without the library.
double naive_fluctuation(const std::vector<double>& x, std::size_t s, double q) {
  double mean = 0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  std::vector<double> y(x.size());
  double acc = 0;
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = acc += x[i] - mean;

  const std::size_t n = x.size(), ns = n / s;
  std::vector<double> f;
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t v = 0; v < ns; ++v) {
      const std::size_t begin = pass == 0 ? v * s : n - (v + 1) * s;
      std::vector<double> seg(y.begin() + begin, y.begin() + begin + s);
      double sq = 0;
      for (double r : linear_residuals(seg)) sq += r * r;
      f.push_back(sq / static_cast<double>(s));
    }
  }
  double agg = 0;
  if (q == 0) {
    for (double v : f) agg += std::log(v);
    return std::exp(agg / (2.0 * static_cast<double>(f.size())));
  }
  for (double v : f) agg += std::pow(v, q / 2);
  return std::pow(agg / static_cast<double>(f.size()), 1 / q);
}

FluctuationSurface power_surface(double prefactor, double exponent) {
  FluctuationSurface sf;
  sf.q = QGrid{{-1.0, 2.0}, false};
  sf.s = ScaleGrid::explicit_list({30, 60, 120, 240});
  for (std::size_t qi = 0; qi < 2; ++qi) {
    for (std::size_t s : sf.s.scales) {
      sf.values.push_back(prefactor * std::pow(static_cast<double>(s), exponent));
      sf.valid.push_back(1);
    }
  }
  sf.segment_count.assign(4, 1);
  sf.zero_segments.assign(4, 0);
  return sf;
}

}  // namespace

TEST(Profile, Examples) {
  EXPECT_EQ(profile(std::vector<double>{1, 2, 3}), (std::vector<double>{-1, -1, 0}));
  for (double v : profile(std::vector<double>(50, 0.1))) EXPECT_EQ(v, 0.0);
  const auto p = profile(gaussian(1000, 1));
  EXPECT_NEAR(p.back(), 0.0, 1e-9);
}

TEST(Segment, ForwardAndBidirectional) {
  std::vector<double> seq(10);
  for (std::size_t i = 0; i < seq.size(); ++i) seq[i] = static_cast<double>(i);
  const auto fwd = segment(seq, 3, false);
  ASSERT_EQ(fwd.size(), 3u);
  EXPECT_EQ(fwd[2].back(), 8.0);

  const auto both = segment(seq, 3, true);
  ASSERT_EQ(both.size(), 6u);
  EXPECT_EQ(both.back().front(), 1.0);
  const auto b = segment_bounds(10, 3, true);
  EXPECT_EQ(b[3].begin, 7u);
  EXPECT_EQ(b[3].begin + b[3].length - 1, 9u);

  const auto nine = segment_bounds(9, 3, true);
  ASSERT_EQ(nine.size(), 6u);
  std::vector<std::size_t> f, r;
  for (std::size_t i = 0; i < 3; ++i) {
    f.push_back(nine[i].begin);
    r.push_back(nine[3 + i].begin);
  }
  std::sort(r.begin(), r.end());
  EXPECT_EQ(f, r);

  EXPECT_THROW(segment_bounds(10, 11, false), InvalidInput);
  EXPECT_THROW(segment_bounds(10, 0, false), InvalidInput);
}

TEST(Segment, CountMonotoneAndDoubled) {
  std::size_t prev = std::numeric_limits<std::size_t>::max();
  for (std::size_t s = 4; s <= 500; ++s) {
    const auto fwd = segment_bounds(1000, s, false).size();
    EXPECT_EQ(fwd, 1000 / s);
    EXPECT_LE(fwd, prev);
    EXPECT_EQ(segment_bounds(1000, s, true).size(), 2 * fwd);
    prev = fwd;
  }
}

TEST(DetrendResiduals, ExactPolynomialsVanish) {
  const std::vector<double> line{2, 4, 6, 8};
  for (double r : detrend_residuals(line, line, 1).first) EXPECT_NEAR(r, 0.0, 1e-14);
  const std::vector<double> flat{1, 1, 1};
  for (double r : detrend_residuals(flat, flat, 1).first) EXPECT_NEAR(r, 0.0, 1e-14);
  const std::vector<double> quad{0, 1, 4, 9, 16, 25};
  for (double r : detrend_residuals(quad, quad, 2).first) EXPECT_NEAR(r, 0.0, 1e-12);
}

TEST(DetrendResiduals, MatchesClosedFormRegression) {
  const std::vector<double> y{0, 1, 4, 9, 16};
  const auto expected = linear_residuals(y);
  const auto [rx, ry] = detrend_residuals(y, y, 1);
  for (std::size_t i = 0; i < y.size(); ++i) {
    EXPECT_NEAR(rx[i], expected[i], 1e-10);
    EXPECT_EQ(rx[i], ry[i]);
  }
}

TEST(DetrendResiduals, RejectsShortSegments) {
  const std::vector<double> two{1, 2};
  EXPECT_THROW(detrend_residuals(two, two, 1), InvalidInput);
  const std::vector<double> three{1, 2, 3};
  EXPECT_THROW(detrend_residuals(three, std::vector<double>{1, 2}, 1), InvalidInput);
}

TEST(SegmentCovariance, Examples) {
  const std::vector<double> a{1, -1}, b{-1, 1};
  EXPECT_EQ(segment_covariance(a, a), 1.0);
  EXPECT_EQ(segment_covariance(a, b), -1.0);
  EXPECT_NEAR(segment_covariance(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}),
              10.0 / 3.0, 1e-15);
}

TEST(FluctuationSurface, PerfectlyDetrendedInputRejected) {
  const auto qs = QGrid::standard();
  const auto ss = ScaleGrid::explicit_list({10, 20, 40});
  EXPECT_THROW(fluctuation_surface(std::vector<double>(200, 3.5), qs, ss), DegenerateInput);
  // A ramp's profile is quadratic, which order 2 removes exactly.
  std::vector<double> ramp(200);
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = 0.01 * static_cast<double>(i);
  SurfaceOptions o;
  o.detrend_order = 2;
  EXPECT_THROW(fluctuation_surface(ramp, qs, ss, o), DegenerateInput);
}

TEST(FluctuationSurface, MatchesNaiveImplementation) {
  const auto x = gaussian(4096, 7);
  const auto qs = QGrid::standard();
  const auto ss = ScaleGrid::standard(x.size());
  const auto sf = fluctuation_surface(x, qs, ss);
  for (double q : {-4.0, -1.5, 0.0, 2.0, 3.25}) {
    const auto qi = qs.index_of(q);
    ASSERT_NE(qi, QGrid::npos);
    for (std::size_t si = 0; si < ss.size(); ++si) {
      const double ref = naive_fluctuation(x, ss.scales[si], q);
      EXPECT_NEAR(sf.at(qi, si), ref, 1e-10 * ref) << "q=" << q << " s=" << ss.scales[si];
    }
  }
}

TEST(FluctuationSurface, CrossWithSelfIsSingleBitForBit) {
  const auto x = gaussian(3000, 3);
  const auto qs = QGrid::standard();
  const auto ss = ScaleGrid::standard(x.size());
  for (int m = 1; m <= 3; ++m) {
    SurfaceOptions o;
    o.detrend_order = m;
    const auto single = fluctuation_surface(x, qs, ss, o);
    const auto cross = fluctuation_surface(x, x, qs, ss, o);
    EXPECT_EQ(single.values, cross.values);
    EXPECT_EQ(single.mode, SurfaceMode::single);
    EXPECT_EQ(cross.mode, SurfaceMode::cross);
  }
}

TEST(FluctuationSurface, SecondOrderRowIsDfaPath) {
  const auto x = gaussian(5000, 9);
  const auto qs = QGrid::standard();
  const auto ss = ScaleGrid::standard(x.size());
  const auto sf = fluctuation_surface(x, qs, ss);
  const auto dfa = dfa_fluctuation(x, ss);
  const auto qi = qs.index_of(2.0);
  for (std::size_t si = 0; si < ss.size(); ++si) EXPECT_EQ(sf.at(qi, si), dfa[si]);
}

TEST(FluctuationSurface, PositiveFiniteAndSegmentCounts) {
  const auto x = gaussian(2000, 4);
  const auto ss = ScaleGrid::standard(x.size());
  const auto sf = fluctuation_surface(x, QGrid::standard(), ss);
  for (std::size_t i = 0; i < sf.values.size(); ++i) {
    EXPECT_TRUE(sf.valid[i]);
    EXPECT_TRUE(std::isfinite(sf.values[i]) && sf.values[i] > 0);
  }
  for (std::size_t si = 0; si < ss.size(); ++si)
    EXPECT_EQ(sf.segment_count[si], 2 * (x.size() / ss.scales[si]));
  SurfaceOptions fwd;
  fwd.bidirectional = false;
  const auto sf1 = fluctuation_surface(x, QGrid::standard(), ss, fwd);
  for (std::size_t si = 0; si < ss.size(); ++si)
    EXPECT_EQ(sf1.segment_count[si], x.size() / ss.scales[si]);
}

TEST(FluctuationSurface, ZeroSegmentsExcludedFromNonPositiveOrders) {
  // A constant block makes the profile exactly linear there.
  auto x = gaussian(1200, 8);
  std::fill(x.begin(), x.begin() + 600, 0.5);
  const auto ss = ScaleGrid::explicit_list({20, 40, 60});
  SurfaceOptions o;
  o.bidirectional = false;
  const auto sf = fluctuation_surface(x, QGrid::standard(), ss, o);
  for (std::size_t si = 0; si < ss.size(); ++si)
    EXPECT_EQ(sf.zero_segments[si], 600 / ss.scales[si]);
  for (std::size_t i = 0; i < sf.values.size(); ++i) {
    EXPECT_TRUE(sf.valid[i]);
    EXPECT_TRUE(std::isfinite(sf.values[i]) && sf.values[i] > 0);
  }
}

TEST(FluctuationSurface, WorkerCountDoesNotChangeBits) {
  const auto x = gaussian(6000, 12);
  const auto ss = ScaleGrid::standard(x.size());
  SurfaceOptions one, many;
  many.workers = 8;
  EXPECT_EQ(fluctuation_surface(x, QGrid::standard(), ss, one).values,
            fluctuation_surface(x, QGrid::standard(), ss, many).values);
}

TEST(FluctuationSurface, ScalesWithInputAndKeepsExponents) {
  const auto x = gaussian(4000, 21);
  auto y = x;
  for (double& v : y) v *= 7.5;
  const auto ss = ScaleGrid::standard(x.size());
  const auto a = fluctuation_surface(x, QGrid::standard(), ss);
  const auto b = fluctuation_surface(y, QGrid::standard(), ss);
  for (std::size_t i = 0; i < a.values.size(); ++i)
    EXPECT_NEAR(b.values[i], 7.5 * a.values[i], 1e-10 * b.values[i]);
  const auto ha = fit_scaling(a), hb = fit_scaling(b);
  for (std::size_t i = 0; i < ha.h.size(); ++i) EXPECT_NEAR(ha.h[i], hb.h[i], 1e-10);
}

TEST(FitScaling, ExactPowerLaws) {
  const auto r = fit_scaling(power_surface(1.0, 0.7));
  for (std::size_t i = 0; i < r.h.size(); ++i) {
    EXPECT_NEAR(r.h[i], 0.7, 1e-12);
    EXPECT_NEAR(r.r_squared[i], 1.0, 1e-12);
  }
  EXPECT_EQ(r.fit_s_min, 30u);
  EXPECT_EQ(r.fit_s_max, 240u);
  const auto r3 = fit_scaling(power_surface(3.0, 0.5));
  EXPECT_NEAR(r3.h[0], 0.5, 1e-12);
  EXPECT_NEAR(r3.intercept[0], std::log(3.0), 1e-12);
}

TEST(FitScaling, TooFewValidScalesMarksOrderUnavailable) {
  auto sf = power_surface(1.0, 0.5);
  sf.valid[0] = 0;  // q = -1 keeps only three scales
  sf.values[0] = std::nan("");
  const auto r = fit_scaling(sf);
  EXPECT_FALSE(r.available[0]);
  EXPECT_TRUE(std::isnan(r.h[0]));
  EXPECT_TRUE(r.available[1]);
  EXPECT_FALSE(r.all_available());
  EXPECT_THROW(r.h_at(-1.0), std::exception);
  EXPECT_NEAR(r.h_at(2.0), 0.5, 1e-12);
}

TEST(FitScaling, RSquaredInUnitInterval) {
  const auto x = gaussian(3000, 2);
  const auto r = fit_scaling(fluctuation_surface(x, QGrid::standard(), ScaleGrid::standard(3000)));
  for (double v : r.r_squared) EXPECT_TRUE(v >= 0.0 && v <= 1.0);
}

TEST(FitScaling, FgnHurstSeven) {
  const auto x = synth::fgn(10000, 0.7, 1);
  const auto r = dfa_hurst(x, ScaleGrid::standard(x.size()));
  EXPECT_GE(r.hurst, 0.65);
  EXPECT_LE(r.hurst, 0.75);
}

TEST(ScaleGrid, StandardGrid) {
  const auto g = ScaleGrid::standard(10000);
  EXPECT_EQ(g.scales.front(), 30u);
  EXPECT_EQ(g.scales.back(), 2000u);
  EXPECT_GE(g.size(), 18u);
  EXPECT_LE(g.size(), 20u);
  EXPECT_TRUE(std::is_sorted(g.scales.begin(), g.scales.end()));
  EXPECT_EQ(std::adjacent_find(g.scales.begin(), g.scales.end()), g.scales.end());
  EXPECT_NO_THROW(g.validate(10000, 1));
}

TEST(ScaleGrid, LogSpacingDeduplicatesSmallRanges) {
  const auto g = ScaleGrid::log_spaced(5, 12, 20);
  EXPECT_EQ(g.scales.front(), 5u);
  EXPECT_EQ(g.scales.back(), 12u);
  EXPECT_EQ(std::adjacent_find(g.scales.begin(), g.scales.end()), g.scales.end());
}

TEST(ScaleGrid, ValidationRules) {
  EXPECT_THROW(ScaleGrid::explicit_list({3, 10}).validate(1000, 1), InvalidInput);
  EXPECT_THROW(ScaleGrid::explicit_list({4, 10}).validate(1000, 3), InvalidInput);
  EXPECT_NO_THROW(ScaleGrid::explicit_list({5, 10}).validate(1000, 3));
  EXPECT_THROW(ScaleGrid::explicit_list({10, 10}).validate(1000, 1), InvalidInput);
  EXPECT_THROW(ScaleGrid::explicit_list({30, 201}).validate(1000, 1), InvalidInput);
  EXPECT_NO_THROW(ScaleGrid::explicit_list({30, 201}).validate(1000, 1, true));
  EXPECT_THROW(ScaleRule{}.grid_for(100), InvalidInput);
}

TEST(QGrid, RangeAndValidation) {
  const auto q = QGrid::standard();
  EXPECT_EQ(q.size(), 33u);
  EXPECT_TRUE(q.symmetric);
  EXPECT_EQ(q.orders[16], 0.0);
  EXPECT_EQ(q.orders[24], 2.0);
  EXPECT_NE(q.index_of(0.0), QGrid::npos);
  EXPECT_EQ(q.index_of(0.1), QGrid::npos);
  const auto r = QGrid::range(-2, 3, 0.1);
  EXPECT_NE(r.index_of(2.0), QGrid::npos);
  EXPECT_EQ(r.orders.front() + r.orders.back(), 1.0);
  EXPECT_FALSE(r.symmetric);
  EXPECT_THROW(QGrid::range(1, 4, 1).validate(), InvalidInput);
  EXPECT_THROW(QGrid::range(-4, 1, 1).validate(), InvalidInput);
  EXPECT_THROW((QGrid{{0.0, 2.0, 1.0}, false}.validate()), InvalidInput);
  EXPECT_THROW(QGrid::range(-1, 3, 0.3), InvalidInput);
}
