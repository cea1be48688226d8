#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <random>

#include "mfa/error.hpp"
#include "mfa/multifractal.hpp"
#include "mfa/random.hpp"
#include "mfa/rwtests.hpp"
#include "mfa/surrogates.hpp"
#include "mfa/synth.hpp"

using namespace mfa;

namespace {

std::vector<double> sorted(std::span<const double> v) {
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  return s;
}

// |X_k|^2 for k = 1..N/2 by direct summation.
std::vector<double> periodogram(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> p;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    std::complex<double> acc = 0;
    for (std::size_t t = 0; t < n; ++t) {
      const double phase = -2.0 * std::numbers::pi * static_cast<double>((k * t) % n) /
                           static_cast<double>(n);
      acc += x[t] * std::polar(1.0, phase);
    }
    p.push_back(std::norm(acc));
  }
  return p;
}

double lag1(std::span<const double> x) {
  double mean = 0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double num = 0, den = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    den += (x[i] - mean) * (x[i] - mean);
    if (i + 1 < x.size()) num += (x[i] - mean) * (x[i + 1] - mean);
  }
  return num / den;
}

TimeSeries ar1(std::size_t n, std::uint64_t seed) {
  return synth::generate({synth::Ar1{0.8, 1.0}, n, seed});
}

}  // namespace

TEST(Shuffle, Examples) {
  const auto one = TimeSeries::from_values({4.2});
  EXPECT_EQ(shuffle(one, 9), one);
  const auto s = shuffle_values(std::vector<double>{1, 2, 3}, 5);
  EXPECT_EQ(sorted(s), (std::vector<double>{1, 2, 3}));
}

TEST(Shuffle, UniformOverPermutations) {
  std::map<std::vector<double>, int> counts;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i)
    ++counts[shuffle_values(std::vector<double>{1, 2, 3}, derive_seed(77, i))];
  ASSERT_EQ(counts.size(), 6u);
  for (const auto& [perm, c] : counts) EXPECT_NEAR(c / double(trials), 1.0 / 6.0, 0.02);
}

TEST(Shuffle, KeepsTimestampsAndMultiset) {
  std::vector<Timestamp> ts;
  std::vector<double> v;
  for (int i = 0; i < 500; ++i) {
    ts.push_back(1000 + 300 * i);
    v.push_back(std::sin(0.1 * i));
  }
  const TimeSeries x(ts, v, "x", SeriesKind::log_return);
  const auto s = shuffle(x, 3);
  EXPECT_TRUE(std::equal(ts.begin(), ts.end(), s.timestamps().begin()));
  EXPECT_EQ(s.label(), "x");
  EXPECT_EQ(s.kind(), SeriesKind::log_return);
  EXPECT_EQ(sorted(s.values()), sorted(v));
  EXPECT_NE(s, x);
}

TEST(Shuffle, DestroysScaling) {
  const auto x = synth::fgn(10000, 0.8, 4);
  const auto s = shuffle_values(x, 8);
  const auto h = mfdfa(s).spectrum.hurst;
  EXPECT_GE(h, 0.45);
  EXPECT_LE(h, 0.55);
}

TEST(Iaaft, ConstantSeriesIsFixedPoint) {
  const std::vector<double> c(64, 2.5);
  const auto r = iaaft_values(c, 1);
  EXPECT_EQ(r.values, c);
  EXPECT_TRUE(r.converged);
}

TEST(Iaaft, MultisetExact) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto x = synth::generate({synth::StudentT{3.0}, 1001 + seed, seed});
    const auto r = iaaft_values(x.values(), seed, 200);
    EXPECT_EQ(sorted(r.values), sorted(x.values()));
  }
  const std::vector<double> ties = {1, 1, 2, 2, 2, 3, 0, 0, 5};
  EXPECT_EQ(sorted(iaaft_values(ties, 2).values), sorted(ties));
  EXPECT_THROW(iaaft_values(std::vector<double>{1, 2, 3}, 1), InvalidInput);
}

TEST(Iaaft, PreservesPeriodogram) {
  const auto x = ar1(4096, 21);
  const auto r = iaaft_values(x.values(), 3);
  const auto po = periodogram(x.values());
  const auto ps = periodogram(r.values);
  double diff = 0, ref = 0;
  for (std::size_t k = 0; k < po.size(); ++k) {
    diff += (ps[k] - po[k]) * (ps[k] - po[k]);
    ref += po[k] * po[k];
  }
  EXPECT_LE(std::sqrt(diff / ref), 1e-2);
  EXPECT_NEAR(lag1(r.values), lag1(x.values()), 0.05);
}

TEST(Iaaft, LinearStructureKeptNonlinearLost) {
  const auto x = ar1(10000, 2);
  const auto s = iaaft(x, 9);
  EXPECT_NEAR(lag1(s.series.values()), lag1(x.values()), 0.05);
  EXPECT_EQ(s.series.timestamps().size(), x.size());

  // Chaos has a flat spectrum, so its surrogate should look like noise to BDS.
  const auto chaos = synth::generate({synth::LogisticMap{4.0}, 1000, 5});
  const auto cs = iaaft(chaos, 4);
  const double w_orig = std::abs(bds_test(chaos.values()).dims[0].w);
  const double w_surr = std::abs(bds_test(cs.series.values()).dims[0].w);
  EXPECT_LT(w_surr, w_orig);
}

TEST(Iaaft, IterationCapReported) {
  const auto x = ar1(512, 1);
  const auto r = iaaft_values(x.values(), 1, 1, 0.0);
  EXPECT_EQ(r.iterations, 1u);
  EXPECT_FALSE(r.converged);
  EXPECT_GT(r.spectrum_rmse, 0.0);
}

TEST(Ensemble, SizeOneMatchesDerivedSeed) {
  const auto x = ar1(256, 3);
  SurrogateSpec spec;
  spec.ensemble_size = 1;
  spec.master_seed = 12;
  const auto e = ensemble(x, spec);
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e[0].seed, derive_seed(12, 0));
  EXPECT_EQ(e[0].series, iaaft(x, derive_seed(12, 0)).series);
  spec.method = SurrogateMethod::shuffle;
  EXPECT_EQ(ensemble(x, spec)[0].series, shuffle(x, derive_seed(12, 0)));
}

TEST(Ensemble, ShuffleMembersShareMultiset) {
  const auto x = ar1(300, 4);
  SurrogateSpec spec;
  spec.method = SurrogateMethod::shuffle;
  const auto e = ensemble(x, spec);
  ASSERT_EQ(e.size(), 50u);
  const auto ref = sorted(x.values());
  for (const auto& m : e) EXPECT_EQ(sorted(m.series.values()), ref);
  EXPECT_NE(e[0].series, e[1].series);
}

TEST(Ensemble, DeterministicAndSeedIsolated) {
  const auto x = ar1(512, 5);
  SurrogateSpec spec;
  spec.ensemble_size = 6;
  const auto a = ensemble(x, spec);
  spec.workers = 3;
  const auto b = ensemble(x, spec);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].series, b[i].series);
  spec.master_seed = 2;
  const auto c = ensemble(x, spec);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NE(a[i].series, c[i].series);
}

TEST(Ensemble, MemberFailureNamesIndex) {
  const auto tiny = TimeSeries::from_values({1, 2, 3});
  try {
    ensemble(tiny, SurrogateSpec{});
    FAIL();
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find("ensemble member"), std::string::npos);
  }
  SurrogateSpec empty;
  empty.ensemble_size = 0;
  EXPECT_THROW(ensemble(tiny, empty), InvalidInput);
}
