#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mfa/scaling.hpp"

namespace mfa {

/// Two-sided p-value of a standard normal statistic.
double normal_two_sided_p(double z);

struct RunsResult {
  std::size_t runs = 0;
  std::size_t n_above = 0;
  std::size_t n_below = 0;
  double expected = 0.0;
  double z = 0.0;
  double p_value = 1.0;
};

/// Number of runs in a sign sequence (true = above).
std::size_t count_runs(std::span<const bool> above);

/// Wald-Wolfowitz runs test about the median; values equal to the median are
/// dropped. Needs N >= 20 and both sides non-empty.
RunsResult runs_test(std::span<const double> x);

struct LjungBoxResult {
  double q = 0.0;
  double p_value = 1.0;
  std::size_t lags = 0;
  std::vector<double> autocorrelation;  // r_1..r_lags
};

/// Q = N (N + 2) sum_{k<=lags} r_k^2 / (N - k), chi-square(lags) p-value.
LjungBoxResult ljung_box(std::span<const double> x, std::size_t lags);
/// min(10, floor(N / 5)).
std::size_t default_ljung_box_lags(std::size_t n);

struct VarianceRatioHorizon {
  std::size_t k = 0;
  double ratio = 0.0;
  double z_homoskedastic = 0.0;
  double z_heteroskedastic = 0.0;
  double p_value = 1.0;  // from the heteroskedasticity-robust z
};

struct VarianceRatioResult {
  std::vector<VarianceRatioHorizon> horizons;
  /// min over horizons of p, times the number of horizons (Bonferroni), capped at 1.
  double p_value = 1.0;
  double min_p_unadjusted = 1.0;
};

/// Lo-MacKinlay overlapping variance ratio of increments with the unbiased
/// variance estimators. Needs N >= 10 * max(k).
VarianceRatioResult variance_ratio(std::span<const double> increments,
                                   std::span<const std::size_t> horizons);
VarianceRatioResult variance_ratio(std::span<const double> increments);

struct BdsDimension {
  std::size_t m = 0;
  double c_m = 0.0;  // C_m(eps) over the N - m + 1 embedded vectors
  double c_1 = 0.0;  // C_1(eps) over the last N - m + 1 points
  double w = 0.0;
  double p_value = 1.0;
};

struct BdsResult {
  double epsilon = 0.0;
  double c1_full = 0.0;
  double k = 0.0;
  std::vector<BdsDimension> dims;
  /// min over dimensions, Bonferroni-adjusted like variance_ratio.
  double p_value = 1.0;
  double min_p_unadjusted = 1.0;
};

/// Correlation integral C_1(eps) over all points: fraction of pairs i < j with
/// |x_i - x_j| < eps.
double correlation_integral(std::span<const double> x, double epsilon);

/// BDS test with eps = eps_factor * sd(x), direct pair counting.
BdsResult bds_test(std::span<const double> x, std::span<const std::size_t> dims,
                   double eps_factor = 0.7);
BdsResult bds_test(std::span<const double> x);

struct MannKendallResult {
  long long s = 0;
  double variance = 0.0;
  double z = 0.0;
  double p_value = 1.0;
};

/// Mann-Kendall trend test with tie-corrected variance and continuity correction.
MannKendallResult mann_kendall(std::span<const double> x);

struct BatteryConfig {
  std::optional<std::size_t> ljung_box_lags;  // default_ljung_box_lags(N)
  std::vector<std::size_t> vr_horizons = {2, 4, 8, 16};
  std::vector<std::size_t> bds_dims = {2, 3, 4, 5};
  double bds_eps_factor = 0.7;
  double alpha = 0.05;
  ScaleRule dfa_scales;
  SurfaceOptions dfa;
};

/// One battery column. p_value is absent for DFA (and on failure).
struct TestEntry {
  std::string name;
  std::optional<double> statistic;
  std::optional<double> p_value;
  bool rejected = false;
  std::optional<std::string> error;
};

struct TestReport {
  TestEntry runs;
  TestEntry ljung_box;
  TestEntry variance_ratio;
  TestEntry bds;
  TestEntry mann_kendall;
  TestEntry dfa;  // statistic = h(2)
  std::optional<double> dfa_r_squared;
  std::size_t ljung_box_lags = 0;
  /// Number of p-valued tests rejecting at the configured level.
  std::size_t rejections = 0;

  std::vector<const TestEntry*> p_valued() const;
};

/// All six tests; individual failures are recorded in place.
TestReport battery(std::span<const double> x, const BatteryConfig& config = {});

}  // namespace mfa
