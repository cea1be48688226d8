#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mfa/scaling.hpp"
#include "mfa/timeseries.hpp"

namespace mfa {

/// Mass exponents, Legendre spectrum and the scalar multifractality summaries.
struct MultifractalSpectrum {
  std::vector<double> q;
  std::vector<double> h;
  std::vector<double> tau;
  std::vector<double> alpha;
  std::vector<double> f_alpha;
  std::vector<unsigned char> spectrum_available;
  double delta_alpha = 0.0;          // |alpha(q_max) - alpha(q_min)|
  double delta_alpha_literal = 0.0;  // alpha(q_max) - alpha(q_min)
  double delta_h = 0.0;      // h(q_max) - h(q_min), negative for decreasing h(q)
  double abs_delta_h = 0.0;
  double mdm = 0.0;
  double hurst = 0.0;  // h(2)
  /// h(q) increases somewhere along the grid.
  bool non_monotone = false;
};

/// tau(q) = q h(q) - 1. Requires every h(q) available.
std::vector<double> mass_exponents(const ScalingResult& scaling);

struct LegendreSpectrum {
  std::vector<double> alpha;
  std::vector<double> f_alpha;
  std::vector<unsigned char> available;
};

/// alpha = d tau / dq by second-order finite differences (central inside,
/// three-point one-sided at the ends); f = q alpha - tau, which equals
/// q (alpha - h) + 1. Needs at least 3 orders.
LegendreSpectrum legendre_spectrum(std::span<const double> tau, std::span<const double> q);

struct Widths {
  double delta_h = 0.0;
  double delta_alpha = 0.0;
};

/// Endpoint differences h(q_max) - h(q_min) and alpha(q_max) - alpha(q_min).
Widths widths(std::span<const double> h, std::span<const double> alpha);

/// Market deficiency measure 0.5 (|h(q_min) - 0.5| + |h(q_max) - 0.5|).
double mdm(double h_qmin, double h_qmax);

/// Full spectrum from a fitted ScalingResult.
MultifractalSpectrum multifractal_spectrum(const ScalingResult& scaling);

struct MfdfaOptions {
  QGrid q = QGrid::standard();
  ScaleRule scales;
  SurfaceOptions surface;
};

struct MfdfaResult {
  FluctuationSurface surface;
  ScalingResult scaling;
  MultifractalSpectrum spectrum;
};

/// profile -> surface -> fit -> spectrum for one series.
MfdfaResult mfdfa(std::span<const double> x, const MfdfaOptions& options = {});
/// Same for a pair of equal-length series (joint spectrum).
MfdfaResult mfdcca(std::span<const double> x, std::span<const double> y,
                   const MfdfaOptions& options = {});

struct ScalarStats {
  double mean = 0.0;
  double sd = 0.0;
};

/// Mean and sample standard deviation of an ensemble's multifractal scalars.
/// delta_alpha is the non-negative width, delta_h the signed endpoint difference.
struct EnsembleSummary {
  std::size_t n = 0;
  ScalarStats delta_alpha;
  ScalarStats delta_h;
  ScalarStats abs_delta_h;
  ScalarStats mdm;
  ScalarStats hurst;
  std::vector<double> mean_h;  // mean h(q) across members, per q
};

EnsembleSummary summarize(std::span<const MultifractalSpectrum> members);

enum class SourceVerdict {
  distribution_contributes,
  temporal_correlation_contributes,
  nonlinear_correlation_contributes,
  linear_correlation_contributes,
};

std::string_view to_string(SourceVerdict verdict);

/// One margin test: on when `difference` exceeds `threshold`.
struct VerdictMargin {
  SourceVerdict verdict{};
  bool on = false;
  double difference = 0.0;  // signed, in delta-alpha units
  double threshold = 0.0;   // margin_sd * pooled ensemble sd
};

struct AttributionConfig {
  MfdfaOptions mfdfa;
  std::uint64_t master_seed = 1;
  std::size_t ensemble_size = 50;
  /// Size of the i.i.d. Gaussian reference ensemble that fixes the
  /// finite-size floor of delta-alpha at this length.
  std::size_t reference_size = 50;
  std::size_t iaaft_max_iterations = 1000;
  double iaaft_tolerance = 1e-8;
  double margin_sd = 2.0;
  std::size_t workers = 1;
};

struct SourceAttribution {
  MultifractalSpectrum original;
  EnsembleSummary shuffled;
  EnsembleSummary surrogate;
  EnsembleSummary reference;
  std::vector<VerdictMargin> verdicts;  // one per SourceVerdict, in enum order
  std::size_t unconverged_surrogates = 0;

  bool verdict(SourceVerdict v) const;
};

/// Runs MF-DFA on the series, on shuffles and on IAAFT surrogates, and decides
/// which features carry its multifractality.
///
/// All comparisons are on delta-alpha with margin = margin_sd * pooled sd:
///  - temporal correlation: original - mean(shuffled) > margin(shuffled)
///  - distribution: mean(shuffled) - mean(reference) > margin(shuffled, reference)
///  - nonlinear correlation: original - mean(surrogate) > margin(surrogate)
///  - linear correlation: |mean(shuffled) - mean(surrogate)| > margin(shuffled, surrogate)
SourceAttribution attribute_sources(const TimeSeries& series, const AttributionConfig& config);

}  // namespace mfa
