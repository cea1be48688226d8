#include "mfa/multifractal.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <limits>
#include <string>

#include "mfa/error.hpp"
#include "mfa/parallel.hpp"
#include "mfa/random.hpp"
#include "mfa/surrogates.hpp"

namespace mfa {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Derivative at q[at] of the quadratic through points a, b, c.
double quadratic_slope(std::span<const double> q, std::span<const double> y, std::size_t at,
                       std::size_t a, std::size_t b, std::size_t c) {
  const double x = q[at];
  const double la = ((x - q[b]) + (x - q[c])) / ((q[a] - q[b]) * (q[a] - q[c]));
  const double lb = ((x - q[a]) + (x - q[c])) / ((q[b] - q[a]) * (q[b] - q[c]));
  const double lc = ((x - q[a]) + (x - q[b])) / ((q[c] - q[a]) * (q[c] - q[b]));
  return y[a] * la + y[b] * lb + y[c] * lc;
}

ScalarStats stats_of(const std::vector<double>& v) {
  ScalarStats s;
  if (v.empty()) return s;
  double acc = 0.0;
  for (double x : v) acc += x;
  s.mean = acc / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

double pooled_sd(const ScalarStats& a, const ScalarStats& b) {
  return std::sqrt(0.5 * (a.sd * a.sd + b.sd * b.sd));
}

std::vector<MultifractalSpectrum> spectra_of(std::size_t count, const MfdfaOptions& options,
                                             std::size_t workers, const char* what,
                                             const std::function<std::vector<double>(std::size_t)>& member) {
  std::vector<MultifractalSpectrum> out(count);
  MfdfaOptions inner = options;
  inner.surface.workers = 1;
  parallel_for(count, workers, [&](std::size_t i) {
    try {
      const auto values = member(i);
      out[i] = mfdfa(values, inner).spectrum;
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string(what) + " member " + std::to_string(i) + ": " +
                               e.what());
    }
  });
  return out;
}

}  // namespace

std::vector<double> mass_exponents(const ScalingResult& scaling) {
  std::vector<double> tau(scaling.q.size());
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (!scaling.available[i]) {
      throw DegenerateInput("mass exponents need h(q) at every order; h(" +
                            std::to_string(scaling.q[i]) + ") is unavailable");
    }
    tau[i] = scaling.q[i] * scaling.h[i] - 1.0;
  }
  return tau;
}

LegendreSpectrum legendre_spectrum(std::span<const double> tau, std::span<const double> q) {
  if (tau.size() != q.size() || q.size() < 3) {
    throw InvalidInput("legendre_spectrum needs tau on at least 3 orders");
  }
  const std::size_t n = q.size();
  LegendreSpectrum out;
  out.alpha.assign(n, kNaN);
  out.f_alpha.assign(n, kNaN);
  out.available.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    double a = 0.0;
    if (i == 0) {
      a = quadratic_slope(q, tau, 0, 0, 1, 2);
    } else if (i == n - 1) {
      a = quadratic_slope(q, tau, i, n - 3, n - 2, n - 1);
    } else {
      a = quadratic_slope(q, tau, i, i - 1, i, i + 1);
    }
    if (!std::isfinite(a)) continue;
    out.alpha[i] = a;
    out.f_alpha[i] = q[i] * a - tau[i];
    out.available[i] = std::isfinite(out.f_alpha[i]) ? 1 : 0;
  }
  return out;
}

Widths widths(std::span<const double> h, std::span<const double> alpha) {
  if (h.empty() || alpha.empty()) throw InvalidInput("widths need non-empty h and alpha");
  return {h.back() - h.front(), alpha.back() - alpha.front()};
}

double mdm(double h_qmin, double h_qmax) {
  if (!std::isfinite(h_qmin) || !std::isfinite(h_qmax)) {
    throw InvalidInput("mdm needs finite exponents");
  }
  return 0.5 * (std::abs(h_qmin - 0.5) + std::abs(h_qmax - 0.5));
}

MultifractalSpectrum multifractal_spectrum(const ScalingResult& scaling) {
  MultifractalSpectrum s;
  s.q = scaling.q;
  s.h = scaling.h;
  s.tau = mass_exponents(scaling);
  auto legendre = legendre_spectrum(s.tau, s.q);
  s.alpha = std::move(legendre.alpha);
  s.f_alpha = std::move(legendre.f_alpha);
  s.spectrum_available = std::move(legendre.available);
  const auto w = widths(s.h, s.alpha);
  s.delta_alpha_literal = w.delta_alpha;
  s.delta_alpha = std::abs(w.delta_alpha);
  s.delta_h = w.delta_h;
  s.abs_delta_h = std::abs(w.delta_h);
  s.mdm = mdm(s.h.front(), s.h.back());
  s.hurst = scaling.h_at(2.0);
  for (std::size_t i = 1; i < s.h.size(); ++i) {
    if (s.h[i] > s.h[i - 1]) s.non_monotone = true;
  }
  return s;
}

MfdfaResult mfdfa(std::span<const double> x, const MfdfaOptions& options) {
  MfdfaResult r;
  r.surface = fluctuation_surface(x, options.q, options.scales.grid_for(x.size()), options.surface);
  r.scaling = fit_scaling(r.surface);
  r.spectrum = multifractal_spectrum(r.scaling);
  return r;
}

MfdfaResult mfdcca(std::span<const double> x, std::span<const double> y,
                   const MfdfaOptions& options) {
  MfdfaResult r;
  r.surface =
      fluctuation_surface(x, y, options.q, options.scales.grid_for(x.size()), options.surface);
  r.scaling = fit_scaling(r.surface);
  r.spectrum = multifractal_spectrum(r.scaling);
  return r;
}

EnsembleSummary summarize(std::span<const MultifractalSpectrum> members) {
  EnsembleSummary s;
  s.n = members.size();
  if (members.empty()) return s;
  std::vector<double> da, dh, adh, m, h2;
  for (const auto& sp : members) {
    da.push_back(sp.delta_alpha);
    dh.push_back(sp.delta_h);
    adh.push_back(sp.abs_delta_h);
    m.push_back(sp.mdm);
    h2.push_back(sp.hurst);
  }
  s.delta_alpha = stats_of(da);
  s.delta_h = stats_of(dh);
  s.abs_delta_h = stats_of(adh);
  s.mdm = stats_of(m);
  s.hurst = stats_of(h2);
  s.mean_h.assign(members.front().h.size(), 0.0);
  for (const auto& sp : members) {
    for (std::size_t i = 0; i < s.mean_h.size(); ++i) s.mean_h[i] += sp.h[i];
  }
  for (double& v : s.mean_h) v /= static_cast<double>(members.size());
  return s;
}

std::string_view to_string(SourceVerdict verdict) {
  switch (verdict) {
    case SourceVerdict::distribution_contributes: return "distribution_contributes";
    case SourceVerdict::temporal_correlation_contributes: return "temporal_correlation_contributes";
    case SourceVerdict::nonlinear_correlation_contributes: return "nonlinear_correlation_contributes";
    case SourceVerdict::linear_correlation_contributes: return "linear_correlation_contributes";
  }
  return "unknown";
}

bool SourceAttribution::verdict(SourceVerdict v) const {
  for (const auto& m : verdicts) {
    if (m.verdict == v) return m.on;
  }
  return false;
}

SourceAttribution attribute_sources(const TimeSeries& series, const AttributionConfig& config) {
  if (config.ensemble_size < 2 || config.reference_size < 2) {
    throw InvalidInput("source attribution needs ensembles of at least 2 members");
  }
  const auto values = series.values();
  SourceAttribution out;
  {
    MfdfaOptions opts = config.mfdfa;
    opts.surface.workers = config.workers;
    out.original = mfdfa(values, opts).spectrum;
  }

  SurrogateSpec shuffle_spec;
  shuffle_spec.method = SurrogateMethod::shuffle;
  shuffle_spec.master_seed = stream_seed(config.master_seed, Stream::shuffle);
  shuffle_spec.ensemble_size = config.ensemble_size;
  shuffle_spec.workers = config.workers;
  const auto shuffled = ensemble(series, shuffle_spec);

  SurrogateSpec iaaft_spec = shuffle_spec;
  iaaft_spec.method = SurrogateMethod::iaaft;
  iaaft_spec.master_seed = stream_seed(config.master_seed, Stream::iaaft);
  iaaft_spec.max_iterations = config.iaaft_max_iterations;
  iaaft_spec.convergence_tol = config.iaaft_tolerance;
  const auto surrogates = ensemble(series, iaaft_spec);
  for (const auto& m : surrogates) {
    if (!m.converged) ++out.unconverged_surrogates;
  }

  const auto shuffled_spectra =
      spectra_of(shuffled.size(), config.mfdfa, config.workers, "shuffled",
                 [&](std::size_t i) {
                   const auto v = shuffled[i].series.values();
                   return std::vector<double>(v.begin(), v.end());
                 });
  const auto surrogate_spectra =
      spectra_of(surrogates.size(), config.mfdfa, config.workers, "surrogate",
                 [&](std::size_t i) {
                   const auto v = surrogates[i].series.values();
                   return std::vector<double>(v.begin(), v.end());
                 });
  const std::uint64_t reference_master = stream_seed(config.master_seed, Stream::reference);
  const auto reference_spectra =
      spectra_of(config.reference_size, config.mfdfa, config.workers, "reference",
                 [&](std::size_t i) {
                   Rng rng(derive_seed(reference_master, i));
                   std::normal_distribution<double> normal;
                   std::vector<double> v(values.size());
                   for (double& x : v) x = normal(rng);
                   return v;
                 });

  out.shuffled = summarize(shuffled_spectra);
  out.surrogate = summarize(surrogate_spectra);
  out.reference = summarize(reference_spectra);

  const double k = config.margin_sd;
  const double original = out.original.delta_alpha;
  const auto& sh = out.shuffled.delta_alpha;
  const auto& su = out.surrogate.delta_alpha;
  const auto& ref = out.reference.delta_alpha;

  auto margin = [](SourceVerdict v, double difference, double threshold) {
    return VerdictMargin{v, difference > threshold, difference, threshold};
  };
  out.verdicts = {
      margin(SourceVerdict::distribution_contributes, sh.mean - ref.mean, k * pooled_sd(sh, ref)),
      margin(SourceVerdict::temporal_correlation_contributes, original - sh.mean, k * sh.sd),
      margin(SourceVerdict::nonlinear_correlation_contributes, original - su.mean, k * su.sd),
      margin(SourceVerdict::linear_correlation_contributes, std::abs(sh.mean - su.mean),
             k * pooled_sd(sh, su)),
  };
  return out;
}

}  // namespace mfa
