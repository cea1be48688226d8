#include "mfa/dcca.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfa/error.hpp"
#include "mfa/parallel.hpp"
#include "mfa/random.hpp"

namespace mfa {
namespace {

double quantile_sorted(std::span<const double> sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

RhoProfile rho_dcca(std::span<const double> x, std::span<const double> y, const ScaleGrid& ss,
                    const SurfaceOptions& options) {
  if (x.size() != y.size()) {
    throw InvalidInput("rho_dcca: series lengths differ (" + std::to_string(x.size()) + " vs " +
                       std::to_string(y.size()) + ")");
  }
  ss.validate(x.size(), options.detrend_order, options.allow_large_scales);
  const auto px = profile(x);
  const auto py = profile(y);

  RhoProfile out;
  out.scales = ss.scales;
  out.n_effective = x.size();
  const std::size_t ns = ss.size();
  out.rho.assign(ns, 0.0);
  out.covariance.assign(ns, 0.0);
  out.fx.assign(ns, 0.0);
  out.fy.assign(ns, 0.0);
  std::vector<double> sum_xy(ns, 0.0), sum_xx_yy(ns, 0.0);

  parallel_for(ns, options.workers, [&](std::size_t si) {
    const std::size_t s = ss.scales[si];
    const PolynomialDetrender detrender(s, options.detrend_order);
    const auto bounds = segment_bounds(x.size(), s, options.bidirectional);
    std::vector<double> rx(s), ry(s);
    double cxy = 0.0, cxx = 0.0, cyy = 0.0;
    for (const auto& b : bounds) {
      detrender.residuals(std::span<const double>(px).subspan(b.begin, s), rx);
      detrender.residuals(std::span<const double>(py).subspan(b.begin, s), ry);
      cxy += segment_covariance(rx, ry);
      cxx += segment_covariance(rx, rx);
      cyy += segment_covariance(ry, ry);
    }
    const double count = static_cast<double>(bounds.size());
    out.covariance[si] = cxy / count;
    out.fx[si] = std::sqrt(cxx / count);
    out.fy[si] = std::sqrt(cyy / count);
    sum_xy[si] = cxy;
    sum_xx_yy[si] = cxx * cyy;
  });

  for (std::size_t si = 0; si < ns; ++si) {
    if (!(out.fx[si] > 0.0)) {
      throw DegenerateInput("rho_dcca: x has zero detrended fluctuation at s = " +
                            std::to_string(ss.scales[si]));
    }
    if (!(out.fy[si] > 0.0)) {
      throw DegenerateInput("rho_dcca: y has zero detrended fluctuation at s = " +
                            std::to_string(ss.scales[si]));
    }
    // |cov| <= fx fy by Cauchy-Schwarz over the pooled residuals, so anything
    // beyond rounding is a defect; the clamp only removes the last ulp. One
    // square root of the product keeps rho(X, X) at exactly 1.
    const double raw = sum_xy[si] / std::sqrt(sum_xx_yy[si]);
    if (!(std::abs(raw) <= 1.0 + 1e-9)) {
      throw NumericalError("rho_dcca: |rho| = " + std::to_string(raw) + " at s = " +
                           std::to_string(ss.scales[si]));
    }
    out.rho[si] = std::clamp(raw, -1.0, 1.0);
  }
  return out;
}

CriticalBand critical_band(std::size_t n, const ScaleGrid& ss, double confidence,
                           std::size_t n_sims, std::uint64_t seed, const SurfaceOptions& options) {
  if (!(confidence > 0.5 && confidence < 1.0)) {
    throw InvalidInput("confidence must lie in (0.5, 1)");
  }
  if (n_sims < 100) throw InvalidInput("critical band needs at least 100 simulations");
  ss.validate(n, options.detrend_order, options.allow_large_scales);

  const std::size_t ns = ss.size();
  std::vector<double> draws(n_sims * ns);
  const std::uint64_t master = stream_seed(seed, Stream::band);
  SurfaceOptions inner = options;
  inner.workers = 1;
  parallel_for(n_sims, options.workers, [&](std::size_t i) {
    Rng rng(derive_seed(master, i));
    std::normal_distribution<double> normal;
    std::vector<double> x(n), y(n);
    for (double& v : x) v = normal(rng);
    for (double& v : y) v = normal(rng);
    const auto p = rho_dcca(x, y, ss, inner);
    std::copy(p.rho.begin(), p.rho.end(), draws.begin() + static_cast<std::ptrdiff_t>(i * ns));
  });

  CriticalBand band;
  band.confidence = confidence;
  band.n_sims = n_sims;
  band.lower.resize(ns);
  band.upper.resize(ns);
  std::vector<double> column(n_sims);
  for (std::size_t si = 0; si < ns; ++si) {
    for (std::size_t i = 0; i < n_sims; ++i) column[i] = draws[i * ns + si];
    std::stable_sort(column.begin(), column.end());
    band.lower[si] = quantile_sorted(column, 0.5 * (1.0 - confidence));
    band.upper[si] = quantile_sorted(column, 0.5 * (1.0 + confidence));
  }
  return band;
}

std::string_view to_string(Significance s) {
  switch (s) {
    case Significance::not_significant: return "not_significant";
    case Significance::significant_positive: return "significant_positive";
    case Significance::significant_negative: return "significant_negative";
  }
  return "not_significant";
}

std::vector<Significance> significance(const RhoProfile& profile, bool one_sided) {
  if (!profile.has_band || profile.band.upper.size() != profile.rho.size()) {
    throw InvalidInput("significance needs a critical band matching the profile");
  }
  std::vector<Significance> out(profile.rho.size(), Significance::not_significant);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (profile.rho[i] > profile.band.upper[i]) {
      out[i] = Significance::significant_positive;
    } else if (!one_sided && profile.rho[i] < profile.band.lower[i]) {
      out[i] = Significance::significant_negative;
    }
  }
  return out;
}

}  // namespace mfa
