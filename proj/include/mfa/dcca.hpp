#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "mfa/scaling.hpp"

namespace mfa {

struct CriticalBand {
  double confidence = 0.95;
  std::size_t n_sims = 0;
  std::vector<double> lower;
  std::vector<double> upper;
};

/// rho_DCCA(s) over a scale grid, optionally with its null band.
struct RhoProfile {
  std::vector<std::size_t> scales;
  std::vector<double> rho;
  std::vector<double> covariance;  // signed F^2_xy(s)
  std::vector<double> fx;
  std::vector<double> fy;
  std::size_t n_effective = 0;
  bool has_band = false;
  CriticalBand band;
};

/// Detrended cross-correlation coefficient F^2_xy(s) / (F_x(s) F_y(s)), with
/// the numerator the signed mean segment covariance. Inputs are the raw
/// increments; profiles are taken internally. Throws DegenerateInput naming
/// the side whose fluctuation vanishes.
RhoProfile rho_dcca(std::span<const double> x, std::span<const double> y, const ScaleGrid& ss,
                    const SurfaceOptions& options = {});

/// Empirical (1-c)/2 and (1+c)/2 quantiles of rho over n_sims independent
/// i.i.d. standard Gaussian pairs of length n. Simulation i is seeded from
/// (seed, i), so the band does not depend on the worker count.
CriticalBand critical_band(std::size_t n, const ScaleGrid& ss, double confidence,
                           std::size_t n_sims, std::uint64_t seed,
                           const SurfaceOptions& options = {});

enum class Significance { not_significant, significant_positive, significant_negative };

std::string_view to_string(Significance s);

/// Per scale: above the upper quantile is positive, below the lower quantile
/// negative. With one_sided only the upper tail is tested.
std::vector<Significance> significance(const RhoProfile& profile, bool one_sided = false);

}  // namespace mfa
