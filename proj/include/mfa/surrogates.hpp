#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mfa/timeseries.hpp"

namespace mfa {

enum class SurrogateMethod { shuffle, iaaft };

struct SurrogateSpec {
  SurrogateMethod method = SurrogateMethod::iaaft;
  std::uint64_t master_seed = 1;
  std::size_t ensemble_size = 50;
  std::size_t max_iterations = 1000;
  double convergence_tol = 1e-8;
  std::size_t workers = 1;
};

/// Uniform random permutation of the values (Fisher-Yates); timestamps stay.
TimeSeries shuffle(const TimeSeries& series, std::uint64_t seed);
std::vector<double> shuffle_values(std::span<const double> values, std::uint64_t seed);

struct IaaftResult {
  std::vector<double> values;
  std::size_t iterations = 0;
  bool converged = false;
  /// RMS difference between the surrogate's and the target amplitude spectrum,
  /// relative to the RMS of the target.
  double spectrum_rmse = 0.0;
};

/// Iterative amplitude adjusted Fourier transform surrogate. Starts from a
/// random permutation, alternates spectrum substitution and rank remapping,
/// and always ends on the rank step, so sorted(output) == sorted(input).
IaaftResult iaaft_values(std::span<const double> values, std::uint64_t seed,
                         std::size_t max_iterations = 1000, double tol = 1e-8);

struct IaaftSeries {
  TimeSeries series;
  IaaftResult diagnostics;
};

IaaftSeries iaaft(const TimeSeries& series, std::uint64_t seed, std::size_t max_iterations = 1000,
                  double tol = 1e-8);

struct EnsembleMember {
  TimeSeries series;
  std::uint64_t seed = 0;
  bool converged = true;
  double spectrum_rmse = 0.0;
};

/// ensemble_size members; member i uses derive_seed(master_seed, i).
std::vector<EnsembleMember> ensemble(const TimeSeries& series, const SurrogateSpec& spec);

}  // namespace mfa
