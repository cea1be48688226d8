#include "mfa/surrogates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "fft.hpp"
#include "mfa/error.hpp"
#include "mfa/parallel.hpp"
#include "mfa/random.hpp"

namespace mfa {
namespace {

double amplitude_rmse(std::span<const std::complex<double>> spectrum,
                      std::span<const double> target, double target_rms) {
  double acc = 0.0;
  for (std::size_t k = 0; k < target.size(); ++k) {
    const double d = std::abs(spectrum[k]) - target[k];
    acc += d * d;
  }
  const double rmse = std::sqrt(acc / static_cast<double>(target.size()));
  return target_rms > 0.0 ? rmse / target_rms : rmse;
}

}  // namespace

std::vector<double> shuffle_values(std::span<const double> values, std::uint64_t seed) {
  std::vector<double> out(values.begin(), values.end());
  Rng rng(seed);
  for (std::size_t i = out.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(out[i - 1], out[pick(rng)]);
  }
  return out;
}

TimeSeries shuffle(const TimeSeries& series, std::uint64_t seed) {
  if (series.empty()) throw InvalidInput("shuffle: empty series");
  return series.with_values(shuffle_values(series.values(), seed));
}

IaaftResult iaaft_values(std::span<const double> values, std::uint64_t seed,
                         std::size_t max_iterations, double tol) {
  const std::size_t n = values.size();
  if (n < 4) throw InvalidInput("iaaft needs at least 4 values");
  if (max_iterations == 0) throw InvalidInput("iaaft needs max_iterations >= 1");

  IaaftResult out;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) {
    out.values.assign(values.begin(), values.end());
    out.converged = true;
    return out;
  }

  detail::RealFft fft(n);
  const std::size_t bins = fft.bins();
  std::copy(values.begin(), values.end(), fft.real().begin());
  fft.forward();
  std::vector<double> target(bins);
  double target_power = 0.0;
  for (std::size_t k = 0; k < bins; ++k) {
    target[k] = std::abs(fft.spectrum()[k]);
    target_power += target[k] * target[k];
  }
  const double target_rms = std::sqrt(target_power / static_cast<double>(bins));

  std::vector<double> current = shuffle_values(values, seed);
  std::vector<std::size_t> order(n);
  double previous = std::numeric_limits<double>::quiet_NaN();
  const double inv_n = 1.0 / static_cast<double>(n);

  for (std::size_t it = 0; it < max_iterations; ++it) {
    // Impose the target amplitudes, keep the current phases.
    std::copy(current.begin(), current.end(), fft.real().begin());
    fft.forward();
    auto spec = fft.spectrum();
    for (std::size_t k = 0; k < bins; ++k) {
      const double mag = std::abs(spec[k]);
      spec[k] = mag > 0.0 ? spec[k] * (target[k] / mag) : std::complex<double>(target[k], 0.0);
    }
    fft.backward();
    const auto adjusted = fft.real();
    for (double& v : adjusted) v *= inv_n;

    // Restore the exact value distribution by rank.
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return adjusted[a] < adjusted[b]; });
    for (std::size_t j = 0; j < n; ++j) current[order[j]] = sorted[j];

    std::copy(current.begin(), current.end(), fft.real().begin());
    fft.forward();
    const double rmse = amplitude_rmse(fft.spectrum(), target, target_rms);
    out.iterations = it + 1;
    out.spectrum_rmse = rmse;
    if (rmse == 0.0 || (it > 0 && std::abs(previous - rmse) <= tol * previous)) {
      out.converged = true;
      break;
    }
    previous = rmse;
  }
  out.values = std::move(current);
  return out;
}

IaaftSeries iaaft(const TimeSeries& series, std::uint64_t seed, std::size_t max_iterations,
                  double tol) {
  auto result = iaaft_values(series.values(), seed, max_iterations, tol);
  auto values = result.values;
  return {series.with_values(std::move(values)), std::move(result)};
}

std::vector<EnsembleMember> ensemble(const TimeSeries& series, const SurrogateSpec& spec) {
  if (spec.ensemble_size == 0) throw InvalidInput("ensemble size must be at least 1");
  std::vector<EnsembleMember> members(spec.ensemble_size);
  parallel_for(spec.ensemble_size, spec.workers, [&](std::size_t i) {
    const std::uint64_t seed = derive_seed(spec.master_seed, i);
    try {
      EnsembleMember m;
      m.seed = seed;
      if (spec.method == SurrogateMethod::shuffle) {
        m.series = shuffle(series, seed);
      } else {
        auto r = iaaft(series, seed, spec.max_iterations, spec.convergence_tol);
        m.series = std::move(r.series);
        m.converged = r.diagnostics.converged;
        m.spectrum_rmse = r.diagnostics.spectrum_rmse;
      }
      members[i] = std::move(m);
    } catch (const std::exception& e) {
      throw std::runtime_error("ensemble member " + std::to_string(i) + " (seed " +
                               std::to_string(seed) + "): " + e.what());
    }
  });
  return members;
}

}  // namespace mfa
