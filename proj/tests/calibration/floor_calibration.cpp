// Monte-Carlo finite-size floor of delta-alpha for i.i.d. Gaussian input.
// The printed quantile is frozen into the acceptance suite; rerun this after
// any change to the estimator defaults.
//
//   floor_calibration [n=10000] [draws=1000] [first_seed=1]

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "mfa/multifractal.hpp"
#include "mfa/synth.hpp"

namespace {

double quantile7(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 10000;
  const std::size_t draws = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1000;
  const std::uint64_t first = argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 1;

  std::vector<double> widths;
  widths.reserve(draws);
  for (std::uint64_t seed = first; seed < first + draws; ++seed) {
    const auto x = mfa::synth::generate({mfa::synth::GaussianIid{}, n, seed});
    widths.push_back(mfa::mfdfa(x.values()).spectrum.delta_alpha);
  }
  double mean = 0.0;
  for (double w : widths) mean += w;
  mean /= static_cast<double>(widths.size());

  std::printf("n=%zu draws=%zu seeds=[%llu, %llu]\n", n, draws,
              static_cast<unsigned long long>(first),
              static_cast<unsigned long long>(first + draws - 1));
  std::printf("mean  %.6f\n", mean);
  for (double p : {0.5, 0.9, 0.95, 0.99, 0.999})
    std::printf("q%-5g %.6f\n", p, quantile7(widths, p));
  std::printf("max   %.6f\n", *std::max_element(widths.begin(), widths.end()));
}
