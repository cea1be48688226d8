#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mfa/timeseries.hpp"

namespace mfa::synth {

struct Fgn {
  double hurst = 0.5;
};
struct Cascade {
  double p = 0.3;
  std::size_t depth = 16;  // N = 2^depth
};
struct Ar1 {
  double phi = 0.5;
  double sigma = 1.0;
};
struct Ma1 {
  double theta = -1.0;
};
/// y = beta * x + noise_sd * e, with x and e independent standard Gaussian.
struct CoupledPair {
  double beta = 0.5;
  double noise_sd = 1.0;
};
struct GaussianIid {};
struct StudentT {
  double dof = 3.0;
};
struct LogisticMap {
  double r = 4.0;
};

using Model = std::variant<Fgn, Cascade, Ar1, Ma1, CoupledPair, GaussianIid, StudentT, LogisticMap>;

struct SynthSpec {
  Model model = GaussianIid{};
  std::size_t n = 1000;  // ignored for Cascade (2^depth)
  std::uint64_t seed = 1;
};

/// Deterministic in the spec. For CoupledPair this returns the y member.
TimeSeries generate(const SynthSpec& spec);

/// (x, y) of a CoupledPair model.
std::pair<TimeSeries, TimeSeries> generate_pair(const SynthSpec& spec);

/// Fractional Gaussian noise by circulant embedding (Davies-Harte).
std::vector<double> fgn(std::size_t n, double hurst, std::uint64_t seed);

/// Autocovariance of unit-variance fGn at lag k.
double fgn_autocovariance(double hurst, std::size_t k);

/// Binomial multiplicative cascade measure on 2^depth cells; at every split
/// the weights {p, 1 - p} go to a randomly chosen child order.
std::vector<double> cascade(double p, std::size_t depth, std::uint64_t seed);

/// Generalized Hurst exponent of the binomial cascade,
/// 1/q - ln(p^q + (1-p)^q) / (q ln 2); q = 0 by its analytic limit.
double cascade_oracle(double p, double q);

std::string model_name(const Model& model);

}  // namespace mfa::synth
