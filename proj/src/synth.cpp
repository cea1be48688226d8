#include "mfa/synth.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "fft.hpp"
#include "mfa/error.hpp"
#include "mfa/random.hpp"

namespace mfa::synth {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Rng make_rng(std::uint64_t seed) { return Rng(stream_seed(seed, Stream::synth)); }

std::vector<double> gaussian(std::size_t n, Rng& rng, double sd = 1.0) {
  std::normal_distribution<double> normal(0.0, sd);
  std::vector<double> out(n);
  for (double& v : out) v = normal(rng);
  return out;
}

void require_length(std::size_t n, std::size_t at_least, const char* model) {
  if (n < at_least) {
    throw InvalidInput(std::string(model) + " needs N >= " + std::to_string(at_least));
  }
}

}  // namespace

double fgn_autocovariance(double hurst, std::size_t k) {
  const double kk = static_cast<double>(k);
  const double e = 2.0 * hurst;
  return 0.5 * (std::pow(kk + 1.0, e) - 2.0 * std::pow(kk, e) + std::pow(std::abs(kk - 1.0), e));
}

std::vector<double> fgn(std::size_t n, double hurst, std::uint64_t seed) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw InvalidInput("fGn needs 0 < H < 1");
  require_length(n, 2, "fGn");
  const std::size_t m = 2 * n;
  detail::ComplexFft fft(m);
  auto c = fft.data();
  for (std::size_t j = 0; j <= n; ++j) c[j] = fgn_autocovariance(hurst, j);
  for (std::size_t j = 1; j < n; ++j) c[m - j] = c[j];
  fft.forward();
  std::vector<double> lambda(m);
  double lambda_max = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    lambda[k] = c[k].real();
    lambda_max = std::max(lambda_max, lambda[k]);
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (lambda[k] < 0.0) {
      if (lambda[k] < -1e-10 * lambda_max) {
        throw NumericalError("circulant embedding has a negative eigenvalue (" +
                             std::to_string(lambda[k]) + " at " + std::to_string(k) + ")");
      }
      lambda[k] = 0.0;
    }
  }

  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal;
  const double md = static_cast<double>(m);
  c[0] = std::sqrt(lambda[0] / md) * normal(rng);
  c[n] = std::sqrt(lambda[n] / md) * normal(rng);
  for (std::size_t k = 1; k < n; ++k) {
    const double scale = std::sqrt(lambda[k] / (2.0 * md));
    const double re = normal(rng);
    const double im = normal(rng);
    c[k] = std::complex<double>(scale * re, scale * im);
    c[m - k] = std::conj(c[k]);
  }
  fft.forward();
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = c[j].real();
  return out;
}

std::vector<double> cascade(double p, std::size_t depth, std::uint64_t seed) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidInput("cascade needs 0 < p < 1");
  if (depth == 0 || depth > 26) throw InvalidInput("cascade depth must be in [1, 26]");
  Rng rng = make_rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::vector<double> level{1.0};
  for (std::size_t d = 0; d < depth; ++d) {
    std::vector<double> next(level.size() * 2);
    for (std::size_t i = 0; i < level.size(); ++i) {
      const bool flip = coin(rng);
      next[2 * i] = level[i] * (flip ? 1.0 - p : p);
      next[2 * i + 1] = level[i] * (flip ? p : 1.0 - p);
    }
    level = std::move(next);
  }
  // Unit mean; the scaling exponents are unaffected.
  const double n = static_cast<double>(level.size());
  for (double& v : level) v *= n;
  return level;
}

double cascade_oracle(double p, double q) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidInput("cascade oracle needs 0 < p < 1");
  if (q == 0.0) return -(std::log(p) + std::log(1.0 - p)) / (2.0 * std::numbers::ln2);
  // 1/q - log2(p^q + (1-p)^q)/q rewritten as -log2(mean of p^q, (1-p)^q)/q so
  // that nothing cancels as q -> 0.
  const double u = 0.5 * (std::expm1(q * std::log(p)) + std::expm1(q * std::log1p(-p)));
  return -std::log1p(u) / (q * std::numbers::ln2);
}

std::string model_name(const Model& model) {
  return std::visit(Overloaded{
                        [](const Fgn&) { return std::string("fgn"); },
                        [](const Cascade&) { return std::string("cascade"); },
                        [](const Ar1&) { return std::string("ar1"); },
                        [](const Ma1&) { return std::string("ma1"); },
                        [](const CoupledPair&) { return std::string("coupled_pair"); },
                        [](const GaussianIid&) { return std::string("gaussian"); },
                        [](const StudentT&) { return std::string("student_t"); },
                        [](const LogisticMap&) { return std::string("logistic_map"); },
                    },
                    model);
}

std::pair<TimeSeries, TimeSeries> generate_pair(const SynthSpec& spec) {
  const auto* pair = std::get_if<CoupledPair>(&spec.model);
  if (!pair) throw InvalidInput("generate_pair needs a coupled_pair model");
  require_length(spec.n, 2, "coupled_pair");
  Rng rng = make_rng(spec.seed);
  auto x = gaussian(spec.n, rng);
  auto noise = gaussian(spec.n, rng);
  std::vector<double> y(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) y[i] = pair->beta * x[i] + pair->noise_sd * noise[i];
  return {TimeSeries::from_values(std::move(x), "coupled_x"),
          TimeSeries::from_values(std::move(y), "coupled_y")};
}

TimeSeries generate(const SynthSpec& spec) {
  const std::string name = model_name(spec.model);
  auto values = std::visit(
      Overloaded{
          [&](const Fgn& m) { return fgn(spec.n, m.hurst, spec.seed); },
          [&](const Cascade& m) { return cascade(m.p, m.depth, spec.seed); },
          [&](const Ar1& m) {
            if (!(std::abs(m.phi) < 1.0)) throw InvalidInput("AR(1) needs |phi| < 1");
            require_length(spec.n, 2, "ar1");
            Rng rng = make_rng(spec.seed);
            auto e = gaussian(spec.n, rng, m.sigma);
            std::vector<double> x(spec.n);
            x[0] = e[0] / std::sqrt(1.0 - m.phi * m.phi);
            for (std::size_t t = 1; t < spec.n; ++t) x[t] = m.phi * x[t - 1] + e[t];
            return x;
          },
          [&](const Ma1& m) {
            require_length(spec.n, 2, "ma1");
            Rng rng = make_rng(spec.seed);
            auto e = gaussian(spec.n + 1, rng);
            std::vector<double> x(spec.n);
            for (std::size_t t = 0; t < spec.n; ++t) x[t] = e[t + 1] + m.theta * e[t];
            return x;
          },
          [&](const CoupledPair&) {
            const auto y = generate_pair(spec).second;
            return std::vector<double>(y.values().begin(), y.values().end());
          },
          [&](const GaussianIid&) {
            require_length(spec.n, 1, "gaussian");
            Rng rng = make_rng(spec.seed);
            return gaussian(spec.n, rng);
          },
          [&](const StudentT& m) {
            if (!(m.dof > 0.0)) throw InvalidInput("Student-t needs dof > 0");
            require_length(spec.n, 1, "student_t");
            Rng rng = make_rng(spec.seed);
            std::student_t_distribution<double> t(m.dof);
            std::vector<double> x(spec.n);
            for (double& v : x) v = t(rng);
            return x;
          },
          [&](const LogisticMap& m) {
            if (!(m.r > 0.0 && m.r <= 4.0)) throw InvalidInput("logistic map needs 0 < r <= 4");
            require_length(spec.n, 1, "logistic_map");
            Rng rng = make_rng(spec.seed);
            std::uniform_real_distribution<double> start(0.01, 0.99);
            double x = start(rng);
            std::vector<double> out(spec.n);
            for (std::size_t t = 0; t < 1000 + spec.n; ++t) {
              x = m.r * x * (1.0 - x);
              // Round-off can land on the absorbing points 0 or 1; restart.
              if (!(x > 0.0 && x < 1.0)) x = start(rng);
              if (t >= 1000) out[t - 1000] = x;
            }
            return out;
          },
      },
      spec.model);
  return TimeSeries::from_values(std::move(values), name);
}

}  // namespace mfa::synth
