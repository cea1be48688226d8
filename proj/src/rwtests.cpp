#include "mfa/rwtests.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "mfa/error.hpp"

namespace mfa {
namespace {

double mean_of(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v;
  return acc / static_cast<double>(x.size());
}

double sum_sq_dev(std::span<const double> x, double mean) {
  double acc = 0.0;
  for (double v : x) acc += (v - mean) * (v - mean);
  return acc;
}

double median_of(std::span<const double> x) {
  std::vector<double> v(x.begin(), x.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

// Pair counts behind the BDS statistic, by walking the diagonals of the
// closeness matrix |x_i - x_j| < eps and tracking run lengths.
struct PairCounts {
  std::size_t n = 0;
  std::size_t max_dim = 1;
  unsigned long long close_pairs = 0;           // i < j
  std::vector<unsigned long long> embedded;     // [m]: close m-vector pairs, m = 1..max_dim
  std::vector<unsigned long long> head_close;   // [i]: close pairs (i, j > i) for i < max_dim - 1
  std::vector<unsigned long long> row_close;    // [i]: close partners of i (excluding itself)
};

PairCounts count_pairs(std::span<const double> x, double eps, std::size_t max_dim) {
  const std::size_t n = x.size();
  PairCounts pc;
  pc.n = n;
  pc.max_dim = max_dim;
  pc.embedded.assign(max_dim + 1, 0);
  pc.head_close.assign(max_dim, 0);
  pc.row_close.assign(n, 0);
  std::vector<unsigned long long> hist(max_dim + 1, 0);
  for (std::size_t d = 1; d < n; ++d) {
    std::size_t run = 0;
    const std::size_t last = n - d;
    for (std::size_t i = 0; i < last; ++i) {
      const bool close = std::abs(x[i] - x[i + d]) < eps;
      if (close) {
        ++run;
        ++pc.row_close[i];
        ++pc.row_close[i + d];
        if (i + 1 < max_dim) ++pc.head_close[i];
        ++hist[std::min(run, max_dim)];
      } else {
        run = 0;
      }
    }
  }
  unsigned long long acc = 0;
  for (std::size_t m = max_dim; m >= 1; --m) {
    acc += hist[m];
    pc.embedded[m] = acc;
  }
  pc.close_pairs = pc.embedded[1];
  return pc;
}

double pairs_of(std::size_t n) { return 0.5 * static_cast<double>(n) * static_cast<double>(n - 1); }

}  // namespace

double normal_two_sided_p(double z) {
  if (!std::isfinite(z)) return 0.0;
  return std::erfc(std::abs(z) / std::numbers::sqrt2);
}

std::size_t count_runs(std::span<const bool> above) {
  if (above.empty()) return 0;
  std::size_t runs = 1;
  for (std::size_t i = 1; i < above.size(); ++i) {
    if (above[i] != above[i - 1]) ++runs;
  }
  return runs;
}

RunsResult runs_test(std::span<const double> x) {
  if (x.size() < 20) throw InvalidInput("runs test needs at least 20 observations");
  const double med = median_of(x);
  std::vector<bool> above;
  above.reserve(x.size());
  for (double v : x) {
    if (v > med) above.push_back(true);
    else if (v < med) above.push_back(false);
  }
  RunsResult r;
  r.n_above = static_cast<std::size_t>(std::count(above.begin(), above.end(), true));
  r.n_below = above.size() - r.n_above;
  if (r.n_above == 0 || r.n_below == 0) {
    throw DegenerateInput("runs test: all values identical, no runs structure");
  }
  std::size_t runs = 1;
  for (std::size_t i = 1; i < above.size(); ++i) {
    if (above[i] != above[i - 1]) ++runs;
  }
  r.runs = runs;
  const double n1 = static_cast<double>(r.n_above);
  const double n2 = static_cast<double>(r.n_below);
  const double n = n1 + n2;
  r.expected = 2.0 * n1 * n2 / n + 1.0;
  const double var = 2.0 * n1 * n2 * (2.0 * n1 * n2 - n) / (n * n * (n - 1.0));
  r.z = (static_cast<double>(r.runs) - r.expected) / std::sqrt(var);
  r.p_value = normal_two_sided_p(r.z);
  return r;
}

std::size_t default_ljung_box_lags(std::size_t n) { return std::min<std::size_t>(10, n / 5); }

LjungBoxResult ljung_box(std::span<const double> x, std::size_t lags) {
  const std::size_t n = x.size();
  if (lags < 1 || lags >= n) {
    throw InvalidInput("Ljung-Box needs 1 <= lags < N (lags = " + std::to_string(lags) +
                       ", N = " + std::to_string(n) + ")");
  }
  const double m = mean_of(x);
  const double denom = sum_sq_dev(x, m);
  if (!(denom > 0.0)) throw DegenerateInput("Ljung-Box: zero-variance series");
  LjungBoxResult r;
  r.lags = lags;
  const double nd = static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t k = 1; k <= lags; ++k) {
    double c = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) c += (x[t] - m) * (x[t + k] - m);
    const double rk = c / denom;
    r.autocorrelation.push_back(rk);
    acc += rk * rk / (nd - static_cast<double>(k));
  }
  r.q = nd * (nd + 2.0) * acc;
  r.p_value = r.q > 0.0 ? boost::math::gamma_q(0.5 * static_cast<double>(lags), 0.5 * r.q) : 1.0;
  return r;
}

VarianceRatioResult variance_ratio(std::span<const double> x,
                                   std::span<const std::size_t> horizons) {
  if (horizons.empty()) throw InvalidInput("variance ratio needs at least one horizon");
  const std::size_t kmax = *std::max_element(horizons.begin(), horizons.end());
  const std::size_t n = x.size();
  if (n < 10 * kmax) {
    throw InvalidInput("variance ratio needs N >= 10 * max(k) (N = " + std::to_string(n) +
                       ", max k = " + std::to_string(kmax) + ")");
  }
  const double nd = static_cast<double>(n);
  const double mu = mean_of(x);
  std::vector<double> dev(n), dev2(n);
  for (std::size_t t = 0; t < n; ++t) {
    dev[t] = x[t] - mu;
    dev2[t] = dev[t] * dev[t];
  }
  const double ss = std::accumulate(dev2.begin(), dev2.end(), 0.0);
  if (!(ss > 0.0)) throw DegenerateInput("variance ratio: zero-variance series");
  const double var_a = ss / (nd - 1.0);

  // delta_j of the heteroskedasticity-consistent variance.
  std::vector<double> delta(kmax, 0.0);
  for (std::size_t j = 1; j < kmax; ++j) {
    double acc = 0.0;
    for (std::size_t t = j; t < n; ++t) acc += dev2[t] * dev2[t - j];
    delta[j] = nd * acc / (ss * ss);
  }

  VarianceRatioResult out;
  out.min_p_unadjusted = 1.0;
  for (std::size_t k : horizons) {
    if (k < 2) throw InvalidInput("variance ratio horizons must be >= 2");
    const double kd = static_cast<double>(k);
    double window = 0.0;
    for (std::size_t t = 0; t < k; ++t) window += dev[t];
    double acc = window * window;
    for (std::size_t t = k; t < n; ++t) {
      window += dev[t] - dev[t - k];
      acc += window * window;
    }
    const double m = kd * (nd - kd + 1.0) * (1.0 - kd / nd);
    VarianceRatioHorizon h;
    h.k = k;
    h.ratio = (acc / m) / var_a;
    const double phi = 2.0 * (2.0 * kd - 1.0) * (kd - 1.0) / (3.0 * kd * nd);
    h.z_homoskedastic = (h.ratio - 1.0) / std::sqrt(phi);
    double theta = 0.0;
    for (std::size_t j = 1; j < k; ++j) {
      const double w = 2.0 * (kd - static_cast<double>(j)) / kd;
      theta += w * w * delta[j];
    }
    h.z_heteroskedastic = std::sqrt(nd) * (h.ratio - 1.0) / std::sqrt(theta);
    h.p_value = normal_two_sided_p(h.z_heteroskedastic);
    out.min_p_unadjusted = std::min(out.min_p_unadjusted, h.p_value);
    out.horizons.push_back(h);
  }
  out.p_value = std::min(1.0, out.min_p_unadjusted * static_cast<double>(horizons.size()));
  return out;
}

VarianceRatioResult variance_ratio(std::span<const double> increments) {
  static constexpr std::size_t kDefault[] = {2, 4, 8, 16};
  return variance_ratio(increments, kDefault);
}

double correlation_integral(std::span<const double> x, double epsilon) {
  if (x.size() < 2) throw InvalidInput("correlation integral needs at least 2 points");
  const auto pc = count_pairs(x, epsilon, 1);
  return static_cast<double>(pc.close_pairs) / pairs_of(x.size());
}

BdsResult bds_test(std::span<const double> x, std::span<const std::size_t> dims,
                   double eps_factor) {
  const std::size_t n = x.size();
  if (n < 200) throw InvalidInput("BDS test needs at least 200 observations");
  if (dims.empty()) throw InvalidInput("BDS test needs at least one embedding dimension");
  if (!(eps_factor > 0.0)) throw InvalidInput("BDS epsilon factor must be positive");
  const std::size_t max_dim = *std::max_element(dims.begin(), dims.end());
  for (std::size_t m : dims) {
    if (m < 2) throw InvalidInput("BDS embedding dimensions must be >= 2");
  }
  const double mu = mean_of(x);
  const double sd = std::sqrt(sum_sq_dev(x, mu) / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw DegenerateInput("BDS test: zero-variance series");

  BdsResult out;
  out.epsilon = eps_factor * sd;
  const auto pc = count_pairs(x, out.epsilon, max_dim);
  if (pc.close_pairs == 0) {
    throw DegenerateInput("BDS test: no pairs closer than epsilon; use a larger epsilon factor");
  }
  const double nd = static_cast<double>(n);
  const double c = static_cast<double>(pc.close_pairs) / pairs_of(n);
  out.c1_full = c;
  double row_sq = 0.0;
  for (auto r : pc.row_close) {
    const double full = 1.0 + static_cast<double>(r);  // including the point itself
    row_sq += full * full;
  }
  const double total = nd + 2.0 * static_cast<double>(pc.close_pairs);
  out.k = (row_sq - 3.0 * total + 2.0 * nd) / (nd * (nd - 1.0) * (nd - 2.0));
  const double k = out.k;

  out.min_p_unadjusted = 1.0;
  for (std::size_t m : dims) {
    const std::size_t nm = n - m + 1;
    unsigned long long head = 0;
    for (std::size_t i = 0; i + 1 < m; ++i) head += pc.head_close[i];
    BdsDimension dim;
    dim.m = m;
    dim.c_m = static_cast<double>(pc.embedded[m]) / pairs_of(nm);
    dim.c_1 = static_cast<double>(pc.close_pairs - head) / pairs_of(nm);
    const double md = static_cast<double>(m);
    double cross = 0.0;
    for (std::size_t j = 1; j < m; ++j) {
      cross += std::pow(k, md - static_cast<double>(j)) * std::pow(c, 2.0 * static_cast<double>(j));
    }
    const double var = 4.0 * (std::pow(k, md) + 2.0 * cross +
                              (md - 1.0) * (md - 1.0) * std::pow(c, 2.0 * md) -
                              md * md * k * std::pow(c, 2.0 * md - 2.0));
    if (!(var > 0.0)) throw DegenerateInput("BDS test: non-positive asymptotic variance");
    dim.w = std::sqrt(static_cast<double>(nm)) * (dim.c_m - std::pow(dim.c_1, md)) / std::sqrt(var);
    dim.p_value = normal_two_sided_p(dim.w);
    out.min_p_unadjusted = std::min(out.min_p_unadjusted, dim.p_value);
    out.dims.push_back(dim);
  }
  out.p_value = std::min(1.0, out.min_p_unadjusted * static_cast<double>(dims.size()));
  return out;
}

BdsResult bds_test(std::span<const double> x) {
  static constexpr std::size_t kDefault[] = {2, 3, 4, 5};
  return bds_test(x, kDefault, 0.7);
}

MannKendallResult mann_kendall(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 3) throw InvalidInput("Mann-Kendall test needs at least 3 observations");
  MannKendallResult r;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      r.s += (x[j] > x[i]) - (x[j] < x[i]);
    }
  }
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  double ties = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    ties += t * (t - 1.0) * (2.0 * t + 5.0);
    i = j;
  }
  const double nd = static_cast<double>(n);
  r.variance = (nd * (nd - 1.0) * (2.0 * nd + 5.0) - ties) / 18.0;
  if (r.variance > 0.0) {
    const double sd = std::sqrt(r.variance);
    if (r.s > 0) r.z = (static_cast<double>(r.s) - 1.0) / sd;
    else if (r.s < 0) r.z = (static_cast<double>(r.s) + 1.0) / sd;
  }
  r.p_value = normal_two_sided_p(r.z);
  return r;
}

std::vector<const TestEntry*> TestReport::p_valued() const {
  return {&runs, &ljung_box, &variance_ratio, &bds, &mann_kendall};
}

TestReport battery(std::span<const double> x, const BatteryConfig& config) {
  if (x.size() < 200) throw InvalidInput("test battery needs at least 200 observations");
  TestReport rep;
  auto run = [&](TestEntry& entry, const char* name, auto&& body) {
    entry.name = name;
    try {
      body(entry);
      if (entry.p_value) entry.rejected = *entry.p_value < config.alpha;
    } catch (const std::exception& e) {
      entry.error = e.what();
      entry.statistic.reset();
      entry.p_value.reset();
      entry.rejected = false;
    }
  };
  run(rep.runs, "runs", [&](TestEntry& e) {
    const auto r = runs_test(x);
    e.statistic = r.z;
    e.p_value = r.p_value;
  });
  rep.ljung_box_lags = config.ljung_box_lags.value_or(default_ljung_box_lags(x.size()));
  run(rep.ljung_box, "ljung_box", [&](TestEntry& e) {
    const auto r = ljung_box(x, rep.ljung_box_lags);
    e.statistic = r.q;
    e.p_value = r.p_value;
  });
  run(rep.variance_ratio, "variance_ratio", [&](TestEntry& e) {
    const auto r = variance_ratio(x, config.vr_horizons);
    const auto best = std::min_element(r.horizons.begin(), r.horizons.end(),
                                       [](const auto& a, const auto& b) { return a.p_value < b.p_value; });
    e.statistic = best->ratio;
    e.p_value = r.p_value;
  });
  run(rep.bds, "bds", [&](TestEntry& e) {
    const auto r = bds_test(x, config.bds_dims, config.bds_eps_factor);
    const auto best = std::min_element(r.dims.begin(), r.dims.end(),
                                       [](const auto& a, const auto& b) { return a.p_value < b.p_value; });
    e.statistic = best->w;
    e.p_value = r.p_value;
  });
  run(rep.mann_kendall, "mann_kendall", [&](TestEntry& e) {
    const auto r = mann_kendall(x);
    e.statistic = r.z;
    e.p_value = r.p_value;
  });
  run(rep.dfa, "dfa", [&](TestEntry& e) {
    const auto r = dfa_hurst(x, config.dfa_scales.grid_for(x.size()), config.dfa);
    e.statistic = r.hurst;
    rep.dfa_r_squared = r.r_squared;
  });
  for (const auto* e : rep.p_valued()) {
    if (e->rejected) ++rep.rejections;
  }
  return rep;
}

}  // namespace mfa
