#include "mfa/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mfa/error.hpp"
#include "mfa/parallel.hpp"

namespace mfa {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// A segment is "numerically zero" when its detrended covariance is below
// (1e-10)^2 of the raw segment power: the residual is polynomial round-off.
constexpr double kZeroRelative = 1e-20;

double rms(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc / static_cast<double>(v.size()));
}

struct ScaleCovariances {
  std::vector<double> f;            // signed f_v per segment
  std::vector<unsigned char> zero;  // numerically zero segments
};

ScaleCovariances segment_covariances(std::span<const double> px, std::span<const double> py,
                                     bool same, std::size_t s, int order, bool bidirectional) {
  const PolynomialDetrender detrender(s, order);
  const auto bounds = segment_bounds(px.size(), s, bidirectional);
  ScaleCovariances out;
  out.f.resize(bounds.size());
  out.zero.resize(bounds.size());
  std::vector<double> rx(s), ry(s);
  for (std::size_t v = 0; v < bounds.size(); ++v) {
    const auto sx = px.subspan(bounds[v].begin, s);
    const auto sy = py.subspan(bounds[v].begin, s);
    detrender.residuals(sx, rx);
    if (same) {
      std::copy(rx.begin(), rx.end(), ry.begin());
    } else {
      detrender.residuals(sy, ry);
    }
    const double f = segment_covariance(rx, ry);
    out.f[v] = f;
    const double scale = same ? rms(sx) * rms(sx) : rms(sx) * rms(sy);
    out.zero[v] = (std::abs(f) <= kZeroRelative * scale) ? 1 : 0;
  }
  return out;
}

// sqrt(mean |f_v|) over all segments, zero segments counted as exactly 0;
// shared by the q = 2 row and the DFA path.
double variance_fluctuation(const ScaleCovariances& c) {
  double acc = 0.0;
  for (std::size_t v = 0; v < c.f.size(); ++v) acc += c.zero[v] ? 0.0 : std::abs(c.f[v]);
  return std::sqrt(acc / static_cast<double>(c.f.size()));
}

double aggregate(const ScaleCovariances& c, double q, std::size_t& counted) {
  if (q == 2.0) {
    counted = c.f.size();
    return variance_fluctuation(c);
  }
  double acc = 0.0;
  counted = 0;
  for (std::size_t v = 0; v < c.f.size(); ++v) {
    const bool zero = c.zero[v] != 0;
    if (q <= 0.0 && zero) continue;
    const double a = zero ? 0.0 : std::abs(c.f[v]);
    acc += (q == 0.0) ? std::log(a) : std::pow(a, q / 2.0);
    ++counted;
  }
  if (counted == 0) return kNaN;
  const double mean = acc / static_cast<double>(counted);
  if (q == 0.0) return std::exp(mean / 2.0);
  return std::pow(mean, 1.0 / q);
}

FluctuationSurface compute_surface(std::span<const double> x, std::span<const double> y,
                                   bool same, const QGrid& qs, const ScaleGrid& ss,
                                   const SurfaceOptions& options) {
  if (x.size() != y.size()) {
    throw InvalidInput("fluctuation_surface: series lengths differ (" + std::to_string(x.size()) +
                       " vs " + std::to_string(y.size()) + ")");
  }
  if (options.detrend_order < 1 || options.detrend_order > 3) {
    throw InvalidInput("detrend order must be 1, 2 or 3");
  }
  qs.validate();
  ss.validate(x.size(), options.detrend_order, options.allow_large_scales);

  const auto px = profile(x);
  const auto py = same ? px : profile(y);

  FluctuationSurface out;
  out.q = qs;
  out.s = ss;
  out.mode = same ? SurfaceMode::single : SurfaceMode::cross;
  out.detrend_order = options.detrend_order;
  out.bidirectional = options.bidirectional;
  out.n = x.size();
  const std::size_t nq = qs.size();
  const std::size_t ns = ss.size();
  out.segment_count.assign(ns, 0);
  out.zero_segments.assign(ns, 0);
  out.values.assign(nq * ns, kNaN);
  out.valid.assign(nq * ns, 0);

  parallel_for(ns, options.workers, [&](std::size_t si) {
    const auto cov = segment_covariances(px, py, same, ss.scales[si], options.detrend_order,
                                         options.bidirectional);
    out.segment_count[si] = cov.f.size();
    out.zero_segments[si] =
        static_cast<std::size_t>(std::count(cov.zero.begin(), cov.zero.end(), 1));
    for (std::size_t qi = 0; qi < nq; ++qi) {
      std::size_t counted = 0;
      const double value = aggregate(cov, qs.orders[qi], counted);
      out.values[qi * ns + si] = value;
      out.valid[qi * ns + si] = (std::isfinite(value) && value > 0.0) ? 1 : 0;
    }
  });

  if (std::none_of(out.valid.begin(), out.valid.end(), [](unsigned char v) { return v != 0; })) {
    throw DegenerateInput(
        "fluctuation_surface: every segment is perfectly detrended (zero fluctuation at all "
        "scales)");
  }
  return out;
}

}  // namespace

ScaleGrid ScaleGrid::log_spaced(std::size_t s_min, std::size_t s_max, std::size_t count) {
  if (s_min == 0 || s_max < s_min || count == 0) {
    throw InvalidInput("log-spaced scale grid needs 0 < s_min <= s_max and count > 0 (got " +
                       std::to_string(s_min) + ", " + std::to_string(s_max) + ", " +
                       std::to_string(count) + ")");
  }
  ScaleGrid g;
  g.spacing = Spacing::log_spaced;
  const double lo = std::log(static_cast<double>(s_min));
  const double hi = std::log(static_cast<double>(s_max));
  for (std::size_t i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    auto s = static_cast<std::size_t>(std::llround(std::exp(lo + t * (hi - lo))));
    s = std::clamp(s, s_min, s_max);
    if (g.scales.empty() || s > g.scales.back()) g.scales.push_back(s);
  }
  return g;
}

ScaleGrid ScaleGrid::explicit_list(std::vector<std::size_t> scales) {
  ScaleGrid g;
  g.scales = std::move(scales);
  g.spacing = Spacing::explicit_list;
  return g;
}

ScaleGrid ScaleGrid::standard(std::size_t n) { return ScaleRule{}.grid_for(n); }

void ScaleGrid::validate(std::size_t n, int order, bool allow_large) const {
  if (scales.empty()) throw InvalidInput("scale grid is empty");
  const std::size_t floor_s = std::max<std::size_t>(4, static_cast<std::size_t>(order) + 2);
  if (scales.front() < floor_s) {
    throw InvalidInput("smallest scale " + std::to_string(scales.front()) + " is below " +
                       std::to_string(floor_s) + " for detrend order " + std::to_string(order));
  }
  for (std::size_t i = 1; i < scales.size(); ++i) {
    if (scales[i] <= scales[i - 1]) throw InvalidInput("scales must be strictly increasing");
  }
  if (allow_large ? scales.back() > n : scales.back() * 5 > n) {
    throw InvalidInput("largest scale " + std::to_string(scales.back()) + " exceeds " +
                       (allow_large ? "N = " + std::to_string(n)
                                    : "N/5 for N = " + std::to_string(n)));
  }
}

ScaleGrid ScaleRule::grid_for(std::size_t n) const {
  const auto top = s_max != 0 ? s_max
                              : static_cast<std::size_t>(
                                    std::floor(static_cast<double>(n) * s_max_fraction + 1e-9));
  if (top < s_min) {
    throw InvalidInput("series of length " + std::to_string(n) + " is too short for scales from " +
                       std::to_string(s_min) + " to " + std::to_string(top));
  }
  return ScaleGrid::log_spaced(s_min, top, count);
}

QGrid QGrid::range(double q_min, double q_max, double step) {
  if (!(step > 0.0) || !(q_max > q_min)) {
    throw InvalidInput("q grid needs q_min < q_max and a positive step");
  }
  const double steps = (q_max - q_min) / step;
  const auto n = static_cast<std::size_t>(std::llround(steps));
  if (std::abs(static_cast<double>(n) - steps) > 1e-9) {
    throw InvalidInput("q step does not divide [q_min, q_max]");
  }
  QGrid g;
  for (std::size_t i = 0; i <= n; ++i) {
    double q = q_min + static_cast<double>(i) * step;
    if (std::abs(q - std::round(q)) < 1e-9 * step) q = std::round(q);
    g.orders.push_back(q);
  }
  g.orders.back() = q_max;
  g.symmetric = std::abs(q_min + q_max) <= 1e-12;
  return g;
}

QGrid QGrid::standard() { return range(-4.0, 4.0, 0.25); }

void QGrid::validate() const {
  if (orders.empty()) throw InvalidInput("q grid is empty");
  for (std::size_t i = 1; i < orders.size(); ++i) {
    if (!(orders[i] > orders[i - 1])) throw InvalidInput("q orders must be strictly increasing");
  }
  if (index_of(0.0) == npos || index_of(2.0) == npos) {
    throw InvalidInput("q grid must contain 0 and 2");
  }
  if (symmetric && orders.front() + orders.back() != 0.0) {
    throw InvalidInput("symmetric q grid must satisfy q_min + q_max = 0");
  }
}

std::size_t QGrid::index_of(double q) const noexcept {
  for (std::size_t i = 0; i < orders.size(); ++i) {
    if (orders[i] == q) return i;
  }
  return npos;
}

std::vector<double> profile(std::span<const double> values) {
  if (values.size() < 2) throw InvalidInput("profile needs at least 2 values");
  // Shifted mean: exact for constant input, so its profile is exactly zero.
  const double x0 = values.front();
  double acc = 0.0;
  for (double v : values) acc += v - x0;
  const double mean = x0 + acc / static_cast<double>(values.size());
  std::vector<double> out(values.size());
  double run = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    run += values[i] - mean;
    out[i] = run;
  }
  return out;
}

std::vector<SegmentBounds> segment_bounds(std::size_t n, std::size_t s, bool bidirectional) {
  if (s == 0 || s > n) {
    throw InvalidInput("segment size " + std::to_string(s) + " invalid for length " +
                       std::to_string(n));
  }
  const std::size_t count = n / s;
  std::vector<SegmentBounds> out;
  out.reserve(bidirectional ? 2 * count : count);
  for (std::size_t v = 0; v < count; ++v) out.push_back({v * s, s});
  if (bidirectional) {
    for (std::size_t v = 0; v < count; ++v) out.push_back({n - (v + 1) * s, s});
  }
  return out;
}

std::vector<std::span<const double>> segment(std::span<const double> seq, std::size_t s,
                                             bool bidirectional) {
  std::vector<std::span<const double>> out;
  for (const auto& b : segment_bounds(seq.size(), s, bidirectional)) {
    out.push_back(seq.subspan(b.begin, b.length));
  }
  return out;
}

PolynomialDetrender::PolynomialDetrender(std::size_t length, int order)
    : length_(length), order_(order) {
  if (order < 0) throw InvalidInput("detrend order must be non-negative");
  const auto cols = static_cast<Eigen::Index>(order + 1);
  if (length < static_cast<std::size_t>(order) + 2) {
    throw InvalidInput("segment of length " + std::to_string(length) +
                       " cannot be detrended with order " + std::to_string(order));
  }
  const auto rows = static_cast<Eigen::Index>(length);
  Eigen::MatrixXd vandermonde(rows, cols);
  const double half = 0.5 * static_cast<double>(length - 1);
  for (Eigen::Index k = 0; k < rows; ++k) {
    const double t = (static_cast<double>(k) - half) / half;
    double p = 1.0;
    for (Eigen::Index j = 0; j < cols; ++j) {
      vandermonde(k, j) = p;
      p *= t;
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(vandermonde);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  const double r00 = std::abs(r(0, 0));
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (!(std::abs(r(j, j)) > 1e-10 * r00)) {
      throw NumericalError("rank-deficient polynomial basis for segment length " +
                           std::to_string(length));
    }
  }
  basis_ = qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
}

void PolynomialDetrender::residuals(std::span<const double> in, std::span<double> out) const {
  const auto rows = static_cast<Eigen::Index>(length_);
  Eigen::Map<const Eigen::VectorXd> x(in.data(), rows);
  Eigen::Map<Eigen::VectorXd> r(out.data(), rows);
  const Eigen::VectorXd coeff = basis_.transpose() * x;
  r = x - basis_ * coeff;
}

std::pair<std::vector<double>, std::vector<double>> detrend_residuals(
    std::span<const double> segment_x, std::span<const double> segment_y, int order) {
  if (segment_x.size() != segment_y.size()) {
    throw InvalidInput("detrend_residuals: segment lengths differ");
  }
  const PolynomialDetrender d(segment_x.size(), order);
  std::vector<double> rx(segment_x.size()), ry(segment_y.size());
  d.residuals(segment_x, rx);
  d.residuals(segment_y, ry);
  for (std::size_t i = 0; i < rx.size(); ++i) {
    if (!std::isfinite(rx[i]) || !std::isfinite(ry[i])) {
      throw NumericalError("detrend_residuals: non-finite residual at position " +
                           std::to_string(i));
    }
  }
  return {std::move(rx), std::move(ry)};
}

double segment_covariance(std::span<const double> residuals_x,
                          std::span<const double> residuals_y) {
  if (residuals_x.size() != residuals_y.size() || residuals_x.empty()) {
    throw InvalidInput("segment_covariance: residual vectors must be non-empty and equal length");
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < residuals_x.size(); ++k) acc += residuals_x[k] * residuals_y[k];
  return acc / static_cast<double>(residuals_x.size());
}

FluctuationSurface fluctuation_surface(std::span<const double> x, const QGrid& qs,
                                       const ScaleGrid& ss, const SurfaceOptions& options) {
  return compute_surface(x, x, true, qs, ss, options);
}

FluctuationSurface fluctuation_surface(std::span<const double> x, std::span<const double> y,
                                       const QGrid& qs, const ScaleGrid& ss,
                                       const SurfaceOptions& options) {
  return compute_surface(x, y, false, qs, ss, options);
}

std::vector<double> dfa_fluctuation(std::span<const double> x, const ScaleGrid& ss,
                                    const SurfaceOptions& options) {
  ss.validate(x.size(), options.detrend_order, options.allow_large_scales);
  const auto px = profile(x);
  std::vector<double> out(ss.size());
  parallel_for(ss.size(), options.workers, [&](std::size_t si) {
    const auto cov = segment_covariances(px, px, true, ss.scales[si], options.detrend_order,
                                         options.bidirectional);
    out[si] = variance_fluctuation(cov);
  });
  return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidInput("fit_line needs at least two paired points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw InvalidInput("fit_line: x values are all equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += e * e;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

bool ScalingResult::all_available() const {
  return std::all_of(available.begin(), available.end(), [](unsigned char a) { return a != 0; });
}

double ScalingResult::h_at(double order) const {
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == order) {
      if (!available[i]) {
        throw DegenerateInput("h(" + std::to_string(order) + ") is unavailable");
      }
      return h[i];
    }
  }
  throw InvalidInput("order q = " + std::to_string(order) + " is not on the grid");
}

ScalingResult fit_scaling(const FluctuationSurface& surface) {
  const std::size_t nq = surface.q.size();
  const std::size_t ns = surface.s.size();
  ScalingResult out;
  out.q = surface.q.orders;
  out.h.assign(nq, kNaN);
  out.intercept.assign(nq, kNaN);
  out.r_squared.assign(nq, kNaN);
  out.available.assign(nq, 0);
  out.scales_used.assign(nq, 0);
  std::size_t lo = std::numeric_limits<std::size_t>::max(), hi = 0;
  std::vector<double> ls, lf;
  for (std::size_t qi = 0; qi < nq; ++qi) {
    ls.clear();
    lf.clear();
    std::size_t qlo = std::numeric_limits<std::size_t>::max(), qhi = 0;
    for (std::size_t si = 0; si < ns; ++si) {
      if (!surface.is_valid(qi, si)) continue;
      ls.push_back(std::log(static_cast<double>(surface.s.scales[si])));
      lf.push_back(std::log(surface.at(qi, si)));
      qlo = std::min(qlo, surface.s.scales[si]);
      qhi = std::max(qhi, surface.s.scales[si]);
    }
    out.scales_used[qi] = ls.size();
    if (ls.size() < 4) continue;
    const auto fit = fit_line(ls, lf);
    out.h[qi] = fit.slope;
    out.intercept[qi] = fit.intercept;
    out.r_squared[qi] = fit.r_squared;
    out.available[qi] = 1;
    lo = std::min(lo, qlo);
    hi = std::max(hi, qhi);
  }
  if (hi > 0) {
    out.fit_s_min = lo;
    out.fit_s_max = hi;
  }
  return out;
}

DfaResult dfa_hurst(std::span<const double> x, const ScaleGrid& ss, const SurfaceOptions& options) {
  DfaResult out;
  out.fluctuation = dfa_fluctuation(x, ss, options);
  std::vector<double> ls, lf;
  for (std::size_t si = 0; si < ss.size(); ++si) {
    if (!(out.fluctuation[si] > 0.0) || !std::isfinite(out.fluctuation[si])) continue;
    ls.push_back(std::log(static_cast<double>(ss.scales[si])));
    lf.push_back(std::log(out.fluctuation[si]));
  }
  if (ls.size() < 4) throw DegenerateInput("DFA: fewer than 4 scales with positive fluctuation");
  const auto fit = fit_line(ls, lf);
  out.hurst = fit.slope;
  out.r_squared = fit.r_squared;
  return out;
}

}  // namespace mfa
