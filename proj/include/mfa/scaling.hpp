#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace mfa {

/// Segment sizes s, in observations per segment.
struct ScaleGrid {
  enum class Spacing { log_spaced, explicit_list };

  std::vector<std::size_t> scales;
  Spacing spacing = Spacing::explicit_list;

  /// About `count` logarithmically spaced integers in [s_min, s_max], deduplicated.
  static ScaleGrid log_spaced(std::size_t s_min, std::size_t s_max, std::size_t count = 20);
  static ScaleGrid explicit_list(std::vector<std::size_t> scales);
  /// From 30 to floor(N/5) in ~20 logarithmic steps.
  static ScaleGrid standard(std::size_t n);

  /// Throws InvalidInput unless scales are strictly increasing, the smallest is
  /// at least max(4, order + 2), and the largest is at most N/5 (or N when
  /// allow_large is set).
  void validate(std::size_t n, int order, bool allow_large = false) const;

  std::size_t size() const noexcept { return scales.size(); }
};

/// How a ScaleGrid is derived from a series length: s_min up to
/// floor(N * s_max_fraction), or up to s_max when that is nonzero, `count`
/// log-spaced points.
struct ScaleRule {
  std::size_t s_min = 30;
  std::size_t s_max = 0;
  double s_max_fraction = 0.2;
  std::size_t count = 20;

  ScaleGrid grid_for(std::size_t n) const;
};

/// Moment orders q.
struct QGrid {
  std::vector<double> orders;
  bool symmetric = false;

  /// q_min, q_min + step, ..., q_max; q_max must be reached to within 1e-9 * step.
  static QGrid range(double q_min, double q_max, double step);
  /// -4 to 4 step 0.25.
  static QGrid standard();

  /// Throws InvalidInput unless strictly increasing and containing 0 and 2.
  void validate() const;

  std::size_t size() const noexcept { return orders.size(); }
  /// Index of the order equal to q, or npos.
  std::size_t index_of(double q) const noexcept;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Cumulative deviations from the mean: out[k] = sum_{i<=k} (x[i] - mean).
std::vector<double> profile(std::span<const double> values);

struct SegmentBounds {
  std::size_t begin = 0;
  std::size_t length = 0;
};

/// floor(N/s) segments from the start; when bidirectional, floor(N/s) more
/// taken from the end. Throws InvalidInput if s == 0 or s > N.
std::vector<SegmentBounds> segment_bounds(std::size_t n, std::size_t s, bool bidirectional);
std::vector<std::span<const double>> segment(std::span<const double> seq, std::size_t s,
                                             bool bidirectional);

/// Least-squares polynomial detrending of fixed-length segments.
///
/// Holds an orthonormal basis of the polynomials of degree <= order on the
/// scaled index grid (thin QR of the Vandermonde matrix), so each residual is
/// one projection; the normal equations are never formed.
class PolynomialDetrender {
 public:
  PolynomialDetrender(std::size_t length, int order);

  std::size_t length() const noexcept { return length_; }
  int order() const noexcept { return order_; }

  /// out = in - projection of in onto the polynomial space.
  void residuals(std::span<const double> in, std::span<double> out) const;

 private:
  std::size_t length_;
  int order_;
  Eigen::MatrixXd basis_;  // length x (order + 1), orthonormal columns
};

/// Residuals of each segment from its own order-m least-squares polynomial.
std::pair<std::vector<double>, std::vector<double>> detrend_residuals(
    std::span<const double> segment_x, std::span<const double> segment_y, int order);

/// (1/s) sum_k rx[k] * ry[k], the squared segment fluctuation. May be negative
/// for distinct series.
double segment_covariance(std::span<const double> residuals_x,
                          std::span<const double> residuals_y);

enum class SurfaceMode { single, cross };

struct SurfaceOptions {
  int detrend_order = 1;
  bool bidirectional = true;
  /// Accept scales above N/5.
  bool allow_large_scales = false;
  /// 0 = hardware concurrency.
  std::size_t workers = 1;
};

/// q-order fluctuation functions F(q, s) over a QGrid x ScaleGrid.
///
/// Cells whose segments are all numerically zero (perfectly detrended) are
/// invalid and hold NaN. Segments with zero covariance are excluded from the
/// q <= 0 averages and counted in zero_segments.
struct FluctuationSurface {
  QGrid q;
  ScaleGrid s;
  SurfaceMode mode = SurfaceMode::single;
  int detrend_order = 1;
  bool bidirectional = true;
  std::size_t n = 0;
  std::vector<std::size_t> segment_count;  // per scale
  std::vector<std::size_t> zero_segments;  // per scale
  std::vector<double> values;              // row-major, q index major
  std::vector<unsigned char> valid;

  double at(std::size_t qi, std::size_t si) const { return values[qi * s.size() + si]; }
  bool is_valid(std::size_t qi, std::size_t si) const { return valid[qi * s.size() + si] != 0; }
};

/// MF-DFA surface of one series (cross mode with Y = X, same code path).
FluctuationSurface fluctuation_surface(std::span<const double> x, const QGrid& qs,
                                       const ScaleGrid& ss, const SurfaceOptions& options = {});

/// MF-DCCA surface of an aligned pair.
FluctuationSurface fluctuation_surface(std::span<const double> x, std::span<const double> y,
                                       const QGrid& qs, const ScaleGrid& ss,
                                       const SurfaceOptions& options = {});

/// Second-order DFA fluctuation F(s) = sqrt(mean_v f_v) through a dedicated
/// variance path. Bitwise equal to the q = 2 row of fluctuation_surface.
std::vector<double> dfa_fluctuation(std::span<const double> x, const ScaleGrid& ss,
                                    const SurfaceOptions& options = {});

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares of y on x. Requires at least two distinct x values.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

struct ScalingResult {
  std::vector<double> q;
  std::vector<double> h;          // NaN where unavailable
  std::vector<double> intercept;  // NaN where unavailable
  std::vector<double> r_squared;  // NaN where unavailable
  std::vector<unsigned char> available;
  std::vector<std::size_t> scales_used;  // per q
  std::size_t fit_s_min = 0;
  std::size_t fit_s_max = 0;

  bool all_available() const;
  /// h at order q; throws if q is absent or unavailable.
  double h_at(double q) const;
};

/// Per q, OLS of ln F(q, s) on ln s over the valid cells. Orders with fewer
/// than 4 valid scales are marked unavailable.
ScalingResult fit_scaling(const FluctuationSurface& surface);

struct DfaResult {
  double hurst = 0.0;
  double r_squared = 0.0;
  std::vector<double> fluctuation;
};

/// Classical DFA Hurst exponent h(2) via dfa_fluctuation.
DfaResult dfa_hurst(std::span<const double> x, const ScaleGrid& ss,
                    const SurfaceOptions& options = {});

}  // namespace mfa
