#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mfa {

/// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

enum class SeriesKind { price, log_return, volume, volume_change, generic };

std::string_view to_string(SeriesKind kind);
SeriesKind parse_series_kind(std::string_view name);

/// Timestamped, finite, real-valued observations.
///
/// Timestamps are strictly increasing. Construction validates both invariants
/// and throws InvalidInput with the offending index otherwise.
class TimeSeries {
 public:
  TimeSeries() = default;
  TimeSeries(std::vector<Timestamp> timestamps, std::vector<double> values,
             std::string label = {}, SeriesKind kind = SeriesKind::generic);

  /// Series on the implicit grid 0, 1, ..., N-1.
  static TimeSeries from_values(std::vector<double> values, std::string label = {},
                                SeriesKind kind = SeriesKind::generic);

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  std::span<const double> values() const noexcept { return values_; }
  std::span<const Timestamp> timestamps() const noexcept { return timestamps_; }
  const std::string& label() const noexcept { return label_; }
  SeriesKind kind() const noexcept { return kind_; }

  void set_label(std::string label) { label_ = std::move(label); }

  /// Same timestamps, label and kind, new values (re-validated).
  TimeSeries with_values(std::vector<double> values) const;

  /// Observations with start <= t <= end.
  TimeSeries slice(Timestamp start, Timestamp end) const;

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

 private:
  std::vector<Timestamp> timestamps_;
  std::vector<double> values_;
  std::string label_;
  SeriesKind kind_ = SeriesKind::generic;
};

}  // namespace mfa
