#include "mfa/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfa/error.hpp"

namespace mfa {

std::string_view to_string(SeriesKind kind) {
  switch (kind) {
    case SeriesKind::price: return "price";
    case SeriesKind::log_return: return "return";
    case SeriesKind::volume: return "volume";
    case SeriesKind::volume_change: return "volume_change";
    case SeriesKind::generic: return "generic";
  }
  return "generic";
}

SeriesKind parse_series_kind(std::string_view name) {
  if (name == "price") return SeriesKind::price;
  if (name == "return" || name == "log_return") return SeriesKind::log_return;
  if (name == "volume") return SeriesKind::volume;
  if (name == "volume_change") return SeriesKind::volume_change;
  if (name == "generic") return SeriesKind::generic;
  throw InvalidInput("unknown series kind '" + std::string(name) + "'");
}

TimeSeries::TimeSeries(std::vector<Timestamp> timestamps, std::vector<double> values,
                       std::string label, SeriesKind kind)
    : timestamps_(std::move(timestamps)),
      values_(std::move(values)),
      label_(std::move(label)),
      kind_(kind) {
  if (timestamps_.size() != values_.size()) {
    throw InvalidInput("series '" + label_ + "': " + std::to_string(timestamps_.size()) +
                       " timestamps but " + std::to_string(values_.size()) + " values");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw InvalidInput("series '" + label_ + "': non-finite value at index " +
                         std::to_string(i));
    }
    if (i > 0 && timestamps_[i] <= timestamps_[i - 1]) {
      throw InvalidInput("series '" + label_ + "': timestamps not strictly increasing at index " +
                         std::to_string(i));
    }
  }
}

TimeSeries TimeSeries::from_values(std::vector<double> values, std::string label,
                                   SeriesKind kind) {
  std::vector<Timestamp> ts(values.size());
  for (std::size_t i = 0; i < ts.size(); ++i) ts[i] = static_cast<Timestamp>(i);
  return TimeSeries(std::move(ts), std::move(values), std::move(label), kind);
}

TimeSeries TimeSeries::with_values(std::vector<double> values) const {
  return TimeSeries(timestamps_, std::move(values), label_, kind_);
}

TimeSeries TimeSeries::slice(Timestamp start, Timestamp end) const {
  auto lo = std::lower_bound(timestamps_.begin(), timestamps_.end(), start);
  auto hi = std::upper_bound(timestamps_.begin(), timestamps_.end(), end);
  if (hi < lo) hi = lo;
  const auto b = static_cast<std::size_t>(lo - timestamps_.begin());
  const auto e = static_cast<std::size_t>(hi - timestamps_.begin());
  return TimeSeries({timestamps_.begin() + b, timestamps_.begin() + e},
                    {values_.begin() + b, values_.begin() + e}, label_, kind_);
}

}  // namespace mfa
