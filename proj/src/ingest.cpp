#include "mfa/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfa/error.hpp"
#include "mfa/csv.hpp"

namespace mfa {
namespace {

std::vector<double> log_differences(const TimeSeries& s) {
  const auto v = s.values();
  std::vector<double> out;
  out.reserve(v.size() - 1);
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    out.push_back(std::log(v[i + 1]) - std::log(v[i]));
  }
  return out;
}

void require_length(const TimeSeries& s, std::string_view op) {
  if (s.size() < 2) {
    throw InvalidInput(std::string(op) + ": series '" + s.label() + "' needs at least 2 points");
  }
}

}  // namespace

TimeSeries log_returns(const TimeSeries& prices) {
  require_length(prices, "log_returns");
  if (prices.kind() != SeriesKind::price && prices.kind() != SeriesKind::generic) {
    throw InvalidInput("log_returns: series '" + prices.label() + "' is of kind " +
                       std::string(to_string(prices.kind())));
  }
  const auto v = prices.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0)) {
      throw InvalidInput("log_returns: non-positive price " + std::to_string(v[i]) +
                         " at index " + std::to_string(i));
    }
  }
  auto ts = prices.timestamps();
  return TimeSeries({ts.begin() + 1, ts.end()}, log_differences(prices), prices.label(),
                    SeriesKind::log_return);
}

TimeSeries volume_changes(const TimeSeries& volume) {
  require_length(volume, "volume_changes");
  if (volume.kind() != SeriesKind::volume && volume.kind() != SeriesKind::generic) {
    throw InvalidInput("volume_changes: series '" + volume.label() + "' is of kind " +
                       std::string(to_string(volume.kind())));
  }
  const auto v = volume.values();
  const auto ts = volume.timestamps();
  std::string offending;
  std::size_t count = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0)) {
      if (count < 20) offending += (count ? ", " : "") + format_timestamp(ts[i]);
      ++count;
    }
  }
  if (count > 0) {
    throw InvalidInput("volume_changes: " + std::to_string(count) +
                       " non-positive volume bar(s) at " + offending + (count > 20 ? ", ..." : ""));
  }
  return TimeSeries({ts.begin() + 1, ts.end()}, log_differences(volume), volume.label(),
                    SeriesKind::volume_change);
}

DroppedBars drop_nonpositive_volume(const TimeSeries& volume) {
  std::vector<Timestamp> ts;
  std::vector<double> vals;
  std::vector<Timestamp> dropped;
  for (std::size_t i = 0; i < volume.size(); ++i) {
    if (volume.values()[i] > 0.0) {
      ts.push_back(volume.timestamps()[i]);
      vals.push_back(volume.values()[i]);
    } else {
      dropped.push_back(volume.timestamps()[i]);
    }
  }
  return {TimeSeries(std::move(ts), std::move(vals), volume.label(), volume.kind()),
          std::move(dropped)};
}

AlignedPair align(const TimeSeries& x, const TimeSeries& y, std::size_t min_length) {
  if (x.empty() || y.empty()) throw InvalidInput("align: empty input series");
  std::vector<Timestamp> common;
  std::vector<double> xv, yv;
  const auto tx = x.timestamps();
  const auto ty = y.timestamps();
  std::size_t i = 0, j = 0;
  while (i < tx.size() && j < ty.size()) {
    if (tx[i] < ty[j]) {
      ++i;
    } else if (ty[j] < tx[i]) {
      ++j;
    } else {
      common.push_back(tx[i]);
      xv.push_back(x.values()[i]);
      yv.push_back(y.values()[j]);
      ++i;
      ++j;
    }
  }
  if (common.size() < min_length) {
    throw InvalidInput("align: '" + x.label() + "' (" + std::to_string(x.size()) + ") and '" +
                       y.label() + "' (" + std::to_string(y.size()) + ") overlap in only " +
                       std::to_string(common.size()) + " timestamps, need " +
                       std::to_string(min_length));
  }
  return {TimeSeries(common, std::move(xv), x.label(), x.kind()),
          TimeSeries(common, std::move(yv), y.label(), y.kind()), common};
}

TimeSeries to_increments(const TimeSeries& raw, std::size_t* dropped_count) {
  if (dropped_count) *dropped_count = 0;
  switch (raw.kind()) {
    case SeriesKind::price:
      return log_returns(raw);
    case SeriesKind::volume: {
      auto cleaned = drop_nonpositive_volume(raw);
      if (dropped_count) *dropped_count = cleaned.dropped.size();
      return volume_changes(cleaned.cleaned);
    }
    default:
      return raw;
  }
}

}  // namespace mfa
