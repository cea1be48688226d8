#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mfa/timeseries.hpp"

namespace mfa {

/// Smallest accepted overlap of an aligned pair: five times the minimum scale of 30.
inline constexpr std::size_t kMinAlignedLength = 150;

/// Two series restricted to their common timestamps.
struct AlignedPair {
  TimeSeries x;
  TimeSeries y;
  std::vector<Timestamp> common_timestamps;
};

/// value[i] = ln(price[i+1]) - ln(price[i]), stamped at the later observation.
TimeSeries log_returns(const TimeSeries& prices);

/// Same transform as log_returns for volume series. Rejects non-positive bars,
/// listing their timestamps; use drop_nonpositive_volume first to skip them.
TimeSeries volume_changes(const TimeSeries& volume);

struct DroppedBars {
  TimeSeries cleaned;
  std::vector<Timestamp> dropped;
};

/// Removes zero (or negative) volume bars instead of imputing them.
DroppedBars drop_nonpositive_volume(const TimeSeries& volume);

/// Restricts x and y to the exact intersection of their timestamps.
/// Throws InvalidInput when the overlap is shorter than min_length.
AlignedPair align(const TimeSeries& x, const TimeSeries& y,
                  std::size_t min_length = kMinAlignedLength);

/// Applies the transform implied by the series kind: prices become log returns,
/// volumes become volume changes (after dropping empty bars), anything else is
/// passed through. dropped_count receives the number of removed volume bars.
TimeSeries to_increments(const TimeSeries& raw, std::size_t* dropped_count = nullptr);

}  // namespace mfa
