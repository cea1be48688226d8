#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mfa/timeseries.hpp"

namespace mfa {

/// Daylight-saving window expressed in local wall-clock seconds.
struct DstWindow {
  Timestamp local_start = 0;
  Timestamp local_end = 0;  // exclusive
  std::int64_t extra_offset_seconds = 3600;
};

/// Fixed offset of a data source's local clock from UTC, with optional DST
/// windows. Timestamps that carry their own zone designator ignore this.
struct SourceTimezone {
  std::int64_t utc_offset_seconds = 0;
  std::vector<DstWindow> dst;

  Timestamp to_utc(Timestamp local) const;
};

/// Parses ISO-8601 ("2019-11-01T09:05:00", optional fractional seconds,
/// 'Z' or +hh:mm suffix; a space may replace 'T'; date-only allowed) or plain
/// epoch seconds. Local times go through tz. Throws InvalidInput on failure.
Timestamp parse_timestamp(std::string_view text, const SourceTimezone& tz = {});

/// Formats as ISO-8601 UTC with a trailing 'Z'.
std::string format_timestamp(Timestamp t);

struct CsvOptions {
  std::string time_column = "timestamp";
  std::string value_column = "value";
  char delimiter = ',';
  SourceTimezone timezone;
  std::string label;
  SeriesKind kind = SeriesKind::generic;
};

/// Reads a (timestamp, value) series from CSV with a mandatory header row.
/// Unparseable rows are rejected with their 1-based line numbers; rows are
/// sorted by timestamp and duplicates rejected.
TimeSeries read_series_csv(std::istream& in, const CsvOptions& options);
TimeSeries read_series_csv(const std::filesystem::path& path, const CsvOptions& options);

/// Writes "timestamp,value" rows (epoch seconds) with a header.
void write_series_csv(std::ostream& out, const TimeSeries& series,
                      std::string_view value_column = "value");

/// Splits one line on the delimiter; double-quoted fields may contain it.
std::vector<std::string> split_csv_line(std::string_view line, char delimiter);

}  // namespace mfa
