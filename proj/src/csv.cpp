#include "mfa/csv.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "mfa/error.hpp"

namespace mfa {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class Int>
bool parse_int(std::string_view s, Int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  // from_chars for double is available in libstdc++ 11.
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

Timestamp civil_to_epoch(int y, unsigned mo, unsigned d, int hh, int mm, int ss) {
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok()) return std::numeric_limits<Timestamp>::min();
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<Timestamp>(days) * 86400 + hh * 3600 + mm * 60 + ss;
}

[[noreturn]] void bad_timestamp(std::string_view text) {
  throw InvalidInput("unparseable timestamp '" + std::string(text) + "'");
}

}  // namespace

Timestamp SourceTimezone::to_utc(Timestamp local) const {
  std::int64_t offset = utc_offset_seconds;
  for (const auto& w : dst) {
    if (local >= w.local_start && local < w.local_end) {
      offset += w.extra_offset_seconds;
      break;
    }
  }
  return local - offset;
}

Timestamp parse_timestamp(std::string_view text, const SourceTimezone& tz) {
  text = trim(text);
  if (text.empty()) bad_timestamp(text);

  // Epoch seconds (optionally fractional).
  if (text.find('-', 1) == std::string_view::npos && text.find(':') == std::string_view::npos) {
    Timestamp t = 0;
    if (parse_int(text, t)) return t;
    double d = 0;
    if (parse_double(text, d) && std::isfinite(d)) return static_cast<Timestamp>(std::floor(d));
    bad_timestamp(text);
  }

  // YYYY-MM-DD[(T| )hh:mm[:ss[.fff]]][Z|(+|-)hh[:mm]]
  auto field = [&](std::size_t pos, std::size_t len, int& out) {
    if (pos + len > text.size() || !parse_int(text.substr(pos, len), out)) bad_timestamp(text);
  };
  int y = 0, mo = 0, d = 0, hh = 0, mi = 0, ss = 0;
  field(0, 4, y);
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') bad_timestamp(text);
  field(5, 2, mo);
  field(8, 2, d);
  std::size_t pos = 10;
  if (pos < text.size() && (text[pos] == 'T' || text[pos] == ' ')) {
    field(pos + 1, 2, hh);
    if (pos + 3 >= text.size() || text[pos + 3] != ':') bad_timestamp(text);
    field(pos + 4, 2, mi);
    pos += 6;
    if (pos < text.size() && text[pos] == ':') {
      field(pos + 1, 2, ss);
      pos += 3;
      if (pos < text.size() && text[pos] == '.') {
        ++pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      }
    }
  }
  if (hh > 23 || mi > 59 || ss > 60) bad_timestamp(text);
  const Timestamp wall = civil_to_epoch(y, static_cast<unsigned>(mo), static_cast<unsigned>(d), hh, mi, ss);
  if (wall == std::numeric_limits<Timestamp>::min()) bad_timestamp(text);

  std::string_view zone = trim(text.substr(pos));
  if (zone.empty()) return tz.to_utc(wall);
  if (zone == "Z" || zone == "z") return wall;
  if (zone.front() == '+' || zone.front() == '-') {
    const int sign = zone.front() == '+' ? 1 : -1;
    zone.remove_prefix(1);
    // hh, hh:mm or hhmm
    int zh = 0, zm = 0;
    if (zone.size() < 2 || !parse_int(zone.substr(0, 2), zh)) bad_timestamp(text);
    zone.remove_prefix(2);
    if (!zone.empty() && zone.front() == ':') zone.remove_prefix(1);
    if (!zone.empty() && (zone.size() != 2 || !parse_int(zone, zm))) bad_timestamp(text);
    if (zh > 23 || zm > 59) bad_timestamp(text);
    return wall - sign * (zh * 3600 + zm * 60);
  }
  bad_timestamp(text);
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto days = static_cast<int>(std::floor(static_cast<double>(t) / 86400.0));
  const Timestamp secs = t - static_cast<Timestamp>(days) * 86400;
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(secs / 3600), static_cast<int>((secs / 60) % 60),
                static_cast<int>(secs % 60));
  return buf;
}

std::vector<std::string> split_csv_line(std::string_view line, char delimiter) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delimiter) {
      fields.emplace_back(trim(current));
      current.clear();
    } else if (c != '\r') {
      current += c;
    }
  }
  fields.emplace_back(trim(current));
  return fields;
}

TimeSeries read_series_csv(std::istream& in, const CsvOptions& options) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_csv_line(line, options.delimiter);
      break;
    }
  }
  if (header.empty()) throw InvalidInput("CSV: missing header row");

  auto column = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw InvalidInput("CSV: no column named '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t tcol = column(options.time_column);
  const std::size_t vcol = column(options.value_column);

  std::vector<std::pair<Timestamp, double>> rows;
  std::vector<std::size_t> bad_lines;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line, options.delimiter);
    double v = 0;
    if (fields.size() <= std::max(tcol, vcol) || !parse_double(fields[vcol], v) ||
        !std::isfinite(v)) {
      bad_lines.push_back(line_no);
      continue;
    }
    try {
      rows.emplace_back(parse_timestamp(fields[tcol], options.timezone), v);
    } catch (const InvalidInput&) {
      bad_lines.push_back(line_no);
    }
  }
  if (!bad_lines.empty()) {
    std::string msg = "CSV: " + std::to_string(bad_lines.size()) + " unparseable row(s) at line(s) ";
    for (std::size_t i = 0; i < bad_lines.size() && i < 20; ++i) {
      msg += (i ? ", " : "") + std::to_string(bad_lines[i]);
    }
    if (bad_lines.size() > 20) msg += ", ...";
    throw InvalidInput(msg);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Timestamp> ts;
  std::vector<double> vals;
  ts.reserve(rows.size());
  vals.reserve(rows.size());
  for (const auto& [t, v] : rows) {
    if (!ts.empty() && ts.back() == t) {
      throw InvalidInput("CSV: duplicate timestamp " + format_timestamp(t));
    }
    ts.push_back(t);
    vals.push_back(v);
  }
  return TimeSeries(std::move(ts), std::move(vals), options.label, options.kind);
}

TimeSeries read_series_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  CsvOptions opts = options;
  if (opts.label.empty()) opts.label = path.stem().string();
  return read_series_csv(in, opts);
}

void write_series_csv(std::ostream& out, const TimeSeries& series, std::string_view value_column) {
  out << "timestamp," << value_column << '\n';
  char buf[64];
  for (std::size_t i = 0; i < series.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", series.values()[i]);
    out << series.timestamps()[i] << ',' << buf << '\n';
  }
}

}  // namespace mfa
