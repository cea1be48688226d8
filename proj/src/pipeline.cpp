#include "mfa/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <Eigen/Core>
#include <boost/version.hpp>
#include <fftw3.h>
#include <openssl/evp.h>

#include "mfa/error.hpp"
#include "mfa/ingest.hpp"
#include "mfa/parallel.hpp"
#include "mfa/random.hpp"
#include "mfa/report.hpp"

namespace mfa {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr std::uint64_t kPairStreamBase = 0x10000;

bool safe_label(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.';
  });
}

template <class T>
T get_as(const json& j, const char* key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw InvalidInput(std::string("config key '") + key + "' has the wrong type");
  }
}

Timestamp timestamp_from(const json& j, const char* key) {
  if (j.is_number_integer()) return j.get<Timestamp>();
  if (j.is_string()) return parse_timestamp(j.get<std::string>());
  throw InvalidInput(std::string("config key '") + key + "' must be a timestamp string or epoch");
}

std::size_t find_label(const AnalysisConfig& c, const std::string& label) {
  for (std::size_t i = 0; i < c.inputs.size(); ++i)
    if (c.inputs[i].label == label) return i;
  return c.inputs.size();
}

TimeSeries increments_in(const TimeSeries& raw, const PeriodSplit& p, std::size_t* dropped) {
  return to_increments(raw.slice(p.start, p.end), dropped);
}

AlignedPair pair_increments(const TimeSeries& rx, const TimeSeries& ry, const PeriodSplit& p) {
  // Align the raw observations first so that every increment spans the same interval.
  const auto raw = align(rx.slice(p.start, p.end), ry.slice(p.start, p.end), 2);
  return align(to_increments(raw.x), to_increments(raw.y));
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string fmt(std::optional<double> v) { return v ? format_number(*v) : std::string(); }

}  // namespace

void AnalysisConfig::validate() const {
  if (inputs.empty()) throw InvalidInput("config lists no inputs");
  std::set<std::string> labels;
  for (const auto& in : inputs) {
    if (!safe_label(in.label))
      throw InvalidInput("input label '" + in.label + "' must be non-empty [A-Za-z0-9_.-]");
    if (!labels.insert(in.label).second)
      throw InvalidInput("duplicate input label '" + in.label + "'");
    for (const auto& w : in.dst)
      if (w.local_end <= w.local_start)
        throw InvalidInput("input '" + in.label + "' has a DST window that ends before it starts");
  }
  if (periods.empty()) throw InvalidInput("config lists no periods");
  std::set<std::string> period_labels;
  for (const auto& p : periods) {
    if (!safe_label(p.label))
      throw InvalidInput("period label '" + p.label + "' must be non-empty [A-Za-z0-9_.-]");
    if (!period_labels.insert(p.label).second)
      throw InvalidInput("duplicate period label '" + p.label + "'");
    if (p.start > p.end) throw InvalidInput("period '" + p.label + "' is empty (start > end)");
  }
  auto sorted = periods;
  std::sort(sorted.begin(), sorted.end(),
            [](const PeriodSplit& a, const PeriodSplit& b) { return a.start < b.start; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].start <= sorted[i - 1].end)
      throw InvalidInput("periods '" + sorted[i - 1].label + "' and '" + sorted[i].label +
                         "' overlap");
  }
  for (const auto& pr : pairs) {
    if (find_label(*this, pr.x) == inputs.size() || find_label(*this, pr.y) == inputs.size())
      throw InvalidInput("pair " + pr.name() + " names an unknown input");
  }
  q_grid().validate();
  if (detrend_order < 1 || detrend_order > 3) throw InvalidInput("detrend_order must be 1, 2 or 3");
  if (scales.s_min < std::max<std::size_t>(4, static_cast<std::size_t>(detrend_order) + 2))
    throw InvalidInput("s_min too small for the detrending order");
  if (scales.s_max != 0 && scales.s_max <= scales.s_min)
    throw InvalidInput("s_max must exceed s_min");
  if (!(scales.s_max_fraction > 0.0 && scales.s_max_fraction <= 1.0))
    throw InvalidInput("s_max_fraction must lie in (0, 1]");
  if (scales.count < 4) throw InvalidInput("s_count must be at least 4");
  if (attribution && (ensemble_size < 2 || reference_size < 2))
    throw InvalidInput("ensemble sizes must be at least 2");
  if (!(iaaft_tolerance > 0.0) || iaaft_max_iterations == 0)
    throw InvalidInput("IAAFT needs a positive tolerance and iteration cap");
  if (!(margin_sd > 0.0)) throw InvalidInput("margin_sd must be positive");
  if (!(rho_confidence > 0.5 && rho_confidence < 1.0))
    throw InvalidInput("rho_confidence must lie in (0.5, 1)");
  if (rho_sims < 100) throw InvalidInput("rho_sims must be at least 100");
  if (!(test_alpha > 0.0 && test_alpha < 1.0)) throw InvalidInput("test_alpha must lie in (0, 1)");
  if (vr_horizons.empty() || bds_dims.empty())
    throw InvalidInput("vr_horizons and bds_dims must be non-empty");
  if (!(bds_eps_factor > 0.0)) throw InvalidInput("bds_eps_factor must be positive");
}

MfdfaOptions AnalysisConfig::mfdfa_options(std::size_t workers) const {
  MfdfaOptions o;
  o.q = q_grid();
  o.scales = scales;
  o.surface.detrend_order = detrend_order;
  o.surface.bidirectional = bidirectional;
  o.surface.allow_large_scales = scales.s_max != 0;
  o.surface.workers = workers;
  return o;
}

AttributionConfig AnalysisConfig::attribution_config(std::uint64_t item_seed,
                                                     std::size_t workers) const {
  AttributionConfig a;
  a.mfdfa = mfdfa_options(1);
  a.master_seed = item_seed;
  a.ensemble_size = ensemble_size;
  a.reference_size = reference_size;
  a.iaaft_max_iterations = iaaft_max_iterations;
  a.iaaft_tolerance = iaaft_tolerance;
  a.margin_sd = margin_sd;
  a.workers = workers;
  return a;
}

BatteryConfig AnalysisConfig::battery_config() const {
  BatteryConfig b;
  b.ljung_box_lags = ljung_box_lags;
  b.vr_horizons = vr_horizons;
  b.bds_dims = bds_dims;
  b.bds_eps_factor = bds_eps_factor;
  b.alpha = test_alpha;
  b.dfa_scales = scales;
  b.dfa.detrend_order = detrend_order;
  b.dfa.bidirectional = bidirectional;
  b.dfa.allow_large_scales = scales.s_max != 0;
  return b;
}

json to_json(const AnalysisConfig& c) {
  json inputs = json::array();
  for (const auto& in : c.inputs) {
    json dst = json::array();
    for (const auto& w : in.dst) {
      dst.push_back({{"start", format_timestamp(w.local_start)},
                     {"end", format_timestamp(w.local_end)},
                     {"extra_offset_seconds", w.extra_offset_seconds}});
    }
    inputs.push_back({{"path", in.path.generic_string()},
                      {"label", in.label},
                      {"kind", to_string(in.kind)},
                      {"utc_offset_seconds", in.utc_offset_seconds},
                      {"dst", dst},
                      {"time_column", in.time_column},
                      {"value_column", in.value_column},
                      {"delimiter", std::string(1, in.delimiter)}});
  }
  json periods = json::array();
  for (const auto& p : c.periods) {
    periods.push_back(
        {{"label", p.label}, {"start", format_timestamp(p.start)}, {"end", format_timestamp(p.end)}});
  }
  json pairs = json::array();
  for (const auto& p : c.pairs) pairs.push_back({{"x", p.x}, {"y", p.y}});
  return {{"inputs", inputs},
          {"periods", periods},
          {"pairs", pairs},
          {"q_min", c.q_min},
          {"q_max", c.q_max},
          {"q_step", c.q_step},
          {"s_min", c.scales.s_min},
          {"s_max", c.scales.s_max},
          {"s_max_fraction", c.scales.s_max_fraction},
          {"s_count", c.scales.count},
          {"detrend_order", c.detrend_order},
          {"bidirectional", c.bidirectional},
          {"attribution", c.attribution},
          {"ensemble_size", c.ensemble_size},
          {"reference_size", c.reference_size},
          {"iaaft_max_iterations", c.iaaft_max_iterations},
          {"iaaft_tolerance", c.iaaft_tolerance},
          {"margin_sd", c.margin_sd},
          {"rho_confidence", c.rho_confidence},
          {"rho_sims", c.rho_sims},
          {"rho_one_sided", c.rho_one_sided},
          {"test_alpha", c.test_alpha},
          {"ljung_box_lags", c.ljung_box_lags ? json(*c.ljung_box_lags) : json(nullptr)},
          {"vr_horizons", c.vr_horizons},
          {"bds_dims", c.bds_dims},
          {"bds_eps_factor", c.bds_eps_factor},
          {"seed", c.seed}};
}

AnalysisConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw InvalidInput("config must be a JSON object");
  AnalysisConfig c;
  for (const auto& [key, v] : j.items()) {
    const char* k = key.c_str();
    if (key == "inputs") {
      for (const auto& e : v) {
        InputSpec in;
        for (const auto& [ik, iv] : e.items()) {
          if (ik == "path") {
            std::filesystem::path p = get_as<std::string>(iv, "inputs.path");
            in.path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
          } else if (ik == "label") {
            in.label = get_as<std::string>(iv, "inputs.label");
          } else if (ik == "kind") {
            in.kind = parse_series_kind(get_as<std::string>(iv, "inputs.kind"));
          } else if (ik == "utc_offset_seconds") {
            in.utc_offset_seconds = get_as<std::int64_t>(iv, "inputs.utc_offset_seconds");
          } else if (ik == "dst") {
            // Window bounds are local wall-clock times; start inclusive, end exclusive.
            for (const auto& w : iv) {
              DstWindow d;
              for (const auto& [wk, wv] : w.items()) {
                if (wk == "start") d.local_start = timestamp_from(wv, "inputs.dst.start");
                else if (wk == "end") d.local_end = timestamp_from(wv, "inputs.dst.end");
                else if (wk == "extra_offset_seconds")
                  d.extra_offset_seconds = get_as<std::int64_t>(wv, "inputs.dst.extra_offset_seconds");
                else throw InvalidInput("unknown config key 'inputs.dst." + wk + "'");
              }
              in.dst.push_back(d);
            }
          } else if (ik == "delimiter") {
            const auto d = get_as<std::string>(iv, "inputs.delimiter");
            if (d.size() != 1) throw InvalidInput("inputs.delimiter must be a single character");
            in.delimiter = d[0];
          } else if (ik == "time_column") {
            in.time_column = get_as<std::string>(iv, "inputs.time_column");
          } else if (ik == "value_column") {
            in.value_column = get_as<std::string>(iv, "inputs.value_column");
          } else {
            throw InvalidInput("unknown config key 'inputs." + ik + "'");
          }
        }
        c.inputs.push_back(std::move(in));
      }
    } else if (key == "periods") {
      for (const auto& e : v) {
        PeriodSplit p;
        for (const auto& [pk, pv] : e.items()) {
          if (pk == "label") p.label = get_as<std::string>(pv, "periods.label");
          else if (pk == "start") p.start = timestamp_from(pv, "periods.start");
          else if (pk == "end") p.end = timestamp_from(pv, "periods.end");
          else throw InvalidInput("unknown config key 'periods." + pk + "'");
        }
        c.periods.push_back(std::move(p));
      }
    } else if (key == "pairs") {
      for (const auto& e : v) {
        PairSpec p;
        if (e.is_array() && e.size() == 2) {
          p.x = get_as<std::string>(e[0], "pairs");
          p.y = get_as<std::string>(e[1], "pairs");
        } else if (e.is_object()) {
          p.x = get_as<std::string>(e.value("x", json()), "pairs.x");
          p.y = get_as<std::string>(e.value("y", json()), "pairs.y");
        } else {
          throw InvalidInput("pairs entries must be [x, y] or {\"x\":..,\"y\":..}");
        }
        c.pairs.push_back(std::move(p));
      }
    } else if (key == "q_min") c.q_min = get_as<double>(v, k);
    else if (key == "q_max") c.q_max = get_as<double>(v, k);
    else if (key == "q_step") c.q_step = get_as<double>(v, k);
    else if (key == "s_min") c.scales.s_min = get_as<std::size_t>(v, k);
    else if (key == "s_max") c.scales.s_max = get_as<std::size_t>(v, k);
    else if (key == "s_max_fraction") c.scales.s_max_fraction = get_as<double>(v, k);
    else if (key == "s_count") c.scales.count = get_as<std::size_t>(v, k);
    else if (key == "detrend_order") c.detrend_order = get_as<int>(v, k);
    else if (key == "bidirectional") c.bidirectional = get_as<bool>(v, k);
    else if (key == "attribution") c.attribution = get_as<bool>(v, k);
    else if (key == "ensemble_size") c.ensemble_size = get_as<std::size_t>(v, k);
    else if (key == "reference_size") c.reference_size = get_as<std::size_t>(v, k);
    else if (key == "iaaft_max_iterations") c.iaaft_max_iterations = get_as<std::size_t>(v, k);
    else if (key == "iaaft_tolerance") c.iaaft_tolerance = get_as<double>(v, k);
    else if (key == "margin_sd") c.margin_sd = get_as<double>(v, k);
    else if (key == "rho_confidence") c.rho_confidence = get_as<double>(v, k);
    else if (key == "rho_sims") c.rho_sims = get_as<std::size_t>(v, k);
    else if (key == "rho_one_sided") c.rho_one_sided = get_as<bool>(v, k);
    else if (key == "test_alpha") c.test_alpha = get_as<double>(v, k);
    else if (key == "ljung_box_lags") {
      if (v.is_null()) c.ljung_box_lags.reset();
      else c.ljung_box_lags = get_as<std::size_t>(v, k);
    } else if (key == "vr_horizons") c.vr_horizons = get_as<std::vector<std::size_t>>(v, k);
    else if (key == "bds_dims") c.bds_dims = get_as<std::vector<std::size_t>>(v, k);
    else if (key == "bds_eps_factor") c.bds_eps_factor = get_as<double>(v, k);
    else if (key == "seed") c.seed = get_as<std::uint64_t>(v, k);
    else throw InvalidInput("unknown config key '" + key + "'");
  }
  return c;
}

AnalysisConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

std::string config_hash(const AnalysisConfig& config) {
  const std::string text = to_json(config).dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw NumericalError("SHA-256 failed");
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i)
    out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

std::size_t RunReport::failures() const {
  std::size_t n = 0;
  for (const auto& p : periods) {
    for (const auto& s : p.series) n += s.error.has_value();
    for (const auto& s : p.pairs) n += s.error.has_value();
  }
  return n;
}

std::vector<TimeSeries> load_inputs(const AnalysisConfig& config) {
  std::vector<TimeSeries> out;
  for (const auto& in : config.inputs) {
    CsvOptions o;
    o.time_column = in.time_column;
    o.value_column = in.value_column;
    o.timezone.utc_offset_seconds = in.utc_offset_seconds;
    o.timezone.dst = in.dst;
    o.delimiter = in.delimiter;
    o.label = in.label;
    o.kind = in.kind;
    out.push_back(read_series_csv(in.path, o));
  }
  return out;
}

void validate_against_data(const AnalysisConfig& config, const std::vector<TimeSeries>& raw) {
  if (raw.size() != config.inputs.size())
    throw InvalidInput("expected " + std::to_string(config.inputs.size()) + " series, got " +
                       std::to_string(raw.size()));
  for (const auto& p : config.periods) {
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const auto n = increments_in(raw[i], p, nullptr).size();
      if (n < kMinAlignedLength) {
        throw InvalidInput("period '" + p.label + "' leaves " + std::to_string(n) +
                           " observations of '" + config.inputs[i].label + "' (need " +
                           std::to_string(kMinAlignedLength) + ")");
      }
    }
    for (const auto& pr : config.pairs) {
      const auto& x = raw[find_label(config, pr.x)];
      const auto& y = raw[find_label(config, pr.y)];
      try {
        pair_increments(x, y, p);
      } catch (const InvalidInput& e) {
        throw InvalidInput("period '" + p.label + "', pair " + pr.name() + ": " + e.what());
      }
    }
  }
}

RunReport run_pipeline(const AnalysisConfig& config, const std::vector<TimeSeries>& raw,
                       std::size_t workers) {
  config.validate();
  validate_against_data(config, raw);

  RunReport report;
  report.config_hash = config_hash(config);
  report.seed = config.seed;
  report.effective_config = to_json(config);
  report.periods.resize(config.periods.size());

  const std::size_t n_series = raw.size();
  const std::size_t n_pairs = config.pairs.size();
  const std::size_t per_period = n_series + n_pairs;
  for (std::size_t p = 0; p < config.periods.size(); ++p) {
    report.periods[p].period = config.periods[p];
    report.periods[p].series.resize(n_series);
    report.periods[p].pairs.resize(n_pairs);
  }

  const std::size_t items = config.periods.size() * per_period;
  const std::size_t outer = std::min(resolve_workers(workers), items);
  const std::size_t inner = std::max<std::size_t>(1, resolve_workers(workers) / outer);
  const BatteryConfig battery_cfg = config.battery_config();

  parallel_for(items, outer, [&](std::size_t item) {
    const std::size_t p = item / per_period;
    const std::size_t k = item % per_period;
    const PeriodSplit& period = config.periods[p];
    const std::uint64_t period_seed = derive_seed(config.seed, p);

    if (k < n_series) {
      SeriesItem& out = report.periods[p].series[k];
      out.label = config.inputs[k].label;
      try {
        const TimeSeries x = increments_in(raw[k], period, &out.dropped_bars);
        out.n = x.size();
        out.tests = battery(x.values(), battery_cfg);
        out.mfdfa = mfdfa(x.values(), config.mfdfa_options(inner));
        if (config.attribution) {
          out.attribution =
              attribute_sources(x, config.attribution_config(derive_seed(period_seed, k), inner));
        }
      } catch (const std::exception& e) {
        out.error = e.what();
      }
      return;
    }

    const std::size_t j = k - n_series;
    PairItem& out = report.periods[p].pairs[j];
    out.pair = config.pairs[j];
    try {
      const auto& rx = raw[find_label(config, out.pair.x)];
      const auto& ry = raw[find_label(config, out.pair.y)];
      const AlignedPair aligned = pair_increments(rx, ry, period);
      const auto x = aligned.x.values();
      const auto y = aligned.y.values();
      out.n = x.size();
      const MfdfaOptions opts = config.mfdfa_options(inner);
      const ScaleGrid grid = opts.scales.grid_for(out.n);
      RhoProfile rho = rho_dcca(x, y, grid, opts.surface);
      rho.band = critical_band(out.n, grid, config.rho_confidence, config.rho_sims,
                               derive_seed(period_seed, kPairStreamBase + j), opts.surface);
      rho.has_band = true;
      out.significance = significance(rho, config.rho_one_sided);
      out.rho = std::move(rho);
      out.mfdcca = mfdcca(x, y, opts);
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  });
  return report;
}

RunReport run_pipeline(const AnalysisConfig& config, std::size_t workers) {
  config.validate();
  return run_pipeline(config, load_inputs(config), workers);
}

json to_json(const RunReport& r) {
  json periods = json::array();
  for (const auto& p : r.periods) {
    json series = json::array();
    for (const auto& s : p.series) {
      json j = {{"label", s.label}, {"n", s.n}, {"dropped_bars", s.dropped_bars}};
      j["tests"] = s.tests ? to_json(*s.tests) : json(nullptr);
      if (s.mfdfa) {
        j["mfdfa"] = {{"spectrum", to_json(s.mfdfa->spectrum)},
                      {"scaling", to_json(s.mfdfa->scaling)},
                      {"surface", to_json(s.mfdfa->surface)}};
      } else {
        j["mfdfa"] = nullptr;
      }
      j["attribution"] = s.attribution ? to_json(*s.attribution) : json(nullptr);
      j["error"] = s.error ? json(*s.error) : json(nullptr);
      series.push_back(std::move(j));
    }
    json pairs = json::array();
    for (const auto& s : p.pairs) {
      json j = {{"pair", s.pair.name()}, {"x", s.pair.x}, {"y", s.pair.y}, {"n", s.n}};
      j["rho"] = s.rho ? to_json(*s.rho, s.significance) : json(nullptr);
      if (s.mfdcca) {
        j["mfdcca"] = {{"spectrum", to_json(s.mfdcca->spectrum)},
                       {"scaling", to_json(s.mfdcca->scaling)}};
      } else {
        j["mfdcca"] = nullptr;
      }
      j["error"] = s.error ? json(*s.error) : json(nullptr);
      pairs.push_back(std::move(j));
    }
    periods.push_back({{"label", p.period.label},
                       {"start", format_timestamp(p.period.start)},
                       {"end", format_timestamp(p.period.end)},
                       {"series", series},
                       {"pairs", pairs}});
  }
  return {{"manifest",
           {{"config_hash", r.config_hash},
            {"seed", r.seed},
            {"versions", build_versions()},
            {"config", r.effective_config}}},
          {"periods", periods}};
}

json build_versions() {
  return {{"mfa", kVersion},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                        "." + std::to_string(EIGEN_MINOR_VERSION)},
          {"boost", BOOST_LIB_VERSION},
          {"fftw", std::string(fftw_version)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

void write_outputs(const RunReport& report, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "fig_rho");
  fs::create_directories(dir / "fig_spectrum");
  auto open = [](const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write " + path.string());
    return out;
  };

  {
    auto out = open(dir / "report.json");
    out << to_json(report).dump(2) << '\n';
  }

  {
    auto out = open(dir / "table1_tests.csv");
    out << "period,series,n";
    for (const char* t : {"runs", "ljung_box", "variance_ratio", "bds", "mann_kendall"})
      out << ',' << t << "_stat," << t << "_p," << t << "_sig";
    out << ",dfa_h,dfa_r2,rejections,error\n";
    for (const auto& p : report.periods) {
      for (const auto& s : p.series) {
        out << p.period.label << ',' << s.label << ',' << s.n;
        if (s.tests) {
          const auto& t = *s.tests;
          for (const TestEntry* e :
               {&t.runs, &t.ljung_box, &t.variance_ratio, &t.bds, &t.mann_kendall})
            out << ',' << fmt(e->statistic) << ',' << fmt(e->p_value) << ','
                << (e->rejected ? "*" : "");
          out << ',' << fmt(t.dfa.statistic) << ',' << fmt(t.dfa_r_squared) << ','
              << t.rejections;
        } else {
          out << std::string(18, ',');
        }
        out << ',' << csv_field(s.error.value_or("")) << '\n';
      }
    }
  }

  {
    auto out = open(dir / "table2_mfdfa.csv");
    out << "period,series,n,hurst,delta_alpha,delta_alpha_literal,delta_h,abs_delta_h,mdm,"
           "non_monotone,shuffled_delta_alpha_mean,shuffled_delta_alpha_sd,"
           "surrogate_delta_alpha_mean,surrogate_delta_alpha_sd,reference_delta_alpha_mean,"
           "distribution,temporal,nonlinear,linear,error\n";
    for (const auto& p : report.periods) {
      for (const auto& s : p.series) {
        out << p.period.label << ',' << s.label << ',' << s.n;
        if (s.mfdfa) {
          const auto& sp = s.mfdfa->spectrum;
          out << ',' << format_number(sp.hurst) << ',' << format_number(sp.delta_alpha) << ','
              << format_number(sp.delta_alpha_literal) << ',' << format_number(sp.delta_h) << ','
              << format_number(sp.abs_delta_h) << ',' << format_number(sp.mdm) << ','
              << int(sp.non_monotone);
        } else {
          out << std::string(7, ',');
        }
        if (s.attribution) {
          const auto& a = *s.attribution;
          out << ',' << format_number(a.shuffled.delta_alpha.mean) << ','
              << format_number(a.shuffled.delta_alpha.sd) << ','
              << format_number(a.surrogate.delta_alpha.mean) << ','
              << format_number(a.surrogate.delta_alpha.sd) << ','
              << format_number(a.reference.delta_alpha.mean);
          for (const auto& v : a.verdicts) out << ',' << int(v.on);
        } else {
          out << std::string(9, ',');
        }
        out << ',' << csv_field(s.error.value_or("")) << '\n';
      }
    }
  }

  {
    auto out = open(dir / "table3_mfdcca.csv");
    out << "period,pair,n,hurst,delta_alpha,delta_alpha_literal,delta_h,abs_delta_h,mdm,"
           "non_monotone,rho_min,rho_max,scales_positive,scales_negative,scales,error\n";
    for (const auto& p : report.periods) {
      for (const auto& s : p.pairs) {
        out << p.period.label << ',' << s.pair.name() << ',' << s.n;
        if (s.mfdcca && s.rho) {
          const auto& sp = s.mfdcca->spectrum;
          const auto [lo, hi] = std::minmax_element(s.rho->rho.begin(), s.rho->rho.end());
          const auto pos = std::count(s.significance.begin(), s.significance.end(),
                                      Significance::significant_positive);
          const auto neg = std::count(s.significance.begin(), s.significance.end(),
                                      Significance::significant_negative);
          out << ',' << format_number(sp.hurst) << ',' << format_number(sp.delta_alpha) << ','
              << format_number(sp.delta_alpha_literal) << ',' << format_number(sp.delta_h) << ','
              << format_number(sp.abs_delta_h) << ',' << format_number(sp.mdm) << ','
              << int(sp.non_monotone) << ',' << format_number(*lo) << ',' << format_number(*hi)
              << ',' << pos << ',' << neg << ',' << s.rho->rho.size();
        } else {
          out << std::string(12, ',');
        }
        out << ',' << csv_field(s.error.value_or("")) << '\n';
      }
    }
  }

  std::map<std::string, std::ofstream> rho_files;
  for (const auto& p : report.periods) {
    for (const auto& s : p.pairs) {
      if (!s.rho) continue;
      auto [it, fresh] = rho_files.try_emplace(s.pair.name());
      if (fresh) it->second = open(dir / "fig_rho" / (s.pair.name() + ".csv"));
      write_rho_csv(it->second, *s.rho, s.significance, {{"period", p.period.label}}, fresh);
    }
  }
  std::map<std::string, std::ofstream> spectrum_files;
  for (const auto& p : report.periods) {
    for (const auto& s : p.series) {
      if (!s.mfdfa) continue;
      auto [it, fresh] = spectrum_files.try_emplace(s.label);
      if (fresh) it->second = open(dir / "fig_spectrum" / (s.label + ".csv"));
      write_spectrum_csv(it->second, s.mfdfa->spectrum, {{"period", p.period.label}}, fresh);
    }
  }
}

}  // namespace mfa
