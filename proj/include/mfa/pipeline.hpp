#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mfa/csv.hpp"
#include "mfa/dcca.hpp"
#include "mfa/multifractal.hpp"
#include "mfa/rwtests.hpp"
#include "mfa/timeseries.hpp"

#include <json.hpp>

namespace mfa {

struct InputSpec {
  std::filesystem::path path;
  std::string label;
  SeriesKind kind = SeriesKind::price;
  std::int64_t utc_offset_seconds = 0;
  std::vector<DstWindow> dst{};
  std::string time_column = "timestamp";
  std::string value_column = "value";
  char delimiter = ',';
};

/// Inclusive UTC range applied to the raw (untransformed) series.
struct PeriodSplit {
  std::string label;
  Timestamp start = 0;
  Timestamp end = 0;
};

struct PairSpec {
  std::string x;
  std::string y;
  std::string name() const { return x + "-" + y; }
};

struct AnalysisConfig {
  std::vector<InputSpec> inputs;
  std::vector<PeriodSplit> periods;
  std::vector<PairSpec> pairs;

  double q_min = -4.0;
  double q_max = 4.0;
  double q_step = 0.25;
  ScaleRule scales;
  int detrend_order = 1;
  bool bidirectional = true;

  bool attribution = true;
  std::size_t ensemble_size = 50;
  std::size_t reference_size = 50;
  std::size_t iaaft_max_iterations = 1000;
  double iaaft_tolerance = 1e-8;
  double margin_sd = 2.0;

  double rho_confidence = 0.95;
  std::size_t rho_sims = 1000;
  bool rho_one_sided = false;

  double test_alpha = 0.05;
  std::optional<std::size_t> ljung_box_lags;
  std::vector<std::size_t> vr_horizons = {2, 4, 8, 16};
  std::vector<std::size_t> bds_dims = {2, 3, 4, 5};
  double bds_eps_factor = 0.7;

  std::uint64_t seed = 1;

  /// Structural checks that need no data: labels, ranges, grids, pairs.
  void validate() const;

  QGrid q_grid() const { return QGrid::range(q_min, q_max, q_step); }
  MfdfaOptions mfdfa_options(std::size_t workers = 1) const;
  AttributionConfig attribution_config(std::uint64_t item_seed, std::size_t workers = 1) const;
  BatteryConfig battery_config() const;
};

/// Every effective value, defaults included. Keys are sorted, so dump() is canonical.
nlohmann::json to_json(const AnalysisConfig& config);
/// Unknown keys and wrongly typed values throw InvalidInput; relative input
/// paths resolve against base_dir.
AnalysisConfig config_from_json(const nlohmann::json& j,
                                const std::filesystem::path& base_dir = {});
AnalysisConfig load_config(const std::filesystem::path& path);
/// Hex SHA-256 of to_json(config).dump().
std::string config_hash(const AnalysisConfig& config);

struct SeriesItem {
  std::string label;
  std::size_t n = 0;  // increments analysed
  std::size_t dropped_bars = 0;
  std::optional<TestReport> tests;
  std::optional<MfdfaResult> mfdfa;
  std::optional<SourceAttribution> attribution;
  std::optional<std::string> error;
};

struct PairItem {
  PairSpec pair;
  std::size_t n = 0;
  std::optional<RhoProfile> rho;
  std::vector<Significance> significance;
  std::optional<MfdfaResult> mfdcca;
  std::optional<std::string> error;
};

struct PeriodResult {
  PeriodSplit period;
  std::vector<SeriesItem> series;  // config input order
  std::vector<PairItem> pairs;     // config pair order
};

struct RunReport {
  std::string config_hash;
  std::uint64_t seed = 0;
  nlohmann::json effective_config;
  std::vector<PeriodResult> periods;

  std::size_t failures() const;
};

/// Reads every input; the result follows config.inputs order.
std::vector<TimeSeries> load_inputs(const AnalysisConfig& config);

/// Throws InvalidInput when a period leaves fewer than kMinAlignedLength
/// observations for some series or pair.
void validate_against_data(const AnalysisConfig& config, const std::vector<TimeSeries>& raw);

/// Full per-period pipeline over already loaded raw series (config.inputs
/// order). Item failures are recorded, never thrown. The result depends on
/// config and data only, not on workers.
RunReport run_pipeline(const AnalysisConfig& config, const std::vector<TimeSeries>& raw,
                       std::size_t workers = 1);
RunReport run_pipeline(const AnalysisConfig& config, std::size_t workers = 1);

nlohmann::json to_json(const RunReport& report);

/// report.json, table1_tests.csv, table2_mfdfa.csv, table3_mfdcca.csv,
/// fig_rho/<pair>.csv and fig_spectrum/<series>.csv under dir.
void write_outputs(const RunReport& report, const std::filesystem::path& dir);

/// Library versions linked into this build.
nlohmann::json build_versions();

}  // namespace mfa
