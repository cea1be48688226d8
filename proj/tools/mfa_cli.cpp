// mfa: command-line front end.
//
// Exit status: 0 success, 1 computation or item failure, 2 usage/config error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mfa/csv.hpp"
#include "mfa/dcca.hpp"
#include "mfa/error.hpp"
#include "mfa/ingest.hpp"
#include "mfa/multifractal.hpp"
#include "mfa/pipeline.hpp"
#include "mfa/report.hpp"
#include "mfa/rwtests.hpp"
#include "mfa/surrogates.hpp"
#include "mfa/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

// Flags shared by the analysis subcommands. Unset optionals keep the defaults
// (or, for analyze, the config file's values).
struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<double> q_min, q_max, q_step;
  std::optional<std::size_t> s_min, s_max;
  std::optional<int> order;
  std::optional<double> confidence;
  std::optional<std::size_t> sims;
  std::optional<std::size_t> ensemble;
  std::size_t workers = 1;
  fs::path out;
};

struct InputFlags {
  fs::path path;
  std::string kind = "generic";
  std::string time_column = "timestamp";
  std::string value_column = "value";
  std::int64_t utc_offset = 0;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "master seed");
  app->add_option("--q-min", c.q_min, "smallest moment order");
  app->add_option("--q-max", c.q_max, "largest moment order");
  app->add_option("--q-step", c.q_step, "moment order step");
  app->add_option("--s-min", c.s_min, "smallest scale (observations)");
  app->add_option("--s-max", c.s_max, "largest scale (observations); default N/5");
  app->add_option("--order", c.order, "detrending polynomial order")->check(CLI::Range(1, 3));
  app->add_option("--confidence", c.confidence, "rho band confidence");
  app->add_option("--sims", c.sims, "rho band simulations");
  app->add_option("--ensemble", c.ensemble, "shuffle/surrogate ensemble size");
  app->add_option("--workers", c.workers, "worker threads (0 = all cores)");
  app->add_option("--out", c.out, "output directory")->required();
}

void add_input(CLI::App* app, InputFlags& in, const std::string& flag, const std::string& what) {
  app->add_option(flag, in.path, what)->required()->check(CLI::ExistingFile);
  const std::string stem = flag.substr(2);
  app->add_option("--" + stem + "-kind", in.kind, "price|return|volume|volume_change|generic");
  app->add_option("--" + stem + "-time-column", in.time_column);
  app->add_option("--" + stem + "-value-column", in.value_column);
  app->add_option("--" + stem + "-utc-offset", in.utc_offset, "source clock offset, seconds");
}

mfa::AnalysisConfig apply(mfa::AnalysisConfig c, const Common& f) {
  if (f.seed) c.seed = *f.seed;
  if (f.q_min) c.q_min = *f.q_min;
  if (f.q_max) c.q_max = *f.q_max;
  if (f.q_step) c.q_step = *f.q_step;
  if (f.s_min) c.scales.s_min = *f.s_min;
  if (f.s_max) c.scales.s_max = *f.s_max;
  if (f.order) c.detrend_order = *f.order;
  if (f.confidence) c.rho_confidence = *f.confidence;
  if (f.sims) c.rho_sims = *f.sims;
  if (f.ensemble) c.ensemble_size = *f.ensemble;
  return c;
}

mfa::TimeSeries read_input(const InputFlags& in, const std::string& label) {
  mfa::CsvOptions o;
  o.time_column = in.time_column;
  o.value_column = in.value_column;
  o.timezone.utc_offset_seconds = in.utc_offset;
  o.label = label;
  o.kind = mfa::parse_series_kind(in.kind);
  return mfa::to_increments(mfa::read_series_csv(in.path, o));
}

std::ofstream create(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw mfa::InvalidInput("cannot write " + path.string());
  return out;
}

void write_json(const fs::path& path, const json& j) { create(path) << j.dump(2) << '\n'; }

int run_analyze(const fs::path& config_path, const Common& flags) {
  const auto started = std::chrono::system_clock::now();
  const auto t0 = std::chrono::steady_clock::now();
  const mfa::AnalysisConfig config = apply(mfa::load_config(config_path), flags);
  config.validate();
  const auto raw = mfa::load_inputs(config);
  mfa::validate_against_data(config, raw);

  const auto report = mfa::run_pipeline(config, raw, flags.workers);
  mfa::write_outputs(report, flags.out);

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_json(flags.out / "run_manifest.json",
             {{"config_hash", report.config_hash},
              {"seed", report.seed},
              {"versions", mfa::build_versions()},
              {"started_utc", mfa::format_timestamp(std::chrono::duration_cast<std::chrono::seconds>(
                                                        started.time_since_epoch())
                                                        .count())},
              {"wall_clock_seconds", seconds},
              {"workers", flags.workers},
              {"failures", report.failures()}});
  const auto failures = report.failures();
  if (failures != 0) {
    std::cerr << failures << " item(s) failed; see report.json\n";
    return kFailed;
  }
  return kOk;
}

int run_mfdfa(const InputFlags& in, const Common& flags, bool attribution) {
  const auto cfg = apply(mfa::AnalysisConfig{}, flags);
  const auto x = read_input(in, in.path.stem().string());
  const auto r = mfa::mfdfa(x.values(), cfg.mfdfa_options(flags.workers));
  json j = {{"n", x.size()},
            {"spectrum", mfa::to_json(r.spectrum)},
            {"scaling", mfa::to_json(r.scaling)}};
  if (attribution) {
    const auto a = mfa::attribute_sources(x, cfg.attribution_config(cfg.seed, flags.workers));
    j["attribution"] = mfa::to_json(a);
  }
  write_json(flags.out / "spectrum.json", j);
  auto csv = create(flags.out / "spectrum.csv");
  mfa::write_spectrum_csv(csv, r.spectrum);
  auto surface = create(flags.out / "surface.csv");
  mfa::write_surface_csv(surface, r.surface);
  std::printf("h(2) = %.6f  delta_alpha = %.6f  mdm = %.6f\n", r.spectrum.hurst,
              r.spectrum.delta_alpha, r.spectrum.mdm);
  return kOk;
}

mfa::AlignedPair read_pair(const InputFlags& x, const InputFlags& y) {
  return mfa::align(read_input(x, "x"), read_input(y, "y"));
}

int run_mfdcca(const InputFlags& xin, const InputFlags& yin, const Common& flags) {
  const auto cfg = apply(mfa::AnalysisConfig{}, flags);
  const auto pair = read_pair(xin, yin);
  const auto r = mfa::mfdcca(pair.x.values(), pair.y.values(), cfg.mfdfa_options(flags.workers));
  write_json(flags.out / "spectrum.json", {{"n", pair.x.size()},
                                           {"spectrum", mfa::to_json(r.spectrum)},
                                           {"scaling", mfa::to_json(r.scaling)}});
  auto csv = create(flags.out / "spectrum.csv");
  mfa::write_spectrum_csv(csv, r.spectrum);
  auto surface = create(flags.out / "surface.csv");
  mfa::write_surface_csv(surface, r.surface);
  std::printf("h_xy(2) = %.6f  delta_alpha = %.6f\n", r.spectrum.hurst, r.spectrum.delta_alpha);
  return kOk;
}

int run_rho(const InputFlags& xin, const InputFlags& yin, const Common& flags, bool one_sided) {
  const auto cfg = apply(mfa::AnalysisConfig{}, flags);
  const auto pair = read_pair(xin, yin);
  const auto opts = cfg.mfdfa_options(flags.workers);
  const auto grid = opts.scales.grid_for(pair.x.size());
  auto rho = mfa::rho_dcca(pair.x.values(), pair.y.values(), grid, opts.surface);
  rho.band = mfa::critical_band(pair.x.size(), grid, cfg.rho_confidence, cfg.rho_sims, cfg.seed,
                                opts.surface);
  rho.has_band = true;
  const auto sig = mfa::significance(rho, one_sided);
  write_json(flags.out / "rho.json", mfa::to_json(rho, sig));
  auto csv = create(flags.out / "rho.csv");
  mfa::write_rho_csv(csv, rho, sig);
  return kOk;
}

int run_tests(const InputFlags& in, const Common& flags) {
  const auto cfg = apply(mfa::AnalysisConfig{}, flags);
  const auto x = read_input(in, in.path.stem().string());
  const auto r = mfa::battery(x.values(), cfg.battery_config());
  write_json(flags.out / "tests.json", {{"n", x.size()}, {"tests", mfa::to_json(r)}});
  for (const auto* e : r.p_valued()) {
    std::printf("%-15s p = %-12s %s\n", e->name.c_str(),
                e->p_value ? mfa::format_number(*e->p_value).c_str() : "-",
                e->error ? e->error->c_str() : (e->rejected ? "reject" : ""));
  }
  return kOk;
}

int run_surrogate(const InputFlags& in, const Common& flags, const std::string& method,
                  std::size_t max_iterations, double tol) {
  mfa::SurrogateSpec spec;
  spec.method = method == "shuffle" ? mfa::SurrogateMethod::shuffle : mfa::SurrogateMethod::iaaft;
  spec.master_seed = flags.seed.value_or(1);
  spec.ensemble_size = flags.ensemble.value_or(50);
  spec.max_iterations = max_iterations;
  spec.convergence_tol = tol;
  spec.workers = flags.workers;
  const auto x = read_input(in, in.path.stem().string());
  const auto members = mfa::ensemble(x, spec);
  auto csv = create(flags.out / "ensemble.csv");
  mfa::write_ensemble_csv(csv, members);
  json list = json::array();
  for (const auto& m : members) {
    list.push_back(
        {{"seed", m.seed}, {"converged", m.converged}, {"spectrum_rmse", m.spectrum_rmse}});
  }
  write_json(flags.out / "ensemble.json",
             {{"method", method}, {"master_seed", spec.master_seed}, {"members", list}});
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multifractal and cross-correlation analysis of market time series"};
  app.require_subcommand(1);

  Common analyze_flags;
  fs::path config_path;
  auto* analyze = app.add_subcommand("analyze", "full pipeline from a JSON config");
  analyze->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
  add_common(analyze, analyze_flags);

  Common mfdfa_flags;
  InputFlags mfdfa_in;
  bool attribution = false;
  auto* mfdfa_cmd = app.add_subcommand("mfdfa", "single-series spectrum");
  add_input(mfdfa_cmd, mfdfa_in, "--input", "series CSV");
  add_common(mfdfa_cmd, mfdfa_flags);
  mfdfa_cmd->add_flag("--attribution", attribution, "also run the shuffle/surrogate comparison");

  Common mfdcca_flags;
  InputFlags mfdcca_x, mfdcca_y;
  auto* mfdcca_cmd = app.add_subcommand("mfdcca", "joint spectrum of a pair");
  add_input(mfdcca_cmd, mfdcca_x, "--x", "first series CSV");
  add_input(mfdcca_cmd, mfdcca_y, "--y", "second series CSV");
  add_common(mfdcca_cmd, mfdcca_flags);

  Common rho_flags;
  InputFlags rho_x, rho_y;
  bool one_sided = false;
  auto* rho_cmd = app.add_subcommand("rho", "rho_DCCA with its null band");
  add_input(rho_cmd, rho_x, "--x", "first series CSV");
  add_input(rho_cmd, rho_y, "--y", "second series CSV");
  add_common(rho_cmd, rho_flags);
  rho_cmd->add_flag("--one-sided", one_sided, "test the upper tail only");

  Common tests_flags;
  InputFlags tests_in;
  auto* tests_cmd = app.add_subcommand("tests", "random-walk test battery");
  add_input(tests_cmd, tests_in, "--input", "series CSV");
  add_common(tests_cmd, tests_flags);

  Common surrogate_flags;
  InputFlags surrogate_in;
  std::string method = "iaaft";
  std::size_t max_iterations = 1000;
  double tol = 1e-8;
  auto* surrogate_cmd = app.add_subcommand("surrogate", "shuffle or IAAFT ensemble");
  add_input(surrogate_cmd, surrogate_in, "--input", "series CSV");
  add_common(surrogate_cmd, surrogate_flags);
  surrogate_cmd->add_option("--method", method)->check(CLI::IsMember({"shuffle", "iaaft"}));
  surrogate_cmd->add_option("--max-iterations", max_iterations);
  surrogate_cmd->add_option("--tolerance", tol);

  std::string model = "gauss";
  std::size_t n = 10000;
  std::uint64_t synth_seed = 1;
  double hurst = 0.5, p = 0.3, phi = 0.5, sigma = 1.0, theta = -1.0, beta = 0.5, noise_sd = 1.0,
         dof = 3.0, r = 4.0;
  std::size_t depth = 16;
  fs::path synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "synthetic series");
  synth_cmd
      ->add_option("--model", model)
      ->check(CLI::IsMember(
          {"fgn", "cascade", "ar1", "ma1", "coupled", "gauss", "student-t", "logistic"}));
  synth_cmd->add_option("--n", n, "length (cascade: 2^depth)");
  synth_cmd->add_option("--seed", synth_seed);
  synth_cmd->add_option("--hurst", hurst);
  synth_cmd->add_option("--p", p, "cascade weight");
  synth_cmd->add_option("--depth", depth, "cascade depth");
  synth_cmd->add_option("--phi", phi);
  synth_cmd->add_option("--sigma", sigma);
  synth_cmd->add_option("--theta", theta);
  synth_cmd->add_option("--beta", beta);
  synth_cmd->add_option("--noise-sd", noise_sd);
  synth_cmd->add_option("--dof", dof);
  synth_cmd->add_option("--r", r, "logistic map parameter");
  synth_cmd->add_option("--out", synth_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*analyze) return run_analyze(config_path, analyze_flags);
    if (*mfdfa_cmd) return run_mfdfa(mfdfa_in, mfdfa_flags, attribution);
    if (*mfdcca_cmd) return run_mfdcca(mfdcca_x, mfdcca_y, mfdcca_flags);
    if (*rho_cmd) return run_rho(rho_x, rho_y, rho_flags, one_sided);
    if (*tests_cmd) return run_tests(tests_in, tests_flags);
    if (*surrogate_cmd) {
      return run_surrogate(surrogate_in, surrogate_flags, method, max_iterations, tol);
    }
    if (*synth_cmd) {
      mfa::synth::Model m;
      if (model == "fgn") m = mfa::synth::Fgn{hurst};
      else if (model == "cascade") m = mfa::synth::Cascade{p, depth};
      else if (model == "ar1") m = mfa::synth::Ar1{phi, sigma};
      else if (model == "ma1") m = mfa::synth::Ma1{theta};
      else if (model == "coupled") m = mfa::synth::CoupledPair{beta, noise_sd};
      else if (model == "student-t") m = mfa::synth::StudentT{dof};
      else if (model == "logistic") m = mfa::synth::LogisticMap{r};
      else m = mfa::synth::GaussianIid{};
      const mfa::synth::SynthSpec spec{m, n, synth_seed};
      if (model == "coupled") {
        const auto [x, y] = mfa::synth::generate_pair(spec);
        auto xo = create(synth_out / "x.csv");
        mfa::write_series_csv(xo, x);
        auto yo = create(synth_out / "y.csv");
        mfa::write_series_csv(yo, y);
      } else {
        auto out = create(synth_out / "series.csv");
        mfa::write_series_csv(out, mfa::synth::generate(spec));
      }
      return kOk;
    }
  } catch (const mfa::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kUsage;
}
