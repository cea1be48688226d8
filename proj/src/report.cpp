#include "mfa/report.hpp"

#include <charconv>
#include <cmath>

#include "mfa/csv.hpp"

namespace mfa {

using nlohmann::json;

namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json nums(std::span<const double> v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

json flags(std::span<const unsigned char> v) {
  json a = json::array();
  for (unsigned char f : v) a.push_back(f != 0);
  return a;
}

json stats(const ScalarStats& s) { return {{"mean", num(s.mean)}, {"sd", num(s.sd)}}; }

json opt(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

void write_prefix(std::ostream& out,
                  const std::vector<std::pair<std::string, std::string>>& prefix) {
  for (const auto& [key, value] : prefix) out << value << ',';
}

void write_prefix_header(std::ostream& out,
                         const std::vector<std::pair<std::string, std::string>>& prefix) {
  for (const auto& [key, value] : prefix) out << key << ',';
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json to_json(const MultifractalSpectrum& s) {
  return {{"q", s.q},
          {"h", nums(s.h)},
          {"tau", nums(s.tau)},
          {"alpha", nums(s.alpha)},
          {"f_alpha", nums(s.f_alpha)},
          {"spectrum_available", flags(s.spectrum_available)},
          {"delta_alpha", num(s.delta_alpha)},
          {"delta_alpha_literal", num(s.delta_alpha_literal)},
          {"delta_h", num(s.delta_h)},
          {"abs_delta_h", num(s.abs_delta_h)},
          {"mdm", num(s.mdm)},
          {"hurst", num(s.hurst)},
          {"non_monotone", s.non_monotone}};
}

json to_json(const ScalingResult& s) {
  return {{"q", s.q},
          {"h", nums(s.h)},
          {"intercept", nums(s.intercept)},
          {"r_squared", nums(s.r_squared)},
          {"available", flags(s.available)},
          {"scales_used", s.scales_used},
          {"fit_s_min", s.fit_s_min},
          {"fit_s_max", s.fit_s_max}};
}

json to_json(const FluctuationSurface& s) {
  return {{"q", s.q.orders},
          {"scales", s.s.scales},
          {"mode", s.mode == SurfaceMode::single ? "single" : "cross"},
          {"detrend_order", s.detrend_order},
          {"bidirectional", s.bidirectional},
          {"n", s.n},
          {"segment_count", s.segment_count},
          {"zero_segments", s.zero_segments},
          {"values", nums(s.values)},
          {"valid", flags(s.valid)}};
}

json to_json(const EnsembleSummary& s) {
  return {{"n", s.n},
          {"delta_alpha", stats(s.delta_alpha)},
          {"delta_h", stats(s.delta_h)},
          {"abs_delta_h", stats(s.abs_delta_h)},
          {"mdm", stats(s.mdm)},
          {"hurst", stats(s.hurst)},
          {"mean_h", nums(s.mean_h)}};
}

json to_json(const SourceAttribution& a) {
  json verdicts = json::array();
  for (const auto& v : a.verdicts) {
    verdicts.push_back({{"verdict", to_string(v.verdict)},
                        {"on", v.on},
                        {"difference", num(v.difference)},
                        {"threshold", num(v.threshold)}});
  }
  return {{"original_delta_alpha", num(a.original.delta_alpha)},
          {"shuffled", to_json(a.shuffled)},
          {"surrogate", to_json(a.surrogate)},
          {"reference", to_json(a.reference)},
          {"verdicts", verdicts},
          {"unconverged_surrogates", a.unconverged_surrogates}};
}

json to_json(const TestEntry& e) {
  json j = {{"name", e.name},
            {"statistic", opt(e.statistic)},
            {"p_value", opt(e.p_value)},
            {"rejected", e.rejected}};
  j["error"] = e.error ? json(*e.error) : json(nullptr);
  return j;
}

json to_json(const TestReport& r) {
  return {{"runs", to_json(r.runs)},
          {"ljung_box", to_json(r.ljung_box)},
          {"ljung_box_lags", r.ljung_box_lags},
          {"variance_ratio", to_json(r.variance_ratio)},
          {"bds", to_json(r.bds)},
          {"mann_kendall", to_json(r.mann_kendall)},
          {"dfa", to_json(r.dfa)},
          {"dfa_r_squared", opt(r.dfa_r_squared)},
          {"rejections", r.rejections}};
}

json to_json(const RhoProfile& r, std::span<const Significance> significance) {
  json j = {{"scales", r.scales},
            {"rho", nums(r.rho)},
            {"covariance", nums(r.covariance)},
            {"fx", nums(r.fx)},
            {"fy", nums(r.fy)},
            {"n_effective", r.n_effective}};
  if (r.has_band) {
    j["band"] = {{"confidence", r.band.confidence},
                 {"n_sims", r.band.n_sims},
                 {"lower", nums(r.band.lower)},
                 {"upper", nums(r.band.upper)}};
  }
  if (!significance.empty()) {
    json s = json::array();
    for (auto v : significance) s.push_back(to_string(v));
    j["significance"] = s;
  }
  return j;
}

void write_spectrum_csv(std::ostream& out, const MultifractalSpectrum& s,
                        const std::vector<std::pair<std::string, std::string>>& prefix,
                        bool header) {
  if (header) {
    write_prefix_header(out, prefix);
    out << "q,h,tau,alpha,f_alpha,available\n";
  }
  for (std::size_t i = 0; i < s.q.size(); ++i) {
    write_prefix(out, prefix);
    out << format_number(s.q[i]) << ',' << format_number(s.h[i]) << ','
        << format_number(s.tau[i]) << ',' << format_number(s.alpha[i]) << ','
        << format_number(s.f_alpha[i]) << ',' << int(s.spectrum_available[i] != 0) << '\n';
  }
}

void write_surface_csv(std::ostream& out, const FluctuationSurface& s, bool log_values) {
  out << "s,segments";
  for (double q : s.q.orders) out << ",q=" << format_number(q);
  out << '\n';
  for (std::size_t si = 0; si < s.s.size(); ++si) {
    out << s.s.scales[si] << ',' << s.segment_count[si];
    for (std::size_t qi = 0; qi < s.q.size(); ++qi) {
      const double v = s.is_valid(qi, si) ? s.at(qi, si) : std::nan("");
      out << ',' << format_number(log_values ? std::log(v) : v);
    }
    out << '\n';
  }
}

void write_rho_csv(std::ostream& out, const RhoProfile& r,
                   std::span<const Significance> significance,
                   const std::vector<std::pair<std::string, std::string>>& prefix, bool header) {
  if (header) {
    write_prefix_header(out, prefix);
    out << "scale,rho,covariance,fx,fy";
    if (r.has_band) out << ",lower,upper";
    if (!significance.empty()) out << ",significance";
    out << '\n';
  }
  for (std::size_t i = 0; i < r.scales.size(); ++i) {
    write_prefix(out, prefix);
    out << r.scales[i] << ',' << format_number(r.rho[i]) << ',' << format_number(r.covariance[i])
        << ',' << format_number(r.fx[i]) << ',' << format_number(r.fy[i]);
    if (r.has_band)
      out << ',' << format_number(r.band.lower[i]) << ',' << format_number(r.band.upper[i]);
    if (!significance.empty()) out << ',' << to_string(significance[i]);
    out << '\n';
  }
}

void write_ensemble_csv(std::ostream& out, const std::vector<EnsembleMember>& members) {
  out << "timestamp";
  for (std::size_t i = 0; i < members.size(); ++i) out << ",member_" << i;
  out << '\n';
  if (members.empty()) return;
  const auto ts = members.front().series.timestamps();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    out << ts[i];
    for (const auto& m : members) out << ',' << format_number(m.series.values()[i]);
    out << '\n';
  }
}

}  // namespace mfa
