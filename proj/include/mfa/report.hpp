#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "mfa/dcca.hpp"
#include "mfa/multifractal.hpp"
#include "mfa/rwtests.hpp"
#include "mfa/surrogates.hpp"

#include <json.hpp>

namespace mfa {

// JSON views. Non-finite numbers become null.
nlohmann::json to_json(const MultifractalSpectrum& s);
nlohmann::json to_json(const ScalingResult& s);
nlohmann::json to_json(const FluctuationSurface& s);
nlohmann::json to_json(const EnsembleSummary& s);
nlohmann::json to_json(const SourceAttribution& a);
nlohmann::json to_json(const TestEntry& e);
nlohmann::json to_json(const TestReport& r);
nlohmann::json to_json(const RhoProfile& r, std::span<const Significance> significance = {});

/// Shortest text that reads back to the same double; "nan"/"inf" otherwise.
std::string format_number(double v);

/// q,h,tau,alpha,f_alpha,available rows; prefix columns are prepended to
/// every row (e.g. a period label).
void write_spectrum_csv(std::ostream& out, const MultifractalSpectrum& s,
                        const std::vector<std::pair<std::string, std::string>>& prefix = {},
                        bool header = true);
/// One row per scale, one column per q; invalid cells are "nan".
void write_surface_csv(std::ostream& out, const FluctuationSurface& s, bool log_values = false);
/// scale,rho,covariance,fx,fy[,lower,upper,significance].
void write_rho_csv(std::ostream& out, const RhoProfile& r,
                   std::span<const Significance> significance = {},
                   const std::vector<std::pair<std::string, std::string>>& prefix = {},
                   bool header = true);
/// Wide format: timestamp, then member_<i> columns.
void write_ensemble_csv(std::ostream& out, const std::vector<EnsembleMember>& members);

}  // namespace mfa
