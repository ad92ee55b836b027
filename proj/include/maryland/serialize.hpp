#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "maryland/green.hpp"
#include "maryland/newton.hpp"
#include "maryland/resonance.hpp"
#include "maryland/spectrum.hpp"

namespace maryland {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Non-finite values become null.
Json number(double x);
Json vec_json(const Eigen::VectorXd& v);
Json vec_json(const std::vector<double>& v);
Json ivec_json(const IntVec& v);

IntVec ivec_from_json(const Json& j);
Eigen::VectorXd vec_from_json(const Json& j);

Json params_json(const MarylandParams& p);
MarylandParams params_from_json(const Json& j);

/// Sites, eigenvalues, vectors as a flat column-major array, matching diagnostics.
Json eigensystem_json(const EigenSystem& es);
EigenSystem eigensystem_from_json(const Json& j);

Json predicate_json(const PredicateEntry& e);
Json separation_json(const SeparationReport& r);
Json diophantine_json(const DiophantineReport& r);
Json profile_json(const ProfileReport& r);

/// û as (n, j, re, im) rows over nonzero entries.
Json coeffs_json(const Coeffs& u);
Json solution_json(const SolutionReport& r, const ResonantSet& S);

Json ldt_json(const LdtProbeReport& r);

/// %.17g; nan and inf spelled out.
std::string format_double(double x);

/// Header line plus one line per row, comma separated.
std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

std::string monte_carlo_csv(const std::vector<MonteCarloRow>& rows);
std::string profile_csv(const ProfileReport& r);
/// (|n| + |j|, log|û|) for the nonzero coefficients.
std::string decay_csv(const Coeffs& u);
std::string time_residual_csv(const TimeResidual& r);
/// Every σ sample of every scale.
std::string ldt_witness_csv(const LdtProbeReport& r);

/// JSON text with two-space indent and a trailing newline.
std::string dump(const Json& j);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace maryland
