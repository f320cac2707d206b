#pragma once

// File formats. CSV files start with a '#'-prefixed JSON metadata line followed
// by a header row; numbers are written with 17 significant digits so every file
// reads back to the identical doubles. JSON documents carry a "schema" tag.

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "cascsym/cascade.hpp"
#include "cascsym/generators.hpp"
#include "cascsym/hausdorff.hpp"
#include "cascsym/spectrum.hpp"
#include "cascsym/symmetry.hpp"

namespace cascsym {

using json = nlohmann::json;

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kA1ReportSchema = "cascsym.a1-report/1";
inline constexpr const char* kStabilitySchema = "cascsym.stability-report/1";

/// Parses a decimal or an exact rational "num/den" (e.g. "2/3").
double parse_number(const std::string& text);

std::string format_double(double v);

// Generators: {"kind": "log-poisson" | "log-normal" | "log-stable" | "atomic", ...}
json generator_to_json(const LevyGenerator& gen);
LevyGenerator generator_from_json(const json& doc);
json logpoisson_to_json(const LogPoissonParams& lp);
LogPoissonParams logpoisson_from_json(const json& doc);

json law_to_json(const ScalingLaw& law);
ScalingLaw law_from_json(const json& doc);

json a1_report_to_json(const A1Report& rep);
A1Report a1_report_from_json(const json& doc);

json stability_report_to_json(const StabilityReport& rep);
StabilityReport stability_report_from_json(const json& doc);

// CSV tables. `meta` is merged into the metadata line.
void write_structure_csv(std::ostream& out, const StructureTable& table, const json& meta = json::object());
StructureTable read_structure_csv(std::istream& in);

void write_zeta_csv(std::ostream& out, const ZetaEstimate& est, const json& meta = json::object());
ZetaEstimate read_zeta_csv(std::istream& in);

void write_spectrum_csv(std::ostream& out, const SpectrumCurve& curve, const json& meta = json::object());
SpectrumCurve read_spectrum_csv(std::istream& in);

/// Columns: epsilon, w1_levy, bound, w1_multiplier (empty when not sampled), bound_ok.
void write_sweep_csv(std::ostream& out, const StabilitySweep& sweep, const json& meta = json::object());
StabilitySweep read_sweep_csv(std::istream& in);

/// Metadata line of a CSV stream (empty object when absent); leaves the stream after it.
json read_metadata(std::istream& in);

}  // namespace cascsym
