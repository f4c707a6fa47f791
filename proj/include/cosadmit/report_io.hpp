#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "cosadmit/bounds.hpp"
#include "cosadmit/cos_expansion.hpp"
#include "cosadmit/density.hpp"
#include "cosadmit/rate_fit.hpp"
#include "cosadmit/study.hpp"
#include "cosadmit/tail_energy.hpp"

namespace cosadmit {

using Json = nlohmann::ordered_json;

// Doubles are written in shortest round-trip form; infinities as the
// strings "Infinity" / "-Infinity" and NaN as null.
Json to_json(const DensitySpec& f);
Json to_json(const ErrorReport& r);
Json to_json(const TailEnergyResult& r);
Json to_json(const BoundReport& r);
Json to_json(const DimBoundReport& r);
Json to_json(const RateFit& r);
Json to_json(const StudyConfig& cfg);
Json to_json(const StudyReport& r);

/// Pretty-printed with a trailing newline.
std::string dump(const Json& j);

/// Reads a StudyConfig; unknown keys and wrong types raise ValidationError
/// naming the field.
StudyConfig study_config_from_json(const Json& j);
Json load_json_file(const std::string& path);
StudyConfig load_study_config(const std::string& path);

/// One row per convergence cell and per (L, p) admissibility cell.
void write_study_csv(std::ostream& os, const StudyReport& r);

/// Writes JSON to `path` and the CSV next to it (extension replaced by .csv).
void write_study_outputs(const StudyReport& r, const std::string& path);

}  // namespace cosadmit
