#pragma once

#include <json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "opfield/analysis.hpp"
#include "opfield/compact_set.hpp"
#include "opfield/models.hpp"
#include "opfield/operators.hpp"

namespace opfield {

using Json = nlohmann::json;

// CompactSet <-> {"intervals": [[lo, hi], ...]}
Json to_json(const CompactSet& f);
CompactSet compact_set_from_json(const Json& j);

// Operator <-> {"variant": "sym_tridiag" | "dense_hermitian" | "periodic_jacobi", ...}
Json to_json(const Operator& a);
Operator operator_from_json(const Json& j);

Json to_json(const ParamPoint& p);
Json to_json(const HolderEstimate& e);
Json to_json(const GapTrack& t, const ParameterSpace& grid);
Json tracks_to_json(const std::vector<GapTrack>& tracks, const ParameterSpace& grid);
Json to_json(const GapTip& tip, const ParameterSpace& grid);
Json tips_to_json(const std::vector<GapTip>& tips, const ParameterSpace& grid);
Json to_json(const EdgeContinuityReport& rep);
Json to_json(const BoundsReport& rep);

std::string bounds_report_text(const BoundsReport& rep);
std::string edge_report_text(const EdgeContinuityReport& rep);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// CSV with "# key=value" header lines; one interval per row "lo,hi".
std::string compact_set_csv(const CompactSet& f, const KeyValues& header);

/// CSV rows "t,interval_index,lo,hi" over the whole trace.
std::string trace_csv(const SpectrumTrace& trace, const KeyValues& header);

/// Fixed-format float used by the CSV writers (%.17g, locale independent).
std::string format_scalar(Scalar x);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace opfield
