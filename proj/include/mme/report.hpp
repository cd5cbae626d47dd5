#pragma once

// Serialization of campaign results: JSON reports and CSV tables.

#include <ostream>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "mme/protocol.hpp"

namespace mme {

/// Header of every per-point CSV (rotation points and sidereal sweeps).
inline constexpr std::string_view kPointCsvHeader =
    "t_sidereal_h,stage_deg,model,n_pairs,n_postselected,n_same,n_diff,"
    "p_same,ci_low,ci_high";

/// `%.17g`: round-trips any double.
std::string format_double(double v);

void write_points_csv(std::ostream& out, std::span<const PointResult> points,
                      std::string_view model);

nlohmann::json to_json(const Tally& t);
nlohmann::json to_json(const ProportionEstimate& e);
nlohmann::json to_json(const ShiftTest& t);
nlohmann::json to_json(const SizingCheck& s);
nlohmann::json to_json(const VerdictReport& r);
nlohmann::json to_json(const ChshResult& r);

/// Human-readable note when the apparatus does not match the target shift.
std::string sizing_note(const SizingCheck& s);

}  // namespace mme
