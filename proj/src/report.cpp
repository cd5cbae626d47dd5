#include "mme/report.hpp"

#include <numbers>

#include <fmt/format.h>

namespace mme {

using nlohmann::json;

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

void write_points_csv(std::ostream& out, std::span<const PointResult> points,
                      std::string_view model) {
  out << kPointCsvHeader << '\n';
  for (const PointResult& p : points) {
    out << format_double(p.t_sidereal) << ','
        << format_double(p.stage * 180.0 / std::numbers::pi) << ',' << model << ','
        << p.tally.n_pairs << ',' << p.tally.n_postselected << ','
        << p.tally.n_same << ',' << p.tally.n_diff << ','
        << format_double(p.estimate.p_hat) << ',' << format_double(p.estimate.ci_low)
        << ',' << format_double(p.estimate.ci_high) << '\n';
  }
}

json to_json(const Tally& t) {
  return {{"n_pairs", t.n_pairs},
          {"n_postselected", t.n_postselected},
          {"n_same", t.n_same},
          {"n_diff", t.n_diff}};
}

json to_json(const ProportionEstimate& e) {
  return {{"p_hat", e.p_hat}, {"n", e.n}, {"ci_low", e.ci_low}, {"ci_high", e.ci_high}};
}

json to_json(const ShiftTest& t) {
  return {{"p_before", to_json(t.p_before)},
          {"p_after", to_json(t.p_after)},
          {"z", t.z},
          {"threshold_sigma", t.threshold},
          {"significant", t.significant}};
}

std::string sizing_note(const SizingCheck& s) {
  if (s.consistent) {
    return fmt::format("apparatus l+s = {:.6g} m matches the target shift {:.6g} rad",
                       s.configured_l_plus_s, s.target_shift);
  }
  return fmt::format(
      "apparatus l+s = {:.6g} m predicts a rotation shift of {:.6g} rad; the "
      "target {:.6g} rad needs l+s = {:.6g} m ({:+.3f}% discrepancy)",
      s.configured_l_plus_s, s.predicted_shift_exact, s.target_shift,
      s.required_l_plus_s, 100.0 * s.relative_discrepancy);
}

json to_json(const SizingCheck& s) {
  return {{"target_shift_rad", s.target_shift},
          {"configured_l_plus_s_m", s.configured_l_plus_s},
          {"required_l_plus_s_m", s.required_l_plus_s},
          {"relative_discrepancy", s.relative_discrepancy},
          {"predicted_shift_exact_rad", s.predicted_shift_exact},
          {"predicted_shift_approx_rad", s.predicted_shift_approx},
          {"consistent", s.consistent},
          {"note", sizing_note(s)}};
}

json to_json(const VerdictReport& r) {
  json points = json::array();
  for (const PointResult& p : r.points) {
    points.push_back({{"t_sidereal_h", p.t_sidereal},
                      {"stage_deg", p.stage * 180.0 / std::numbers::pi},
                      {"phase_rad", p.phase},
                      {"tally", to_json(p.tally)},
                      {"estimate", to_json(p.estimate)}});
  }
  json out{{"model", r.model},
           {"t_sidereal_h", r.t_sidereal},
           {"points", points},
           {"shift_test", to_json(r.shift)},
           {"decision", to_string(r.decision)},
           {"delta_phi_rad", r.delta_phi},
           {"delta_phi_error_rad", r.delta_phi_error},
           {"predicted_delta_phi_rad", r.predicted_delta_phi}};
  out["sizing"] = r.sizing ? to_json(*r.sizing) : json(nullptr);
  return out;
}

json to_json(const ChshResult& r) {
  return {{"e11", r.e11}, {"e12", r.e12}, {"e21", r.e21}, {"e22", r.e22},
          {"s_value", r.s_value}, {"std_error", r.std_error}};
}

}  // namespace mme
