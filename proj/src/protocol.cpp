#include "mme/protocol.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "mme/errors.hpp"

namespace mme {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kStageTol = 1e-12;

bool has_stage(const std::vector<double>& stages, double angle) {
  return std::any_of(stages.begin(), stages.end(), [&](double s) {
    return std::abs(s - angle) <= kStageTol;
  });
}

// Re-raise a sub-config DomainError as a ConfigError on `field`.
template <class F>
void check_field(const std::string& field, F&& f) {
  try {
    f();
  } catch (const DomainError& e) {
    throw ConfigError(field, e.what());
  }
}

SimulationOptions point_options(const CampaignConfig& cfg, std::uint64_t index) {
  SimulationOptions opts;
  opts.first_chunk = point_first_chunk(index);
  opts.threads = cfg.threads;
  opts.detector = cfg.setup.detector;
  return opts;
}

PointResult simulate_point(const ExperimentSetup& setup, const CampaignConfig& cfg,
                           double stage, double t, std::uint64_t index) {
  PointResult p;
  p.t_sidereal = t;
  p.stage = stage;
  p.phase = total_phase(setup, StageAngle{stage}, t);
  p.tally = simulate_batch(cfg.events_per_point, p.phase, cfg.rng,
                           point_options(cfg, index));
  if (p.tally.n_postselected > 0) p.estimate = estimate_p_same(p.tally);
  return p;
}

}  // namespace

void CampaignConfig::validate() const {
  const auto& s = setup;
  check_field("constants.c", [&] { s.constants.validate(); });
  check_field("source", [&] { s.source.validate(); });
  check_field("arms_a", [&] { s.arms_a.validate(); });
  check_field("arms_b", [&] { s.arms_b.validate(); });
  check_field("wind.speed_m_s", [&] {
    EtherWind speed_only = hypothesis_wind;
    speed_only.direction = {1.0, 0.0, 0.0};
    speed_only.validate(s.constants);
  });
  check_field("wind.direction", [&] { hypothesis_wind.validate(s.constants); });
  check_field("detector", [&] { s.detector.validate(); });
  check_field("rng.chunk_size", [&] { rng.validate(); });
  if (s.mode == GeometryMode::Projected) {
    check_field("site", [&] { s.site.validate(); });
  }
  if (stages.empty()) throw ConfigError("stages_deg", "stage schedule is empty");
  for (double st : stages) {
    check_field("stages_deg", [&] { StageAngle{st}.validate(); });
    if (s.mode == GeometryMode::Aligned) {
      check_field("stages_deg", [&] { aligned_mode_angle(StageAngle{st}); });
    }
  }
  for (double t : sidereal_times) {
    if (!(t >= 0.0) || !(t < kSiderealDayHours)) {
      throw ConfigError("sidereal_times_h",
                        fmt::format("time {} h outside [0, 24)", t));
    }
  }
  if (!(significance_sigma > 0.0) || !std::isfinite(significance_sigma)) {
    throw ConfigError("analysis.significance_sigma", "must be positive");
  }
  if (!(target_shift > 0.0) || !std::isfinite(target_shift)) {
    throw ConfigError("analysis.target_shift_rad", "must be positive");
  }
  if (threads == 0) throw ConfigError("threads", "must be at least 1");
}

CampaignConfig rotation_preset(bool preferred_frame) {
  CampaignConfig cfg;
  cfg.setup.constants.c = 3.0e8;
  cfg.setup.source = SourceSpec::from_wavelength(1.5e-6, cfg.setup.constants);
  cfg.setup.arms_a = ArmGeometry{5.0, 1.25, 0.0};
  cfg.setup.arms_b = cfg.setup.arms_a;
  cfg.hypothesis_wind.speed = 3.0e4;
  cfg.setup.mode = GeometryMode::Aligned;
  if (preferred_frame) {
    cfg.setup.model = PreferredFrame{cfg.hypothesis_wind};
  } else {
    cfg.setup.model = Relativistic{};
  }
  cfg.rng.master_seed = 20141008;
  return cfg;
}

std::string to_string(Decision d) {
  return d == Decision::PreferredFrameDetected ? "PreferredFrameDetected"
                                               : "NoShiftDetected";
}

std::optional<SizingCheck> sizing_check(const CampaignConfig& cfg) {
  if (!(cfg.hypothesis_wind.speed > 0.0)) return std::nullopt;
  const auto& s = cfg.setup;
  SizingCheck chk;
  chk.target_shift = cfg.target_shift;
  chk.configured_l_plus_s = 0.5 * (s.arms_a.sum() + s.arms_b.sum());
  chk.required_l_plus_s = size_apparatus_for_shift(
      cfg.target_shift, s.source, cfg.hypothesis_wind, s.constants);
  chk.relative_discrepancy = chk.configured_l_plus_s / chk.required_l_plus_s - 1.0;
  chk.predicted_shift_exact = rotation_phase_shift(
      s.arms_a, s.arms_b, s.source, cfg.hypothesis_wind, s.constants);
  chk.predicted_shift_approx = rotation_phase_shift_approx(
      s.arms_a, s.arms_b, s.source, cfg.hypothesis_wind, s.constants);
  chk.consistent = std::abs(chk.relative_discrepancy) <= 1e-6;
  return chk;
}

std::pair<double, double> effective_phase_shift(const ProportionEstimate& before,
                                                const ProportionEstimate& after) {
  auto phase_of = [](double p) {
    return std::acos(std::clamp(2.0 * p - 1.0, -1.0, 1.0));
  };
  const double shift = phase_of(after.p_hat) - phase_of(before.p_hat);
  // d/dp arccos(2p - 1) = -1/sqrt(p(1-p)) and var(p) = p(1-p)/n.
  const double err = std::sqrt(1.0 / static_cast<double>(before.n) +
                               1.0 / static_cast<double>(after.n));
  return {shift, err};
}

double best_aligned_time(const CampaignConfig& cfg) {
  if (cfg.setup.mode == GeometryMode::Aligned) return 0.0;
  if (cfg.sidereal_times.empty()) {
    throw ConfigError("sidereal_times_h",
                      "projected mode needs sidereal sample times");
  }
  double best_t = cfg.sidereal_times.front();
  double best = -1.0;
  for (double t : cfg.sidereal_times) {
    const double shift =
        std::abs(orientation_phase(cfg.setup, StageAngle{kHalfPi}, t) -
                 orientation_phase(cfg.setup, StageAngle{0.0}, t));
    if (shift > best) {
      best = shift;
      best_t = t;
    }
  }
  return best_t;
}

VerdictReport run_rotation_campaign(const CampaignConfig& cfg) {
  cfg.validate();
  if (!has_stage(cfg.stages, 0.0) || !has_stage(cfg.stages, kHalfPi)) {
    throw ConfigError("stages_deg", "rotation trial needs stages 0 and 90 deg");
  }

  VerdictReport report;
  report.model = std::holds_alternative<Relativistic>(cfg.setup.model)
                     ? "relativistic"
                     : "preferred_frame";
  report.t_sidereal = best_aligned_time(cfg);
  const double t = report.t_sidereal;

  ExperimentSetup setup = cfg.setup;
  if (cfg.calibrate_trim) {
    setup = calibrate_trims(setup, StageAngle{0.0}, t, kHalfPi);
  }

  report.points.push_back(simulate_point(setup, cfg, 0.0, t, 0));
  report.points.push_back(simulate_point(setup, cfg, kHalfPi, t, 1));

  report.shift = two_proportion_z(report.points[0].tally, report.points[1].tally,
                                  cfg.significance_sigma);
  report.decision = report.shift.significant ? Decision::PreferredFrameDetected
                                             : Decision::NoShiftDetected;
  std::tie(report.delta_phi, report.delta_phi_error) =
      effective_phase_shift(report.shift.p_before, report.shift.p_after);
  report.predicted_delta_phi = orientation_phase(setup, StageAngle{kHalfPi}, t) -
                               orientation_phase(setup, StageAngle{0.0}, t);
  report.sizing = sizing_check(cfg);
  return report;
}

std::vector<PointResult> run_sidereal_sweep(const CampaignConfig& cfg) {
  if (cfg.setup.mode != GeometryMode::Projected) {
    throw ConfigError("mode", "sidereal sweep requires projected mode");
  }
  cfg.validate();
  if (cfg.sidereal_times.empty()) {
    throw ConfigError("sidereal_times_h", "sweep needs at least one time");
  }

  std::vector<PointResult> out;
  out.reserve(cfg.sidereal_times.size() * cfg.stages.size());
  std::uint64_t index = 0;
  for (double t : cfg.sidereal_times) {
    // Re-zero the operating point at stage 0 before each rotation.
    const ExperimentSetup setup =
        cfg.calibrate_trim ? calibrate_trims(cfg.setup, StageAngle{0.0}, t, kHalfPi)
                           : cfg.setup;
    for (double stage : cfg.stages) {
      PointResult p = simulate_point(setup, cfg, stage, t, index++);
      if (p.tally.n_postselected == 0) throw EmptyTallyError();
      out.push_back(p);
    }
  }
  return out;
}

ChshResult run_bell_campaign(const CampaignConfig& cfg) {
  cfg.validate();
  if (!cfg.chsh) throw ConfigError("chsh", "Bell campaign needs chsh settings");

  const double t = cfg.sidereal_times.empty() ? 0.0 : cfg.sidereal_times.front();
  ExperimentSetup setup = cfg.setup;
  if (cfg.calibrate_trim) setup = calibrate_trims(setup, StageAngle{0.0}, t, 0.0);
  const double base = total_phase(setup, StageAngle{0.0}, t);

  std::array<Tally, 4> tallies;
  std::uint64_t index = 0;
  for (double alpha : cfg.chsh->alice) {
    for (double beta : cfg.chsh->bob) {
      tallies[index] = simulate_batch(cfg.events_per_point, base + alpha + beta,
                                      cfg.rng, point_options(cfg, index));
      ++index;
    }
  }
  return chsh(tallies, cfg.chsh->sign);
}

}  // namespace mme
