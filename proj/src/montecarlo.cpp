#include "mme/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "mme/errors.hpp"

namespace mme {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
constexpr double kHalfPi = std::numbers::pi / 2.0;

Outcome flip(Outcome o) {
  return o == Outcome::Plus ? Outcome::Minus : Outcome::Plus;
}

// Orientation-independent phase of one side, reduced mod 2pi, plus its trim.
double side_base_phase(const ArmGeometry& arms, double omega,
                       const ExperimentSetup& setup) {
  const double delay =
      std::holds_alternative<Relativistic>(setup.model)
          ? (arms.l - arms.s) / setup.constants.c
          : 2.0 * (arms.l - arms.s) / setup.constants.c;
  return wrap_phase(omega * delay) + arms.trim;
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

CounterRng::CounterRng(std::uint64_t master_seed, std::uint64_t stream)
    : key_(mix64(master_seed ^ mix64(stream * kGolden + kGolden))) {}

CounterRng::result_type CounterRng::operator()() {
  return mix64(key_ + (++counter_) * kGolden);
}

void Tally::record(const PairEvent& event) {
  ++n_pairs;
  if (!event.outcome_a || !event.outcome_b) return;
  ++n_postselected;
  if (*event.outcome_a == *event.outcome_b) {
    ++n_same;
  } else {
    ++n_diff;
  }
}

void DetectorModel::validate() const {
  if (!(efficiency > 0.0) || !(efficiency <= 1.0)) {
    throw DomainError(fmt::format("efficiency {} outside (0, 1]", efficiency));
  }
  if (!(dark_count_probability >= 0.0) || !(dark_count_probability <= 1.0)) {
    throw DomainError(fmt::format("dark-count probability {} outside [0, 1]",
                                  dark_count_probability));
  }
}

void RngPolicy::validate() const {
  if (chunk_size == 0) throw DomainError("chunk size must be positive");
}

PairEvent sample_pair(CounterRng& rng, double p_same,
                      const DetectorModel& detector) {
  // One draw covers the ideal case: three low bits for the discrete choices,
  // the top 53 bits for the same/different decision.
  const std::uint64_t bits = rng();
  PairEvent event;
  event.path_a = (bits & 1u) ? Path::Long : Path::Short;
  event.path_b = (bits & 2u) ? Path::Long : Path::Short;
  event.postselected = event.path_a == event.path_b;
  if (!event.postselected) return event;

  const Outcome a = (bits & 4u) ? Outcome::Minus : Outcome::Plus;
  const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
  Outcome b = u < p_same ? a : flip(a);
  Outcome a_out = a;

  if (!detector.ideal()) {
    if (detector.efficiency < 1.0) {
      if (rng.uniform() >= detector.efficiency) return event;
      if (rng.uniform() >= detector.efficiency) return event;
    }
    if (detector.dark_count_probability > 0.0) {
      if (rng.uniform() < detector.dark_count_probability) {
        a_out = (rng() & 1u) ? Outcome::Minus : Outcome::Plus;
      }
      if (rng.uniform() < detector.dark_count_probability) {
        b = (rng() & 1u) ? Outcome::Minus : Outcome::Plus;
      }
    }
  }
  event.outcome_a = a_out;
  event.outcome_b = b;
  return event;
}

Tally simulate_batch(std::uint64_t n, double phi, const RngPolicy& rng,
                     const SimulationOptions& options) {
  rng.validate();
  options.detector.validate();
  if (n == 0) return {};

  const double p_same = joint_probabilities(phi).p_same;
  const std::uint64_t n_chunks = (n + rng.chunk_size - 1) / rng.chunk_size;
  std::vector<Tally> chunk_tallies(n_chunks);

  auto run_chunk = [&](std::uint64_t chunk) {
    CounterRng gen(rng.master_seed, options.first_chunk + chunk);
    const std::uint64_t begin = chunk * rng.chunk_size;
    const std::uint64_t count = std::min(rng.chunk_size, n - begin);
    Tally t;
    for (std::uint64_t i = 0; i < count; ++i) {
      t.record(sample_pair(gen, p_same, options.detector));
    }
    chunk_tallies[chunk] = t;
  };

  const auto workers = static_cast<std::uint64_t>(
      std::clamp<unsigned>(options.threads, 1u, 256u));
  if (workers == 1 || n_chunks == 1) {
    for (std::uint64_t c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::jthread> pool;
    const auto n_workers = std::min(workers, n_chunks);
    pool.reserve(n_workers);
    for (std::uint64_t w = 0; w < n_workers; ++w) {
      pool.emplace_back([&] {
        for (std::uint64_t c = next++; c < n_chunks; c = next++) run_chunk(c);
      });
    }
  }

  Tally total;
  for (const Tally& t : chunk_tallies) total += t;
  return total;
}

void ExperimentSetup::validate() const {
  constants.validate();
  source.validate();
  arms_a.validate();
  arms_b.validate();
  if (const auto* pf = std::get_if<PreferredFrame>(&model)) {
    pf->wind.validate(constants);
  }
  if (mode == GeometryMode::Projected) site.validate();
  detector.validate();
}

ArmAngles arm_angles(const ExperimentSetup& setup, const StageAngle& stage,
                     double t_sidereal) {
  if (setup.mode == GeometryMode::Aligned) {
    const double theta_short = aligned_mode_angle(stage);
    return {theta_short, kHalfPi - theta_short};
  }
  const auto* pf = std::get_if<PreferredFrame>(&setup.model);
  if (pf == nullptr) return {0.0, kHalfPi};
  const StageAngle across{wrap_phase(stage.angle + kHalfPi)};
  return {
      arm_wind_angle_3d(setup.site, stage, pf->wind.direction, t_sidereal),
      arm_wind_angle_3d(setup.site, across, pf->wind.direction, t_sidereal),
  };
}

double orientation_phase(const ExperimentSetup& setup, const StageAngle& stage,
                         double t_sidereal) {
  const auto* pf = std::get_if<PreferredFrame>(&setup.model);
  if (pf == nullptr) return 0.0;
  const ArmAngles angles = arm_angles(setup, stage, t_sidereal);
  const auto& c = setup.constants;
  return setup.source.omega_a * arm_delay_excess(setup.arms_a, angles.theta_short,
                                                 angles.theta_long, pf->wind, c) +
         setup.source.omega_b * arm_delay_excess(setup.arms_b, angles.theta_short,
                                                 angles.theta_long, pf->wind, c);
}

double total_phase(const ExperimentSetup& setup, const StageAngle& stage,
                   double t_sidereal) {
  const double base = side_base_phase(setup.arms_a, setup.source.omega_a, setup) +
                      side_base_phase(setup.arms_b, setup.source.omega_b, setup);
  return wrap_phase(base + orientation_phase(setup, stage, t_sidereal));
}

ExperimentSetup calibrate_trims(ExperimentSetup setup, const StageAngle& stage,
                                double t_sidereal, double target) {
  const auto* pf = std::get_if<PreferredFrame>(&setup.model);
  const ArmAngles angles = arm_angles(setup, stage, t_sidereal);
  auto side_phase = [&](ArmGeometry arms, double omega) {
    arms.trim = 0.0;
    double phase = side_base_phase(arms, omega, setup);
    if (pf != nullptr) {
      phase += omega * arm_delay_excess(arms, angles.theta_short,
                                        angles.theta_long, pf->wind,
                                        setup.constants);
    }
    return phase;
  };
  const double half = 0.5 * target;
  const double phase_a = side_phase(setup.arms_a, setup.source.omega_a);
  const double phase_b = side_phase(setup.arms_b, setup.source.omega_b);
  setup.arms_a.trim = wrap_phase(half - phase_a);
  setup.arms_b.trim = wrap_phase(half - phase_b);
  return setup;
}

Tally simulate_campaign_point(const ExperimentSetup& setup,
                              const StageAngle& stage, double t_sidereal,
                              std::uint64_t n, const RngPolicy& rng,
                              const SimulationOptions& options) {
  SimulationOptions opts = options;
  opts.detector = setup.detector;
  return simulate_batch(n, total_phase(setup, stage, t_sidereal), rng, opts);
}

}  // namespace mme
