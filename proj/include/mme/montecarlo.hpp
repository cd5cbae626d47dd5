#pragma once

// Event-level simulation of Franson photon pairs.
//
// Each photon independently takes the short or long arm with probability
// 1/2. Only matched pairs (short-short, long-long) are post-selected as
// coincidences; for those the joint outcome is drawn from the interference
// law P(a=b) = (1 + cos phi)/2 with unbiased single-detector marginals.

#include <cstdint>
#include <limits>
#include <optional>

#include "mme/kinematics.hpp"
#include "mme/physics.hpp"

namespace mme {

enum class Path : std::uint8_t { Short, Long };
enum class Outcome : std::uint8_t { Plus, Minus };

/// One simulated pair. Outcomes are set iff the pair was post-selected and
/// both detectors fired; `outcome_a` is D_A's port, `outcome_b` D_B's.
struct PairEvent {
  Path path_a = Path::Short;
  Path path_b = Path::Short;
  bool postselected = false;
  std::optional<Outcome> outcome_a;
  std::optional<Outcome> outcome_b;
};

struct Tally {
  std::uint64_t n_pairs = 0;
  std::uint64_t n_postselected = 0;
  std::uint64_t n_same = 0;
  std::uint64_t n_diff = 0;

  Tally& operator+=(const Tally& other) {
    n_pairs += other.n_pairs;
    n_postselected += other.n_postselected;
    n_same += other.n_same;
    n_diff += other.n_diff;
    return *this;
  }
  void record(const PairEvent& event);

  friend bool operator==(const Tally&, const Tally&) = default;
};

inline Tally merge(Tally a, const Tally& b) { return a += b; }

/// Detector non-idealities, applied after outcome sampling. A coincidence is
/// lost when either detector misses (probability 1 - efficiency each); a
/// dark count replaces that detector's outcome by a uniformly random one.
struct DetectorModel {
  double efficiency = 1.0;
  double dark_count_probability = 0.0;

  bool ideal() const { return efficiency == 1.0 && dark_count_probability == 0.0; }
  void validate() const;
};

struct RngPolicy {
  std::uint64_t master_seed = 0;
  std::uint64_t chunk_size = 1u << 16;

  void validate() const;
};

/// Counter-based generator: output k of stream s is a bijective mix of
/// (key(master, s) + k * golden). Streams are independent of each other and
/// of the order in which they are consumed.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t master_seed, std::uint64_t stream);

  result_type operator()();
  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

PairEvent sample_pair(CounterRng& rng, double p_same,
                      const DetectorModel& detector = {});

struct SimulationOptions {
  // Stream index of the first chunk; campaigns give each point a disjoint
  // range so results do not depend on execution order.
  std::uint64_t first_chunk = 0;
  unsigned threads = 1;
  DetectorModel detector;
};

/// Simulate `n` pairs at total phase `phi`. Bitwise reproducible for fixed
/// (rng, first_chunk, n) regardless of `threads`.
Tally simulate_batch(std::uint64_t n, double phi, const RngPolicy& rng,
                     const SimulationOptions& options = {});

// --- Campaign points --------------------------------------------------------

enum class GeometryMode { Aligned, Projected };

/// Everything physical needed to turn (stage, sidereal time) into a phase.
struct ExperimentSetup {
  PhysicalConstants constants;
  SourceSpec source;
  ArmGeometry arms_a;
  ArmGeometry arms_b;
  PhaseModelKind model = Relativistic{};
  GeometryMode mode = GeometryMode::Aligned;
  LabSite site;
  DetectorModel detector;

  void validate() const;
};

struct ArmAngles {
  double theta_short = 0.0;
  double theta_long = 0.0;
};

/// Short/long arm angles to the wind. Aligned mode ignores the sidereal time.
ArmAngles arm_angles(const ExperimentSetup& setup, const StageAngle& stage,
                     double t_sidereal);

/// Orientation-dependent part of the total phase: sum over both
/// interferometers of omega_i times the long-minus-short delay excess.
/// Identically zero in the relativistic model.
double orientation_phase(const ExperimentSetup& setup, const StageAngle& stage,
                         double t_sidereal);

/// Total phase Phi = sum_i (omega_i tau_i + trim_i), reduced to [0, 2pi).
double total_phase(const ExperimentSetup& setup, const StageAngle& stage,
                   double t_sidereal);

/// Copy of `setup` with both trims chosen so that total_phase at the given
/// reference orientation equals `target` (split evenly between the sides).
ExperimentSetup calibrate_trims(ExperimentSetup setup, const StageAngle& stage,
                                double t_sidereal, double target);

Tally simulate_campaign_point(const ExperimentSetup& setup,
                              const StageAngle& stage, double t_sidereal,
                              std::uint64_t n, const RngPolicy& rng,
                              const SimulationOptions& options = {});

}  // namespace mme
