#pragma once

// Closed-form physics of a Franson pair of unbalanced Michelson
// interferometers, under a relativistic (isotropic light speed) model and
// under a preferred-frame ("ether wind") model.

#include <array>
#include <numbers>
#include <variant>

namespace mme {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct PhysicalConstants {
  double c = 299'792'458.0;  // m/s, exact SI value

  void validate() const;
};

/// Photon-pair source, stored as angular frequencies (rad/s).
struct SourceSpec {
  double omega_a = 0.0;
  double omega_b = 0.0;

  static SourceSpec from_wavelengths(double lambda_a, double lambda_b,
                                     const PhysicalConstants& consts = {});
  static SourceSpec from_wavelength(double lambda,
                                    const PhysicalConstants& consts = {}) {
    return from_wavelengths(lambda, lambda, consts);
  }

  double wavelength_a(const PhysicalConstants& consts = {}) const;
  double wavelength_b(const PhysicalConstants& consts = {}) const;
  double frequency_a() const { return omega_a / kTwoPi; }
  double frequency_b() const { return omega_b / kTwoPi; }

  void validate() const;
};

/// One interferometer: long arm `l`, short arm `s` (metres) and a fine-trim
/// phase in [0, 2pi) modelling sub-wavelength mirror placement.
struct ArmGeometry {
  double l = 0.0;
  double s = 0.0;
  double trim = 0.0;

  double sum() const { return l + s; }
  void validate() const;
};

/// Lab velocity relative to the preferred frame. Speed zero is the
/// relativistic null hypothesis. Direction is an equatorial-frame unit vector
/// and is only consulted by the kinematics module.
struct EtherWind {
  double speed = 0.0;
  std::array<double, 3> direction{1.0, 0.0, 0.0};

  double beta(const PhysicalConstants& consts) const { return speed / consts.c; }
  void validate(const PhysicalConstants& consts) const;
};

struct Relativistic {};
struct PreferredFrame {
  EtherWind wind;
};
using PhaseModelKind = std::variant<Relativistic, PreferredFrame>;

struct JointProbabilities {
  double p_same = 0.0;
  double p_diff = 0.0;
};

// Arm orientation relative to the wind for optical_path_difference.
struct ShortParallel {};
struct LongParallel {};
struct Angled {
  double theta_short = 0.0;
  double theta_long = 0.0;
};
using Orientation = std::variant<ShortParallel, LongParallel, Angled>;

// --- Round-trip times (exact, un-expanded) ---------------------------------

/// 2Lc / (c^2 - v^2): arm along the wind.
double roundtrip_time_parallel(double length, const EtherWind& wind,
                               const PhysicalConstants& consts = {});

/// 2L / sqrt(c^2 - v^2): arm across the wind.
double roundtrip_time_perpendicular(double length, const EtherWind& wind,
                                    const PhysicalConstants& consts = {});

/// (2L/c) sqrt(1 - b^2 sin^2 theta) / (1 - b^2) for an arm at angle theta to
/// the wind. Only the arm axis matters, so theta is effectively taken mod pi.
double roundtrip_time_at_angle(double length, double theta,
                               const EtherWind& wind,
                               const PhysicalConstants& consts = {});

/// roundtrip_time_at_angle(L, theta) - 2L/c, evaluated without cancellation.
/// Resolves the ~1e-16 s wind contribution on top of a ~1e-8 s round trip.
double roundtrip_excess_at_angle(double length, double theta,
                                 const EtherWind& wind,
                                 const PhysicalConstants& consts = {});

// --- Path differences -------------------------------------------------------

/// Optical path difference of one interferometer.
///
/// Sign conventions:
///  * Relativistic: (l - s)/c, independent of orientation.
///  * PreferredFrame + ShortParallel: t_short,par - t_long,perp (short minus
///    long, hence negative).
///  * PreferredFrame + LongParallel: t_long,par - t_short,perp.
///  * PreferredFrame + Angled: t_long(theta_long) - t_short(theta_short).
///
/// Note the relativistic value is a one-way difference while the
/// preferred-frame values are round trips; at v = 0 the latter is 2(l-s)/c.
double optical_path_difference(const ArmGeometry& arms,
                               const PhaseModelKind& model,
                               const Orientation& orientation,
                               const PhysicalConstants& consts = {});

/// Round-trip long-minus-short delay excess over 2(l-s)/c at the given arm
/// angles. Zero for v = 0. Used for orientation-dependent phases.
double arm_delay_excess(const ArmGeometry& arms, double theta_short,
                        double theta_long, const EtherWind& wind,
                        const PhysicalConstants& consts = {});

/// Exact tau_1 + tau_2: change of the long-minus-short delay when the
/// interferometer is turned from short-arm-parallel to long-arm-parallel.
double rotation_path_difference_total(const ArmGeometry& arms,
                                      const EtherWind& wind,
                                      const PhysicalConstants& consts = {});

/// Leading-order (l + s) v^2 / c^3.
double rotation_path_difference_approx(const ArmGeometry& arms,
                                       const EtherWind& wind,
                                       const PhysicalConstants& consts = {});

/// omega_A tau_A + omega_B tau_B with the exact per-interferometer totals.
double rotation_phase_shift(const ArmGeometry& arms_a,
                            const ArmGeometry& arms_b, const SourceSpec& source,
                            const EtherWind& wind,
                            const PhysicalConstants& consts = {});

/// Sum over both interferometers of 2 pi (l+s)/lambda_i * b^2, i.e.
/// 4 pi (l+s)/lambda * b^2 for identical sides.
double rotation_phase_shift_approx(const ArmGeometry& arms_a,
                                   const ArmGeometry& arms_b,
                                   const SourceSpec& source,
                                   const EtherWind& wind,
                                   const PhysicalConstants& consts = {});

/// Inverse of the approximate shift for two identical interferometers:
/// (l + s) = shift * c / ((omega_A + omega_B) b^2), which for equal
/// wavelengths is shift * lambda * c^2 / (4 pi v^2).
double size_apparatus_for_shift(double target_shift, const SourceSpec& source,
                                const EtherWind& wind,
                                const PhysicalConstants& consts = {});

// --- Interference law -------------------------------------------------------

JointProbabilities joint_probabilities(double phi);

/// E = P(a=b) - P(a!=b) = cos(phi).
double correlation(double phi);

/// Reduce a phase to [0, 2pi).
double wrap_phase(double phi);

}  // namespace mme
