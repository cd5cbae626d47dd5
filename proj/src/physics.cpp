#include "mme/physics.hpp"

#include <cmath>

#include <fmt/format.h>

#include "mme/errors.hpp"

namespace mme {

namespace {

// Squared speed ratio, rejecting v >= c.
double checked_beta_sq(const EtherWind& wind, const PhysicalConstants& consts) {
  if (!(wind.speed >= 0.0) || !(wind.speed < consts.c)) {
    throw DomainError(fmt::format(
        "wind speed {} m/s outside [0, c = {} m/s)", wind.speed, consts.c));
  }
  const double beta = wind.speed / consts.c;
  return beta * beta;
}

void check_length(double length) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw DomainError(fmt::format("arm length {} m must be positive", length));
  }
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

void PhysicalConstants::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw DomainError(fmt::format("speed of light {} must be positive", c));
  }
}

SourceSpec SourceSpec::from_wavelengths(double lambda_a, double lambda_b,
                                        const PhysicalConstants& consts) {
  if (!(lambda_a > 0.0) || !(lambda_b > 0.0)) {
    throw DomainError("wavelengths must be positive");
  }
  return SourceSpec{kTwoPi * consts.c / lambda_a, kTwoPi * consts.c / lambda_b};
}

double SourceSpec::wavelength_a(const PhysicalConstants& consts) const {
  return kTwoPi * consts.c / omega_a;
}

double SourceSpec::wavelength_b(const PhysicalConstants& consts) const {
  return kTwoPi * consts.c / omega_b;
}

void SourceSpec::validate() const {
  if (!(omega_a > 0.0) || !(omega_b > 0.0) || !std::isfinite(omega_a) ||
      !std::isfinite(omega_b)) {
    throw DomainError("angular frequencies must be positive and finite");
  }
}

void ArmGeometry::validate() const {
  if (!(s > 0.0) || !(l > s) || !std::isfinite(l)) {
    throw DomainError(fmt::format("arms need l > s > 0 (l = {}, s = {})", l, s));
  }
  if (!(trim >= 0.0) || !(trim < kTwoPi)) {
    throw DomainError(fmt::format("trim {} outside [0, 2pi)", trim));
  }
}

void EtherWind::validate(const PhysicalConstants& consts) const {
  checked_beta_sq(*this, consts);
  const double norm = std::hypot(direction[0], direction[1], direction[2]);
  if (std::abs(norm - 1.0) > 1e-9) {
    throw DomainError(fmt::format("wind direction norm {} is not 1", norm));
  }
}

double roundtrip_time_parallel(double length, const EtherWind& wind,
                               const PhysicalConstants& consts) {
  check_length(length);
  checked_beta_sq(wind, consts);
  const double c = consts.c;
  const double v = wind.speed;
  return 2.0 * length * c / ((c - v) * (c + v));
}

double roundtrip_time_perpendicular(double length, const EtherWind& wind,
                                    const PhysicalConstants& consts) {
  check_length(length);
  checked_beta_sq(wind, consts);
  const double c = consts.c;
  const double v = wind.speed;
  return 2.0 * length / std::sqrt((c - v) * (c + v));
}

double roundtrip_time_at_angle(double length, double theta,
                               const EtherWind& wind,
                               const PhysicalConstants& consts) {
  check_length(length);
  const double beta_sq = checked_beta_sq(wind, consts);
  const double sin_t = std::sin(theta);
  return (2.0 * length / consts.c) * std::sqrt(1.0 - beta_sq * sin_t * sin_t) /
         (1.0 - beta_sq);
}

double roundtrip_excess_at_angle(double length, double theta,
                                 const EtherWind& wind,
                                 const PhysicalConstants& consts) {
  check_length(length);
  const double beta_sq = checked_beta_sq(wind, consts);
  const double sin_t = std::sin(theta);
  const double x = beta_sq * sin_t * sin_t;
  // sqrt(1 - x) - (1 - b^2) = b^2 - x / (1 + sqrt(1 - x))
  const double numer = beta_sq - x / (1.0 + std::sqrt(1.0 - x));
  return (2.0 * length / consts.c) * numer / (1.0 - beta_sq);
}

double arm_delay_excess(const ArmGeometry& arms, double theta_short,
                        double theta_long, const EtherWind& wind,
                        const PhysicalConstants& consts) {
  return roundtrip_excess_at_angle(arms.l, theta_long, wind, consts) -
         roundtrip_excess_at_angle(arms.s, theta_short, wind, consts);
}

double optical_path_difference(const ArmGeometry& arms,
                               const PhaseModelKind& model,
                               const Orientation& orientation,
                               const PhysicalConstants& consts) {
  constexpr double kHalfPi = std::numbers::pi / 2.0;
  return std::visit(
      Overloaded{
          [&](const Relativistic&) { return (arms.l - arms.s) / consts.c; },
          [&](const PreferredFrame& pf) {
            const double base = 2.0 * (arms.l - arms.s) / consts.c;
            return std::visit(
                Overloaded{
                    [&](const ShortParallel&) {
                      return -(base + arm_delay_excess(arms, 0.0, kHalfPi,
                                                       pf.wind, consts));
                    },
                    [&](const LongParallel&) {
                      return base + arm_delay_excess(arms, kHalfPi, 0.0,
                                                     pf.wind, consts);
                    },
                    [&](const Angled& a) {
                      return base + arm_delay_excess(arms, a.theta_short,
                                                     a.theta_long, pf.wind,
                                                     consts);
                    },
                },
                orientation);
          },
      },
      model);
}

double rotation_path_difference_total(const ArmGeometry& arms,
                                      const EtherWind& wind,
                                      const PhysicalConstants& consts) {
  const double beta_sq = checked_beta_sq(wind, consts);
  // (t_par - t_perp) per arm, summed over both arms:
  // (2L/c) b^2 / ((1 - b^2)(1 + sqrt(1 - b^2)))
  return (2.0 * arms.sum() / consts.c) * beta_sq /
         ((1.0 - beta_sq) * (1.0 + std::sqrt(1.0 - beta_sq)));
}

double rotation_path_difference_approx(const ArmGeometry& arms,
                                       const EtherWind& wind,
                                       const PhysicalConstants& consts) {
  const double beta_sq = checked_beta_sq(wind, consts);
  return arms.sum() * beta_sq / consts.c;
}

double rotation_phase_shift(const ArmGeometry& arms_a,
                            const ArmGeometry& arms_b, const SourceSpec& source,
                            const EtherWind& wind,
                            const PhysicalConstants& consts) {
  return source.omega_a * rotation_path_difference_total(arms_a, wind, consts) +
         source.omega_b * rotation_path_difference_total(arms_b, wind, consts);
}

double rotation_phase_shift_approx(const ArmGeometry& arms_a,
                                   const ArmGeometry& arms_b,
                                   const SourceSpec& source,
                                   const EtherWind& wind,
                                   const PhysicalConstants& consts) {
  return source.omega_a * rotation_path_difference_approx(arms_a, wind, consts) +
         source.omega_b * rotation_path_difference_approx(arms_b, wind, consts);
}

double size_apparatus_for_shift(double target_shift, const SourceSpec& source,
                                const EtherWind& wind,
                                const PhysicalConstants& consts) {
  if (!(target_shift > 0.0)) {
    throw DomainError("target phase shift must be positive");
  }
  const double beta_sq = checked_beta_sq(wind, consts);
  if (beta_sq == 0.0) {
    throw DomainError("no finite apparatus produces a shift without wind");
  }
  return target_shift * consts.c / ((source.omega_a + source.omega_b) * beta_sq);
}

JointProbabilities joint_probabilities(double phi) {
  const double p_same = 0.5 * (1.0 + std::cos(phi));
  return {p_same, 1.0 - p_same};
}

double correlation(double phi) { return std::cos(phi); }

double wrap_phase(double phi) {
  double r = std::fmod(phi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

}  // namespace mme
