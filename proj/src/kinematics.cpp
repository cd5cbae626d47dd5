#include "mme/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "mme/errors.hpp"
#include "mme/physics.hpp"

namespace mme {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

void check_inputs(const Vec3& wind_dir, double t_sidereal) {
  const double norm = std::sqrt(dot(wind_dir, wind_dir));
  if (std::abs(norm - 1.0) > 1e-9) {
    throw DomainError(fmt::format("wind direction norm {} is not 1", norm));
  }
  if (!(t_sidereal >= 0.0) || !(t_sidereal < kSiderealDayHours)) {
    throw DomainError(
        fmt::format("sidereal time {} h outside [0, 24)", t_sidereal));
  }
}

Vec3 arm_axis(const LocalBasis& basis, double azimuth) {
  const double cn = std::cos(azimuth);
  const double se = std::sin(azimuth);
  return {cn * basis.north[0] + se * basis.east[0],
          cn * basis.north[1] + se * basis.east[1],
          cn * basis.north[2] + se * basis.east[2]};
}

}  // namespace

void LabSite::validate() const {
  if (!(std::abs(latitude) <= kHalfPi)) {
    throw DomainError(fmt::format("latitude {} rad outside [-pi/2, pi/2]", latitude));
  }
  if (!(arm_azimuth >= 0.0) || !(arm_azimuth < kTwoPi)) {
    throw DomainError(fmt::format("arm azimuth {} rad outside [0, 2pi)", arm_azimuth));
  }
}

void StageAngle::validate() const {
  if (!(angle >= 0.0) || !(angle < kTwoPi)) {
    throw DomainError(fmt::format("stage angle {} rad outside [0, 2pi)", angle));
  }
}

LocalBasis local_basis(const LabSite& site, double t_sidereal) {
  const double hour_angle = kTwoPi * t_sidereal / kSiderealDayHours;
  const double ch = std::cos(hour_angle);
  const double sh = std::sin(hour_angle);
  const double cl = std::cos(site.latitude);
  const double sl = std::sin(site.latitude);
  return LocalBasis{
      .east = {-sh, ch, 0.0},
      .north = {-sl * ch, -sl * sh, cl},
      .up = {cl * ch, cl * sh, sl},
  };
}

Vec3 horizontal_direction(const LabSite& site, double azimuth,
                          double t_sidereal) {
  return arm_axis(local_basis(site, t_sidereal), azimuth);
}

double fold_axis_angle(double angle) {
  double d = std::fmod(angle, std::numbers::pi);
  if (d < 0.0) d += std::numbers::pi;
  return std::min(d, std::numbers::pi - d);
}

double arm_wind_angle(const LabSite& site, const StageAngle& stage,
                      const Vec3& wind_dir, double t_sidereal) {
  check_inputs(wind_dir, t_sidereal);
  const LocalBasis basis = local_basis(site, t_sidereal);
  const double w_east = dot(wind_dir, basis.east);
  const double w_north = dot(wind_dir, basis.north);
  if (std::hypot(w_east, w_north) < 1e-12) {
    throw DegenerateGeometryError(
        "wind is along the local vertical; horizontal angle undefined");
  }
  const double wind_azimuth = std::atan2(w_east, w_north);
  return fold_axis_angle(wind_azimuth - (site.arm_azimuth + stage.angle));
}

double arm_wind_angle_3d(const LabSite& site, const StageAngle& stage,
                         const Vec3& wind_dir, double t_sidereal) {
  check_inputs(wind_dir, t_sidereal);
  const Vec3 axis =
      arm_axis(local_basis(site, t_sidereal), site.arm_azimuth + stage.angle);
  const double cosine = std::clamp(std::abs(dot(axis, wind_dir)), 0.0, 1.0);
  return std::acos(cosine);
}

double aligned_mode_angle(const StageAngle& stage) {
  constexpr double kTol = 1e-12;
  if (std::abs(stage.angle) <= kTol) return 0.0;
  if (std::abs(stage.angle - kHalfPi) <= kTol) return kHalfPi;
  throw DomainError(fmt::format(
      "aligned mode supports only stages 0 and pi/2, got {} rad", stage.angle));
}

}  // namespace mme
