#pragma once

// Arm-to-wind geometry as the Earth turns under a fixed preferred-frame wind.
//
// Frames: the equatorial frame has z along the celestial pole and x toward
// sidereal angle zero. A lab at latitude phi sees, at local sidereal time t,
// zenith = (cos phi cos H, cos phi sin H, sin phi) with H = 2 pi t / 24 h.
// Azimuths are measured from local north toward east.

#include <array>

namespace mme {

using Vec3 = std::array<double, 3>;

inline constexpr double kSiderealDayHours = 24.0;

struct LabSite {
  double latitude = 0.0;     // rad, [-pi/2, pi/2]
  double arm_azimuth = 0.0;  // rad, short-arm azimuth at stage angle 0

  void validate() const;
};

/// Rotation-stage setting in [0, 2pi). The rotation protocol uses 0 and pi/2.
struct StageAngle {
  double angle = 0.0;

  void validate() const;
};

/// Local east/north/up unit vectors expressed in the equatorial frame.
struct LocalBasis {
  Vec3 east;
  Vec3 north;
  Vec3 up;
};

LocalBasis local_basis(const LabSite& site, double t_sidereal);

/// Equatorial-frame unit vector of a horizontal direction at the given
/// azimuth and sidereal time. Handy for constructing aligned winds.
Vec3 horizontal_direction(const LabSite& site, double azimuth,
                          double t_sidereal);

/// Angle in [0, pi/2] between the short-arm axis and the wind direction
/// projected onto the lab horizontal plane.
///
/// Throws DegenerateGeometryError when the wind is along the local vertical
/// (horizontal projection norm < 1e-12) and DomainError if `wind_dir` is not
/// unit-norm within 1e-9 or `t_sidereal` is outside [0, 24).
double arm_wind_angle(const LabSite& site, const StageAngle& stage,
                      const Vec3& wind_dir, double t_sidereal);

/// Full 3-D angle in [0, pi/2] between the short-arm axis and the wind.
/// Unlike arm_wind_angle this is defined for a vertical wind (pi/2).
double arm_wind_angle_3d(const LabSite& site, const StageAngle& stage,
                         const Vec3& wind_dir, double t_sidereal);

/// Idealized orientation: stage 0 puts the short arm along the wind, stage
/// pi/2 puts it across. Any other stage throws DomainError.
double aligned_mode_angle(const StageAngle& stage);

/// Reduce an axis-to-axis angle to [0, pi/2].
double fold_axis_angle(double angle);

}  // namespace mme
