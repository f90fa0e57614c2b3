#pragma once

#include "orthocal/errors.hpp"
#include "orthocal/types.hpp"

namespace orthocal {

/// Manipulator instance: three rods of length L riding on mutually orthogonal
/// prismatic axes, plus the angles of the two extreme test postures.
///
/// All lengths are millimetres, all angles radians, here and everywhere else
/// in the toolkit.
struct Geometry {
  double L;          ///< leg length, mm
  double alpha_max;  ///< leg angle at the maximum-displacement posture, rad
  double alpha_min;  ///< leg angle at the minimum-displacement posture, rad

  /// Validates L > 0, alpha_max > 0 and -pi/2 < alpha_min <= alpha_max < pi/2.
  /// alpha_min == alpha_max is accepted here; the reduced identification form
  /// rejects it later as DegenerateGeometry.
  Geometry(double L_mm, double alpha_max_rad, double alpha_min_rad);
};

/// Encoder zero-position errors of the three linear actuators, the unknowns
/// of calibration (mm).
struct JointOffsets {
  double dx = 0.0;
  double dy = 0.0;
  double dz = 0.0;

  JointOffsets() = default;
  JointOffsets(double dx_mm, double dy_mm, double dz_mm);
  static JointOffsets from_vec(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

  double operator[](LegId leg) const {
    switch (leg) {
      case LegId::X:
        return dx;
      case LegId::Y:
        return dy;
      default:
        return dz;
    }
  }

  Vec3 vec() const { return {dx, dy, dz}; }
};

/// Inverse-kinematics branch signs. Only the (+1, +1, +1) assembly is
/// supported; constructors reject any other combination instead of silently
/// computing it.
struct ConfigurationIndices {
  int sx = 1;
  int sy = 1;
  int sz = 1;

  ConfigurationIndices() = default;
  ConfigurationIndices(int sx_, int sy_, int sz_);
};

/// Paired TCP position and raw encoder readings (actuated coordinates before
/// offset correction). A posture is consistent under the offsets it was
/// constructed with: constraint_residuals(p, rho, off) vanishes.
struct Posture {
  Vec3 p;
  Vec3 rho;
};

/// Tagged test posture: the mechanical zero, or the max/min displacement
/// posture of one leg.
struct PostureTag {
  PostureKind kind = PostureKind::Zero;
  LegId leg = LegId::X;  ///< meaningful for Max/Min only

  static PostureTag zero() { return {PostureKind::Zero, LegId::X}; }
  static PostureTag max(LegId leg) { return {PostureKind::Max, leg}; }
  static PostureTag min(LegId leg) { return {PostureKind::Min, leg}; }

  friend bool operator==(const PostureTag&, const PostureTag&) = default;
};

/// Angle associated with a posture tag: 0 at the zero posture, alpha_max or
/// alpha_min at the displacement postures.
double posture_alpha(const PostureTag& tag, const Geometry& g);

/// Nominal (zero-offset) posture for a tag: at Max/Min of leg i the TCP sits
/// at L*sin(alpha) on that axis and the encoders read L + L*sin(alpha) on it
/// and L*cos(alpha) on the other two.
Posture nominal_posture(const PostureTag& tag, const Geometry& g);

}  // namespace orthocal
