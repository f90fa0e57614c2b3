#include "orthocal/sensitivity.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace orthocal {

Matrix3 inverse_jacobian(const Vec3& p, const Vec3& rho) {
  Matrix3 m = Matrix3::Identity();
  for (int i = 0; i < 3; ++i) {
    const double den = p[i] - rho[i];
    if (den == 0.0) throw SingularPostureError(static_cast<LegId>(i));
    for (int j = 0; j < 3; ++j) {
      if (j != i) m(i, j) = p[j] / den;
    }
  }
  return m;
}

Matrix3 jacobian(const Vec3& p, const Vec3& rho) {
  const Matrix3 inv = inverse_jacobian(p, rho);
  const double det = inv.determinant();
  if (std::abs(det) < 1e-12) throw SingularPostureError();
  return inv.inverse();
}

Vec3 tcp_displacement(const PostureTag& tag, const Geometry& g,
                      const JointOffsets& off) {
  const Vec3 d = off.vec();
  if (tag.kind == PostureKind::Zero) return d;
  const double t = std::tan(posture_alpha(tag, g));
  Vec3 dp;
  const int leg = index(tag.leg);
  dp[leg] = d[leg];
  for (LegId axis : transverse_axes(tag.leg)) {
    dp[index(axis)] = t * d[leg] + d[index(axis)];
  }
  return dp;
}

DeviationCoeffs deviation_coeffs(double alpha) {
  if (!std::isfinite(alpha) || std::abs(alpha) >= std::numbers::pi / 2.0) {
    throw ConfigError("posture angle must lie strictly inside (-pi/2, pi/2)");
  }
  const double s = std::sin(alpha);
  return {s, (0.5 + s) * std::tan(alpha)};
}

std::array<double, 2> predicted_leg_deviation(LegId leg, const PostureTag& tag,
                                              const JointOffsets& off,
                                              const Geometry& g) {
  if (tag.kind == PostureKind::Zero || tag.leg != leg) {
    throw ConfigError(
        "leg-deviation model is defined for the leg's own max/min posture");
  }
  const auto [b, c] = deviation_coeffs(posture_alpha(tag, g));
  const auto axes = transverse_axes(leg);
  return {c * off[leg] + b * off[axes[0]], c * off[leg] + b * off[axes[1]]};
}

}  // namespace orthocal
