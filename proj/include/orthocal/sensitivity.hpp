#pragma once

#include <array>

#include "orthocal/geometry.hpp"

namespace orthocal {

/// Matrix mapping TCP displacements to joint displacements, obtained by
/// differentiating the sphere constraints: row i has a unit diagonal and
/// off-diagonal entries p_j / (p_i - eta_i).
///
/// `rho` must be the offset-corrected joint coordinate eta = rho + drho;
/// the constraints relate p to eta, so the matrix is exact in eta.
///
/// Throws SingularPostureError when p_i == eta_i for some axis.
Matrix3 inverse_jacobian(const Vec3& p, const Vec3& rho);

/// Forward Jacobian (joint -> TCP displacements); the matrix inverse of
/// inverse_jacobian. At the X-max posture it equals
/// [[1,0,0],[tan a,1,0],[tan a,0,1]].
Matrix3 jacobian(const Vec3& p, const Vec3& rho);

/// First-order TCP deviation caused by the joint offsets at a tagged
/// posture: dp = drho at the zero posture; at a Max/Min posture of leg i the
/// two other components pick up tan(alpha) * drho_i.
Vec3 tcp_displacement(const PostureTag& tag, const Geometry& g,
                      const JointOffsets& off);

/// Coefficients of the linear leg-deviation model at angle alpha.
struct DeviationCoeffs {
  double b;  ///< sin(alpha)
  double c;  ///< (0.5 + sin(alpha)) * tan(alpha)
};

DeviationCoeffs deviation_coeffs(double alpha);

/// First-order transverse deviation of a leg's centerline at the fixed
/// mid-leg gauge station, tagged posture minus mechanical zero. For the
/// X leg: d_y = c*drho_x + b*drho_y and d_z = c*drho_x + b*drho_z; other
/// legs by cyclic index rotation. Returned in {x,y,z} order of the two
/// transverse axes, mm.
///
/// `tag` must be the Max or Min posture of the same leg.
std::array<double, 2> predicted_leg_deviation(LegId leg, const PostureTag& tag,
                                              const JointOffsets& off,
                                              const Geometry& g);

}  // namespace orthocal
