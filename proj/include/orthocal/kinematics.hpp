#pragma once

#include <utility>

#include "orthocal/geometry.hpp"

namespace orthocal {

/// Signed defects of the three sphere constraints, mm^2. Entry i is
/// |p - eta_i e_i|^2 - L^2 with eta = rho + offsets; all three vanish iff
/// (p, rho) is a valid configuration under the given offsets.
Vec3 constraint_residuals(const Vec3& p, const Vec3& rho,
                          const JointOffsets& off, const Geometry& g);

/// Encoder readings that place the TCP at p under the given offsets:
/// rho_i = p_i + sqrt(L^2 - p_j^2 - p_k^2) - drho_i for the supported
/// (+1,+1,+1) assembly. Radicands within -1e-9*L^2 of zero are clamped to
/// absorb floating-point noise at the workspace boundary.
///
/// Throws UnreachableError when a radicand is negative.
Vec3 inverse_kinematics(const Vec3& p, const JointOffsets& off,
                        const Geometry& g,
                        const ConfigurationIndices& mode = {});

/// Full direct-kinematics solution, exposing the auxiliary quadratic roots
/// for diagnostics and branch checks.
struct DirectKinematicsSolution {
  Vec3 p;             ///< TCP for the selected (smaller) root
  double t_selected;  ///< selected root of the auxiliary quadratic, mm^2
  double t_alternate; ///< the other root, mm^2
};

/// Solves the direct problem for encoder readings rho under offsets off.
///
/// Substituting p_i = eta_i/2 + t/eta_i into each sphere constraint
/// collapses all three equations to the same quadratic in t:
///   (sum_i 1/eta_i^2) t^2 + t + (sum_i eta_i^2/4 - L^2) = 0.
/// The smaller root is the branch containing the mechanical-zero posture
/// (rho = (L,L,L) gives t = -L^2/2, p = 0); the larger root is the mirror
/// configuration beyond the joint centers.
///
/// Throws SingularAxisError when some eta_i == 0 and UnassemblableError when
/// the discriminant is negative.
DirectKinematicsSolution solve_direct_kinematics(const Vec3& rho,
                                                 const JointOffsets& off,
                                                 const Geometry& g);

/// TCP position for encoder readings rho under offsets off (selected branch).
Vec3 direct_kinematics(const Vec3& rho, const JointOffsets& off,
                       const Geometry& g);

/// Centre of the prismatic-side joint of a leg: it lies on the leg's axis at
/// the offset-corrected joint coordinate, e.g. (rho_x + drho_x, 0, 0) for the
/// X leg.
Vec3 joint_center(LegId leg, const Posture& posture, const JointOffsets& off);

/// Rod segment of a leg, bounded by the TCP and the joint centre. Its length
/// equals L for any valid posture.
struct LegSegment {
  Vec3 tcp;
  Vec3 joint;
};

LegSegment leg_segment(LegId leg, const Posture& posture,
                       const JointOffsets& off);

}  // namespace orthocal
