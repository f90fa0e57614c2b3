#include "orthocal/kinematics.hpp"

#include <cmath>

namespace orthocal {

namespace {

// Radicands this close to zero (relative to L^2) are treated as workspace-
// boundary noise and clamped.
constexpr double kRadicandTol = 1e-9;

// Relative width of the discriminant clamp window (the discriminant is
// dimensionless under the B = 1 normalization).
constexpr double kDiscriminantTol = 1e-12;

}  // namespace

Vec3 constraint_residuals(const Vec3& p, const Vec3& rho,
                          const JointOffsets& off, const Geometry& g) {
  const Vec3 eta = rho + off.vec();
  Vec3 r;
  for (int i = 0; i < 3; ++i) {
    Vec3 d = p;
    d[i] -= eta[i];
    r[i] = d.squaredNorm() - g.L * g.L;
  }
  return r;
}

Vec3 inverse_kinematics(const Vec3& p, const JointOffsets& off,
                        const Geometry& g, const ConfigurationIndices& mode) {
  Vec3 rho;
  const Vec3 d = off.vec();
  const std::array<int, 3> s = {mode.sx, mode.sy, mode.sz};
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    const int k = (i + 2) % 3;
    double radicand = g.L * g.L - p[j] * p[j] - p[k] * p[k];
    if (radicand < 0.0) {
      if (radicand >= -kRadicandTol * g.L * g.L) {
        radicand = 0.0;
      } else {
        throw UnreachableError(static_cast<LegId>(i), radicand);
      }
    }
    rho[i] = p[i] + s[i] * std::sqrt(radicand) - d[i];
  }
  return rho;
}

DirectKinematicsSolution solve_direct_kinematics(const Vec3& rho,
                                                 const JointOffsets& off,
                                                 const Geometry& g) {
  const Vec3 eta = rho + off.vec();
  for (int i = 0; i < 3; ++i) {
    if (std::abs(eta[i]) <= 1e-12 * g.L) {
      throw SingularAxisError(static_cast<LegId>(i));
    }
  }

  // A t^2 + t + C = 0; see the header for the derivation.
  const double a = eta.cwiseInverse().squaredNorm();
  const double c = eta.squaredNorm() / 4.0 - g.L * g.L;
  double disc = 1.0 - 4.0 * a * c;
  if (disc < 0.0) {
    if (disc >= -kDiscriminantTol) {
      disc = 0.0;
    } else {
      throw UnassemblableError(disc);
    }
  }

  // Evaluated via q = -(1 + sqrt(disc))/2 to avoid cancellation; the q/a root
  // is the smaller one since a > 0.
  const double q = -(1.0 + std::sqrt(disc)) / 2.0;
  const double t_selected = q / a;
  const double t_alternate = c / q;

  DirectKinematicsSolution sol;
  sol.t_selected = t_selected;
  sol.t_alternate = t_alternate;
  for (int i = 0; i < 3; ++i) {
    sol.p[i] = eta[i] / 2.0 + t_selected / eta[i];
  }
  return sol;
}

Vec3 direct_kinematics(const Vec3& rho, const JointOffsets& off,
                       const Geometry& g) {
  return solve_direct_kinematics(rho, off, g).p;
}

Vec3 joint_center(LegId leg, const Posture& posture, const JointOffsets& off) {
  Vec3 c = Vec3::Zero();
  c[index(leg)] = posture.rho[index(leg)] + off[leg];
  return c;
}

LegSegment leg_segment(LegId leg, const Posture& posture,
                       const JointOffsets& off) {
  return {posture.p, joint_center(leg, posture, off)};
}

}  // namespace orthocal
