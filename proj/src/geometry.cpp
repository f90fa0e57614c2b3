#include "orthocal/geometry.hpp"

#include <cmath>
#include <numbers>

namespace orthocal {

Geometry::Geometry(double L_mm, double alpha_max_rad, double alpha_min_rad)
    : L(L_mm), alpha_max(alpha_max_rad), alpha_min(alpha_min_rad) {
  constexpr double kHalfPi = std::numbers::pi / 2.0;
  if (!std::isfinite(L) || !std::isfinite(alpha_max) ||
      !std::isfinite(alpha_min)) {
    throw ConfigError("geometry fields must be finite");
  }
  if (!(L > 0.0)) throw ConfigError("leg length L must be positive");
  if (!(alpha_max > 0.0)) throw ConfigError("alpha_max must be positive");
  if (!(alpha_max < kHalfPi) || !(alpha_min > -kHalfPi)) {
    throw ConfigError("posture angles must lie strictly inside (-pi/2, pi/2)");
  }
  if (alpha_min > alpha_max) {
    throw ConfigError("alpha_min must not exceed alpha_max");
  }
}

JointOffsets::JointOffsets(double dx_mm, double dy_mm, double dz_mm)
    : dx(dx_mm), dy(dy_mm), dz(dz_mm) {
  if (!std::isfinite(dx) || !std::isfinite(dy) || !std::isfinite(dz)) {
    throw ConfigError("joint offsets must be finite");
  }
}

ConfigurationIndices::ConfigurationIndices(int sx_, int sy_, int sz_)
    : sx(sx_), sy(sy_), sz(sz_) {
  if (sx != 1 || sy != 1 || sz != 1) {
    throw ConfigError("only the (+1,+1,+1) assembly mode is supported");
  }
}

double posture_alpha(const PostureTag& tag, const Geometry& g) {
  switch (tag.kind) {
    case PostureKind::Zero:
      return 0.0;
    case PostureKind::Max:
      return g.alpha_max;
    default:
      return g.alpha_min;
  }
}

Posture nominal_posture(const PostureTag& tag, const Geometry& g) {
  if (tag.kind == PostureKind::Zero) {
    return {Vec3::Zero(), Vec3::Constant(g.L)};
  }
  const double alpha = posture_alpha(tag, g);
  const double s = std::sin(alpha);
  const double c = std::cos(alpha);
  Vec3 p = Vec3::Zero();
  Vec3 rho = Vec3::Constant(g.L * c);
  p[index(tag.leg)] = g.L * s;
  rho[index(tag.leg)] = g.L + g.L * s;
  return {p, rho};
}

}  // namespace orthocal
