#pragma once

#include <Eigen/Core>

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace orthocal {

using Vec3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;

/// Actuated axis / leg of the manipulator. Also names the base-frame axis a
/// gauge measures along.
enum class LegId : int { X = 0, Y = 1, Z = 2 };

inline constexpr std::array<LegId, 3> kAllLegs = {LegId::X, LegId::Y, LegId::Z};

constexpr int index(LegId leg) { return static_cast<int>(leg); }

/// The two non-leg axes, in fixed {x, y, z} order.
constexpr std::array<LegId, 2> transverse_axes(LegId leg) {
  switch (leg) {
    case LegId::X:
      return {LegId::Y, LegId::Z};
    case LegId::Y:
      return {LegId::X, LegId::Z};
    default:
      return {LegId::X, LegId::Y};
  }
}

constexpr char axis_name(LegId leg) {
  switch (leg) {
    case LegId::X:
      return 'x';
    case LegId::Y:
      return 'y';
    default:
      return 'z';
  }
}

inline std::optional<LegId> parse_axis(std::string_view token) {
  if (token == "x") return LegId::X;
  if (token == "y") return LegId::Y;
  if (token == "z") return LegId::Z;
  return std::nullopt;
}

/// Posture class of a test configuration: the mechanical zero or the
/// maximum/minimum displacement along one Cartesian axis.
enum class PostureKind : int { Zero = 0, Max = 1, Min = 2 };

inline constexpr std::array<PostureKind, 3> kAllPostureKinds = {
    PostureKind::Zero, PostureKind::Max, PostureKind::Min};

constexpr const char* posture_name(PostureKind kind) {
  switch (kind) {
    case PostureKind::Zero:
      return "zero";
    case PostureKind::Max:
      return "max";
    default:
      return "min";
  }
}

inline std::optional<PostureKind> parse_posture(std::string_view token) {
  if (token == "zero") return PostureKind::Zero;
  if (token == "max") return PostureKind::Max;
  if (token == "min") return PostureKind::Min;
  return std::nullopt;
}

/// Identifies one gauge observation slot: which leg is probed, which
/// base-frame axis the gauge reads, and at which posture.
struct ReadingKey {
  LegId leg;
  LegId axis;
  PostureKind posture;

  friend bool operator==(const ReadingKey&, const ReadingKey&) = default;
};

inline std::string reading_key_name(const ReadingKey& key) {
  std::string s;
  s += axis_name(key.leg);
  s += '/';
  s += axis_name(key.axis);
  s += '/';
  s += posture_name(key.posture);
  return s;
}

}  // namespace orthocal
