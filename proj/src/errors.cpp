#include "orthocal/errors.hpp"

#include <sstream>

namespace orthocal {

namespace {

std::string unreachable_msg(LegId axis, double radicand) {
  std::ostringstream os;
  os << "TCP unreachable: radicand of the " << axis_name(axis)
     << "-axis square root is " << radicand << " mm^2";
  return os.str();
}

std::string missing_msg(const std::vector<ReadingKey>& missing) {
  std::ostringstream os;
  os << "session incomplete; missing readings (leg/axis/posture):";
  for (const auto& key : missing) os << ' ' << reading_key_name(key);
  return os.str();
}

}  // namespace

UnreachableError::UnreachableError(LegId axis, double radicand_mm2)
    : Error(unreachable_msg(axis, radicand_mm2)),
      axis_(axis),
      radicand_(radicand_mm2) {}

SingularAxisError::SingularAxisError(LegId axis)
    : Error(std::string("offset-corrected joint coordinate on the ") +
            axis_name(axis) + "-axis is zero"),
      axis_(axis) {}

UnassemblableError::UnassemblableError(double discriminant)
    : Error("no real direct-kinematics solution (discriminant " +
            std::to_string(discriminant) + ")"),
      discriminant_(discriminant) {}

SingularPostureError::SingularPostureError(std::optional<LegId> axis)
    : Error(axis ? std::string("singular posture: p and eta coincide on the ") +
                       axis_name(*axis) + "-axis"
                 : std::string("singular posture: Jacobian not invertible")),
      axis_(axis) {}

IncompleteSessionError::IncompleteSessionError(std::vector<ReadingKey> missing)
    : Error(missing_msg(missing)), missing_(std::move(missing)) {}

IncompleteSessionError::IncompleteSessionError(std::string message,
                                               std::vector<ReadingKey> missing)
    : Error(std::move(message)), missing_(std::move(missing)) {}

}  // namespace orthocal
