#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "orthocal/types.hpp"

namespace orthocal {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid geometry, run configuration, or unsupported assembly mode.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// File or stream I/O failure.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed session or report file. The message carries line/field context.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// File declares units other than millimetres.
class UnitError : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

/// Requested TCP position lies outside the reachable workspace.
class UnreachableError : public Error {
 public:
  UnreachableError(LegId axis, double radicand_mm2);
  LegId axis() const { return axis_; }
  double radicand() const { return radicand_; }

 private:
  LegId axis_;
  double radicand_;
};

/// Offset-corrected joint coordinate is zero; the direct problem degenerates.
class SingularAxisError : public Error {
 public:
  explicit SingularAxisError(LegId axis);
  LegId axis() const { return axis_; }

 private:
  LegId axis_;
};

/// No real solution of the direct kinematics for the given joint coordinates.
class UnassemblableError : public Error {
 public:
  explicit UnassemblableError(double discriminant);
  double discriminant() const { return discriminant_; }

 private:
  double discriminant_;
};

/// Jacobian does not exist at the posture (p_i == eta_i, or singular matrix).
class SingularPostureError : public Error {
 public:
  explicit SingularPostureError(std::optional<LegId> axis = std::nullopt);
  std::optional<LegId> axis() const { return axis_; }

 private:
  std::optional<LegId> axis_;
};

/// Session lacks readings for one or more (leg, axis, posture) slots, or the
/// repeat counts are unbalanced.
class IncompleteSessionError : public Error {
 public:
  explicit IncompleteSessionError(std::vector<ReadingKey> missing);
  IncompleteSessionError(std::string message, std::vector<ReadingKey> missing);
  const std::vector<ReadingKey>& missing() const { return missing_; }

 private:
  std::vector<ReadingKey> missing_;
};

/// Identification system is rank deficient (e.g. alpha_max == alpha_min in
/// the reduced form).
class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

/// Deviation-set forms of two operands disagree.
class FormMismatchError : public Error {
 public:
  using Error::Error;
};

/// An aggregate operation received no data.
class EmptyInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace orthocal
