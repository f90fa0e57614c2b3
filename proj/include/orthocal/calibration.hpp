#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>

#include "orthocal/measurement.hpp"

namespace orthocal {

/// m x 3 sensitivity matrix of the identification system (m = 12 or 6),
/// rows bound to the canonical DeviationSet order.
using DesignMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3>;

/// Builds the design matrix for a geometry: each row carries the c
/// coefficient in the leg column and the b coefficient in the measured-axis
/// column, with (b, c) taken at alpha_max for '+' rows and alpha_min for '-'
/// rows; reduced rows are the differences of the corresponding pairs.
///
/// Throws DegenerateGeometryError when the matrix is rank deficient (the
/// reduced form with alpha_max == alpha_min).
DesignMatrix build_design_matrix(const Geometry& g, DeviationForm form);

/// Root mean square of a list of values, mm. Throws EmptyInputError.
double rms(std::span<const double> values);

/// Least-squares identification output and diagnostics.
struct CalibrationResult {
  JointOffsets offsets;           ///< identified encoder offsets, mm
  std::vector<double> residuals;  ///< d - A*offsets, canonical order, mm
  double sigma_hat;               ///< |residuals|_2 / sqrt(m - 3), mm
  double rms_before;              ///< rms of the input deviations, mm
  double rms_predicted;           ///< rms of the residuals, mm
  int dof;                        ///< m - 3
  double condition_number;        ///< cond(A^T A)
  DeviationForm form;
  Geometry geometry;
};

/// Solves A * drho = d in the least-squares sense through the 3x3 normal
/// equations (symmetric LDL^T factorization). The identified offsets are the
/// values to add to the encoder zero positions; compensation commands
/// rho' = rho - drho.
///
/// Throws DegenerateGeometryError when A^T A is numerically rank deficient.
CalibrationResult identify_offsets(const DeviationSet& d, const Geometry& g);

/// Model-predicted post-calibration deviations: d - A * offsets, same form
/// and ordering as d. Throws FormMismatchError when d's form differs from
/// the result's.
DeviationSet predict_improvement(const DeviationSet& d,
                                 const CalibrationResult& r);

/// Outcome of comparing a measured post-calibration session against the
/// model prediction.
struct ValidationReport {
  std::vector<double> entry_errors;  ///< measured - predicted, mm
  double rms_measured;
  double rms_predicted;
  double agreement_ratio;  ///< rms_measured / rms_predicted (1 = perfect)
  std::optional<double> improvement_ratio;  ///< rms_before / rms_measured
};

/// Per-entry errors and rms comparison of measured vs predicted deviations.
/// When the pre-calibration rms is supplied the report also carries the
/// before/after improvement ratio. Throws FormMismatchError.
ValidationReport validate(const DeviationSet& measured,
                          const DeviationSet& predicted,
                          std::optional<double> rms_before = std::nullopt);

/// Human-readable calibration report (states the sigma_hat definition and
/// the compensation rule).
std::string format_report(const CalibrationResult& r);

/// Structured report serialization (schema_version 1).
std::string report_to_json(const CalibrationResult& r);
CalibrationResult report_from_json(const std::string& text);
CalibrationResult load_report(const std::filesystem::path& path);
void write_report(const CalibrationResult& r,
                  const std::filesystem::path& path);

/// Human-readable validation summary; rms lines use two decimals.
std::string format_validation(const ValidationReport& v,
                              const DeviationSet& measured,
                              const DeviationSet& predicted);

}  // namespace orthocal
