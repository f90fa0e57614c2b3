#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "orthocal/kinematics.hpp"
#include "orthocal/sensitivity.hpp"

namespace orthocal {

/// One comparator-gauge observation: gauge on `leg`, reading displacements
/// along base-frame `axis` (one of the leg's two transverse axes), taken at
/// a posture, with a 1-based repeat ordinal.
struct GaugeReading {
  LegId leg;
  LegId axis;
  PostureKind posture;
  int repeat;
  double value_mm;

  friend bool operator==(const GaugeReading&, const GaugeReading&) = default;
};

/// Gauge error model: additive zero-mean Gaussian noise followed by rounding
/// to the indicator resolution. resolution_mm == 0 disables quantization.
struct NoiseModel {
  double sigma_mm = 0.01;
  double resolution_mm = 0.01;
  std::uint64_t seed = 0;

  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

/// Mounting orientation of each gauge: +1 when the indicator reads positive
/// toward the + direction of the measured base-frame axis, -1 when flipped.
class GaugeSigns {
 public:
  GaugeSigns() { signs_.fill(+1); }

  int sign(LegId leg, LegId axis) const {
    return signs_[static_cast<std::size_t>(index(leg) * 3 + index(axis))];
  }

  /// Throws ConfigError unless leg != axis and sign is +1 or -1.
  void set(LegId leg, LegId axis, int sign);

  bool all_default() const;

  friend bool operator==(const GaugeSigns&, const GaugeSigns&) = default;

 private:
  std::array<int, 9> signs_;
};

enum class Provenance { Simulated, Ingested };

/// A complete calibration measurement session: for every leg and each of its
/// two transverse axes, readings at the Zero, Max and Min postures with equal
/// repeat counts >= 1.
struct MeasurementSession {
  Geometry geometry;
  std::vector<GaugeReading> readings;
  std::optional<NoiseModel> noise;
  GaugeSigns gauge_signs;
  Provenance provenance = Provenance::Simulated;
};

/// Identification system form: twelve max/min-vs-zero differences, or six
/// max-vs-min differences.
enum class DeviationForm { Full12, Reduced6 };

constexpr int deviation_count(DeviationForm form) {
  return form == DeviationForm::Full12 ? 12 : 6;
}

constexpr const char* form_name(DeviationForm form) {
  return form == DeviationForm::Full12 ? "full12" : "reduced6";
}

std::optional<DeviationForm> parse_form(std::string_view token);

/// Canonical ordering of the full twelve-equation system's right-hand side.
/// The reduced form keeps the max entry of each (leg, axis) pair in the same
/// relative order.
const std::array<ReadingKey, 12>& full12_order();
const std::array<std::pair<LegId, LegId>, 6>& reduced6_order();  // (leg, axis)

/// Entry labels in canonical order, e.g. "dy_x+" (full) or "dy_x" (reduced):
/// measured axis letter first, leg letter after the underscore.
std::vector<std::string> deviation_labels(DeviationForm form);

/// Measured leg-parallelism deviations in canonical order, mm.
struct DeviationSet {
  DeviationForm form;
  std::vector<double> values;

  /// Builds a set from labeled entries in any order (e.g. campaign-log
  /// column labels "dx_y", "dz_x+", ...). The labels must form exactly one
  /// complete form. Throws SchemaError on unknown, duplicate or missing
  /// labels.
  static DeviationSet from_labeled(
      const std::vector<std::pair<std::string, double>>& entries);
};

/// Simulates a full session with exact nonlinear kinematics: the controller
/// drives the encoders to the nominal posture readings, the true offsets
/// displace the mechanism, and a virtual gauge fixed at the leg's zero-
/// posture midpoint station records the transverse coordinates of the leg
/// centerline. Readings are absolute; differences are taken by
/// session_to_deviations.
///
/// Noise draws are seeded from noise->seed and consumed in a fixed
/// (leg, posture, axis, repeat) order, so equal inputs give equal sessions.
MeasurementSession simulate_session(const Geometry& g,
                                    const JointOffsets& true_off, int repeats,
                                    std::optional<NoiseModel> noise = {},
                                    const GaugeSigns& signs = {});

/// Averages repeats per (leg, axis, posture) and assembles the deviation
/// vector: max/min-minus-zero (Full12) or max-minus-min (Reduced6), each
/// multiplied by the per-gauge mounting sign.
///
/// Throws IncompleteSessionError listing missing slots, or reporting
/// unbalanced repeat counts.
DeviationSet session_to_deviations(const MeasurementSession& s,
                                   DeviationForm form);

/// Reads a session file. Format is chosen by extension: ".json" for the
/// structured form (self-contained) and ".csv" for the tabular form, which
/// carries readings only and therefore requires `geometry_hint`.
MeasurementSession parse_session(const std::filesystem::path& path,
                                 std::optional<Geometry> geometry_hint = {});

/// Writes a session file (format by extension, as in parse_session). The
/// structured form round-trips the full data model; the tabular form keeps
/// the readings only.
void write_session(const MeasurementSession& s,
                   const std::filesystem::path& path);

}  // namespace orthocal
