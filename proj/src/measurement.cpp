#include "orthocal/measurement.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace orthocal {

using nlohmann::json;

std::optional<DeviationForm> parse_form(std::string_view token) {
  if (token == "full12") return DeviationForm::Full12;
  if (token == "reduced6") return DeviationForm::Reduced6;
  return std::nullopt;
}

const std::array<ReadingKey, 12>& full12_order() {
  // Measurements grouped by Cartesian plane: the xy pair, the yz pair, the
  // xz pair; within each group max rows precede min rows.
  static const std::array<ReadingKey, 12> order = {{
      {LegId::Y, LegId::X, PostureKind::Max},
      {LegId::X, LegId::Y, PostureKind::Max},
      {LegId::Y, LegId::X, PostureKind::Min},
      {LegId::X, LegId::Y, PostureKind::Min},
      {LegId::Z, LegId::Y, PostureKind::Max},
      {LegId::Y, LegId::Z, PostureKind::Max},
      {LegId::Z, LegId::Y, PostureKind::Min},
      {LegId::Y, LegId::Z, PostureKind::Min},
      {LegId::Z, LegId::X, PostureKind::Max},
      {LegId::X, LegId::Z, PostureKind::Max},
      {LegId::Z, LegId::X, PostureKind::Min},
      {LegId::X, LegId::Z, PostureKind::Min},
  }};
  return order;
}

const std::array<std::pair<LegId, LegId>, 6>& reduced6_order() {
  static const std::array<std::pair<LegId, LegId>, 6> order = {{
      {LegId::Y, LegId::X},
      {LegId::X, LegId::Y},
      {LegId::Z, LegId::Y},
      {LegId::Y, LegId::Z},
      {LegId::Z, LegId::X},
      {LegId::X, LegId::Z},
  }};
  return order;
}

namespace {

std::string entry_label(LegId leg, LegId axis,
                        std::optional<PostureKind> kind) {
  std::string s = "d";
  s += axis_name(axis);
  s += '_';
  s += axis_name(leg);
  if (kind) s += (*kind == PostureKind::Max) ? '+' : '-';
  return s;
}

PostureTag to_posture_tag(PostureKind kind, LegId leg) {
  switch (kind) {
    case PostureKind::Zero:
      return PostureTag::zero();
    case PostureKind::Max:
      return PostureTag::max(leg);
    default:
      return PostureTag::min(leg);
  }
}

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::vector<std::string> deviation_labels(DeviationForm form) {
  std::vector<std::string> labels;
  if (form == DeviationForm::Full12) {
    for (const auto& key : full12_order()) {
      labels.push_back(entry_label(key.leg, key.axis, key.posture));
    }
  } else {
    for (const auto& [leg, axis] : reduced6_order()) {
      labels.push_back(entry_label(leg, axis, std::nullopt));
    }
  }
  return labels;
}

DeviationSet DeviationSet::from_labeled(
    const std::vector<std::pair<std::string, double>>& entries) {
  if (entries.empty()) throw SchemaError("no deviation entries given");
  const bool full = entries.front().first.size() == 5;
  const DeviationForm form =
      full ? DeviationForm::Full12 : DeviationForm::Reduced6;
  const auto labels = deviation_labels(form);

  DeviationSet out{form, std::vector<double>(labels.size(), 0.0)};
  std::vector<bool> seen(labels.size(), false);
  for (const auto& [label, value] : entries) {
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) {
      throw SchemaError("unknown deviation label '" + label + "'");
    }
    const auto pos = static_cast<std::size_t>(it - labels.begin());
    if (seen[pos]) throw SchemaError("duplicate deviation label '" + label + "'");
    if (!std::isfinite(value)) {
      throw SchemaError("deviation '" + label + "' is not finite");
    }
    seen[pos] = true;
    out.values[pos] = value;
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!seen[i]) throw SchemaError("missing deviation label '" + labels[i] + "'");
  }
  return out;
}

void GaugeSigns::set(LegId leg, LegId axis, int sign) {
  if (leg == axis) {
    throw ConfigError("gauge axis must differ from the leg axis");
  }
  if (sign != 1 && sign != -1) {
    throw ConfigError("gauge sign must be +1 or -1");
  }
  signs_[static_cast<std::size_t>(index(leg) * 3 + index(axis))] = sign;
}

bool GaugeSigns::all_default() const {
  return std::all_of(signs_.begin(), signs_.end(),
                     [](int s) { return s == 1; });
}

MeasurementSession simulate_session(const Geometry& g,
                                    const JointOffsets& true_off, int repeats,
                                    std::optional<NoiseModel> noise,
                                    const GaugeSigns& signs) {
  if (repeats < 1) throw ConfigError("repeats must be >= 1");
  if (noise && (!(noise->sigma_mm >= 0.0) || !(noise->resolution_mm >= 0.0))) {
    throw ConfigError("noise sigma and resolution must be non-negative");
  }

  MeasurementSession s{g, {}, noise, signs, Provenance::Simulated};
  s.readings.reserve(static_cast<std::size_t>(3 * 3 * 2 * repeats));

  std::mt19937_64 rng(noise ? noise->seed : 0);
  std::normal_distribution<double> unit_gauss(0.0, 1.0);
  const double sigma = noise ? noise->sigma_mm : 0.0;
  const double res = noise ? noise->resolution_mm : 0.0;

  for (LegId leg : kAllLegs) {
    // The gauge stays fixed between postures at the leg's zero-posture
    // midpoint longitudinal station.
    const double station = g.L / 2.0 + true_off[leg];
    for (PostureKind kind : kAllPostureKinds) {
      const Vec3 rho_cmd = nominal_posture(to_posture_tag(kind, leg), g).rho;
      const Vec3 p = direct_kinematics(rho_cmd, true_off, g);
      const double eta_leg = rho_cmd[index(leg)] + true_off[leg];
      const double den = eta_leg - p[index(leg)];
      if (!(std::abs(den) > 1e-9 * g.L)) throw SingularPostureError(leg);
      // Transverse position of the leg centerline at the station; the joint
      // centre sits on the leg axis, so its transverse coordinates are zero.
      const double along = (eta_leg - station) / den;
      for (LegId axis : transverse_axes(leg)) {
        const double mounted = p[index(axis)] * along * signs.sign(leg, axis);
        for (int r = 1; r <= repeats; ++r) {
          double v = mounted;
          if (sigma > 0.0) v += sigma * unit_gauss(rng);
          if (res > 0.0) v = std::round(v / res) * res;
          s.readings.push_back({leg, axis, kind, r, v});
        }
      }
    }
  }
  return s;
}

DeviationSet session_to_deviations(const MeasurementSession& s,
                                   DeviationForm form) {
  double sum[3][3][3] = {};
  int count[3][3][3] = {};
  for (const auto& r : s.readings) {
    sum[index(r.leg)][index(r.axis)][static_cast<int>(r.posture)] +=
        r.value_mm;
    ++count[index(r.leg)][index(r.axis)][static_cast<int>(r.posture)];
  }

  std::vector<ReadingKey> missing;
  int common_count = -1;
  bool balanced = true;
  for (LegId leg : kAllLegs) {
    for (LegId axis : transverse_axes(leg)) {
      for (PostureKind kind : kAllPostureKinds) {
        const int c = count[index(leg)][index(axis)][static_cast<int>(kind)];
        if (c == 0) {
          missing.push_back({leg, axis, kind});
        } else if (common_count < 0) {
          common_count = c;
        } else if (c != common_count) {
          balanced = false;
        }
      }
    }
  }
  if (!missing.empty()) throw IncompleteSessionError(std::move(missing));
  if (!balanced) {
    throw IncompleteSessionError(
        "session has unbalanced repeat counts across gauge slots", {});
  }

  const auto avg = [&](LegId leg, LegId axis, PostureKind kind) {
    return sum[index(leg)][index(axis)][static_cast<int>(kind)] /
           count[index(leg)][index(axis)][static_cast<int>(kind)];
  };

  DeviationSet out{form, {}};
  out.values.reserve(static_cast<std::size_t>(deviation_count(form)));
  if (form == DeviationForm::Full12) {
    for (const auto& key : full12_order()) {
      const double d =
          avg(key.leg, key.axis, key.posture) -
          avg(key.leg, key.axis, PostureKind::Zero);
      out.values.push_back(s.gauge_signs.sign(key.leg, key.axis) * d);
    }
  } else {
    for (const auto& [leg, axis] : reduced6_order()) {
      const double d = avg(leg, axis, PostureKind::Max) -
                       avg(leg, axis, PostureKind::Min);
      out.values.push_back(s.gauge_signs.sign(leg, axis) * d);
    }
  }
  return out;
}

// --- file formats ---------------------------------------------------------

namespace {

constexpr const char* kCsvHeader = "leg,axis,posture,repeat,value_mm";

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void schema_fail(const std::filesystem::path& path, int line,
                              const std::string& what) {
  std::ostringstream os;
  os << path.string() << ":" << line << ": " << what;
  throw SchemaError(os.str());
}

GaugeReading parse_csv_row(const std::filesystem::path& path, int line_no,
                           const std::string& line) {
  const auto fields = split(line, ',');
  if (fields.size() != 5) {
    schema_fail(path, line_no, "expected 5 fields, got " +
                                   std::to_string(fields.size()));
  }
  const auto leg = parse_axis(fields[0]);
  if (!leg) schema_fail(path, line_no, "bad leg '" + fields[0] + "'");
  const auto axis = parse_axis(fields[1]);
  if (!axis) schema_fail(path, line_no, "bad axis '" + fields[1] + "'");
  if (*axis == *leg) {
    schema_fail(path, line_no, "gauge axis must differ from the leg axis");
  }
  const auto posture = parse_posture(fields[2]);
  if (!posture) schema_fail(path, line_no, "bad posture '" + fields[2] + "'");

  int repeat = 0;
  {
    const auto& f = fields[3];
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), repeat);
    if (ec != std::errc() || ptr != f.data() + f.size() || repeat < 1) {
      schema_fail(path, line_no, "bad repeat '" + f + "'");
    }
  }
  double value = 0.0;
  {
    const auto& f = fields[4];
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
    if (ec != std::errc() || ptr != f.data() + f.size() ||
        !std::isfinite(value)) {
      schema_fail(path, line_no, "bad value '" + f + "'");
    }
  }
  return {*leg, *axis, *posture, repeat, value};
}

MeasurementSession parse_session_csv(const std::filesystem::path& path,
                                     const std::optional<Geometry>& hint) {
  if (!hint) {
    throw ConfigError("tabular session '" + path.string() +
                      "' carries no geometry; supply one externally");
  }
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");

  std::string line;
  if (!std::getline(in, line)) schema_fail(path, 1, "empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) {
    schema_fail(path, 1, std::string("header must be '") + kCsvHeader + "'");
  }

  MeasurementSession s{*hint, {}, std::nullopt, GaugeSigns{},
                       Provenance::Ingested};
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    s.readings.push_back(parse_csv_row(path, line_no, line));
  }
  return s;
}

void write_session_csv(const MeasurementSession& s,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << kCsvHeader << '\n';
  for (const auto& r : s.readings) {
    out << axis_name(r.leg) << ',' << axis_name(r.axis) << ','
        << posture_name(r.posture) << ',' << r.repeat << ','
        << format_double(r.value_mm) << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

// Accessors building a field-path context into every schema message.

const json& require_field(const json& j, const std::string& key,
                          const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + " must be an object");
  const auto it = j.find(key);
  if (it == j.end()) {
    throw SchemaError(where + ": missing required field '" + key + "'");
  }
  return *it;
}

double require_number(const json& j, const std::string& key,
                      const std::string& where) {
  const json& f = require_field(j, key, where);
  if (!f.is_number()) {
    throw SchemaError(where + ".'" + key + "' must be a number");
  }
  const double v = f.get<double>();
  if (!std::isfinite(v)) {
    throw SchemaError(where + ".'" + key + "' must be finite");
  }
  return v;
}

std::string require_string(const json& j, const std::string& key,
                           const std::string& where) {
  const json& f = require_field(j, key, where);
  if (!f.is_string()) {
    throw SchemaError(where + ".'" + key + "' must be a string");
  }
  return f.get<std::string>();
}

MeasurementSession parse_session_json(const std::filesystem::path& path,
                                      const std::optional<Geometry>& hint) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  const std::string where = path.string();
  if (!j.is_object()) throw SchemaError(where + ": top level must be an object");

  const std::string units = require_string(j, "units", where);
  if (units != "mm") {
    throw UnitError(where + ": units must be \"mm\", got \"" + units + "\"");
  }

  const json& jg = require_field(j, "geometry", where);
  Geometry g = [&]() -> Geometry {
    try {
      return Geometry(require_number(jg, "L_mm", where + ".geometry"),
                      require_number(jg, "alpha_max_rad", where + ".geometry"),
                      require_number(jg, "alpha_min_rad", where + ".geometry"));
    } catch (const ConfigError& e) {
      throw SchemaError(where + ".geometry: " + e.what());
    }
  }();
  if (hint && (hint->L != g.L || hint->alpha_max != g.alpha_max ||
               hint->alpha_min != g.alpha_min)) {
    throw ConfigError("session geometry in '" + where +
                      "' differs from the externally supplied geometry");
  }

  MeasurementSession s{g, {}, std::nullopt, GaugeSigns{},
                       Provenance::Ingested};

  if (j.contains("noise") && !j["noise"].is_null()) {
    const json& jn = j["noise"];
    NoiseModel n;
    n.sigma_mm = require_number(jn, "sigma_mm", where + ".noise");
    n.resolution_mm = require_number(jn, "resolution_mm", where + ".noise");
    const json& seed = require_field(jn, "seed", where + ".noise");
    if (!seed.is_number_unsigned()) {
      throw SchemaError(where + ".noise.'seed' must be a non-negative integer");
    }
    n.seed = seed.get<std::uint64_t>();
    s.noise = n;
  }

  if (j.contains("provenance")) {
    const std::string p = require_string(j, "provenance", where);
    if (p == "simulated") {
      s.provenance = Provenance::Simulated;
    } else if (p == "ingested") {
      s.provenance = Provenance::Ingested;
    } else {
      throw SchemaError(where + ": bad provenance '" + p + "'");
    }
  }

  if (j.contains("gauge_signs")) {
    const json& js = j["gauge_signs"];
    if (!js.is_array()) throw SchemaError(where + ".gauge_signs must be an array");
    for (const auto& e : js) {
      const std::string ctx = where + ".gauge_signs[]";
      const auto leg = parse_axis(require_string(e, "leg", ctx));
      const auto axis = parse_axis(require_string(e, "axis", ctx));
      if (!leg || !axis) throw SchemaError(ctx + ": bad leg/axis");
      const json& sign = require_field(e, "sign", ctx);
      if (!sign.is_number_integer()) throw SchemaError(ctx + ": bad sign");
      try {
        s.gauge_signs.set(*leg, *axis, sign.get<int>());
      } catch (const ConfigError& err) {
        throw SchemaError(ctx + ": " + err.what());
      }
    }
  }

  const json& jr = require_field(j, "readings", where);
  if (!jr.is_array()) throw SchemaError(where + ".readings must be an array");
  int idx = 0;
  for (const auto& e : jr) {
    const std::string ctx = where + ".readings[" + std::to_string(idx++) + "]";
    const auto leg = parse_axis(require_string(e, "leg", ctx));
    if (!leg) throw SchemaError(ctx + ": bad leg");
    const auto axis = parse_axis(require_string(e, "axis", ctx));
    if (!axis) throw SchemaError(ctx + ": bad axis");
    if (*axis == *leg) {
      throw SchemaError(ctx + ": gauge axis must differ from the leg axis");
    }
    const auto posture = parse_posture(require_string(e, "posture", ctx));
    if (!posture) throw SchemaError(ctx + ": bad posture");
    const json& jrep = require_field(e, "repeat", ctx);
    if (!jrep.is_number_integer() || jrep.get<int>() < 1) {
      throw SchemaError(ctx + ": repeat must be a positive integer");
    }
    const double value = require_number(e, "value_mm", ctx);
    s.readings.push_back({*leg, *axis, *posture, jrep.get<int>(), value});
  }
  return s;
}

void write_session_json(const MeasurementSession& s,
                        const std::filesystem::path& path) {
  json j;
  j["schema_version"] = 1;
  j["units"] = "mm";
  j["geometry"] = {{"L_mm", s.geometry.L},
                   {"alpha_max_rad", s.geometry.alpha_max},
                   {"alpha_min_rad", s.geometry.alpha_min}};
  if (s.noise) {
    j["noise"] = {{"sigma_mm", s.noise->sigma_mm},
                  {"resolution_mm", s.noise->resolution_mm},
                  {"seed", s.noise->seed}};
  }
  j["provenance"] =
      s.provenance == Provenance::Simulated ? "simulated" : "ingested";
  if (!s.gauge_signs.all_default()) {
    json signs = json::array();
    for (LegId leg : kAllLegs) {
      for (LegId axis : transverse_axes(leg)) {
        if (s.gauge_signs.sign(leg, axis) != 1) {
          signs.push_back({{"leg", std::string(1, axis_name(leg))},
                           {"axis", std::string(1, axis_name(axis))},
                           {"sign", s.gauge_signs.sign(leg, axis)}});
        }
      }
    }
    j["gauge_signs"] = signs;
  }
  json readings = json::array();
  for (const auto& r : s.readings) {
    readings.push_back({{"leg", std::string(1, axis_name(r.leg))},
                        {"axis", std::string(1, axis_name(r.axis))},
                        {"posture", posture_name(r.posture)},
                        {"repeat", r.repeat},
                        {"value_mm", r.value_mm}});
  }
  j["readings"] = std::move(readings);

  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

enum class FileKind { Json, Csv };

FileKind file_kind(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (ext == ".json") return FileKind::Json;
  if (ext == ".csv") return FileKind::Csv;
  throw ConfigError("unsupported session file extension '" + ext +
                    "' (expected .json or .csv)");
}

}  // namespace

MeasurementSession parse_session(const std::filesystem::path& path,
                                 std::optional<Geometry> geometry_hint) {
  return file_kind(path) == FileKind::Json
             ? parse_session_json(path, geometry_hint)
             : parse_session_csv(path, geometry_hint);
}

void write_session(const MeasurementSession& s,
                   const std::filesystem::path& path) {
  if (file_kind(path) == FileKind::Json) {
    write_session_json(s, path);
  } else {
    write_session_csv(s, path);
  }
}

}  // namespace orthocal
