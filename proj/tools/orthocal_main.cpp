// Command-line front end: simulate measurement sessions, identify joint
// offsets from session files, and validate a calibration against a
// post-compensation session.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "orthocal/calibration.hpp"

namespace {

using namespace orthocal;
using nlohmann::json;

// Exit codes: 0 ok, 2 config, 3 schema, 4 incomplete session, 5 degenerate
// geometry, 6 I/O, 1 internal.
int exit_code_for(const Error& e) {
  if (dynamic_cast<const SchemaError*>(&e)) return 3;
  if (dynamic_cast<const IncompleteSessionError*>(&e)) return 4;
  if (dynamic_cast<const DegenerateGeometryError*>(&e)) return 5;
  if (dynamic_cast<const IoError*>(&e)) return 6;
  return 2;  // config family: ConfigError, FormMismatchError, kinematic errors
}

const char* error_class(const Error& e) {
  if (dynamic_cast<const SchemaError*>(&e)) return "schema";
  if (dynamic_cast<const IncompleteSessionError*>(&e)) {
    return "incomplete-session";
  }
  if (dynamic_cast<const DegenerateGeometryError*>(&e)) {
    return "degenerate-geometry";
  }
  if (dynamic_cast<const IoError*>(&e)) return "io";
  return "config";
}

Geometry load_geometry(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  const auto field = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number()) {
      throw SchemaError(path.string() + ": missing or non-numeric field '" +
                        std::string(key) + "'");
    }
    return j[key].get<double>();
  };
  return Geometry(field("L_mm"), field("alpha_max_rad"),
                  field("alpha_min_rad"));
}

JointOffsets parse_offsets(const std::string& text) {
  double v[3];
  char extra;
  if (std::sscanf(text.c_str(), "%lf,%lf,%lf%c", &v[0], &v[1], &v[2],
                  &extra) != 3) {
    throw ConfigError("offsets must be three comma-separated numbers (mm), "
                      "got '" + text + "'");
  }
  return {v[0], v[1], v[2]};
}

GaugeSigns parse_flips(const std::vector<std::string>& flips) {
  GaugeSigns signs;
  for (const auto& f : flips) {
    if (f.size() != 2) {
      throw ConfigError("gauge flip must be two axis letters, e.g. 'xy', got '" +
                        f + "'");
    }
    const auto leg = parse_axis(f.substr(0, 1));
    const auto axis = parse_axis(f.substr(1, 1));
    if (!leg || !axis) throw ConfigError("bad gauge flip '" + f + "'");
    signs.set(*leg, *axis, -1);
  }
  return signs;
}

DeviationForm parse_form_flag(const std::string& text) {
  const auto form = parse_form(text);
  if (!form) {
    throw ConfigError("form must be 'full12' or 'reduced6', got '" + text +
                      "'");
  }
  return *form;
}

void print_deviations(const DeviationSet& d, const char* title) {
  std::printf("%s (%s):\n", title, form_name(d.form));
  const auto labels = deviation_labels(d.form);
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    std::printf("  %-6s = %+.9g mm\n", labels[i].c_str(), d.values[i]);
  }
}

struct SimulateOptions {
  std::string geometry_path;
  std::string offsets_text;
  std::string out_path;
  std::string form_text = "reduced6";
  int repeats = 3;
  bool noise = false;
  double noise_sigma = 0.01;
  double noise_res = 0.01;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> flips;
};

int run_simulate(const SimulateOptions& opt) {
  const Geometry g = load_geometry(opt.geometry_path);
  const JointOffsets off = parse_offsets(opt.offsets_text);
  const GaugeSigns signs = parse_flips(opt.flips);
  const DeviationForm form = parse_form_flag(opt.form_text);

  std::optional<NoiseModel> noise;
  if (opt.noise) {
    if (!opt.seed) {
      throw ConfigError("--seed is required when noise is enabled");
    }
    noise = NoiseModel{opt.noise_sigma, opt.noise_res, *opt.seed};
  }

  const auto session = simulate_session(g, off, opt.repeats, noise, signs);
  write_session(session, opt.out_path);
  std::printf("wrote %zu readings to %s\n", session.readings.size(),
              opt.out_path.c_str());

  const auto noiseless = simulate_session(g, off, 1, std::nullopt, signs);
  print_deviations(session_to_deviations(noiseless, form),
                   "noiseless deviations");
  return 0;
}

struct CalibrateOptions {
  std::string session_path;
  std::string geometry_path;
  std::string form_text = "reduced6";
  std::string out_path;
};

int run_calibrate(const CalibrateOptions& opt) {
  std::optional<Geometry> hint;
  if (!opt.geometry_path.empty()) hint = load_geometry(opt.geometry_path);
  const auto session = parse_session(opt.session_path, hint);
  const DeviationForm form = parse_form_flag(opt.form_text);

  const auto d = session_to_deviations(session, form);
  const auto r = identify_offsets(d, session.geometry);
  std::fputs(format_report(r).c_str(), stdout);
  if (!opt.out_path.empty()) {
    write_report(r, opt.out_path);
    std::printf("wrote report to %s\n", opt.out_path.c_str());
  }
  return 0;
}

struct ValidateOptions {
  std::string report_path;
  std::string session_path;
  std::string out_path;
};

int run_validate(const ValidateOptions& opt) {
  const CalibrationResult r = load_report(opt.report_path);
  const auto session = parse_session(opt.session_path, r.geometry);

  const auto measured = session_to_deviations(session, r.form);
  const DeviationSet predicted{r.form, r.residuals};
  const auto v = validate(measured, predicted, r.rms_before);
  std::fputs(format_validation(v, measured, predicted).c_str(), stdout);

  if (!opt.out_path.empty()) {
    json j;
    j["schema_version"] = 1;
    j["kind"] = "validation_report";
    j["units"] = "mm";
    j["entry_errors_mm"] = v.entry_errors;
    j["rms_measured_mm"] = v.rms_measured;
    j["rms_predicted_mm"] = v.rms_predicted;
    j["agreement_ratio"] = v.agreement_ratio;
    if (v.improvement_ratio) j["improvement_ratio"] = *v.improvement_ratio;
    std::ofstream out(opt.out_path);
    if (!out) {
      throw IoError("cannot open '" + opt.out_path + "' for writing");
    }
    out << j.dump(2) << '\n';
    std::printf("wrote validation to %s\n", opt.out_path.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "orthocal: joint-offset calibration toolkit for orthogonal 3-DOF "
      "translational parallel manipulators"};
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand(
      "simulate", "synthesize a gauge measurement session file");
  simulate->add_option("--geometry", sim.geometry_path,
                       "geometry config file (json)")
      ->required();
  simulate->add_option("--offsets", sim.offsets_text,
                       "true encoder offsets dx,dy,dz in mm")
      ->required();
  simulate->add_option("--out", sim.out_path, "session file to write (.json or .csv)")
      ->required();
  simulate->add_option("--repeats", sim.repeats, "repeats per gauge/posture");
  simulate->add_option("--form", sim.form_text,
                       "deviation form for the echo: full12|reduced6");
  simulate->add_flag("--noise", sim.noise, "enable the gauge noise model");
  simulate->add_option("--noise-sigma", sim.noise_sigma,
                       "gauge noise std deviation, mm");
  simulate->add_option("--noise-res", sim.noise_res,
                       "gauge resolution (quantization step), mm");
  std::uint64_t seed_value = 0;
  auto* seed_opt = simulate->add_option("--seed", seed_value,
                                        "noise seed (required with --noise)");
  simulate->add_option("--flip-gauge", sim.flips,
                       "mount a gauge flipped, e.g. 'xy' for the x-leg "
                       "y-gauge (repeatable)");

  CalibrateOptions cal;
  auto* calibrate = app.add_subcommand(
      "calibrate", "identify joint offsets from a session file");
  calibrate->add_option("--session", cal.session_path, "session file")
      ->required();
  calibrate->add_option("--geometry", cal.geometry_path,
                        "geometry config file (required for .csv sessions)");
  calibrate->add_option("--form", cal.form_text,
                        "identification form: full12|reduced6");
  calibrate->add_option("--out", cal.out_path, "report file to write (json)");

  ValidateOptions val;
  auto* validate_cmd = app.add_subcommand(
      "validate",
      "compare a post-compensation session against a calibration report");
  validate_cmd->add_option("--report", val.report_path,
                           "calibration report (json)")
      ->required();
  validate_cmd->add_option("--session", val.session_path,
                           "post-compensation session file")
      ->required();
  validate_cmd->add_option("--out", val.out_path,
                           "validation file to write (json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (seed_opt->count() > 0) sim.seed = seed_value;
    if (app.got_subcommand(simulate)) return run_simulate(sim);
    if (app.got_subcommand(calibrate)) return run_calibrate(cal);
    return run_validate(val);
  } catch (const Error& e) {
    std::cerr << "error[" << error_class(e) << "]: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << '\n';
    return 1;
  }
}
