#include "orthocal/calibration.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace orthocal {

using nlohmann::json;

namespace {

std::string strf(const char* fmt, ...) {
  va_list args;
  va_start(args, fmt);
  char buf[512];
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

void check_form_size(const DeviationSet& d) {
  if (static_cast<int>(d.values.size()) != deviation_count(d.form)) {
    throw FormMismatchError(strf(
        "deviation vector has %zu entries but form %s needs %d",
        d.values.size(), form_name(d.form), deviation_count(d.form)));
  }
}

Eigen::Map<const Eigen::VectorXd> as_vector(const DeviationSet& d) {
  return {d.values.data(), static_cast<Eigen::Index>(d.values.size())};
}

}  // namespace

DesignMatrix build_design_matrix(const Geometry& g, DeviationForm form) {
  const DeviationCoeffs max_c = deviation_coeffs(g.alpha_max);
  const DeviationCoeffs min_c = deviation_coeffs(g.alpha_min);

  DesignMatrix a = DesignMatrix::Zero(deviation_count(form), 3);
  if (form == DeviationForm::Full12) {
    const auto& order = full12_order();
    for (std::size_t i = 0; i < order.size(); ++i) {
      const auto& key = order[i];
      const DeviationCoeffs& k =
          key.posture == PostureKind::Max ? max_c : min_c;
      a(static_cast<Eigen::Index>(i), index(key.leg)) = k.c;
      a(static_cast<Eigen::Index>(i), index(key.axis)) = k.b;
    }
  } else {
    const auto& order = reduced6_order();
    for (std::size_t i = 0; i < order.size(); ++i) {
      const auto& [leg, axis] = order[i];
      a(static_cast<Eigen::Index>(i), index(leg)) = max_c.c - min_c.c;
      a(static_cast<Eigen::Index>(i), index(axis)) = max_c.b - min_c.b;
    }
  }

  const Matrix3 ata = a.transpose() * a;
  const Eigen::SelfAdjointEigenSolver<Matrix3> es(ata);
  const double lmin = es.eigenvalues()(0);
  const double lmax = es.eigenvalues()(2);
  if (!(lmax > 0.0) || lmin <= lmax * 1e-12) {
    throw DegenerateGeometryError(
        "identification system is rank deficient for this geometry/form "
        "(alpha_max and alpha_min coincide?)");
  }
  return a;
}

double rms(std::span<const double> values) {
  if (values.empty()) throw EmptyInputError("rms of an empty list");
  double sq = 0.0;
  for (double v : values) sq += v * v;
  return std::sqrt(sq / static_cast<double>(values.size()));
}

CalibrationResult identify_offsets(const DeviationSet& d, const Geometry& g) {
  check_form_size(d);
  const DesignMatrix a = build_design_matrix(g, d.form);
  const auto dv = as_vector(d);
  const Eigen::Index m = a.rows();

  const Matrix3 ata = a.transpose() * a;
  const Vec3 atd = a.transpose() * dv;
  const Eigen::SelfAdjointEigenSolver<Matrix3> es(ata);
  const double cond = es.eigenvalues()(2) / es.eigenvalues()(0);

  const Vec3 x = ata.ldlt().solve(atd);
  const Eigen::VectorXd res = dv - a * x;
  const int dof = static_cast<int>(m) - 3;

  CalibrationResult r{JointOffsets::from_vec(x),
                      std::vector<double>(res.data(), res.data() + m),
                      res.norm() / std::sqrt(static_cast<double>(dof)),
                      rms(d.values),
                      0.0,
                      dof,
                      cond,
                      d.form,
                      g};
  r.rms_predicted = rms(r.residuals);
  return r;
}

DeviationSet predict_improvement(const DeviationSet& d,
                                 const CalibrationResult& r) {
  if (d.form != r.form) {
    throw FormMismatchError(strf("deviation form %s does not match result form %s",
                                 form_name(d.form), form_name(r.form)));
  }
  check_form_size(d);
  const DesignMatrix a = build_design_matrix(r.geometry, d.form);
  const Eigen::VectorXd pred = as_vector(d) - a * r.offsets.vec();
  return {d.form, std::vector<double>(pred.data(), pred.data() + pred.size())};
}

ValidationReport validate(const DeviationSet& measured,
                          const DeviationSet& predicted,
                          std::optional<double> rms_before) {
  if (measured.form != predicted.form) {
    throw FormMismatchError(
        strf("measured form %s does not match predicted form %s",
             form_name(measured.form), form_name(predicted.form)));
  }
  check_form_size(measured);
  check_form_size(predicted);

  ValidationReport v;
  v.entry_errors.resize(measured.values.size());
  for (std::size_t i = 0; i < measured.values.size(); ++i) {
    v.entry_errors[i] = measured.values[i] - predicted.values[i];
  }
  v.rms_measured = rms(measured.values);
  v.rms_predicted = rms(predicted.values);
  if (v.rms_predicted > 0.0) {
    v.agreement_ratio = v.rms_measured / v.rms_predicted;
  } else {
    v.agreement_ratio = v.rms_measured == 0.0
                            ? 1.0
                            : std::numeric_limits<double>::infinity();
  }
  if (rms_before) {
    v.improvement_ratio = v.rms_measured > 0.0
                              ? *rms_before / v.rms_measured
                              : std::numeric_limits<double>::infinity();
  }
  return v;
}

std::string format_report(const CalibrationResult& r) {
  std::ostringstream os;
  os << "calibration report (schema 1)\n";
  os << strf("geometry: L = %.3f mm, alpha_max = %.6f rad, alpha_min = %.6f rad\n",
             r.geometry.L, r.geometry.alpha_max, r.geometry.alpha_min);
  os << strf("form: %s (m = %d, dof = %d)\n", form_name(r.form),
             deviation_count(r.form), r.dof);
  os << strf("identified offsets (mm): dx = %+.6f, dy = %+.6f, dz = %+.6f\n",
             r.offsets.dx, r.offsets.dy, r.offsets.dz);
  os << strf("sigma_hat = %.6f mm  [sigma_hat = |residuals|_2 / sqrt(m - 3)]\n",
             r.sigma_hat);
  os << strf("rms before = %.2f mm, rms predicted after compensation = %.2f mm\n",
             r.rms_before, r.rms_predicted);
  os << strf("condition number (A^T A): %.3g\n", r.condition_number);
  os << "residuals (mm):\n";
  const auto labels = deviation_labels(r.form);
  for (std::size_t i = 0; i < r.residuals.size(); ++i) {
    os << strf("  %-6s = %+.6f\n", labels[i].c_str(), r.residuals[i]);
  }
  os << "compensation rule: command rho_i' = rho_i - drho_i "
        "(subtract the identified offsets from the commanded joint "
        "coordinates)\n";
  return os.str();
}

std::string report_to_json(const CalibrationResult& r) {
  json j;
  j["schema_version"] = 1;
  j["kind"] = "calibration_report";
  j["units"] = "mm";
  j["geometry"] = {{"L_mm", r.geometry.L},
                   {"alpha_max_rad", r.geometry.alpha_max},
                   {"alpha_min_rad", r.geometry.alpha_min}};
  j["form"] = form_name(r.form);
  j["offsets_mm"] = {
      {"dx", r.offsets.dx}, {"dy", r.offsets.dy}, {"dz", r.offsets.dz}};
  j["residuals_mm"] = r.residuals;
  j["sigma_hat_mm"] = r.sigma_hat;
  j["rms_before_mm"] = r.rms_before;
  j["rms_predicted_mm"] = r.rms_predicted;
  j["dof"] = r.dof;
  j["condition_number"] = r.condition_number;
  j["compensation"] = "rho_commanded' = rho - drho";
  return j.dump(2) + "\n";
}

namespace {

double get_number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw SchemaError(where + ": missing or non-numeric field '" + key + "'");
  }
  return j[key].get<double>();
}

}  // namespace

CalibrationResult report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("calibration report: ") + e.what());
  }
  const std::string where = "calibration report";
  if (!j.is_object()) throw SchemaError(where + ": top level must be an object");
  if (!j.contains("schema_version") || j["schema_version"] != 1) {
    throw SchemaError(where + ": unsupported or missing schema_version");
  }
  if (!j.contains("geometry") || !j["geometry"].is_object()) {
    throw SchemaError(where + ": missing geometry");
  }
  const json& jg = j["geometry"];
  Geometry g = [&]() -> Geometry {
    try {
      return Geometry(get_number(jg, "L_mm", where),
                      get_number(jg, "alpha_max_rad", where),
                      get_number(jg, "alpha_min_rad", where));
    } catch (const ConfigError& e) {
      throw SchemaError(where + ": " + e.what());
    }
  }();
  if (!j.contains("form") || !j["form"].is_string()) {
    throw SchemaError(where + ": missing form");
  }
  const auto form = parse_form(j["form"].get<std::string>());
  if (!form) {
    throw SchemaError(where + ": bad form '" + j["form"].get<std::string>() +
                      "'");
  }
  if (!j.contains("offsets_mm") || !j["offsets_mm"].is_object()) {
    throw SchemaError(where + ": missing offsets_mm");
  }
  const json& jo = j["offsets_mm"];
  JointOffsets offsets(get_number(jo, "dx", where), get_number(jo, "dy", where),
                       get_number(jo, "dz", where));
  if (!j.contains("residuals_mm") || !j["residuals_mm"].is_array()) {
    throw SchemaError(where + ": missing residuals_mm");
  }
  std::vector<double> residuals;
  for (const auto& e : j["residuals_mm"]) {
    if (!e.is_number()) throw SchemaError(where + ": bad residual entry");
    residuals.push_back(e.get<double>());
  }
  if (static_cast<int>(residuals.size()) != deviation_count(*form)) {
    throw SchemaError(where + ": residual count does not match form");
  }
  CalibrationResult r{offsets,
                      std::move(residuals),
                      get_number(j, "sigma_hat_mm", where),
                      get_number(j, "rms_before_mm", where),
                      get_number(j, "rms_predicted_mm", where),
                      static_cast<int>(get_number(j, "dof", where)),
                      get_number(j, "condition_number", where),
                      *form,
                      g};
  return r;
}

CalibrationResult load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return report_from_json(buf.str());
}

void write_report(const CalibrationResult& r,
                  const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << report_to_json(r);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string format_validation(const ValidationReport& v,
                              const DeviationSet& measured,
                              const DeviationSet& predicted) {
  std::ostringstream os;
  os << "validation report\n";
  os << strf("%-8s %12s %12s %12s\n", "entry", "predicted", "measured",
             "error (mm)");
  const auto labels = deviation_labels(measured.form);
  for (std::size_t i = 0; i < v.entry_errors.size(); ++i) {
    os << strf("%-8s %+12.4f %+12.4f %+12.4f\n", labels[i].c_str(),
               predicted.values[i], measured.values[i], v.entry_errors[i]);
  }
  os << strf("rms measured = %.2f mm\n", v.rms_measured);
  os << strf("rms predicted = %.2f mm\n", v.rms_predicted);
  os << strf("agreement ratio (measured/predicted rms) = %.2f\n",
             v.agreement_ratio);
  if (v.improvement_ratio) {
    os << strf("improvement ratio (before/after rms) = %.2f\n",
               *v.improvement_ratio);
  }
  return os.str();
}

}  // namespace orthocal
