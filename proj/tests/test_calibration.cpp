#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "campaign_data.hpp"
#include "orthocal/calibration.hpp"
#include "test_support.hpp"

using namespace orthocal;
using testutil::bench_geometry;

namespace {

DeviationSet campaign_set(const std::array<double, 6>& row) {
  std::vector<std::pair<std::string, double>> entries;
  for (std::size_t i = 0; i < row.size(); ++i) {
    entries.emplace_back(campaign::kColumns[i], row[i]);
  }
  return DeviationSet::from_labeled(entries);
}

DeviationSet consistent_set(const Geometry& g, DeviationForm form,
                            const Vec3& x) {
  const DesignMatrix a = build_design_matrix(g, form);
  const Eigen::VectorXd d = a * x;
  return {form, std::vector<double>(d.data(), d.data() + d.size())};
}

}  // namespace

TEST_CASE("design matrix rows follow the coefficient pattern") {
  const Geometry g = bench_geometry();
  const auto kmax = deviation_coeffs(g.alpha_max);
  const auto kmin = deviation_coeffs(g.alpha_min);

  const DesignMatrix full = build_design_matrix(g, DeviationForm::Full12);
  REQUIRE(full.rows() == 12);
  // row 0: dx_y+ = b1*dx + c1*dy
  CHECK(full(0, 0) == kmax.b);
  CHECK(full(0, 1) == kmax.c);
  CHECK(full(0, 2) == 0.0);
  // row 1: dy_x+ = c1*dx + b1*dy
  CHECK(full(1, 0) == kmax.c);
  CHECK(full(1, 1) == kmax.b);
  CHECK(full(1, 2) == 0.0);
  // row 9: dz_x+ = c1*dx + b1*dz
  CHECK(full(9, 0) == kmax.c);
  CHECK(full(9, 1) == 0.0);
  CHECK(full(9, 2) == kmax.b);
  // min rows carry the alpha_min coefficients, e.g. row 3: dy_x-
  CHECK(full(3, 0) == kmin.c);
  CHECK(full(3, 1) == kmin.b);

  // every row has exactly one b and one c coefficient
  for (int i = 0; i < 12; ++i) {
    int zeros = 0;
    for (int j = 0; j < 3; ++j) zeros += full(i, j) == 0.0 ? 1 : 0;
    CHECK(zeros == 1);
  }

  const DesignMatrix reduced = build_design_matrix(g, DeviationForm::Reduced6);
  REQUIRE(reduced.rows() == 6);
  // row 1: dy_x = (c1-c2)*dx + (b1-b2)*dy, the difference of full rows 1 and 3
  CHECK(reduced(1, 0) == doctest::Approx(kmax.c - kmin.c).epsilon(1e-15));
  CHECK(reduced(1, 1) == doctest::Approx(kmax.b - kmin.b).epsilon(1e-15));
  CHECK(reduced(1, 2) == 0.0);
}

TEST_CASE("coinciding posture angles degenerate the reduced form only") {
  const Geometry g(300.0, 0.45, 0.45);
  CHECK_THROWS_AS(build_design_matrix(g, DeviationForm::Reduced6),
                  DegenerateGeometryError);
  CHECK_NOTHROW(build_design_matrix(g, DeviationForm::Full12));
}

TEST_CASE("rms of the campaign rows") {
  CHECK(std::abs(rms(campaign::kTuned) - 0.62) <= 0.005);
  CHECK(std::abs(rms(campaign::kCalibrated) - 0.21) <= 0.005);
  const std::vector<double> zeros(6, 0.0);
  CHECK(rms(zeros) == 0.0);
  CHECK_THROWS_AS(rms(std::span<const double>{}), EmptyInputError);
}

TEST_CASE("a consistent system is solved exactly") {
  const Geometry g = bench_geometry();
  const Vec3 x(1.0, 2.0, 3.0);
  for (auto form : {DeviationForm::Full12, DeviationForm::Reduced6}) {
    const auto d = consistent_set(g, form, x);
    const auto r = identify_offsets(d, g);
    CHECK((r.offsets.vec() - x).cwiseAbs().maxCoeff() <= 1e-9);
    for (double res : r.residuals) CHECK(std::abs(res) <= 1e-12);
    CHECK(r.sigma_hat <= 1e-12);
    CHECK(r.rms_predicted <= 1e-12);
    CHECK(r.dof == deviation_count(form) - 3);
    CHECK(std::isfinite(r.condition_number));
    CHECK(r.condition_number >= 1.0);
  }
}

TEST_CASE("noiseless simulated sessions are solved back to the true offsets") {
  const Geometry g = bench_geometry();
  std::mt19937_64 rng(9001);
  for (int trial = 0; trial < 20; ++trial) {
    const JointOffsets off = testutil::random_offsets(rng, 1e-3 * g.L);
    const auto s = simulate_session(g, off, 1);
    for (auto form : {DeviationForm::Full12, DeviationForm::Reduced6}) {
      const auto r = identify_offsets(session_to_deviations(s, form), g);
      CHECK((r.offsets.vec() - off.vec()).cwiseAbs().maxCoeff() <=
            1e-6 * g.L);
    }
  }
}

TEST_CASE("campaign data after mechanical tuning") {
  const Geometry g = bench_geometry();
  const auto d = campaign_set(campaign::kTuned);
  const auto r = identify_offsets(d, g);

  CHECK(r.rms_before == doctest::Approx(0.62).epsilon(0).scale(0.005));
  CHECK(r.rms_predicted <= r.rms_before);

  // residuals orthogonal to the design columns
  const DesignMatrix a = build_design_matrix(g, d.form);
  const Eigen::Map<const Eigen::VectorXd> res(r.residuals.data(),
                                              static_cast<Eigen::Index>(6));
  const Eigen::Map<const Eigen::VectorXd> dv(d.values.data(),
                                             static_cast<Eigen::Index>(6));
  CHECK((a.transpose() * res).cwiseAbs().maxCoeff() <= 1e-9 * dv.norm());

  // the least-squares projection shrinks this data set in the sup norm too
  const auto pred = predict_improvement(d, r);
  double pred_max = 0.0, d_max = 0.0;
  for (double v : pred.values) pred_max = std::max(pred_max, std::abs(v));
  for (double v : d.values) d_max = std::max(d_max, std::abs(v));
  CHECK(pred_max <= d_max);
}

TEST_CASE("perturbing the least-squares solution never improves the fit") {
  const Geometry g = bench_geometry();
  std::mt19937_64 rng(9002);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto d = campaign_set(campaign::kTuned);
  const auto r = identify_offsets(d, g);
  const DesignMatrix a = build_design_matrix(g, d.form);
  const Eigen::Map<const Eigen::VectorXd> dv(d.values.data(),
                                             static_cast<Eigen::Index>(6));
  const double best = (dv - a * r.offsets.vec()).norm();
  for (int i = 0; i < 100; ++i) {
    const Vec3 delta(u(rng), u(rng), u(rng));
    const double other = (dv - a * (r.offsets.vec() + 0.3 * delta)).norm();
    CHECK(other >= best - 1e-12);
  }
}

TEST_CASE("full and reduced forms agree on consistent data") {
  const Geometry g = bench_geometry();
  const Vec3 x(0.21, -0.14, 0.08);

  SUBCASE("algebraically consistent data") {
    const auto full = consistent_set(g, DeviationForm::Full12, x);
    // pair the full entries down to the reduced form
    const int pair_rows[6][2] = {{0, 2}, {1, 3}, {4, 6},
                                 {5, 7}, {8, 10}, {9, 11}};
    DeviationSet reduced{DeviationForm::Reduced6, std::vector<double>(6)};
    for (int i = 0; i < 6; ++i) {
      reduced.values[static_cast<std::size_t>(i)] =
          full.values[static_cast<std::size_t>(pair_rows[i][0])] -
          full.values[static_cast<std::size_t>(pair_rows[i][1])];
    }
    const auto rf = identify_offsets(full, g);
    const auto rr = identify_offsets(reduced, g);
    CHECK((rf.offsets.vec() - rr.offsets.vec()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((rf.offsets.vec() - x).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("noiseless simulated session") {
    const auto s = simulate_session(g, JointOffsets::from_vec(x), 1);
    const auto rf =
        identify_offsets(session_to_deviations(s, DeviationForm::Full12), g);
    const auto rr =
        identify_offsets(session_to_deviations(s, DeviationForm::Reduced6), g);
    CHECK((rf.offsets.vec() - rr.offsets.vec()).cwiseAbs().maxCoeff() <=
          2e-6 * g.L);
  }
}

TEST_CASE("sigma_hat estimates the per-deviation noise level") {
  // Two repeats make the averaged posture difference carry exactly the
  // single-reading variance: var(mean of 2) + var(mean of 2) = sigma^2.
  const Geometry g = bench_geometry();
  std::mt19937_64 seeder(9003);
  double mean = 0.0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    const auto d = session_to_deviations(
        simulate_session(g, {}, 2, NoiseModel{0.01, 0.0, seeder()}),
        DeviationForm::Reduced6);
    mean += identify_offsets(d, g).sigma_hat;
  }
  mean /= trials;
  CHECK(mean == doctest::Approx(0.01).epsilon(0.1));
}

TEST_CASE("sigma_hat definition") {
  const Geometry g = bench_geometry();
  const auto d = campaign_set(campaign::kTuned);
  const auto r = identify_offsets(d, g);
  double sq = 0.0;
  for (double v : r.residuals) sq += v * v;
  CHECK(r.sigma_hat ==
        doctest::Approx(std::sqrt(sq / r.dof)).epsilon(1e-12));
  CHECK(r.dof == 3);
}

TEST_CASE("predicted improvement") {
  const Geometry g = bench_geometry();
  const auto d = campaign_set(campaign::kTuned);
  const auto r = identify_offsets(d, g);

  SUBCASE("equals the residual vector and its rms") {
    const auto pred = predict_improvement(d, r);
    REQUIRE(pred.values.size() == r.residuals.size());
    for (std::size_t i = 0; i < pred.values.size(); ++i) {
      CHECK(pred.values[i] == doctest::Approx(r.residuals[i]).epsilon(1e-12));
    }
    CHECK(rms(pred.values) == doctest::Approx(r.rms_predicted).epsilon(1e-12));
  }
  SUBCASE("vanishes for a consistent system") {
    const auto dc = consistent_set(g, DeviationForm::Reduced6, {1, 2, 3});
    const auto rc = identify_offsets(dc, g);
    for (double v : predict_improvement(dc, rc).values) {
      CHECK(std::abs(v) <= 1e-12);
    }
  }
  SUBCASE("rejects a form mismatch") {
    const auto full = consistent_set(g, DeviationForm::Full12, {1, 2, 3});
    CHECK_THROWS_AS(predict_improvement(full, r), FormMismatchError);
  }
}

TEST_CASE("validation against the campaign log") {
  const auto measured = campaign_set(campaign::kCalibrated);
  const auto predicted = campaign_set(campaign::kTunedPredicted);
  const auto v = validate(measured, predicted, campaign::kTunedQuotedRms);

  // quoted rms values: measured 0.21 vs predicted 0.20, agreeing to 0.01 mm
  const double rm = std::round(v.rms_measured * 100.0) / 100.0;
  const double rp = std::round(v.rms_predicted * 100.0) / 100.0;
  CHECK(rm == doctest::Approx(0.21));
  CHECK(rp == doctest::Approx(0.20));
  CHECK(std::abs(rm - rp) <= 0.01 + 1e-12);

  REQUIRE(v.improvement_ratio.has_value());
  CHECK(*v.improvement_ratio ==
        doctest::Approx(campaign::kTunedQuotedRms / v.rms_measured));

  const auto text = format_validation(v, measured, predicted);
  CHECK(text.find("rms measured = 0.21 mm") != std::string::npos);
  CHECK(text.find("rms predicted = 0.20 mm") != std::string::npos);
  CHECK(text.find("improvement ratio") != std::string::npos);
}

TEST_CASE("validation identities and errors") {
  const auto measured = campaign_set(campaign::kCalibrated);

  SUBCASE("identical sets give zero errors and unit ratio") {
    const auto v = validate(measured, measured);
    for (double e : v.entry_errors) CHECK(e == 0.0);
    CHECK(v.agreement_ratio == doctest::Approx(1.0));
    CHECK(!v.improvement_ratio.has_value());
  }
  SUBCASE("form mismatch") {
    const Geometry g = bench_geometry();
    const auto full = consistent_set(g, DeviationForm::Full12, {1, 2, 3});
    CHECK_THROWS_AS(validate(measured, full), FormMismatchError);
  }
}

TEST_CASE("end-to-end: a compensated mechanism measures like the prediction") {
  const Geometry g = bench_geometry();
  const JointOffsets true_off{0.21, -0.14, 0.08};
  const auto d = session_to_deviations(simulate_session(g, true_off, 1),
                                       DeviationForm::Reduced6);
  const auto r = identify_offsets(d, g);

  // after compensation the mechanism retains only the identification error
  const JointOffsets residual_off{true_off.dx - r.offsets.dx,
                                  true_off.dy - r.offsets.dy,
                                  true_off.dz - r.offsets.dz};
  const auto post = session_to_deviations(simulate_session(g, residual_off, 1),
                                          DeviationForm::Reduced6);
  const auto pred = predict_improvement(d, r);
  const auto v = validate(post, pred, r.rms_before);
  for (double e : v.entry_errors) CHECK(std::abs(e) <= 1e-3);
}

TEST_CASE("calibration report serialization round-trips") {
  const Geometry g = bench_geometry();
  const auto r = identify_offsets(campaign_set(campaign::kTuned), g);

  const auto text = format_report(r);
  CHECK(text.find("sigma_hat = |residuals|_2 / sqrt(m - 3)") !=
        std::string::npos);
  CHECK(text.find("rho_i' = rho_i - drho_i") != std::string::npos);
  CHECK(text.find("condition number") != std::string::npos);

  const auto dir = testutil::make_temp_dir("orthocal-calibration");
  const auto path = dir / "report.json";
  write_report(r, path);
  const auto back = load_report(path);
  CHECK(back.offsets.vec() == r.offsets.vec());
  CHECK(back.residuals == r.residuals);
  CHECK(back.sigma_hat == r.sigma_hat);
  CHECK(back.rms_before == r.rms_before);
  CHECK(back.rms_predicted == r.rms_predicted);
  CHECK(back.dof == r.dof);
  CHECK(back.condition_number == r.condition_number);
  CHECK(back.form == r.form);
  CHECK(back.geometry.L == r.geometry.L);
  std::filesystem::remove_all(dir);
}

TEST_CASE("malformed reports are rejected") {
  CHECK_THROWS_AS(report_from_json("{ nope"), SchemaError);
  CHECK_THROWS_AS(report_from_json(R"({"schema_version": 2})"), SchemaError);
}
