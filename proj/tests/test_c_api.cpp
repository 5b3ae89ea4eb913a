#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "melab/melab.h"

namespace {

melab_params preset() {
  melab_params p{};
  REQUIRE(melab_preset_table1(&p) == MELAB_OK);
  return p;
}

std::string take(char* s) {
  std::string out(s ? s : "");
  melab_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("version") { CHECK(std::strlen(melab_version()) > 0); }

TEST_CASE("preset and moments") {
  const melab_params p = preset();
  CHECK(p.n == 10);
  CHECK(p.rho == 0.964);
  melab_moments m{};
  REQUIRE(melab_derive_moments(&p, &m) == MELAB_OK);
  CHECK(m.V_ym == doctest::Approx(131.4).epsilon(1e-14));
  CHECK(m.V_xm == doctest::Approx(333.6).epsilon(1e-14));
  CHECK(m.V_yxm == doctest::Approx(197.97002173056404).epsilon(1e-13));
}

TEST_CASE("parameter editing") {
  melab_params p = preset();
  REQUIRE(melab_params_set(&p, "sigma_u2", 0.0) == MELAB_OK);
  CHECK(p.sigma_u2 == 0.0);
  CHECK(melab_params_set(&p, "tau", 1.0) == MELAB_ERR_INVALID_ARGUMENT);
  CHECK(std::string(melab_last_error()).find("tau") != std::string::npos);

  REQUIRE(melab_params_from_json(R"({"n": 200})", &p) == MELAB_OK);
  CHECK(p.n == 200);
  CHECK(p.mu_y == 127.0);
  CHECK(melab_params_from_json("{not json", &p) == MELAB_ERR_DATA);
  CHECK(p.n == 200);

  char* json = nullptr;
  REQUIRE(melab_params_to_json(&p, &json) == MELAB_OK);
  CHECK(take(json).find("\"n\": 200") != std::string::npos);

  melab_params bad = preset();
  bad.rho = 1.5;
  CHECK(melab_params_validate(&bad) == MELAB_ERR_INVALID_ARGUMENT);
  melab_moments m{};
  bad = preset();
  bad.mu_x = 0.0;
  CHECK(melab_derive_moments(&bad, &m) != MELAB_OK);
}

TEST_CASE("null arguments are rejected") {
  melab_params p = preset();
  CHECK(melab_derive_moments(nullptr, nullptr) == MELAB_ERR_INVALID_ARGUMENT);
  CHECK(melab_preset_table1(nullptr) == MELAB_ERR_INVALID_ARGUMENT);
  CHECK(melab_params_set(&p, nullptr, 1.0) == MELAB_ERR_INVALID_ARGUMENT);
  CHECK(melab_report_render(nullptr, MELAB_FORMAT_CSV, nullptr) == MELAB_ERR_INVALID_ARGUMENT);
  CHECK(melab_report_row_count(nullptr) == 0);
  melab_report_free(nullptr);
  melab_dataset_free(nullptr);
  melab_string_free(nullptr);
}

TEST_CASE("estimator evaluation") {
  const double y[] = {10, 12, 14};
  const double x[] = {20, 22, 24};
  double v = 0;
  melab_estimator ybar{MELAB_MEAN_PER_UNIT, 0, 0, 0, 0};
  REQUIRE(melab_evaluate(&ybar, y, x, 3, 22.0, &v) == MELAB_OK);
  CHECK(v == 12.0);
  melab_estimator t1{MELAB_EXP_RATIO, 0, 0, 0, 0};
  REQUIRE(melab_evaluate(&t1, y, x, 3, 22.0, &v) == MELAB_OK);
  CHECK(v == 12.0);
  REQUIRE(melab_evaluate(&t1, y, x, 3, 20.0, &v) == MELAB_OK);
  CHECK(v == doctest::Approx(12.0 * std::exp(-2.0 / 42.0)).epsilon(1e-14));
  melab_estimator t2{MELAB_WEIGHTED, 0.5, 2.0, 0, 0};
  REQUIRE(melab_evaluate(&t2, y, x, 3, 20.0, &v) == MELAB_OK);
  CHECK(v == doctest::Approx(6.0 - 4.0).epsilon(1e-14));

  melab_estimator t3{MELAB_SINGH_SOLANKI, 0, 0, 1, 0};
  CHECK(melab_evaluate(&t3, y, x, 3, 0.0, &v) == MELAB_ERR_DOMAIN);
  CHECK(melab_evaluate(&t3, y, x, 0, 22.0, &v) == MELAB_ERR_INVALID_ARGUMENT);
  melab_estimator weird{static_cast<melab_estimator_kind>(42), 0, 0, 0, 0};
  CHECK(melab_evaluate(&weird, y, x, 3, 22.0, &v) == MELAB_ERR_INVALID_ARGUMENT);
}

TEST_CASE("first-order theory") {
  const melab_params p = preset();
  melab_mse mse{};
  REQUIRE(melab_var_mean_per_unit(&p, &mse) == MELAB_OK);
  CHECK(mse.total == doctest::Approx(131.4));
  CHECK(mse.me_contribution == doctest::Approx(3.6));
  REQUIRE(melab_mse_t1(&p, &mse) == MELAB_OK);
  CHECK(mse.total == doctest::Approx(30.050).epsilon(1e-4));
  REQUIRE(melab_mse_t3(&p, 1, 1, &mse) == MELAB_OK);
  CHECK(mse.total == doctest::Approx(106.622).epsilon(1e-4));

  melab_optimum w{};
  REQUIRE(melab_opt_weights_t2(&p, &w) == MELAB_OK);
  CHECK(w.first == doctest::Approx(0.99913785).epsilon(1e-7));
  CHECK(w.second == doctest::Approx(0.59292369).epsilon(1e-7));
  REQUIRE(melab_opt_weights_t4(&p, 1, 0, &w) == MELAB_OK);
  CHECK(w.min_mse == doctest::Approx(12.974).epsilon(1e-4));

  double mse_v = 0;
  double bias = 0;
  melab_estimator t1{MELAB_EXP_RATIO, 0, 0, 0, 0};
  REQUIRE(melab_theory(&t1, &p, &mse_v, &bias) == MELAB_OK);
  CHECK(bias == doctest::Approx(-0.032517364951485876).epsilon(1e-12));
  CHECK(melab_theory(&t1, &p, nullptr, nullptr) == MELAB_OK);

  double r = 0;
  REQUIRE(melab_pre(131.4, 13.14, &r) == MELAB_OK);
  CHECK(r == doctest::Approx(1000.0));
  CHECK(melab_pre(131.4, 0.0, &r) == MELAB_ERR_INVALID_ARGUMENT);
}

TEST_CASE("table estimators use capacity and count") {
  const melab_params p = preset();
  std::size_t count = 0;
  REQUIRE(melab_table_estimators(&p, nullptr, nullptr, 0, nullptr, 0, &count) == MELAB_OK);
  CHECK(count == 12);
  std::vector<melab_estimator> specs(count);
  REQUIRE(melab_table_estimators(&p, nullptr, nullptr, 0, specs.data(), specs.size(), &count) ==
          MELAB_OK);
  CHECK(specs[0].kind == MELAB_MEAN_PER_UNIT);
  CHECK(specs[3].kind == MELAB_WEIGHTED);
  CHECK(specs[11].kind == MELAB_GENERAL_CLASS);
  CHECK(specs[11].beta == -1.0);

  const double a[] = {0.0};
  const double b[] = {1.0};
  REQUIRE(melab_table_estimators(&p, a, b, 1, specs.data(), specs.size(), &count) == MELAB_OK);
  CHECK(count == 6);
  CHECK(specs[4].kind == MELAB_SINGH_SOLANKI);
  CHECK(specs[4].beta == 1.0);
}

TEST_CASE("theory report") {
  const melab_params p = preset();
  melab_report* r = nullptr;
  REQUIRE(melab_report_theory(&p, nullptr, nullptr, 0, &r) == MELAB_OK);
  CHECK(melab_report_row_count(r) == 12);
  double v = 0;
  REQUIRE(melab_report_value(r, 0, "total", &v) == MELAB_OK);
  CHECK(v == doctest::Approx(131.4));
  REQUIRE(melab_report_value(r, 1, "pre", &v) == MELAB_OK);
  CHECK(v == doctest::Approx(437.27).epsilon(1e-4));
  CHECK(melab_report_value(r, 0, "estimator", &v) == MELAB_ERR_INVALID_ARGUMENT);
  CHECK(melab_report_value(r, 0, "bogus", &v) == MELAB_ERR_INVALID_ARGUMENT);
  CHECK(melab_report_value(r, 99, "total", &v) == MELAB_ERR_INVALID_ARGUMENT);

  char* text = nullptr;
  REQUIRE(melab_report_render(r, MELAB_FORMAT_CSV, &text) == MELAB_OK);
  const std::string csv = take(text);
  CHECK(csv.rfind("estimator,alpha,beta", 0) == 0);
  REQUIRE(melab_report_render(r, MELAB_FORMAT_MARKDOWN, &text) == MELAB_OK);
  CHECK(take(text).find("| ybar |") != std::string::npos);
  REQUIRE(melab_report_render(r, MELAB_FORMAT_JSON, &text) == MELAB_OK);
  CHECK(take(text).find("\"rows\"") != std::string::npos);
  melab_report_free(r);

  REQUIRE(melab_report_params(&p, &r) == MELAB_OK);
  REQUIRE(melab_report_render(r, MELAB_FORMAT_CSV, &text) == MELAB_OK);
  CHECK(take(text) ==
        "n,mu_y,mu_x,sigma_y2,sigma_x2,rho,sigma_u2,sigma_v2\n10,127,170,1278,3300,0.964,36,36\n");
  melab_report_free(r);
}

TEST_CASE("datasets") {
  melab_columns cols{"Y", "X", "y", "x"};
  melab_dataset* ds = nullptr;
  REQUIRE(melab_dataset_load(MELAB_TEST_DATA "/table1_fixture.csv", &cols, ',', &ds) == MELAB_OK);
  CHECK(melab_dataset_row_count(ds) == 10);
  melab_params p{};
  REQUIRE(melab_dataset_params(ds, 10, &p) == MELAB_OK);
  CHECK(p.sigma_y2 == doctest::Approx(1278.0).epsilon(1e-12));
  CHECK(p.rho == doctest::Approx(0.964).epsilon(1e-12));
  melab_dataset_free(ds);

  ds = nullptr;
  CHECK(melab_dataset_load(MELAB_TEST_DATA "/bad_cell.csv", &cols, ',', &ds) == MELAB_ERR_DATA);
  CHECK(ds == nullptr);
  const std::string msg = melab_last_error();
  CHECK(msg.find("row 3") != std::string::npos);
  CHECK(msg.find("'X'") != std::string::npos);
  CHECK(melab_dataset_load("/no/such/file.csv", &cols, ',', &ds) == MELAB_ERR_IO);
  CHECK(melab_dataset_load(MELAB_TEST_DATA "/table1_fixture.csv", nullptr, ',', &ds) ==
        MELAB_OK);
  melab_dataset_free(ds);
}

TEST_CASE("simulation") {
  const melab_params p = preset();
  melab_sim_config c{};
  REQUIRE(melab_sim_config_default(&p, &c) == MELAB_OK);
  c.replicates = 4000;
  c.seed = 11;
  REQUIRE(melab_sim_config_from_json(R"({"sample_n": 20})", &c) == MELAB_OK);
  CHECK(c.sample_n == 20);
  CHECK(c.replicates == 4000);

  const melab_estimator specs[] = {{MELAB_MEAN_PER_UNIT, 0, 0, 0, 0},
                                   {MELAB_EXP_RATIO, 0, 0, 0, 0}};
  melab_sim_result res[2]{};
  REQUIRE(melab_simulate(&c, specs, 2, res) == MELAB_OK);
  CHECK(res[0].replicates_used + res[0].replicates_skipped == 4000);
  CHECK(res[0].theory_mse == doctest::Approx((1278.0 + 36.0) / 20.0));
  CHECK(std::abs(res[0].empirical_mse - res[0].theory_mse) < 4 * res[0].mc_se_mse);
  CHECK(res[1].estimator.kind == MELAB_EXP_RATIO);

  melab_sim_result again[2]{};
  c.threads = 3;
  REQUIRE(melab_simulate(&c, specs, 2, again) == MELAB_OK);
  CHECK(std::memcmp(&res[1].empirical_mse, &again[1].empirical_mse, sizeof(double)) == 0);

  melab_report* r = nullptr;
  REQUIRE(melab_report_simulate(&c, specs, 2, &r) == MELAB_OK);
  CHECK(melab_report_row_count(r) == 2);
  melab_report_free(r);
  const int grid[] = {10, 40};
  REQUIRE(melab_report_sweep(&c, specs, 1, grid, 2, &r) == MELAB_OK);
  CHECK(melab_report_row_count(r) == 2);
  melab_report_free(r);
  const melab_estimator per_n[] = {{MELAB_WEIGHTED, 1, 0.5, 0, 0}, {MELAB_WEIGHTED, 1, 0.6, 0, 0}};
  REQUIRE(melab_report_sweep(&c, per_n, 2, grid, 2, &r) == MELAB_OK);
  melab_report_free(r);
  CHECK(melab_report_sweep(&c, per_n, 3, grid, 2, &r) == MELAB_ERR_INVALID_ARGUMENT);

  c.replicates = 5;
  CHECK(melab_simulate(&c, specs, 2, res) == MELAB_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(melab_last_error()) > 0);
}
