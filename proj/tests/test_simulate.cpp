#include <doctest.h>

#include <cmath>
#include <cstring>

#include "melab/error.hpp"
#include "melab/ingest.hpp"
#include "melab/simulate.hpp"
#include "melab/theory.hpp"

using namespace melab;
namespace est = melab::estimator;

namespace {

SimulationConfig table1_config(int n, long replicates, std::uint64_t seed = 7) {
  SimulationConfig c;
  c.params = table1_preset();
  c.sample_n = n;
  c.replicates = replicates;
  c.seed = seed;
  return c;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool same_results(const std::vector<SimulationResult>& a, const std::vector<SimulationResult>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same_bits(a[i].empirical_bias, b[i].empirical_bias) ||
        !same_bits(a[i].empirical_mse, b[i].empirical_mse) ||
        !same_bits(a[i].mc_se_mse, b[i].mc_se_mse) || a[i].replicates_used != b[i].replicates_used) {
      return false;
    }
  }
  return true;
}

struct Pooled {
  double mean_y = 0, mean_x = 0, var_y = 0, var_x = 0, var_u = 0, var_v = 0;
};

Pooled pooled_moments(const SimulationConfig& c, int reps) {
  double sy = 0, sx = 0, syy = 0, sxx = 0, suu = 0, svv = 0, su = 0, sv = 0;
  double count = 0;
  for (int r = 0; r < reps; ++r) {
    const ReplicateDraw d = draw_replicate_with_truth(c, static_cast<std::uint64_t>(r));
    for (std::size_t i = 0; i < d.truth.size(); ++i) {
      const Observation o = d.observed.pairs()[i];
      const double u = o.y - d.truth[i].y;
      const double v = o.x - d.truth[i].x;
      sy += o.y;
      sx += o.x;
      syy += o.y * o.y;
      sxx += o.x * o.x;
      su += u;
      sv += v;
      suu += u * u;
      svv += v * v;
      ++count;
    }
  }
  Pooled p;
  p.mean_y = sy / count;
  p.mean_x = sx / count;
  p.var_y = syy / count - p.mean_y * p.mean_y;
  p.var_x = sxx / count - p.mean_x * p.mean_x;
  p.var_u = suu / count - (su / count) * (su / count);
  p.var_v = svv / count - (sv / count) * (sv / count);
  return p;
}

}  // namespace

TEST_CASE("zero error variances leave the true values untouched") {
  SimulationConfig c = table1_config(25, 100);
  c.params = c.params.error_free();
  for (std::uint64_t r = 0; r < 20; ++r) {
    const ReplicateDraw d = draw_replicate_with_truth(c, r);
    REQUIRE(d.truth.size() == 25);
    for (std::size_t i = 0; i < d.truth.size(); ++i) {
      CHECK(d.observed.pairs()[i].y == d.truth[i].y);
      CHECK(d.observed.pairs()[i].x == d.truth[i].x);
    }
  }
}

TEST_CASE("a replicate is a pure function of seed and index") {
  const SimulationConfig c = table1_config(10, 100, 99);
  const ObservedSample a = draw_replicate(c, 12345);
  const ObservedSample b = draw_replicate(c, 12345);
  REQUIRE(a.size() == b.size());
  CHECK(std::memcmp(a.pairs().data(), b.pairs().data(), a.size() * sizeof(Observation)) == 0);
  const ObservedSample other = draw_replicate(c, 12346);
  CHECK(std::memcmp(a.pairs().data(), other.pairs().data(), a.size() * sizeof(Observation)) != 0);
}

TEST_CASE("pooled draws reproduce the target moments") {
  // 5000 replicates of 200 units = 10^6 pooled draws.
  const SimulationConfig c = table1_config(200, 100, 3);
  const Pooled p = pooled_moments(c, 5000);
  CHECK(p.mean_y == doctest::Approx(127.0).epsilon(0.01));
  CHECK(p.mean_x == doctest::Approx(170.0).epsilon(0.01));
  CHECK(p.var_y == doctest::Approx(1278.0 + 36.0).epsilon(0.01));
  CHECK(p.var_x == doctest::Approx(3300.0 + 36.0).epsilon(0.01));
}

TEST_CASE("non-Gaussian error laws keep the target error variance") {
  for (ErrorLaw law : {ErrorLaw::Uniform, ErrorLaw::StudentT}) {
    SimulationConfig c = table1_config(200, 100, 4);
    c.error_law = law;
    c.student_df = 10.0;
    const Pooled p = pooled_moments(c, 2500);
    CHECK(p.var_u == doctest::Approx(36.0).epsilon(0.02));
    CHECK(p.var_v == doctest::Approx(36.0).epsilon(0.02));
  }
}

TEST_CASE("mean per unit matches exact theory") {
  const auto r = run_monte_carlo(table1_config(10, 50000), {est::MeanPerUnit{}}).front();
  CHECK(r.replicates_used == 50000);
  CHECK(r.replicates_skipped == 0);
  CHECK(r.theory_mse == doctest::Approx(131.4));
  CHECK(std::abs(r.empirical_mse - 131.4) <= 3.0 * r.mc_se_mse);
  CHECK(r.mc_se_mse > 0.0);
}

TEST_CASE("exponential ratio at n = 200 is within 5% of first-order theory") {
  const auto r = run_monte_carlo(table1_config(200, 40000), {est::ExpRatio{}}).front();
  CHECK(r.relative_gap() < 0.05);
  CHECK(r.theory_mse == doctest::Approx(mse_t1(table1_preset().with_n(200)).total));
}

TEST_CASE("identical estimators give identical results on the same seed") {
  const auto r = run_monte_carlo(table1_config(10, 5000),
                                 {est::MeanPerUnit{}, est::Weighted{1.0, 0.0}});
  CHECK(same_bits(r[0].empirical_mse, r[1].empirical_mse));
  CHECK(same_bits(r[0].empirical_bias, r[1].empirical_bias));
}

TEST_CASE("worker count does not change results") {
  const std::vector<EstimatorSpec> specs = {est::ExpRatio{}, est::SinghSolanki{1, 1},
                                            est::GeneralClass{0.99, -0.1, 1, 0}};
  SimulationConfig c = table1_config(30, 10000, 17);
  c.threads = 1;
  const auto serial = run_monte_carlo(c, specs);
  for (int t : {2, 3, 8}) {
    c.threads = t;
    CHECK(same_results(serial, run_monte_carlo(c, specs)));
  }
}

TEST_CASE("replicates that hit the domain guard are skipped and counted") {
  SimulationConfig c = table1_config(2, 2000, 5);
  c.params.mu_x = 1.0;
  c.params.sigma_x2 = 100.0;
  const auto r = run_monte_carlo(c, {est::SinghSolanki{0.5, 0.0}, est::MeanPerUnit{}});
  CHECK(r[0].replicates_skipped > 0);
  CHECK(r[0].replicates_used + r[0].replicates_skipped == 2000);
  CHECK(r[1].replicates_skipped == 0);

  // 1e308 * ybar overflows on every replicate.
  CHECK_THROWS_AS(run_monte_carlo(table1_config(10, 200), {est::GeneralClass{1e308, 0, 0, 0}}),
                  Error);
}

TEST_CASE("preset scenario never triggers the guard at n >= 10") {
  const auto r = run_monte_carlo(table1_config(10, 20000),
                                 {est::ExpRatio{}, est::SinghSolanki{1, 1},
                                  est::GeneralClass{1, 0, 1, -1}});
  for (const auto& x : r) CHECK(x.replicates_skipped == 0);
}

TEST_CASE("config validation") {
  SimulationConfig c = table1_config(10, 99);
  CHECK_THROWS_AS(run_monte_carlo(c, {est::MeanPerUnit{}}), Error);
  c = table1_config(1, 1000);
  CHECK_THROWS_AS(run_monte_carlo(c, {est::MeanPerUnit{}}), Error);
  c = table1_config(10, 1000);
  c.error_law = ErrorLaw::StudentT;
  c.student_df = 4.0;
  CHECK_THROWS_AS(run_monte_carlo(c, {est::MeanPerUnit{}}), Error);
  CHECK(parse_error_law("uniform") == ErrorLaw::Uniform);
  CHECK_THROWS_AS(parse_error_law("cauchy"), Error);
}

TEST_CASE("convergence sweep") {
  const SimulationConfig c = table1_config(10, 20000, 11);
  CHECK(convergence_sweep(c, est::ExpRatio{}, {10}).size() == 1);
  CHECK_THROWS_AS(convergence_sweep(c, est::ExpRatio{}, {}), Error);
  CHECK_THROWS_AS(convergence_sweep(c, est::ExpRatio{}, {50, 10}), Error);
  const std::vector<EstimatorSpec> one = {est::ExpRatio{}};
  CHECK_THROWS_AS(convergence_sweep(c, one, {10, 50}), Error);

  const auto rows = convergence_sweep(c, est::ExpRatio{}, {10, 50, 200});
  REQUIRE(rows.size() == 3);
  const double combined = std::hypot(rows[0].mc_se_mse / rows[0].theory_mse,
                                     rows[2].mc_se_mse / rows[2].theory_mse);
  CHECK(rows[2].relative_gap <= rows[0].relative_gap + 2.0 * combined);

  SimulationConfig exact = c;
  exact.params = exact.params.error_free();
  for (const auto& row : convergence_sweep(exact, est::MeanPerUnit{}, {10, 50, 200})) {
    CHECK(std::abs(row.empirical_mse - row.theory_mse) <= 3.0 * row.mc_se_mse);
  }
}
