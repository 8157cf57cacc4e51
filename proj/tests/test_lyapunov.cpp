#include <cmath>
#include <map>

#include "doctest.h"

#include "cocyc/errors.hpp"
#include "cocyc/lyapunov.hpp"
#include "support/fixtures.hpp"

using namespace cocyc;

namespace {

// Both symbols share one matrix, so every sampled trajectory gives the same
// product and the Monte Carlo estimate is exact with zero dispersion.
CocycleInstance make_constant_diag() {
  std::map<Word, InvertibleOperator> t;
  t.emplace("1", InvertibleOperator(fixtures::diag2(2.0, 0.5)));
  t.emplace("2", InvertibleOperator(fixtures::diag2(2.0, 0.5)));
  return CocycleInstance(fixtures::full_shift_2(),
                         LocallyConstantGenerator(0, 1.0, std::move(t)));
}

}  // namespace

TEST_CASE("parry measure of the full shift is uniform Bernoulli") {
  const MarkovMeasure mu = parry_measure(fixtures::full_shift_2());
  for (int i = 0; i < 2; ++i) {
    CHECK(mu.stationary(i) == doctest::Approx(0.5).epsilon(1e-12));
    for (int j = 0; j < 2; ++j)
      CHECK(mu.transition(i, j) == doctest::Approx(0.5).epsilon(1e-12));
  }
  CHECK(mu.entropy == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("parry measure of the golden mean shift has entropy log phi") {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const MarkovMeasure mu = parry_measure(fixtures::golden_mean());
  CHECK(mu.transition(0, 0) == doctest::Approx(1.0 / phi).epsilon(1e-12));
  CHECK(mu.transition(0, 1) == doctest::Approx(1.0 / (phi * phi)).epsilon(1e-12));
  CHECK(mu.transition(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mu.transition(1, 1) == 0.0);
  const double pi1 = phi * phi / (1.0 + phi * phi);
  CHECK(mu.stationary(0) == doctest::Approx(pi1).epsilon(1e-12));
  CHECK(mu.stationary(1) == doctest::Approx(1.0 - pi1).epsilon(1e-12));
  CHECK(mu.entropy == doctest::Approx(std::log(phi)).epsilon(1e-12));
  // stationarity: pi P = pi
  for (int j = 0; j < 2; ++j) {
    double s = 0.0;
    for (int i = 0; i < 2; ++i) s += mu.stationary(i) * mu.transition(i, j);
    CHECK(s == doctest::Approx(mu.stationary(j)).epsilon(1e-12));
  }
}

TEST_CASE("markov measure validates and solves the stationary distribution") {
  const ShiftSpec s = fixtures::full_shift_2();
  Eigen::MatrixXd p(2, 2);
  p << 0.3, 0.7, 0.6, 0.4;
  const MarkovMeasure mu = markov_measure(s, p);
  CHECK(mu.stationary(0) == doctest::Approx(6.0 / 13.0).epsilon(1e-12));
  CHECK(mu.stationary(1) == doctest::Approx(7.0 / 13.0).epsilon(1e-12));
  const double h = -(6.0 / 13.0) * (0.3 * std::log(0.3) + 0.7 * std::log(0.7)) -
                   (7.0 / 13.0) * (0.6 * std::log(0.6) + 0.4 * std::log(0.4));
  CHECK(mu.entropy == doctest::Approx(h).epsilon(1e-12));

  CHECK_THROWS_AS(markov_measure(s, Eigen::MatrixXd::Identity(3, 3)),
                  InvalidInput);
  Eigen::MatrixXd neg(2, 2);
  neg << -0.1, 1.1, 0.5, 0.5;
  CHECK_THROWS_AS(markov_measure(s, neg), InvalidInput);
  Eigen::MatrixXd hole(2, 2);  // vanishes on an admissible transition
  hole << 1.0, 0.0, 0.5, 0.5;
  CHECK_THROWS_AS(markov_measure(s, hole), InvalidInput);
  Eigen::MatrixXd bad_row(2, 2);
  bad_row << 0.5, 0.6, 0.5, 0.5;
  CHECK_THROWS_AS(markov_measure(s, bad_row), InvalidInput);
  Eigen::MatrixXd forbidden(2, 2);  // charges the forbidden word "22"
  forbidden << 0.5, 0.5, 0.5, 0.5;
  CHECK_THROWS_AS(markov_measure(fixtures::golden_mean(), forbidden),
                  InvalidInput);
}

TEST_CASE("monte carlo estimates are reproducible and worker independent") {
  const CocycleInstance c = fixtures::make_e2();
  const MarkovMeasure mu = parry_measure(c.shift());
  SamplingPlan plan;
  plan.n = 200;
  plan.trials = 8;
  plan.seed = 42;
  plan.workers = 1;
  const ExponentEstimate a = estimate_exponents(c, mu, plan);
  const ExponentEstimate b = estimate_exponents(c, mu, plan);
  plan.workers = 4;
  const ExponentEstimate d = estimate_exponents(c, mu, plan);
  CHECK(a.trial_plus == b.trial_plus);
  CHECK(a.trial_minus == b.trial_minus);
  CHECK(a.trial_plus == d.trial_plus);
  CHECK(a.trial_minus == d.trial_minus);
  CHECK(a.lambda_plus == d.lambda_plus);
  CHECK(a.stderr_plus == d.stderr_plus);
  for (int t = 0; t < plan.trials; ++t) {
    const auto i = static_cast<std::size_t>(t);
    CHECK(a.trial_plus[i] >= a.trial_minus[i]);  // ||A|| >= 1/||A^{-1}||
  }
  SamplingPlan bad = plan;
  bad.n = 0;
  CHECK_THROWS_AS(estimate_exponents(c, mu, bad), InvalidInput);
  bad = plan;
  bad.trials = 0;
  CHECK_THROWS_AS(estimate_exponents(c, mu, bad), InvalidInput);
}

TEST_CASE("constant cocycle estimates are exact with zero dispersion") {
  const CocycleInstance c = make_constant_diag();
  const MarkovMeasure mu = parry_measure(c.shift());
  SamplingPlan plan;
  plan.n = 300;
  plan.trials = 6;
  plan.seed = 11;
  const ExponentEstimate est = estimate_exponents(c, mu, plan);
  CHECK(est.lambda_plus == doctest::Approx(std::log(2.0)).epsilon(1e-13));
  CHECK(est.lambda_minus == doctest::Approx(-std::log(2.0)).epsilon(1e-13));
  // identical trials: dispersion collapses to summation roundoff
  CHECK(est.stderr_plus <= 1e-14);
  CHECK(est.stderr_minus <= 1e-14);
  const ChiEstimate chi = chi_exponent(c, mu, plan);
  // chi = (log 2 - (-log 2)) + log nu = log 2 for nu = 1/2, beta = 1
  CHECK(chi.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(chi.se <= 1e-14);
}

TEST_CASE("chi exponent matches its ingredients on a bunched cocycle") {
  const CocycleInstance c = fixtures::make_e2();
  const MarkovMeasure mu = parry_measure(c.shift());
  SamplingPlan plan;
  plan.n = 500;
  plan.trials = 20;
  plan.seed = 7;
  const ChiEstimate chi = chi_exponent(c, mu, plan);
  const double drift = c.beta() * std::log(c.shift().nu());
  CHECK(std::abs(chi.value - (chi.base.lambda_plus - chi.base.lambda_minus +
                              drift)) <= 1e-12);
  CHECK(chi.base.n == 500);
  CHECK(chi.base.trials == 20);
  CHECK(chi.se >= 0.0);
  // exponent gap is small for E2, so chi sits close to the drift and below 0
  CHECK(chi.value >= drift - 1e-15);
  CHECK(chi.value < -0.5);
}

TEST_CASE("periodic approximants recover exact orbit exponents") {
  const CocycleInstance c = fixtures::make_e2();
  const std::vector<OrbitExponents> orb = periodic_approximants(c, 3);
  REQUIRE(orb.size() == 5);
  CHECK(orb[0].orbit_word == "1");
  CHECK(orb[1].orbit_word == "2");
  CHECK(orb[2].orbit_word == "12");
  CHECK(orb[3].orbit_word == "112");
  CHECK(orb[4].orbit_word == "122");
  for (const OrbitExponents& o : orb) {
    CHECK(o.period == static_cast<int>(o.orbit_word.size()));
    CHECK(o.plus >= o.minus);
  }
  CHECK(orb[0].plus == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(orb[0].minus == doctest::Approx(-0.1).epsilon(1e-12));
  CHECK(orb[1].plus == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(std::abs(orb[2].plus) <= 1e-15);   // D2 D1 = Id
  CHECK(std::abs(orb[2].minus) <= 1e-15);
  CHECK(orb[3].plus == doctest::Approx(0.1 / 3.0).epsilon(1e-12));
  CHECK(orb[3].minus == doctest::Approx(-0.1 / 3.0).epsilon(1e-12));
  CHECK(orb[4].plus == doctest::Approx(0.1 / 3.0).epsilon(1e-12));

  const std::vector<OrbitExponents> sd =
      periodic_approximants(fixtures::make_strong_diagonal(), 2);
  REQUIRE(sd.size() == 3);
  CHECK(sd[0].plus == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(sd[0].minus == doctest::Approx(-std::log(2.0)).epsilon(1e-12));
  CHECK(std::abs(sd[2].plus) <= 1e-15);  // orbit "12" multiplies out to Id
}
