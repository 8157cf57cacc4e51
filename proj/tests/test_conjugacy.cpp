#include <cmath>
#include <map>

#include "doctest.h"

#include "cocyc/bunching.hpp"
#include "cocyc/conjugacy.hpp"
#include "cocyc/errors.hpp"
#include "support/fixtures.hpp"

using namespace cocyc;

namespace {

BunchingCertificate cert_for(const CocycleInstance& c) {
  const UniformSearchResult r = find_uniform_N(c, 20);
  REQUIRE(r.certificate.has_value());
  return *r.certificate;
}

}  // namespace

TEST_CASE("periodic block intertwiner is recovered and normalized") {
  const InvertibleOperator a(fixtures::diag2(std::exp(0.1), std::exp(-0.1)));
  Eigen::MatrixXd shear(2, 2);
  shear << 1.0, 0.3, 0.0, 1.0;
  const InvertibleOperator c(shear);
  const InvertibleOperator b = c.compose(a).compose(c.inverse());

  const InvertibleOperator x = solve_periodic_conjugacy(a, b);
  CHECK(spectral_norm(x.matrix()) == doctest::Approx(1.0).epsilon(1e-12));
  // intertwining: b x = x a
  CHECK(spectral_norm(b.matrix() * x.matrix() - x.matrix() * a.matrix()) <=
        1e-12);
  CHECK(metric_d(b, x.compose(a).compose(x.inverse())) <= 1e-12);

  // distinct eigenvalue sets admit no intertwiner at all
  CHECK_THROWS_AS(
      solve_periodic_conjugacy(InvertibleOperator(fixtures::diag2(2.0, 0.5)),
                               InvertibleOperator(fixtures::diag2(3.0, 1.0 / 3.0))),
      NotConjugate);
  // partial eigenvalue overlap: the kernel is nonzero but all singular
  CHECK_THROWS_AS(
      solve_periodic_conjugacy(InvertibleOperator(fixtures::diag2(2.0, 0.5)),
                               InvertibleOperator(fixtures::diag2(2.0, 3.0))),
      NotConjugate);
  CHECK_THROWS_AS(
      solve_periodic_conjugacy(a, InvertibleOperator::identity(3)),
      DimensionMismatch);
}

TEST_CASE("periodic data scan accepts the coboundary pair") {
  const CocycleInstance a = fixtures::make_e3();
  const CocycleInstance b = fixtures::make_e2();
  const PeriodicDataScan scan = scan_periodic_data(a, b, 3);
  REQUIRE(!scan.failure.has_value());
  CHECK(scan.base_word == "1");
  // orbits 1, 2, 12, 112, 122: one datum per orbit point
  REQUIRE(scan.data.size() == 10);
  for (const PeriodicConjugacyDatum& d : scan.data) {
    CHECK(d.residual <= 1e-12);
    CHECK(d.bound_check >= 1.0);  // spectral norm 1 forces ||c^{-1}|| >= 1
  }
  // fixed-point blocks differ (shear-conjugated diagonal vs diagonal); the
  // balanced orbit (12) multiplies out to Id on both sides and may fast-path
  CHECK(!scan.data[0].equal_blocks);
  CHECK(scan.m_bound >= 1.0);
  CHECK(scan.m_bound < 10.0);
  CHECK(scan.holder_diagnostic > 0.0);

  // deterministic: a second scan reproduces the solved transfer values
  const PeriodicDataScan again = scan_periodic_data(a, b, 3);
  REQUIRE(again.data.size() == scan.data.size());
  for (std::size_t i = 0; i < scan.data.size(); ++i)
    CHECK(metric_d(scan.data[i].c_p, again.data[i].c_p) == 0.0);
}

TEST_CASE("periodic data scan fast path and failure witness") {
  const CocycleInstance e2 = fixtures::make_e2();
  const PeriodicDataScan self = scan_periodic_data(e2, e2, 2);
  REQUIRE(!self.failure.has_value());
  REQUIRE(self.data.size() == 4);
  CHECK(self.data[0].equal_blocks);
  CHECK(self.data[0].residual == 0.0);
  CHECK(metric_d(self.data[0].c_p, InvertibleOperator::identity(2)) == 0.0);

  const PeriodicDataScan bad =
      scan_periodic_data(e2, fixtures::make_strong_diagonal(), 4);
  REQUIRE(bad.failure.has_value());
  CHECK(bad.failure->orbit_word == "1");
  CHECK(bad.failure->period == 1);
  CHECK(bad.failure->reason.find("intertwiner") != std::string::npos);
  CHECK(bad.data.empty());

  CHECK_THROWS_AS(scan_periodic_data(e2, e2, 0), InvalidInput);
  CHECK_THROWS_AS(
      scan_periodic_data(e2, fixtures::make_e2(fixtures::golden_mean()), 2),
      InvalidInput);
}

TEST_CASE("synthesis reproduces the generating transfer map exactly") {
  const CocycleInstance a = fixtures::make_e3();
  const CocycleInstance b = fixtures::make_e2();
  const BunchingCertificate cert = cert_for(a);
  const LocallyConstantGenerator conj = fixtures::e3_conj();
  const PeriodicOrbitPoint p0 = a.shift().periodic_point("1");
  const InvertibleOperator c_p0 = conj.at("1");

  const SynthesizedConjugacy sc = synth_homoclinic(a, b, cert, p0, c_p0, 6);
  CHECK(sc.entries().size() == 64);
  CHECK(sc.max_defect() <= 1e-12);
  CHECK(sc.budget() == 6);
  CHECK(sc.holder_constant() > 0.0);
  CHECK(sc.holder_constant() < 1.0);

  const auto at_base = sc.stored_value(p0.point());
  REQUIRE(at_base.has_value());
  CHECK(metric_d(*at_base, c_p0) == 0.0);  // trivial holonomies at the base

  // every synthesized value matches the transfer map that defined a = C b C^-1
  for (const auto& [x, op] : sc.entries()) {
    const Word w(1, x.symbol_at(0));
    CHECK(metric_d(op, conj.at(w)) <= 1e-12);
  }

  // a larger budget extends the table without moving shared values
  const SynthesizedConjugacy wide = synth_homoclinic(a, b, cert, p0, c_p0, 8);
  CHECK(wide.entries().size() == 256);
  for (const auto& [x, op] : sc.entries()) {
    const auto v = wide.stored_value(x);
    REQUIRE(v.has_value());
    CHECK(metric_d(op, *v) <= 1e-12);
  }
}

TEST_CASE("synthesis rejects bad inputs and gauge mismatches") {
  const CocycleInstance a = fixtures::make_e3();
  const CocycleInstance b = fixtures::make_e2();
  const BunchingCertificate cert = cert_for(a);
  const PeriodicOrbitPoint p0 = a.shift().periodic_point("1");
  const InvertibleOperator id = InvertibleOperator::identity(2);

  BunchingCertificate no_cert = cert;
  no_cert.theta = 1.2;
  CHECK_THROWS_AS(synth_homoclinic(a, b, no_cert, p0, id, 4), NoCertificate);
  CHECK_THROWS_AS(synth_homoclinic(a, b, cert, p0, id, -1), InvalidInput);
  CHECK_THROWS_AS(synth_homoclinic(a, b, cert, p0, id, 4, 0.0), InvalidInput);
  CHECK_THROWS_AS(synth_homoclinic(a, b, cert, p0, InvertibleOperator::identity(3), 4),
                  DimensionMismatch);

  // non-cohomologous pair: the stable and unstable routes disagree
  const CocycleInstance sd = fixtures::make_strong_diagonal();
  const BunchingCertificate cert_e2 = cert_for(b);
  CHECK_THROWS_AS(synth_homoclinic(b, sd, cert_e2, p0, id, 4), DefectExceeded);

  // cohomologous pair but the wrong base value: rejected at synthesis or by
  // the cohomology check, depending on where the gauge error surfaces
  bool rejected = false;
  try {
    const SynthesizedConjugacy off = synth_homoclinic(a, b, cert, p0, id, 5);
    rejected = !verify_cohomology(off, 40, 5, 3).pass;
  } catch (const DefectExceeded&) {
    rejected = true;
  }
  CHECK(rejected);
}

TEST_CASE("extended evaluation covers stored, homoclinic, and spliced points") {
  const CocycleInstance a = fixtures::make_e3();
  const CocycleInstance b = fixtures::make_e2();
  const BunchingCertificate cert = cert_for(a);
  const LocallyConstantGenerator conj = fixtures::e3_conj();
  const PeriodicOrbitPoint p0 = a.shift().periodic_point("1");
  const SynthesizedConjugacy sc =
      synth_homoclinic(a, b, cert, p0, conj.at("1"), 6);
  const ShiftSpec& s = a.shift();

  // stored fast path
  const ExtendedValue at_base = evaluate_extended(sc, p0.point(), 0.25);
  CHECK(at_base.stored);
  CHECK(at_base.error_bound == 0.0);
  CHECK(metric_d(at_base.value, sc.base_value()) == 0.0);

  // homoclinic point beyond the stored budget: exact, not stored
  const SymbolicPoint far = s.point("1", "2111111112", "1", -6);
  CHECK(!sc.stored_value(far).has_value());
  const ExtendedValue hv = evaluate_extended(sc, far, 0.25);
  CHECK(!hv.stored);
  CHECK(hv.error_bound == 0.0);
  CHECK(hv.at == far);
  CHECK(metric_d(hv.value, conj.at(Word(1, far.symbol_at(0)))) <= 1e-12);

  // splice path: not forward asymptotic to the base orbit
  const SymbolicPoint two = s.periodic_point("2").point();
  const double delta = std::pow(s.nu(), 10);
  const ExtendedValue sv = evaluate_extended(sc, two, delta);
  CHECK(!sv.stored);
  CHECK(!(sv.at == two));
  CHECK(sv.at.window(-10, 10) == Word(21, '2'));
  CHECK(sv.error_bound ==
        doctest::Approx(sc.holder_constant() * std::pow(delta, sc.beta()))
            .epsilon(1e-12));
  // locally constant data: the splice already evaluates the transfer map to
  // machine precision at moderate depth
  CHECK(metric_d(sv.value, conj.at("2")) <= 1e-12);
  // deeper splices keep the truncation bound shrinking, but the holonomy
  // products against this maximally unbalanced point accumulate roundoff of
  // order exp(2 beta Lambda m) * eps, so only ask for the looser agreement
  const ExtendedValue deep = evaluate_extended(sc, two, std::pow(s.nu(), 48));
  CHECK(metric_d(deep.value, conj.at("2")) <= 1e-7);

  CHECK_THROWS_AS(evaluate_extended(sc, two, 0.0), InvalidInput);
}

TEST_CASE("cohomology and step relation checks pass on the coboundary pair") {
  const CocycleInstance a = fixtures::make_e3();
  const CocycleInstance b = fixtures::make_e2();
  const BunchingCertificate cert = cert_for(a);
  const LocallyConstantGenerator conj = fixtures::e3_conj();
  const PeriodicOrbitPoint p0 = a.shift().periodic_point("1");
  const SynthesizedConjugacy sc =
      synth_homoclinic(a, b, cert, p0, conj.at("1"), 8);

  const CohomologyReport rep = verify_cohomology(sc, 60, 6, 99);
  CHECK(rep.pass);
  CHECK(rep.max_residual <= 1e-10);
  CHECK(rep.samples == 60);
  CHECK(rep.n_max == 6);

  const CohomologyReport rep2 = verify_cohomology(sc, 60, 6, 99);
  CHECK(rep.max_residual == rep2.max_residual);  // seeded sampling

  const StepRelationReport step = verify_step_relation(sc, 30, 101);
  CHECK(step.pass);
  CHECK(step.max_residual <= 1e-10);
  CHECK(step.samples == 30);

  CHECK_THROWS_AS(verify_cohomology(sc, 0, 5, 1), InvalidInput);
  CHECK_THROWS_AS(verify_step_relation(sc, 0, 1), InvalidInput);
}
