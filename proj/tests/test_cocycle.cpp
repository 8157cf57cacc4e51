#include <cmath>
#include <map>

#include "doctest.h"

#include "cocyc/cocycle.hpp"
#include "cocyc/errors.hpp"
#include "cocyc/rng.hpp"
#include "support/fixtures.hpp"

using namespace cocyc;

namespace {

SymbolicPoint random_point(const ShiftSpec& s, int radius, DetRng& rng) {
  Word w;
  char cur = static_cast<char>('1' + rng.below(static_cast<std::uint64_t>(
                                        s.alphabet_size())));
  w.push_back(cur);
  for (int i = 1; i < 2 * radius + 1; ++i) {
    Word nxt;
    for (int sym = 0; sym < s.alphabet_size(); ++sym)
      if (s.allowed(cur, static_cast<char>('1' + sym)))
        nxt.push_back(static_cast<char>('1' + sym));
    cur = nxt[static_cast<std::size_t>(rng.below(nxt.size()))];
    w.push_back(cur);
  }
  return s.point_from_window(w, -radius);
}

}  // namespace

TEST_CASE("generator validation") {
  const double a = std::exp(0.1);
  std::map<Word, InvertibleOperator> t;
  t.emplace("1", InvertibleOperator(fixtures::diag2(a, 1 / a)));
  CHECK_THROWS_AS(LocallyConstantGenerator(-1, 1.0, t), InvalidInput);
  CHECK_THROWS_AS(LocallyConstantGenerator(0, 0.0, t), InvalidInput);
  CHECK_THROWS_AS(LocallyConstantGenerator(0, 1.5, t), InvalidInput);
  CHECK_THROWS_AS(LocallyConstantGenerator(0, 1.0,
                                           std::map<Word, InvertibleOperator>{}),
                  InvalidInput);
  // word length must be 2r + 1 for every key
  std::map<Word, InvertibleOperator> bad = t;
  bad.emplace("22", InvertibleOperator(fixtures::diag2(1, 1)));
  CHECK_THROWS_AS(LocallyConstantGenerator(0, 1.0, bad), InvalidInput);
  // dimensions must agree across entries
  std::map<Word, InvertibleOperator> mixed = t;
  mixed.emplace("2", InvertibleOperator::identity(3));
  CHECK_THROWS_AS(LocallyConstantGenerator(0, 1.0, mixed), InvalidInput);
}

TEST_CASE("cocycle table must match the admissible windows exactly") {
  const ShiftSpec gm = fixtures::golden_mean();
  // radius 0 but only one of the two admissible windows present
  std::map<Word, InvertibleOperator> partial;
  partial.emplace("1", InvertibleOperator::identity(2));
  CHECK_THROWS_AS(
      CocycleInstance(gm, LocallyConstantGenerator(0, 1.0, partial)),
      InvalidInput);
  // an entry on a forbidden word is rejected
  std::map<Word, InvertibleOperator> extra;
  extra.emplace("1", InvertibleOperator::identity(2));
  extra.emplace("2", InvertibleOperator::identity(2));
  LocallyConstantGenerator ok(0, 1.0, extra);
  CHECK_NOTHROW(CocycleInstance(gm, ok));
  std::map<Word, InvertibleOperator> wide;
  for (const Word& w : {"111", "112", "121", "211", "212"})
    wide.emplace(w, InvertibleOperator::identity(2));
  wide.emplace("222", InvertibleOperator::identity(2));
  CHECK_THROWS_AS(CocycleInstance(gm, LocallyConstantGenerator(1, 1.0, wide)),
                  InvalidInput);
}

TEST_CASE("iterates compose table entries in orbit order") {
  const CocycleInstance c = fixtures::make_e2();
  const ShiftSpec& s = c.shift();
  const SymbolicPoint x = s.point("1", "21", "2", 0);  // ...111 21 222...
  const Eigen::MatrixXd d1 = c.generator().at("1").matrix();
  const Eigen::MatrixXd d2 = c.generator().at("2").matrix();

  CHECK(spectral_norm(c.iterate(x, 0).matrix() -
                      Eigen::MatrixXd::Identity(2, 2)) == 0.0);
  CHECK(spectral_norm(c.evaluate(x).matrix() - d2) == 0.0);
  // A^3_x = A(f^2 x) A(f x) A(x) = D2 D1 D2
  CHECK(spectral_norm(c.iterate(x, 3).matrix() - d2 * d1 * d2) == 0.0);
  // A^{-2}_x = (A^2_{f^{-2}x})^{-1} = (D1 D1)^{-1}
  CHECK(spectral_norm(c.iterate(x, -2).matrix() -
                      (d1 * d1).inverse()) < 1e-15);
  CHECK_THROWS_AS(c.iterate(x, kIterateCap + 1), InvalidInput);
}

TEST_CASE("cocycle equation on random points") {
  DetRng rng(11);
  for (const ShiftSpec& s : {fixtures::full_shift_2(), fixtures::golden_mean()}) {
    const CocycleInstance c = fixtures::make_e2(s);
    for (int t = 0; t < 40; ++t) {
      const SymbolicPoint x = random_point(s, 30, rng);
      const long n = -15 + static_cast<long>(rng.below(31));
      const long k = -15 + static_cast<long>(rng.below(31));
      const Eigen::MatrixXd lhs = c.iterate(x, n + k).matrix();
      const Eigen::MatrixXd rhs =
          c.iterate(shift(x, k), n).compose(c.iterate(x, k)).matrix();
      CHECK(spectral_norm(lhs - rhs) / spectral_norm(lhs) < 1e-13);
    }
  }
}

TEST_CASE("distortion and bunching gap oracles on E2") {
  const CocycleInstance c = fixtures::make_e2();
  const SymbolicPoint fix = c.shift().periodic_point("1").point();
  // Q(1^inf, 5) = ||diag(e^.5, e^-.5)|| * ||inverse|| = e
  CHECK(c.q_distortion(fix, 5) == doctest::Approx(std::exp(1.0)).epsilon(1e-13));
  // gap(1^inf, n) = 0.2 n - n log 2
  for (long n : {1L, 3L, 7L}) {
    const double expect = 0.2 * n - n * std::log(2.0);
    CHECK(c.bunching_gap(fix, n) == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK_THROWS_AS(c.bunching_gap(fix, 0), InvalidInput);
  // Holder constant at radius 0: metric distance of the two table entries
  const double sinh01 = std::sinh(0.1);
  CHECK(c.holder_constant() == doctest::Approx(4.0 * sinh01).epsilon(1e-12));
}

TEST_CASE("log product norms survive far beyond double range") {
  const CocycleInstance sd = fixtures::make_strong_diagonal();
  const SymbolicPoint fix = sd.shift().periodic_point("1").point();
  const LogProductNorms logs = log_iterate_norms(sd, fix, 2000);
  // diag(2,1/2)^2000: log norm = 2000 log 2, far past exp overflow
  CHECK(logs.log_norm == doctest::Approx(2000 * std::log(2.0)).epsilon(1e-12));
  CHECK(logs.log_inv_norm == doctest::Approx(2000 * std::log(2.0)).epsilon(1e-12));
  // consistency with direct evaluation at small n
  const CocycleInstance e2 = fixtures::make_e2();
  const SymbolicPoint x = e2.shift().point("12", "211", "21", -1);
  const LogProductNorms small = log_iterate_norms(e2, x, 9);
  CHECK(small.log_norm ==
        doctest::Approx(std::log(op_norm(e2.iterate(x, 9)))).epsilon(1e-12));
  CHECK(small.log_inv_norm ==
        doctest::Approx(std::log(op_norm(e2.iterate(x, 9).inverse())))
            .epsilon(1e-12));
}

TEST_CASE("coboundary pairs satisfy the transfer identity") {
  const CocycleInstance b = fixtures::make_e2();
  const LocallyConstantGenerator conj = fixtures::e3_conj();
  const CocycleInstance a = make_coboundary(b, conj);
  CHECK(a.window_radius() == 1);

  DetRng rng(23);
  for (int t = 0; t < 30; ++t) {
    const SymbolicPoint x = random_point(a.shift(), 25, rng);
    const long n = -12 + static_cast<long>(rng.below(25));
    const InvertibleOperator cx = conj.at(x.window(0, 0));
    const InvertibleOperator cfnx = conj.at(shift(x, n).window(0, 0));
    const Eigen::MatrixXd lhs = a.iterate(x, n).matrix();
    const Eigen::MatrixXd rhs =
        cfnx.compose(b.iterate(x, n)).compose(cx.inverse()).matrix();
    CHECK(spectral_norm(lhs - rhs) / std::max(1.0, spectral_norm(lhs)) < 1e-13);
  }
}
