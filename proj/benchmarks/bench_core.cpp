// Microbenchmarks for the hot paths: cocycle products, the bunching search,
// holonomies, and the combinatorial enumerations behind synthesis.
#include <benchmark/benchmark.h>

#include <cmath>
#include <map>

#include "cocyc/bunching.hpp"
#include "cocyc/cocycle.hpp"
#include "cocyc/conjugacy.hpp"
#include "cocyc/holonomy.hpp"
#include "cocyc/shift_space.hpp"

namespace {

using namespace cocyc;

ShiftSpec full_shift_2() { return ShiftSpec(2, {1, 1, 1, 1}, 0.5); }

Eigen::MatrixXd diag2(double a, double b) {
  Eigen::MatrixXd m(2, 2);
  m << a, 0.0, 0.0, b;
  return m;
}

CocycleInstance make_e2() {
  const double a = std::exp(0.1), b = std::exp(-0.1);
  std::map<Word, InvertibleOperator> t;
  t.emplace("1", InvertibleOperator(diag2(a, b)));
  t.emplace("2", InvertibleOperator(diag2(b, a)));
  return CocycleInstance(full_shift_2(), LocallyConstantGenerator(0, 1.0, std::move(t)));
}

CocycleInstance make_rotation_family(int radius) {
  const ShiftSpec s = full_shift_2();
  const double a = std::exp(0.1), b = std::exp(-0.1);
  std::map<Word, InvertibleOperator> t;
  for (const auto& w : s.admissible_words(2 * radius + 1)) {
    const double th = 0.05 * ((w.front() - '1') - (w.back() - '1'));
    Eigen::MatrixXd m(2, 2);
    m << std::cos(th) * a, -std::sin(th) * b, std::sin(th) * a, std::cos(th) * b;
    t.emplace(w, InvertibleOperator(m));
  }
  return CocycleInstance(s, LocallyConstantGenerator(radius, 1.0, std::move(t)));
}

void bm_iterate(benchmark::State& state) {
  const CocycleInstance c = make_e2();
  const SymbolicPoint x = c.shift().point("12", "2112122", "21", -3);
  const long n = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(c.iterate(x, n));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(bm_iterate)->Arg(100)->Arg(1000);

// worst case: a cocycle that never certifies forces the full word sweep
void bm_find_uniform_n(benchmark::State& state) {
  std::map<Word, InvertibleOperator> t;
  t.emplace("1", InvertibleOperator(diag2(2.0, 0.5)));
  t.emplace("2", InvertibleOperator(diag2(0.5, 2.0)));
  const CocycleInstance c(full_shift_2(),
                          LocallyConstantGenerator(0, 1.0, std::move(t)));
  const int n_max = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(find_uniform_N(c, n_max));
}
BENCHMARK(bm_find_uniform_n)->Arg(4)->Arg(10);

void bm_stable_holonomy(benchmark::State& state) {
  const CocycleInstance c = make_rotation_family(1);
  const UniformSearchResult r = find_uniform_N(c, 8);
  const BunchingCertificate cert = *r.certificate;
  const ShiftSpec& s = c.shift();
  const SymbolicPoint x = s.point("12", "2112122121121221", "1", -8);
  const SymbolicPoint y = s.point("21", "1212212121121221", "1", -8);
  for (auto _ : state) benchmark::DoNotOptimize(stable_holonomy(c, cert, x, y));
}
BENCHMARK(bm_stable_holonomy);

void bm_enumerate_periodic(benchmark::State& state) {
  const ShiftSpec s = full_shift_2();
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(s.enumerate_periodic(k));
}
BENCHMARK(bm_enumerate_periodic)->Arg(8)->Arg(12);

void bm_enumerate_homoclinic(benchmark::State& state) {
  const ShiftSpec s = full_shift_2();
  const PeriodicOrbitPoint p0 = s.periodic_point("1");
  const int budget = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(s.enumerate_homoclinic(p0, budget));
}
BENCHMARK(bm_enumerate_homoclinic)->Arg(6)->Arg(10);

void bm_scan_periodic_data(benchmark::State& state) {
  const CocycleInstance b = make_e2();
  Eigen::MatrixXd c1(2, 2), c2(2, 2);
  c1 << 1.0, 0.3, 0.0, 1.0;
  c2 << 1.0, 0.0, 0.3, 1.0;
  std::map<Word, InvertibleOperator> t;
  t.emplace("1", InvertibleOperator(c1));
  t.emplace("2", InvertibleOperator(c2));
  const CocycleInstance a =
      make_coboundary(b, LocallyConstantGenerator(0, 1.0, std::move(t)));
  const int max_period = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(scan_periodic_data(a, b, max_period));
}
BENCHMARK(bm_scan_periodic_data)->Arg(4)->Arg(6);

}  // namespace

BENCHMARK_MAIN();
