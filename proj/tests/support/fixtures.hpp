#pragma once

#include <cmath>
#include <map>

#include "cocyc/cocycle.hpp"
#include "cocyc/shift_space.hpp"

// Shared example systems used across the test suite.
namespace fixtures {

inline cocyc::ShiftSpec full_shift_2() { return cocyc::ShiftSpec(2, {1, 1, 1, 1}, 0.5); }

// Forbidden word "22"; periodic counts follow the Lucas numbers.
inline cocyc::ShiftSpec golden_mean() { return cocyc::ShiftSpec(2, {1, 1, 1, 0}, 0.5); }

inline Eigen::MatrixXd diag2(double a, double b) {
  Eigen::MatrixXd m(2, 2);
  m << a, 0.0, 0.0, b;
  return m;
}

// Symbol-dependent diagonal with exponents +-0.1: strongly fiber bunched.
inline cocyc::CocycleInstance make_e2(const cocyc::ShiftSpec& s = full_shift_2()) {
  const double a = std::exp(0.1), b = std::exp(-0.1);
  std::map<cocyc::Word, cocyc::InvertibleOperator> t;
  t.emplace("1", cocyc::InvertibleOperator(diag2(a, b)));
  t.emplace("2", cocyc::InvertibleOperator(diag2(b, a)));
  return cocyc::CocycleInstance(s, cocyc::LocallyConstantGenerator(0, 1.0, std::move(t)));
}

// Symbol-dependent diagonal with exponents +-log 2: not fiber bunched.
inline cocyc::CocycleInstance make_strong_diagonal(
    const cocyc::ShiftSpec& s = full_shift_2()) {
  std::map<cocyc::Word, cocyc::InvertibleOperator> t;
  t.emplace("1", cocyc::InvertibleOperator(diag2(2.0, 0.5)));
  t.emplace("2", cocyc::InvertibleOperator(diag2(0.5, 2.0)));
  return cocyc::CocycleInstance(s, cocyc::LocallyConstantGenerator(0, 1.0, std::move(t)));
}

// Transfer map for the coboundary pair: a shear per symbol.
inline cocyc::LocallyConstantGenerator e3_conj() {
  Eigen::MatrixXd c1(2, 2), c2(2, 2);
  c1 << 1.0, 0.3, 0.0, 1.0;
  c2 << 1.0, 0.0, 0.3, 1.0;
  std::map<cocyc::Word, cocyc::InvertibleOperator> t;
  t.emplace("1", cocyc::InvertibleOperator(c1));
  t.emplace("2", cocyc::InvertibleOperator(c2));
  return cocyc::LocallyConstantGenerator(0, 1.0, std::move(t));
}

// Coboundary of E2 by the shear transfer map; window radius 1.
inline cocyc::CocycleInstance make_e3(const cocyc::ShiftSpec& s = full_shift_2()) {
  return cocyc::make_coboundary(make_e2(s), e3_conj());
}

// Rotation-perturbed diagonal at any window radius: the rotation angle reads
// the outermost window symbols, so the cocycle does not commute, while
// rotations leave singular values alone and bunching certifies at N = 1.
inline cocyc::CocycleInstance make_rotation_family(int radius,
                                                   const cocyc::ShiftSpec& s =
                                                       full_shift_2()) {
  const double a = std::exp(0.1), b = std::exp(-0.1);
  std::map<cocyc::Word, cocyc::InvertibleOperator> t;
  for (const auto& w : s.admissible_words(2 * radius + 1)) {
    const double th = 0.05 * ((w.front() - '1') - (w.back() - '1'));
    Eigen::MatrixXd m(2, 2);
    m << std::cos(th) * a, -std::sin(th) * b, std::sin(th) * a, std::cos(th) * b;
    t.emplace(w, cocyc::InvertibleOperator(m));
  }
  return cocyc::CocycleInstance(
      s, cocyc::LocallyConstantGenerator(radius, 1.0, std::move(t)));
}

}  // namespace fixtures
