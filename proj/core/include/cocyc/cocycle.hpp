#pragma once

#include <map>

#include "cocyc/linops.hpp"
#include "cocyc/shift_space.hpp"

// Holder linear cocycles over a subshift, generated by locally constant data:
// A(x) depends on the window x_{-r..r} only, so every value of A^n_x is a
// finite product of table entries and all cocycle identities can be checked
// to floating precision rather than approximated.
namespace cocyc {

class LocallyConstantGenerator {
 public:
  LocallyConstantGenerator(int window_radius, double beta,
                           std::map<Word, InvertibleOperator> table);

  int window_radius() const { return radius_; }
  double beta() const { return beta_; }
  int dim() const { return dim_; }
  const std::map<Word, InvertibleOperator>& table() const { return table_; }
  const InvertibleOperator& at(const Word& window) const;

 private:
  int radius_;
  double beta_;
  int dim_;
  std::map<Word, InvertibleOperator> table_;
};

class CocycleInstance {
 public:
  // Validates that the table covers exactly the admissible windows.
  CocycleInstance(ShiftSpec shift, LocallyConstantGenerator generator);

  const ShiftSpec& shift() const { return shift_; }
  const LocallyConstantGenerator& generator() const { return gen_; }
  int dim() const { return gen_.dim(); }
  double beta() const { return gen_.beta(); }
  int window_radius() const { return gen_.window_radius(); }

  // A(x), the generator at the window of x around 0.
  const InvertibleOperator& evaluate(const SymbolicPoint& x) const;

  // A^n_x: identity for n = 0, A(f^{n-1}x) ... A(x) for n > 0, and
  // (A^{|n|}_{f^n x})^{-1} for n < 0. |n| capped at 10^4.
  InvertibleOperator iterate(const SymbolicPoint& x, long n) const;

  // ||A^n_x|| ||(A^n_x)^{-1}||.
  double q_distortion(const SymbolicPoint& x, long n) const;

  // log Q_A(x,n) + n beta log nu, the subadditive bunching functional; n >= 1.
  double bunching_gap(const SymbolicPoint& x, long n) const;

  // Smallest K with d(A(x), A(y)) <= K dist(x,y)^beta for all points:
  // max over table pairs of metric_d / nu^{r beta}.
  double holder_constant() const;

 private:
  ShiftSpec shift_;
  LocallyConstantGenerator gen_;
};

// log ||A^n_x|| and log ||(A^n_x)^{-1}|| computed with norm rescaling, so
// products far beyond double range stay evaluable; n >= 0.
struct LogProductNorms {
  double log_norm;
  double log_inv_norm;
};
LogProductNorms log_iterate_norms(const CocycleInstance& c, const SymbolicPoint& x,
                                  long n);

// The pair cohomologous to `base` through the transfer map `conj`:
// A(x) = conj(fx) base(x) conj(x)^{-1}, locally constant with window radius
// max(r_base, r_conj) + 1.
CocycleInstance make_coboundary(const CocycleInstance& base,
                                const LocallyConstantGenerator& conj);

constexpr long kIterateCap = 10000;

}  // namespace cocyc
