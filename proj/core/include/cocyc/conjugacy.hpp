#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cocyc/bunching.hpp"
#include "cocyc/cocycle.hpp"

// Cohomology of cocycles: deciding whether two cocycles A and B are related by
// a transfer map C with A(x) = C(fx) B(x) C(x)^{-1}, starting from conjugacy
// of their periodic data and synthesizing C on homoclinic points through
// stable and unstable holonomies.
namespace cocyc {

struct IntertwinerSolveOptions {
  std::uint64_t seed = 0x1f2e3d4c5b6a7988ull;
  int random_attempts = 64;
  double residual_tol = 1e-9;
};

// C with b_block = C a_block C^{-1}, found through the kernel of the Sylvester
// operator X -> b_block X - X a_block: deterministic candidates first (the
// projection of the identity, then kernel basis vectors), then seeded random
// kernel combinations. Throws NotConjugate when no invertible intertwiner
// exists. C is normalized to spectral norm 1; it is unique only up to the
// centralizer of a_block.
InvertibleOperator solve_periodic_conjugacy(const InvertibleOperator& a_block,
                                            const InvertibleOperator& b_block,
                                            const IntertwinerSolveOptions& opts = {});

struct PeriodicConjugacyDatum {
  PeriodicOrbitPoint point;
  int period;                // least period of the orbit
  InvertibleOperator c_p;    // A^k_p = c_p B^k_p c_p^{-1}
  double bound_check;        // max(||c_p||, ||c_p^{-1}||)
  double residual;           // ||A^k_p - c_p B^k_p c_p^{-1}|| / ||A^k_p||
  bool equal_blocks;         // fast path: the blocks agreed to 1e-12
};

struct ConjugacyFailure {
  Word orbit_word;
  int period;
  std::string reason;
};

// Periodic data comparison up to max_period: one solve per orbit
// representative, then exact propagation along the orbit via
// C(f^{j+1}p) = A(f^j p) C(f^j p) B(f^j p)^{-1}. Stops at the first orbit
// whose blocks are not conjugate and reports it as the failure witness.
struct PeriodicDataScan {
  std::vector<PeriodicConjugacyDatum> data;
  std::optional<ConjugacyFailure> failure;
  double m_bound;            // max bound_check over the data
  double holder_diagnostic;  // max_p metric_d(c_p, c_p0) / dist(p, p0)^beta
  Word base_word;            // the p0 used for the diagnostic (first orbit)
};
PeriodicDataScan scan_periodic_data(const CocycleInstance& a,
                                    const CocycleInstance& b, int max_period,
                                    const IntertwinerSolveOptions& opts = {});

// A transfer map candidate synthesized on the homoclinic points of p0:
// values C(x) = H^{A,s}_{p0,x} H^{Bc,s}_{x,p0} C_p0 where Bc is B conjugated
// by the constant C_p0, checked against the same expression through unstable
// holonomies (the defect). Owns copies of both cocycles so later
// verification runs against exactly the data used for synthesis.
class SynthesizedConjugacy {
 public:
  const CocycleInstance& a() const { return a_; }
  const CocycleInstance& b() const { return b_; }
  const CocycleInstance& b_conj() const { return b_conj_; }
  const BunchingCertificate& certificate() const { return cert_; }
  const PeriodicOrbitPoint& base_point() const { return p0_; }
  const InvertibleOperator& base_value() const { return c_p0_; }
  int budget() const { return budget_; }
  double beta() const { return a_.beta(); }
  double defect_tol() const { return defect_tol_; }
  double max_defect() const { return max_defect_; }
  // max over stored pairs of metric_d(C(x), C(y)) / dist(x, y)^beta.
  double holder_constant() const { return holder_; }

  // Stored values sorted by the canonical point encoding.
  const std::vector<std::pair<SymbolicPoint, InvertibleOperator>>& entries() const {
    return entries_;
  }
  std::optional<InvertibleOperator> stored_value(const SymbolicPoint& x) const;

  friend SynthesizedConjugacy synth_homoclinic(const CocycleInstance& a,
                                               const CocycleInstance& b,
                                               const BunchingCertificate& cert_a,
                                               const PeriodicOrbitPoint& p0,
                                               const InvertibleOperator& c_p0,
                                               int budget, double defect_tol,
                                               int workers);

 private:
  SynthesizedConjugacy(CocycleInstance a, CocycleInstance b, CocycleInstance b_conj,
                       BunchingCertificate cert, PeriodicOrbitPoint p0,
                       InvertibleOperator c_p0, int budget, double defect_tol);

  CocycleInstance a_;
  CocycleInstance b_;
  CocycleInstance b_conj_;
  BunchingCertificate cert_;
  PeriodicOrbitPoint p0_;
  InvertibleOperator c_p0_;
  int budget_;
  double defect_tol_;
  double max_defect_ = 0.0;
  double holder_ = 0.0;
  std::vector<std::pair<SymbolicPoint, InvertibleOperator>> entries_;
  std::map<std::string, std::size_t> index_;
};

// Builds the table over enumerate_homoclinic(p0, budget). Throws
// DefectExceeded when the stable and unstable routes disagree beyond
// defect_tol at some point, naming that point.
SynthesizedConjugacy synth_homoclinic(const CocycleInstance& a,
                                      const CocycleInstance& b,
                                      const BunchingCertificate& cert_a,
                                      const PeriodicOrbitPoint& p0,
                                      const InvertibleOperator& c_p0, int budget,
                                      double defect_tol = 1e-8, int workers = 1);

// C(x') for an admissible x' within delta of x: stored values and exact
// homoclinic points are returned with error bound 0; otherwise x is spliced
// onto the p0 tails outside a window of radius m with nu^m <= delta, and the
// bound is holder_constant * delta^beta. Throws BudgetExceeded if no
// admissible splice exists.
struct ExtendedValue {
  InvertibleOperator value;
  double error_bound;
  bool stored;       // came straight from the synthesized table
  SymbolicPoint at;  // the point actually evaluated (x or its splice)
};
ExtendedValue evaluate_extended(const SynthesizedConjugacy& sc,
                                const SymbolicPoint& x, double delta);

// Samples stored points x and exponents |n| <= n_max, checking
// ||A^n_x - C(f^n x) B^n_x C(x)^{-1}|| / ||A^n_x|| against tol.
struct CohomologyReport {
  double max_residual;
  int samples;
  int n_max;
  double tol;
  bool pass;
};
CohomologyReport verify_cohomology(const SynthesizedConjugacy& sc, int samples,
                                   int n_max, std::uint64_t seed,
                                   double tol = 1e-8);

// Samples points of W^s(p0) cap W^u(f^{k-1} p0), where the extension of C
// beyond the homoclinic set is exercised, and checks the one-step relation
// A(x) = C(fx) B(x) C(x)^{-1}.
struct StepRelationReport {
  double max_residual;
  int samples;
  double tol;
  bool pass;
};
StepRelationReport verify_step_relation(const SynthesizedConjugacy& sc,
                                        int samples, std::uint64_t seed,
                                        double tol = 1e-8);

}  // namespace cocyc
