#pragma once

#include "cocyc/bunching.hpp"
#include "cocyc/cocycle.hpp"

// Holonomies: the limits H^s_{x,y} = lim_n (A^n_y)^{-1} A^n_x along stable
// pairs and H^u_{x,y} = lim_n (A^{-n}_y)^{-1} A^{-n}_x along unstable pairs.
// A bunching certificate is required before taking the limit; for locally
// constant generators the product stabilizes after finitely many steps, at
// which point all later factors cancel exactly, so error_bound is 0.
namespace cocyc {

enum class LeafKind { stable, unstable };

struct HolonomyMap {
  SymbolicPoint from;
  SymbolicPoint to;
  LeafKind kind;
  InvertibleOperator op;
  long iterations_used;
  double error_bound;
};

// H^s_{x,y}; throws NotOnStableLeaf when y is not forward-asymptotic to x and
// NoCertificate for a malformed certificate.
HolonomyMap stable_holonomy(const CocycleInstance& c,
                            const BunchingCertificate& cert,
                            const SymbolicPoint& x, const SymbolicPoint& y,
                            double tol = 1e-12);

// H^u_{x,y}; requires y backward-asymptotic to x.
HolonomyMap unstable_holonomy(const CocycleInstance& c,
                              const BunchingCertificate& cert,
                              const SymbolicPoint& x, const SymbolicPoint& y,
                              double tol = 1e-12);

constexpr long kHolonomyIterationCap = 1000;

namespace detail {
// Stabilized holonomy product without the certificate gate. Conjugacy
// synthesis uses this for the partner cocycle, whose bunching follows from
// the transferred bound rather than a direct certificate.
HolonomyMap holonomy_product(const CocycleInstance& c, const SymbolicPoint& x,
                             const SymbolicPoint& y, LeafKind kind);
}  // namespace detail

}  // namespace cocyc
