#include "cocyc/holonomy.hpp"

#include <algorithm>
#include <string>

#include "cocyc/errors.hpp"

namespace cocyc {

namespace {

void require_certificate(const BunchingCertificate& cert, double tol) {
  if (!(cert.theta > 0.0) || !(cert.theta < 1.0) || !(cert.L >= 1.0))
    throw NoCertificate("holonomy requires a valid bunching certificate");
  if (!(tol > 0.0)) throw InvalidInput("holonomy tolerance must be positive");
}

}  // namespace

namespace detail {

HolonomyMap holonomy_product(const CocycleInstance& c, const SymbolicPoint& x,
                             const SymbolicPoint& y, LeafKind kind) {
  const int r = c.window_radius();
  long steps = 0;
  if (kind == LeafKind::stable) {
    const auto m = stable_agreement_start(x, y);
    if (!m)
      throw NotOnStableLeaf("points are not forward-asymptotic; no stable holonomy");
    // Factors of A^n at step j use windows [j-r, j+r], which agree once
    // j >= m + r; beyond that the products differ by factors that cancel.
    steps = std::max<long>(0, *m + r);
  } else {
    const auto m = unstable_agreement_end(x, y);
    if (!m)
      throw NotOnStableLeaf("points are not backward-asymptotic; no unstable holonomy");
    // Factors of A^{-n} at step j use windows [-j-r, -j+r], equal once
    // j >= r - m.
    steps = std::max<long>(0, r - *m);
  }
  if (steps > kHolonomyIterationCap)
    throw InvalidInput("holonomy product needs " + std::to_string(steps) +
                       " steps, above the cap of " +
                       std::to_string(kHolonomyIterationCap));
  const long n = kind == LeafKind::stable ? steps : -steps;
  const InvertibleOperator op = c.iterate(y, n).inverse().compose(c.iterate(x, n));
  return HolonomyMap{x, y, kind, op, steps, 0.0};
}

}  // namespace detail

HolonomyMap stable_holonomy(const CocycleInstance& c,
                            const BunchingCertificate& cert,
                            const SymbolicPoint& x, const SymbolicPoint& y,
                            double tol) {
  require_certificate(cert, tol);
  return detail::holonomy_product(c, x, y, LeafKind::stable);
}

HolonomyMap unstable_holonomy(const CocycleInstance& c,
                              const BunchingCertificate& cert,
                              const SymbolicPoint& x, const SymbolicPoint& y,
                              double tol) {
  require_certificate(cert, tol);
  return detail::holonomy_product(c, x, y, LeafKind::unstable);
}

}  // namespace cocyc
