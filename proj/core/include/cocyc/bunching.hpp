#pragma once

#include <optional>
#include <vector>

#include "cocyc/cocycle.hpp"

// Fiber bunching certificates: uniform bounds Q_A(x,n) nu^{n beta} <= L theta^n
// with theta < 1. For locally constant generators Q_A(x,n) depends on the
// window x_{-r..n-1+r} only, so the sup over x is an exact max over finitely
// many admissible words and certificates carry a machine-checkable margin.
namespace cocyc {

enum class CertificateMode { direct, periodic_evidence, transferred };

struct BunchingCertificate {
  double theta;  // contraction rate, in (0,1)
  double L;      // multiplicative constant, >= 1
  int N;         // block length realizing uniform contraction (0 if indirect)
  double margin; // -max_x (log Q_A(x,N) + N beta log nu), > 0
  CertificateMode mode;
};

// Scan N = 1..n_max for a block length with max_x a_N(x) < 0, where
// a_n(x) = log Q_A(x,n) + n beta log nu. On success builds the certificate
// theta = exp(max a_N / N), L = theta^{-N} max(1, max_{n<N} exp(max a_n)).
struct UniformSearchResult {
  std::optional<BunchingCertificate> certificate;
  int n_max;                       // scan bound actually used
  Word worst_word;                 // lex-first maximizer at the decisive n
  double worst_gap;                // its a_n value
  std::vector<double> max_gap_by_n;  // max_x a_n(x), index 0 holds n = 1
};
UniformSearchResult find_uniform_N(const CocycleInstance& c, int n_max = 20);

// Exhaustive recheck of the certified inequality over all admissible words up
// to the horizon. Strict: a violation at any n <= horizon fails the check.
struct DirectCheckViolation {
  Word word;
  int n;
  double lhs;    // Q_A nu^{n beta} on the word
  double bound;  // L theta^n
};
struct DirectCheckReport {
  bool pass;
  int horizon;
  double max_ratio;  // max over n, words of lhs / bound
  std::optional<DirectCheckViolation> first_violation;
};
DirectCheckReport direct_check(const CocycleInstance& c,
                               const BunchingCertificate& cert, int horizon);

// Periodic-data route: evaluates a_k(p) at every periodic point of period
// k <= max_period. All gaps negative -> evidence with a slack-padded rate.
// Some gap >= 0 with a nondecreasing trend of max rates -> violation witness.
enum class PremiseStatus { evidence, violation, inconclusive };
struct PremiseViolation {
  Word orbit_word;
  int k;
  double gap;  // a_k(p) >= 0
};
struct PeriodicPremiseReport {
  PremiseStatus status;
  double theta_tilde;  // meaningful when status == evidence
  double L_tilde;
  int max_period;
  std::vector<double> max_rate_by_k;  // max_p a_k(p) / k, index 0 holds k = 1
  std::optional<PremiseViolation> violation;
};
PeriodicPremiseReport periodic_premise_check(const CocycleInstance& c,
                                             int max_period);

// Bound transferred to a cocycle whose periodic data is conjugate to a
// certified one with transfer maps bounded by m_bound: Q <= m_bound^2 L theta^k
// at period-k points.
struct TransferredPeriodicBound {
  double m_bound;
  double L;
  double theta;
  double at(int k) const;
};
TransferredPeriodicBound transfer_bound(const BunchingCertificate& cert,
                                        double m_bound);
BunchingCertificate transferred_certificate(const BunchingCertificate& cert,
                                            double m_bound);

constexpr double kPremiseRateSlack = 1e-6;

}  // namespace cocyc
