#include "cocyc/bunching.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "cocyc/errors.hpp"

namespace cocyc {

namespace {

// Visits every admissible word of length n + 2r together with the ordered
// product P of the n generator entries along it and the product Pinv of their
// inverses in reverse order, so Q = ||P|| ||Pinv|| at each leaf. Words are
// visited in lexicographic order.
template <class Visit>
void scan_window_products(const CocycleInstance& c, int n, Visit&& visit) {
  const ShiftSpec& s = c.shift();
  const int r = c.window_radius();
  const int len = n + 2 * r;
  const int d = c.dim();
  std::vector<Eigen::MatrixXd> fwd(static_cast<std::size_t>(n) + 1);
  std::vector<Eigen::MatrixXd> inv(static_cast<std::size_t>(n) + 1);
  fwd[0] = Eigen::MatrixXd::Identity(d, d);
  inv[0] = Eigen::MatrixXd::Identity(d, d);
  Word word;
  word.reserve(static_cast<std::size_t>(len));
  std::function<void()> grow = [&] {
    const int pos = static_cast<int>(word.size());
    if (pos == len) {
      const std::size_t depth = static_cast<std::size_t>(n);
      visit(word, fwd[depth], inv[depth]);
      return;
    }
    for (int sym = 0; sym < s.alphabet_size(); ++sym) {
      const char ch = static_cast<char>('1' + sym);
      if (!word.empty() && !s.allowed(word.back(), ch)) continue;
      word.push_back(ch);
      if (pos >= 2 * r) {
        const std::size_t depth = static_cast<std::size_t>(pos - 2 * r);
        const InvertibleOperator& step =
            c.generator().at(word.substr(word.size() - (2 * r + 1)));
        fwd[depth + 1] = step.matrix() * fwd[depth];
        inv[depth + 1] = inv[depth] * step.inverse_matrix();
      }
      grow();
      word.pop_back();
    }
  };
  grow();
}

struct GapScan {
  double max_gap;
  Word argmax;  // lex-first maximizer
};

GapScan max_gap_over_words(const CocycleInstance& c, int n) {
  GapScan out{-std::numeric_limits<double>::infinity(), {}};
  const double drift = n * c.beta() * std::log(c.shift().nu());
  scan_window_products(c, n,
                       [&](const Word& w, const Eigen::MatrixXd& fwd,
                           const Eigen::MatrixXd& inv) {
                         const double gap =
                             std::log(spectral_norm(fwd)) +
                             std::log(spectral_norm(inv)) + drift;
                         if (gap > out.max_gap) {
                           out.max_gap = gap;
                           out.argmax = w;
                         }
                       });
  return out;
}

}  // namespace

UniformSearchResult find_uniform_N(const CocycleInstance& c, int n_max) {
  if (n_max < 1) throw InvalidInput("uniform search bound must be >= 1");
  UniformSearchResult out;
  out.n_max = n_max;
  for (int n = 1; n <= n_max; ++n) {
    const GapScan scan = max_gap_over_words(c, n);
    out.max_gap_by_n.push_back(scan.max_gap);
    out.worst_word = scan.argmax;
    out.worst_gap = scan.max_gap;
    if (scan.max_gap < 0.0) {
      const double theta = std::exp(scan.max_gap / n);
      double head = 1.0;
      for (int m = 1; m < n; ++m)
        head = std::max(head, std::exp(out.max_gap_by_n[static_cast<std::size_t>(m - 1)]));
      const double big_l = std::pow(theta, -n) * head;
      out.certificate = BunchingCertificate{theta, big_l, n, -scan.max_gap,
                                            CertificateMode::direct};
      return out;
    }
  }
  return out;
}

DirectCheckReport direct_check(const CocycleInstance& c,
                               const BunchingCertificate& cert, int horizon) {
  if (horizon < 1) throw InvalidInput("direct check horizon must be >= 1");
  if (!(cert.theta > 0.0) || !(cert.theta < 1.0) || !(cert.L >= 1.0))
    throw InvalidInput("malformed bunching certificate");
  DirectCheckReport report{true, horizon, 0.0, std::nullopt};
  const double log_nu = std::log(c.shift().nu());
  for (int n = 1; n <= horizon; ++n) {
    const double bound = cert.L * std::pow(cert.theta, n);
    scan_window_products(c, n,
                         [&](const Word& w, const Eigen::MatrixXd& fwd,
                             const Eigen::MatrixXd& inv) {
                           const double lhs =
                               spectral_norm(fwd) * spectral_norm(inv) *
                               std::exp(n * c.beta() * log_nu);
                           report.max_ratio = std::max(report.max_ratio, lhs / bound);
                           if (lhs >= bound && !report.first_violation) {
                             report.pass = false;
                             report.first_violation =
                                 DirectCheckViolation{w, n, lhs, bound};
                           }
                         });
  }
  return report;
}

PeriodicPremiseReport periodic_premise_check(const CocycleInstance& c,
                                             int max_period) {
  if (max_period < 1) throw InvalidInput("premise check period bound must be >= 1");
  PeriodicPremiseReport report;
  report.max_period = max_period;
  double max_rate = -std::numeric_limits<double>::infinity();
  double max_log_q_gap = -std::numeric_limits<double>::infinity();
  const double log_nu = std::log(c.shift().nu());
  for (int k = 1; k <= max_period; ++k) {
    double rate_k = -std::numeric_limits<double>::infinity();
    for (const PeriodicOrbitPoint& p : c.shift().enumerate_periodic(k)) {
      const LogProductNorms logs = log_iterate_norms(c, p.point(), k);
      const double gap = logs.log_norm + logs.log_inv_norm + k * c.beta() * log_nu;
      rate_k = std::max(rate_k, gap / k);
      max_log_q_gap = std::max(max_log_q_gap, gap);
      if (gap >= 0.0 && !report.violation)
        report.violation = PremiseViolation{p.word(), k, gap};
    }
    report.max_rate_by_k.push_back(rate_k);
    max_rate = std::max(max_rate, rate_k);
  }
  if (!report.violation) {
    report.status = PremiseStatus::evidence;
    report.theta_tilde = std::exp(max_rate + kPremiseRateSlack);
    double big_l = 1.0;
    for (int k = 1; k <= max_period; ++k) {
      const double rate = report.max_rate_by_k[static_cast<std::size_t>(k - 1)];
      big_l = std::max(big_l, std::exp(k * (rate - std::log(report.theta_tilde))));
    }
    report.L_tilde = big_l;
    return report;
  }
  bool nondecreasing = true;
  for (std::size_t i = 1; i < report.max_rate_by_k.size(); ++i)
    if (report.max_rate_by_k[i] < report.max_rate_by_k[i - 1] - 1e-12)
      nondecreasing = false;
  report.status =
      nondecreasing ? PremiseStatus::violation : PremiseStatus::inconclusive;
  report.theta_tilde = std::exp(max_rate);
  report.L_tilde = std::max(1.0, std::exp(max_log_q_gap));
  return report;
}

double TransferredPeriodicBound::at(int k) const {
  return m_bound * m_bound * L * std::pow(theta, k);
}

TransferredPeriodicBound transfer_bound(const BunchingCertificate& cert,
                                        double m_bound) {
  if (!(m_bound >= 1.0))
    throw InvalidInput("transfer map bound must be >= 1");
  return TransferredPeriodicBound{m_bound, cert.L, cert.theta};
}

BunchingCertificate transferred_certificate(const BunchingCertificate& cert,
                                            double m_bound) {
  if (!(m_bound >= 1.0))
    throw InvalidInput("transfer map bound must be >= 1");
  return BunchingCertificate{cert.theta, m_bound * m_bound * cert.L, cert.N,
                             cert.margin, CertificateMode::transferred};
}

}  // namespace cocyc
