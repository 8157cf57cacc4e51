#include "cocyc/lyapunov.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "cocyc/errors.hpp"
#include "cocyc/parallel.hpp"
#include "cocyc/rng.hpp"

namespace cocyc {

namespace {

Eigen::MatrixXd adjacency_matrix(const ShiftSpec& spec) {
  const int k = spec.alphabet_size();
  Eigen::MatrixXd m(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      m(i, j) = spec.adjacency()[static_cast<std::size_t>(i * k + j)];
  return m;
}

// Perron eigenpair of a primitive nonnegative matrix: the eigenvalue of
// maximal real part is real and simple, with a positive eigenvector.
std::pair<double, Eigen::VectorXd> perron(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m);
  int best = 0;
  for (int i = 1; i < m.rows(); ++i)
    if (solver.eigenvalues()(i).real() > solver.eigenvalues()(best).real())
      best = i;
  const double lambda = solver.eigenvalues()(best).real();
  Eigen::VectorXd v = solver.eigenvectors().col(best).real();
  if (v.sum() < 0.0) v = -v;
  if (v.minCoeff() <= 0.0)
    throw InvalidInput("Perron eigenvector is not positive; matrix not primitive");
  return {lambda, v};
}

double markov_entropy(const Eigen::MatrixXd& p, const Eigen::VectorXd& pi) {
  double h = 0.0;
  for (int i = 0; i < p.rows(); ++i)
    for (int j = 0; j < p.cols(); ++j)
      if (p(i, j) > 0.0) h -= pi(i) * p(i, j) * std::log(p(i, j));
  return h;
}

Word sample_word(const ShiftSpec& spec, const MarkovMeasure& mu, long length,
                 DetRng& rng) {
  const int k = spec.alphabet_size();
  std::vector<double> weights(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) weights[static_cast<std::size_t>(i)] = mu.stationary(i);
  Word w;
  w.reserve(static_cast<std::size_t>(length));
  int state = static_cast<int>(rng.weighted(weights));
  w.push_back(static_cast<char>('1' + state));
  for (long t = 1; t < length; ++t) {
    for (int j = 0; j < k; ++j)
      weights[static_cast<std::size_t>(j)] = mu.transition(state, j);
    state = static_cast<int>(rng.weighted(weights));
    w.push_back(static_cast<char>('1' + state));
  }
  return w;
}

// Per-trial exponent pair over one sampled word of length n + 2r; the word is
// read as windows w[j..j+2r] for j = 0..n-1 with norm-rescaled products.
std::pair<double, double> trial_exponents(const CocycleInstance& c, const Word& w,
                                          long n) {
  const int d = c.dim();
  const int r = c.window_radius();
  Eigen::MatrixXd fwd = Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd inv = Eigen::MatrixXd::Identity(d, d);
  double log_fwd = 0.0, log_inv = 0.0;
  constexpr double kRescaleAt = 1e120;
  for (long j = 0; j < n; ++j) {
    const InvertibleOperator& step =
        c.generator().at(w.substr(static_cast<std::size_t>(j),
                                  static_cast<std::size_t>(2 * r + 1)));
    fwd = step.matrix() * fwd;
    inv = inv * step.inverse_matrix();
    if (const double m = fwd.cwiseAbs().maxCoeff(); m > kRescaleAt) {
      fwd /= m;
      log_fwd += std::log(m);
    }
    if (const double m = inv.cwiseAbs().maxCoeff(); m > kRescaleAt) {
      inv /= m;
      log_inv += std::log(m);
    }
  }
  const double plus = (std::log(spectral_norm(fwd)) + log_fwd) / n;
  const double minus = -(std::log(spectral_norm(inv)) + log_inv) / n;
  return {plus, minus};
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Jackknife dispersion of one observation: delete-one standard error of the
// mean, scaled back by sqrt(T). For the plain mean this is the sample
// standard deviation, but computed via the jackknife so the label is honest
// for derived statistics too.
double jackknife_dispersion(const std::vector<double>& v) {
  const std::size_t t = v.size();
  if (t < 2) return 0.0;
  const double total = mean(v) * static_cast<double>(t);
  std::vector<double> loo(t);
  for (std::size_t i = 0; i < t; ++i)
    loo[i] = (total - v[i]) / static_cast<double>(t - 1);
  const double loo_mean = mean(loo);
  double ss = 0.0;
  for (double x : loo) ss += (x - loo_mean) * (x - loo_mean);
  const double se_mean =
      std::sqrt(ss * static_cast<double>(t - 1) / static_cast<double>(t));
  return se_mean * std::sqrt(static_cast<double>(t));
}

}  // namespace

MarkovMeasure parry_measure(const ShiftSpec& spec) {
  const Eigen::MatrixXd m = adjacency_matrix(spec);
  const auto [lambda, v] = perron(m);
  const auto [lambda_t, u] = perron(Eigen::MatrixXd(m.transpose()));
  if (std::abs(lambda - lambda_t) > 1e-9 * std::max(1.0, lambda))
    throw InvalidInput("left and right Perron eigenvalues disagree");
  const int k = spec.alphabet_size();
  Eigen::MatrixXd p(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) p(i, j) = m(i, j) * v(j) / (lambda * v(i));
  Eigen::VectorXd pi(k);
  for (int i = 0; i < k; ++i) pi(i) = u(i) * v(i);
  pi /= pi.sum();
  return MarkovMeasure{p, pi, markov_entropy(p, pi)};
}

MarkovMeasure markov_measure(const ShiftSpec& spec, Eigen::MatrixXd transition) {
  const int k = spec.alphabet_size();
  if (transition.rows() != k || transition.cols() != k)
    throw InvalidInput("transition matrix size does not match the alphabet");
  for (int i = 0; i < k; ++i) {
    double row = 0.0;
    for (int j = 0; j < k; ++j) {
      const double p = transition(i, j);
      const bool adm = spec.adjacency()[static_cast<std::size_t>(i * k + j)] != 0;
      if (p < 0.0) throw InvalidInput("transition matrix has a negative entry");
      if ((p > 0.0) != adm)
        throw InvalidInput("transition matrix support does not match adjacency");
      row += p;
    }
    if (std::abs(row - 1.0) > 1e-12)
      throw InvalidInput("transition matrix row does not sum to 1");
  }
  const auto [one, pi_raw] = perron(Eigen::MatrixXd(transition.transpose()));
  if (std::abs(one - 1.0) > 1e-9)
    throw InvalidInput("transition matrix is not stochastic");
  Eigen::VectorXd pi = pi_raw / pi_raw.sum();
  const double h = markov_entropy(transition, pi);
  return MarkovMeasure{std::move(transition), std::move(pi), h};
}

ExponentEstimate estimate_exponents(const CocycleInstance& c,
                                    const MarkovMeasure& mu,
                                    const SamplingPlan& plan) {
  if (plan.n < 1 || plan.trials < 1)
    throw InvalidInput("sampling plan needs n >= 1 and trials >= 1");
  ExponentEstimate est;
  est.n = plan.n;
  est.trials = plan.trials;
  est.trial_plus.resize(static_cast<std::size_t>(plan.trials));
  est.trial_minus.resize(static_cast<std::size_t>(plan.trials));
  const int r = c.window_radius();
  parallel_for(static_cast<std::size_t>(plan.trials), plan.workers,
               [&](std::size_t t) {
                 DetRng rng(derive_seed(plan.seed, t));
                 const Word w = sample_word(c.shift(), mu, plan.n + 2 * r, rng);
                 const auto [plus, minus] = trial_exponents(c, w, plan.n);
                 est.trial_plus[t] = plus;
                 est.trial_minus[t] = minus;
               });
  est.lambda_plus = mean(est.trial_plus);
  est.lambda_minus = mean(est.trial_minus);
  est.stderr_plus = jackknife_dispersion(est.trial_plus);
  est.stderr_minus = jackknife_dispersion(est.trial_minus);
  return est;
}

ChiEstimate chi_exponent(const CocycleInstance& c, const MarkovMeasure& mu,
                         const SamplingPlan& plan) {
  ExponentEstimate base = estimate_exponents(c, mu, plan);
  const double drift = c.beta() * std::log(c.shift().nu());
  std::vector<double> gaps(base.trial_plus.size());
  for (std::size_t i = 0; i < gaps.size(); ++i)
    gaps[i] = base.trial_plus[i] - base.trial_minus[i];
  ChiEstimate chi;
  chi.value = mean(gaps) + drift;
  chi.se = jackknife_dispersion(gaps);
  chi.base = std::move(base);
  return chi;
}

std::vector<OrbitExponents> periodic_approximants(const CocycleInstance& c,
                                                  int max_period) {
  std::vector<OrbitExponents> out;
  for (const PeriodicOrbitPoint& p : c.shift().orbit_representatives(max_period)) {
    const int k = p.period();
    const LogProductNorms logs = log_iterate_norms(c, p.point(), k);
    out.push_back(OrbitExponents{p.word(), k, logs.log_norm / k,
                                 -logs.log_inv_norm / k});
  }
  return out;
}

}  // namespace cocyc
