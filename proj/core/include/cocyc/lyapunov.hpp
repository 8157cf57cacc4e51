#pragma once

#include <cstdint>
#include <vector>

#include "cocyc/cocycle.hpp"

// Lyapunov exponents of a cocycle with respect to a Markov measure on the
// shift: Monte Carlo estimates over sampled trajectories, plus the exact
// exponents along short periodic orbits as deterministic cross-checks.
namespace cocyc {

// Shift-invariant Markov measure given by a row-stochastic transition matrix
// compatible with the adjacency (P_ij > 0 exactly when the word ij is
// admissible) and its stationary distribution.
struct MarkovMeasure {
  Eigen::MatrixXd transition;
  Eigen::VectorXd stationary;
  double entropy;  // -sum_i pi_i sum_j P_ij log P_ij
};

// The measure of maximal entropy: P_ij = M_ij v_j / (lambda v_i) with
// (lambda, v) the Perron data of the adjacency matrix M; entropy log lambda.
MarkovMeasure parry_measure(const ShiftSpec& spec);

// Validates a caller-supplied transition matrix and computes its stationary
// distribution and entropy.
MarkovMeasure markov_measure(const ShiftSpec& spec, Eigen::MatrixXd transition);

struct SamplingPlan {
  long n = 2000;          // trajectory length per trial
  int trials = 50;
  std::uint64_t seed = 0; // master seed; trial t uses derive_seed(seed, t)
  int workers = 1;
};

// Top and bottom exponents: trial t draws a stationary Markov word and reports
// (1/n) log ||A^n_x|| and -(1/n) log ||(A^n_x)^{-1}||; estimates are trial
// means. stderr_* is the jackknife dispersion of a single trial (the
// delete-one standard error scaled back by sqrt(trials)), the scale on which
// individual finite-n trials scatter around the limit.
struct ExponentEstimate {
  double lambda_plus;
  double lambda_minus;
  double stderr_plus;
  double stderr_minus;
  long n;
  int trials;
  std::vector<double> trial_plus;
  std::vector<double> trial_minus;
};
ExponentEstimate estimate_exponents(const CocycleInstance& c,
                                    const MarkovMeasure& mu,
                                    const SamplingPlan& plan);

// chi = lambda_plus - lambda_minus + beta log nu, the measurable counterpart
// of the bunching margin; negative chi is consistent with fiber bunching.
struct ChiEstimate {
  double value;
  double se;  // jackknife dispersion of per-trial chi
  ExponentEstimate base;
};
ChiEstimate chi_exponent(const CocycleInstance& c, const MarkovMeasure& mu,
                         const SamplingPlan& plan);

// Exact exponents ((1/k) log ||A^k_p||, -(1/k) log ||(A^k_p)^{-1}||) on one
// representative per periodic orbit of least period <= max_period.
struct OrbitExponents {
  Word orbit_word;
  int period;
  double plus;
  double minus;
};
std::vector<OrbitExponents> periodic_approximants(const CocycleInstance& c,
                                                  int max_period);

}  // namespace cocyc
