#pragma once

#include <Eigen/Dense>

#include "cocyc/errors.hpp"

// Invertible operators on R^d with the inverse carried alongside the matrix.
// Composition and inversion are closed and never re-factorize, so long
// products keep an inverse that is the exact product of entry inverses.
// Validity checks (residual, condition number) run only when an operator is
// built from a raw matrix.
namespace cocyc {

// Operator norm induced by the Euclidean vector norm (largest singular
// value). The norm is the one pluggable knob of the metric; only this
// instance ships.
double spectral_norm(const Eigen::MatrixXd& m);

class InvertibleOperator {
 public:
  // Factors the matrix, rejecting inputs whose inverse is unreliable:
  // residual ||A A^-1 - I|| > 1e-10 ||A|| ||A^-1|| or condition > 1e12.
  explicit InvertibleOperator(Eigen::MatrixXd m);

  static InvertibleOperator identity(int dim);
  // Adopts a precomputed inverse without validation (internal fast path for
  // closed operations; exposed for deserialization of trusted data).
  static InvertibleOperator from_parts(Eigen::MatrixXd m, Eigen::MatrixXd inv);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Eigen::MatrixXd& matrix() const { return mat_; }
  const Eigen::MatrixXd& inverse_matrix() const { return inv_; }

  InvertibleOperator inverse() const;
  // Composition (*this) after rhs; inverse is rhs^-1 after this^-1.
  InvertibleOperator compose(const InvertibleOperator& rhs) const;
  friend InvertibleOperator operator*(const InvertibleOperator& a,
                                      const InvertibleOperator& b) {
    return a.compose(b);
  }

 private:
  InvertibleOperator() = default;
  Eigen::MatrixXd mat_, inv_;
};

double op_norm(const InvertibleOperator& a);

// Distance on invertible operators: ||A - B|| + ||A^-1 - B^-1||.
double metric_d(const InvertibleOperator& a, const InvertibleOperator& b);

// Quasiconformal distortion ||A|| ||A^-1|| of a single operator; always >= 1.
double q_distortion_of(const InvertibleOperator& a);

constexpr double kInverseResidualTolerance = 1e-10;
constexpr double kConditionCap = 1e12;

}  // namespace cocyc
