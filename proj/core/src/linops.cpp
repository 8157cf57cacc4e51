#include "cocyc/linops.hpp"

#include <string>

namespace cocyc {

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  // Jacobi SVD: slow asymptotically, accurate, and deterministic; fiber
  // dimensions here are single digits.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

InvertibleOperator::InvertibleOperator(Eigen::MatrixXd m) : mat_(std::move(m)) {
  if (mat_.rows() != mat_.cols() || mat_.rows() == 0)
    throw DimensionMismatch("operator matrix must be square and nonempty");
  if (!mat_.allFinite())
    throw InvalidInput("operator matrix has non-finite entries");

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(mat_);
  inv_ = lu.inverse();
  if (!inv_.allFinite())
    throw SingularOperator("matrix is singular to working precision");

  const double na = spectral_norm(mat_);
  const double ni = spectral_norm(inv_);
  const double residual =
      spectral_norm(mat_ * inv_ - Eigen::MatrixXd::Identity(dim(), dim()));
  if (residual > kInverseResidualTolerance * na * ni)
    throw SingularOperator("inverse residual " + std::to_string(residual) +
                           " exceeds tolerance; matrix treated as singular");
  if (na * ni > kConditionCap)
    throw SingularOperator("condition number " + std::to_string(na * ni) +
                           " exceeds cap 1e12");
}

InvertibleOperator InvertibleOperator::identity(int dim) {
  InvertibleOperator r;
  r.mat_ = Eigen::MatrixXd::Identity(dim, dim);
  r.inv_ = r.mat_;
  return r;
}

InvertibleOperator InvertibleOperator::from_parts(Eigen::MatrixXd m,
                                                  Eigen::MatrixXd inv) {
  if (m.rows() != m.cols() || m.rows() != inv.rows() || inv.rows() != inv.cols())
    throw DimensionMismatch("operator and inverse must be square of equal size");
  InvertibleOperator r;
  r.mat_ = std::move(m);
  r.inv_ = std::move(inv);
  return r;
}

InvertibleOperator InvertibleOperator::inverse() const {
  InvertibleOperator r;
  r.mat_ = inv_;
  r.inv_ = mat_;
  return r;
}

InvertibleOperator InvertibleOperator::compose(const InvertibleOperator& rhs) const {
  if (dim() != rhs.dim())
    throw DimensionMismatch("cannot compose operators of dimension " +
                            std::to_string(dim()) + " and " +
                            std::to_string(rhs.dim()));
  InvertibleOperator r;
  r.mat_ = mat_ * rhs.mat_;
  r.inv_ = rhs.inv_ * inv_;
  return r;
}

double op_norm(const InvertibleOperator& a) { return spectral_norm(a.matrix()); }

double metric_d(const InvertibleOperator& a, const InvertibleOperator& b) {
  if (a.dim() != b.dim())
    throw DimensionMismatch("metric_d needs operators of equal dimension");
  return spectral_norm(a.matrix() - b.matrix()) +
         spectral_norm(a.inverse_matrix() - b.inverse_matrix());
}

double q_distortion_of(const InvertibleOperator& a) {
  return spectral_norm(a.matrix()) * spectral_norm(a.inverse_matrix());
}

}  // namespace cocyc
