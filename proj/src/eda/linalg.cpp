// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#include "eda/linalg.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "eda/error.hpp"

namespace eda {

SpdSolver::SpdSolver(const Eigen::MatrixXd& matrix) {
  require(matrix.rows() == matrix.cols() && matrix.rows() > 0, ErrorCode::kShapeMismatch,
          "covariance must be a non-empty square matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(matrix, Eigen::EigenvaluesOnly);
  require(eig.info() == Eigen::Success, ErrorCode::kNumerical, "eigenvalue computation failed");
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  condition_ = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(lo > 0.0) || condition_ > kMaxConditionNumber) {
    std::ostringstream os;
    os << "covariance of dimension " << matrix.rows() << " is not invertible (eigenvalues in ["
       << lo << ", " << hi << "], condition " << condition_ << ")";
    fail(ErrorCode::kSingularCovariance, os.str());
  }
  llt_.compute(matrix);
  require(llt_.info() == Eigen::Success, ErrorCode::kSingularCovariance,
          "cholesky factorization failed");
  log_det_ = 2.0 * llt_.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

Field SpdSolver::solve(const Field& rhs) const {
  require(static_cast<Eigen::Index>(rhs.size()) == dim(), ErrorCode::kShapeMismatch,
          "solve: dimension mismatch");
  const Eigen::VectorXd x = llt_.solve(as_vector(rhs));
  return Field(rhs.shape(), std::vector<double>(x.data(), x.data() + x.size()));
}

double SpdSolver::quadratic_form(const Field& v) const {
  require(static_cast<Eigen::Index>(v.size()) == dim(), ErrorCode::kShapeMismatch,
          "quadratic form: dimension mismatch");
  const Eigen::VectorXd y = llt_.matrixL().solve(as_vector(v));
  return y.squaredNorm();
}

}  // namespace eda
