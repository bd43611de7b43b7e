// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include "eda/field.hpp"

namespace eda {

inline constexpr double kMaxConditionNumber = 1e12;

/// Symmetric positive-definite solver for a dense covariance. Construction
/// fails with ErrorCode::kSingularCovariance when the matrix is rank deficient
/// or its spectral condition number exceeds kMaxConditionNumber.
class SpdSolver {
 public:
  explicit SpdSolver(const Eigen::MatrixXd& matrix);

  Eigen::Index dim() const noexcept { return llt_.rows(); }
  double condition_number() const noexcept { return condition_; }
  double log_determinant() const noexcept { return log_det_; }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const { return llt_.solve(rhs); }
  Field solve(const Field& rhs) const;
  /// v^T A^{-1} v
  double quadratic_form(const Field& v) const;

 private:
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double condition_ = 0.0;
  double log_det_ = 0.0;
};

inline Eigen::Map<const Eigen::VectorXd> as_vector(const Field& f) {
  return {f.data(), static_cast<Eigen::Index>(f.size())};
}

}  // namespace eda
