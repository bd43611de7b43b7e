// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "eda/field.hpp"

namespace eda {

/// Optional (clean, degraded) pair used by sample-dependent basis sets.
struct Conditioning {
  const Field* clean = nullptr;
  const Field* degraded = nullptr;

  bool present() const noexcept { return clean != nullptr && degraded != nullptr; }
};

/// Dense covariance is only materialized for data dimension d <= this cap
/// (d*d = 4096 entries).
inline constexpr std::size_t kDenseCovarianceCap = 64;

/// An instantiated basis H = [h_1 .. h_M]; each h_m has the data shape.
/// No orthogonality is assumed anywhere.
class Basis {
 public:
  Basis(Shape shape, std::vector<Field> elements);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t count() const noexcept { return elements_.size(); }
  const Field& element(std::size_t m) const { return elements_.at(m); }
  const std::vector<Field>& elements() const noexcept { return elements_; }

  /// sum_m h_m
  const Field& sum() const noexcept { return sum_; }

  /// H^T v (length M).
  std::vector<double> project(const Field& v) const;
  /// H c for coefficient vector c (length M).
  Field combine(std::span<const double> coefficients) const;
  /// Sigma v = H (H^T v), O(M d).
  Field apply_covariance(const Field& v) const;

  /// d x M matrix with column m = h_m flattened.
  Eigen::MatrixXd matrix() const;
  /// Sigma = H H^T; throws when d exceeds `max_dim`.
  Eigen::MatrixXd dense_covariance(std::size_t max_dim = kDenseCovarianceCap) const;

 private:
  Shape shape_;
  std::size_t dim_;
  std::vector<Field> elements_;
  Field sum_;
};

/// Provider of H_{x0}: either one fixed basis shared by every sample, or a
/// rule that builds the basis from the (clean, degraded) pair.
class BasisSet {
 public:
  enum class Mode { kFixed, kSampleDependent };
  using Builder = std::function<Basis(const Field& clean, const Field& degraded)>;

  static BasisSet fixed(std::string name, Basis basis);
  static BasisSet sample_dependent(std::string name, Shape shape, std::size_t count, Builder builder);

  Mode mode() const noexcept { return mode_; }
  bool is_fixed() const noexcept { return mode_ == Mode::kFixed; }
  const std::string& name() const noexcept { return name_; }
  const Shape& shape() const noexcept { return shape_; }
  std::size_t count() const noexcept { return count_; }

  /// Fixed mode ignores `cond` and returns the shared basis. Sample-dependent
  /// mode requires `cond.present()`.
  std::shared_ptr<const Basis> bind(const Conditioning& cond = {}) const;
  /// Fixed basis; throws for sample-dependent sets.
  const Basis& fixed_basis() const;

 private:
  BasisSet() = default;

  Mode mode_ = Mode::kFixed;
  std::string name_;
  Shape shape_;
  std::size_t count_ = 0;
  std::shared_ptr<const Basis> fixed_;
  Builder builder_;
};

/// Elementwise sum of all h_m under `cond`.
Field basis_sum(const BasisSet& set, const Conditioning& cond = {});

/// Legendre products P_m(x)P_n(y), m+n <= n1, followed by rotated
/// trigonometric functions cos/sin(n (x cos(th) + y sin(th))) for
/// 2 <= n <= n2 and th = 0, 10, ..., 180 degrees. Coordinates span [-1, 1]
/// (x along columns, y along rows); each function is rescaled to [0.9, 1.1]
/// with constant functions mapped to 1.0.
BasisSet legendre_trig_basis(int n1, int n2, const Shape& grid);
std::size_t legendre_trig_count(int n1, int n2);

/// Indicator basis E_i; Sigma = I.
BasisSet pixel_basis(const Shape& shape);

/// Sample-dependent single-element basis h_1 = degraded - clean.
BasisSet residual_basis_set(const Shape& shape);
Basis residual_basis(const Field& clean, const Field& degraded);

/// Covariance operator Sigma = H H^T with an optional cached dense matrix.
class CovarianceOp {
 public:
  explicit CovarianceOp(std::shared_ptr<const Basis> basis,
                        std::size_t dense_cap = kDenseCovarianceCap);

  const Basis& basis() const noexcept { return *basis_; }
  Field apply(const Field& v) const;
  bool has_dense() const noexcept { return dense_.has_value(); }
  const Eigen::MatrixXd& dense() const;

 private:
  std::shared_ptr<const Basis> basis_;
  std::optional<Eigen::MatrixXd> dense_;
};

Field apply_covariance(const CovarianceOp& op, const Field& v);

}  // namespace eda
