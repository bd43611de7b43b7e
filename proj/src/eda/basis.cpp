// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#include "eda/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "eda/error.hpp"

namespace eda {

Basis::Basis(Shape shape, std::vector<Field> elements)
    : shape_(std::move(shape)), dim_(element_count(shape_)), elements_(std::move(elements)),
      sum_(shape_) {
  require(!elements_.empty(), ErrorCode::kInvalidArgument, "basis needs at least one element");
  for (const Field& h : elements_) {
    require(h.shape() == shape_, ErrorCode::kShapeMismatch,
            "basis element shape " + shape_string(h.shape()) + " differs from " +
                shape_string(shape_));
    sum_ += h;
  }
}

std::vector<double> Basis::project(const Field& v) const {
  require(v.shape() == shape_, ErrorCode::kShapeMismatch, "project: " + shape_string(v.shape()));
  std::vector<double> c(elements_.size());
  for (std::size_t m = 0; m < elements_.size(); ++m) c[m] = dot(elements_[m], v);
  return c;
}

Field Basis::combine(std::span<const double> coefficients) const {
  require(coefficients.size() == elements_.size(), ErrorCode::kShapeMismatch,
          "combine: coefficient count differs from basis size");
  Field out(shape_);
  for (std::size_t m = 0; m < elements_.size(); ++m) axpy(coefficients[m], elements_[m], out);
  return out;
}

Field Basis::apply_covariance(const Field& v) const {
  const std::vector<double> c = project(v);
  return combine(c);
}

Eigen::MatrixXd Basis::matrix() const {
  Eigen::MatrixXd h(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(elements_.size()));
  for (std::size_t m = 0; m < elements_.size(); ++m) {
    for (std::size_t i = 0; i < dim_; ++i) h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) = elements_[m][i];
  }
  return h;
}

Eigen::MatrixXd Basis::dense_covariance(std::size_t max_dim) const {
  require(dim_ <= max_dim, ErrorCode::kInvalidArgument,
          "dense covariance requested for d = " + std::to_string(dim_) + " above cap " +
              std::to_string(max_dim));
  const Eigen::MatrixXd h = matrix();
  return h * h.transpose();
}

BasisSet BasisSet::fixed(std::string name, Basis basis) {
  BasisSet set;
  set.mode_ = Mode::kFixed;
  set.name_ = std::move(name);
  set.shape_ = basis.shape();
  set.count_ = basis.count();
  set.fixed_ = std::make_shared<const Basis>(std::move(basis));
  return set;
}

BasisSet BasisSet::sample_dependent(std::string name, Shape shape, std::size_t count,
                                    Builder builder) {
  require(static_cast<bool>(builder), ErrorCode::kInvalidArgument, "basis builder missing");
  require(count >= 1, ErrorCode::kInvalidArgument, "basis needs at least one element");
  BasisSet set;
  set.mode_ = Mode::kSampleDependent;
  set.name_ = std::move(name);
  set.shape_ = std::move(shape);
  set.count_ = count;
  set.builder_ = std::move(builder);
  return set;
}

std::shared_ptr<const Basis> BasisSet::bind(const Conditioning& cond) const {
  if (mode_ == Mode::kFixed) return fixed_;
  require(cond.present(), ErrorCode::kInvalidArgument,
          "basis '" + name_ + "' is sample-dependent and needs a (clean, degraded) pair");
  auto basis = std::make_shared<const Basis>(builder_(*cond.clean, *cond.degraded));
  require(basis->shape() == shape_ && basis->count() == count_, ErrorCode::kShapeMismatch,
          "basis builder returned an inconsistent basis");
  return basis;
}

const Basis& BasisSet::fixed_basis() const {
  require(mode_ == Mode::kFixed, ErrorCode::kInvalidArgument,
          "basis '" + name_ + "' is sample-dependent; a fixed basis is required");
  return *fixed_;
}

Field basis_sum(const BasisSet& set, const Conditioning& cond) { return set.bind(cond)->sum(); }

namespace {

// Affine map of `f` onto [0.9, 1.1]; constant functions become 1.0.
void rescale_to_band(Field& f) {
  const auto [mn, mx] = std::minmax_element(f.values().begin(), f.values().end());
  const double lo = *mn, hi = *mx;
  const double scale = std::max({std::abs(lo), std::abs(hi), 1.0});
  if (hi - lo <= 1e-12 * scale) {
    std::fill(f.values().begin(), f.values().end(), 1.0);
    return;
  }
  for (double& v : f.values()) v = 0.9 + 0.2 * (v - lo) / (hi - lo);
}

double grid_coordinate(std::size_t i, std::size_t n) {
  return n > 1 ? -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
}

}  // namespace

std::size_t legendre_trig_count(int n1, int n2) {
  const std::size_t legendre = static_cast<std::size_t>((n1 + 1) * (n1 + 2) / 2);
  const std::size_t trig = n2 >= 2 ? static_cast<std::size_t>(n2 - 1) * 19 * 2 : 0;
  return legendre + trig;
}

BasisSet legendre_trig_basis(int n1, int n2, const Shape& grid) {
  require(n1 >= 0, ErrorCode::kInvalidArgument, "legendre degree N1 must be >= 0");
  require(n2 >= 2, ErrorCode::kInvalidArgument, "trigonometric order N2 must be >= 2");
  require(grid.size() == 2 && grid[0] > 0 && grid[1] > 0, ErrorCode::kInvalidArgument,
          "legendre-trig basis needs a non-empty 2-D grid");
  const std::size_t rows = grid[0], cols = grid[1];
  std::vector<double> xs(cols), ys(rows);
  for (std::size_t c = 0; c < cols; ++c) xs[c] = grid_coordinate(c, cols);
  for (std::size_t r = 0; r < rows; ++r) ys[r] = grid_coordinate(r, rows);

  std::vector<Field> elements;
  elements.reserve(legendre_trig_count(n1, n2));
  for (int m = 0; m <= n1; ++m) {
    for (int n = 0; m + n <= n1; ++n) {
      Field f(grid);
      for (std::size_t r = 0; r < rows; ++r) {
        const double py = std::legendre(static_cast<unsigned>(n), ys[r]);
        for (std::size_t c = 0; c < cols; ++c) {
          f.at(r, c) = std::legendre(static_cast<unsigned>(m), xs[c]) * py;
        }
      }
      rescale_to_band(f);
      elements.push_back(std::move(f));
    }
  }
  for (int n = 2; n <= n2; ++n) {
    for (int deg = 0; deg <= 180; deg += 10) {
      const double theta = deg * std::numbers::pi / 180.0;
      const double ct = std::cos(theta), st = std::sin(theta);
      Field fc(grid), fs(grid);
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
          const double arg = n * (xs[c] * ct + ys[r] * st);
          fc.at(r, c) = std::cos(arg);
          fs.at(r, c) = std::sin(arg);
        }
      }
      rescale_to_band(fc);
      rescale_to_band(fs);
      elements.push_back(std::move(fc));
      elements.push_back(std::move(fs));
    }
  }
  return BasisSet::fixed("legendre-trig(" + std::to_string(n1) + "," + std::to_string(n2) + ")",
                         Basis(grid, std::move(elements)));
}

BasisSet pixel_basis(const Shape& shape) {
  const std::size_t d = element_count(shape);
  require(d >= 1, ErrorCode::kInvalidArgument, "pixel basis needs a non-empty shape");
  std::vector<Field> elements;
  elements.reserve(d);
  for (std::size_t i = 0; i < d; ++i) {
    Field e(shape);
    e[i] = 1.0;
    elements.push_back(std::move(e));
  }
  return BasisSet::fixed("pixel", Basis(shape, std::move(elements)));
}

Basis residual_basis(const Field& clean, const Field& degraded) {
  require_same_shape(clean, degraded, "residual basis");
  return Basis(clean.shape(), {degraded - clean});
}

BasisSet residual_basis_set(const Shape& shape) {
  return BasisSet::sample_dependent("residual", shape, 1,
                                    [](const Field& clean, const Field& degraded) {
                                      return residual_basis(clean, degraded);
                                    });
}

CovarianceOp::CovarianceOp(std::shared_ptr<const Basis> basis, std::size_t dense_cap)
    : basis_(std::move(basis)) {
  require(basis_ != nullptr, ErrorCode::kInvalidArgument, "covariance needs a basis");
  if (basis_->dim() <= dense_cap) dense_ = basis_->dense_covariance(dense_cap);
}

Field CovarianceOp::apply(const Field& v) const { return basis_->apply_covariance(v); }

const Eigen::MatrixXd& CovarianceOp::dense() const {
  require(dense_.has_value(), ErrorCode::kInvalidArgument,
          "dense covariance not materialized for d = " + std::to_string(basis_->dim()));
  return *dense_;
}

Field apply_covariance(const CovarianceOp& op, const Field& v) { return op.apply(v); }

}  // namespace eda
