// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace eda {

using Shape = std::vector<std::size_t>;

std::size_t element_count(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Dense real n-dimensional array, row-major.
class Field {
 public:
  Field() = default;
  explicit Field(Shape shape, double fill = 0.0);
  Field(Shape shape, std::vector<double> values);

  static Field like(const Field& other, double fill = 0.0) { return Field(other.shape_, fill); }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  const double* data() const noexcept { return values_.data(); }
  double* data() noexcept { return values_.data(); }

  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  // 2-D accessors; row-major (row, col).
  double at(std::size_t row, std::size_t col) const { return values_[row * shape_.at(1) + col]; }
  double& at(std::size_t row, std::size_t col) { return values_[row * shape_.at(1) + col]; }

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double scale);

  bool all_finite() const noexcept;

  friend bool operator==(const Field&, const Field&) = default;

 private:
  Shape shape_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double scale, Field a);
Field operator*(Field a, double scale);

void require_same_shape(const Field& a, const Field& b, const char* what);

/// y += alpha * x
void axpy(double alpha, const Field& x, Field& y);
Field hadamard(const Field& a, const Field& b);
double dot(const Field& a, const Field& b);
double squared_norm(const Field& a);
double sum(const Field& a);
double max_abs(const Field& a);
double max_abs_diff(const Field& a, const Field& b);

/// Deterministic random stream. The engine is std::mt19937_64 seeded through a
/// SplitMix64 mix of (seed, stream); normals come from the Box–Muller transform
/// on 53-bit uniforms, so draw sequences are identical on every platform with
/// an IEEE-754 libm.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform();
  double normal();
  /// Poisson(mean) by multiplication of uniforms; intended for small means.
  std::uint64_t poisson(double mean);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

std::uint64_t splitmix64(std::uint64_t x);

Field randn(const Shape& shape, Rng& rng);

/// PSNR value reported for identical inputs, instead of IEEE infinity.
inline constexpr double kPsnrInfinity = 1e9;

double mse(const Field& a, const Field& b);
double rmse(const Field& a, const Field& b);
double psnr(const Field& a, const Field& b, double peak);

// Binary format: little-endian u64 rank, u64 extents[rank], f64 values.
void write_field(std::ostream& out, const Field& field);
Field read_field(std::istream& in);
void save_field(const std::string& path, const Field& field);
Field load_field(const std::string& path);

/// 8-bit binary PGM of a 2-D field, linearly rescaled so min -> 0, max -> 255.
void save_pgm(const std::string& path, const Field& field);

}  // namespace eda
