// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#include "eda/field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <numeric>
#include <sstream>

#include "eda/error.hpp"

namespace eda {

std::size_t element_count(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << ']';
  return os.str();
}

Field::Field(Shape shape, double fill)
    : shape_(std::move(shape)), values_(element_count(shape_), fill) {}

Field::Field(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  require(values_.size() == element_count(shape_), ErrorCode::kShapeMismatch,
          "value count " + std::to_string(values_.size()) + " does not match shape " +
              shape_string(shape_));
}

Field& Field::operator+=(const Field& other) {
  require_same_shape(*this, other, "add");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_shape(*this, other, "subtract");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(double scale) {
  for (double& v : values_) v *= scale;
  return *this;
}

bool Field::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double scale, Field a) { return a *= scale; }
Field operator*(Field a, double scale) { return a *= scale; }

void require_same_shape(const Field& a, const Field& b, const char* what) {
  if (a.shape() != b.shape()) {
    fail(ErrorCode::kShapeMismatch, std::string(what) + ": " + shape_string(a.shape()) +
                                        " vs " + shape_string(b.shape()));
  }
}

void axpy(double alpha, const Field& x, Field& y) {
  require_same_shape(x, y, "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Field hadamard(const Field& a, const Field& b) {
  require_same_shape(a, b, "hadamard");
  Field out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
  return out;
}

double dot(const Field& a, const Field& b) {
  require_same_shape(a, b, "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double squared_norm(const Field& a) { return dot(a, a); }

double sum(const Field& a) {
  return std::accumulate(a.values().begin(), a.values().end(), 0.0);
}

double max_abs(const Field& a) {
  double m = 0.0;
  for (double v : a.values()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const Field& a, const Field& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(splitmix64(splitmix64(seed) ^ splitmix64(~stream))) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (spare_) {
    const double z = *spare_;
    spare_.reset();
    return z;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  return r * std::cos(theta);
}

std::uint64_t Rng::poisson(double mean) {
  require(mean >= 0.0 && mean < 500.0, ErrorCode::kInvalidArgument,
          "poisson mean must lie in [0, 500)");
  const double limit = std::exp(-mean);
  std::uint64_t k = 0;
  double p = uniform();
  while (p > limit) {
    ++k;
    p *= uniform();
  }
  return k;
}

Field randn(const Shape& shape, Rng& rng) {
  Field out(shape);
  for (double& v : out.values()) v = rng.normal();
  return out;
}

double mse(const Field& a, const Field& b) {
  require_same_shape(a, b, "mse");
  if (a.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

double rmse(const Field& a, const Field& b) { return std::sqrt(mse(a, b)); }

double psnr(const Field& a, const Field& b, double peak) {
  require(peak > 0.0, ErrorCode::kInvalidArgument, "psnr peak must be positive");
  const double err = mse(a, b);
  if (err == 0.0) return kPsnrInfinity;
  return 10.0 * std::log10(peak * peak / err);
}

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes, 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  require(static_cast<bool>(in), ErrorCode::kParse, "truncated field stream");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

constexpr std::uint64_t kMaxRank = 16;
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 32;

}  // namespace

void write_field(std::ostream& out, const Field& field) {
  put_u64(out, field.rank());
  for (std::size_t e : field.shape()) put_u64(out, e);
  for (double v : field.values()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  require(static_cast<bool>(out), ErrorCode::kIo, "failed writing field");
}

Field read_field(std::istream& in) {
  const std::uint64_t rank = get_u64(in);
  require(rank <= kMaxRank, ErrorCode::kParse, "field rank too large");
  Shape shape(rank);
  std::uint64_t count = 1;
  for (auto& e : shape) {
    e = get_u64(in);
    require(e <= kMaxElements, ErrorCode::kParse, "field extent too large");
    count *= e;
    require(count <= kMaxElements, ErrorCode::kParse, "field too large");
  }
  std::vector<double> values(count);
  for (double& v : values) v = std::bit_cast<double>(get_u64(in));
  return Field(std::move(shape), std::move(values));
}

void save_field(const std::string& path, const Field& field) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot open " + path);
  write_field(out, field);
}

Field load_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot open " + path);
  return read_field(in);
}

void save_pgm(const std::string& path, const Field& field) {
  require(field.rank() == 2, ErrorCode::kInvalidArgument, "pgm output needs a 2-D field");
  const std::size_t rows = field.shape()[0], cols = field.shape()[1];
  double lo = 0.0, hi = 0.0;
  if (!field.empty()) {
    const auto [mn, mx] = std::minmax_element(field.values().begin(), field.values().end());
    lo = *mn;
    hi = *mx;
  }
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot open " + path);
  out << "P5\n" << cols << ' ' << rows << "\n255\n";
  std::vector<unsigned char> pixels(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double u = hi > lo ? (field[i] - lo) / (hi - lo) : 0.0;
    pixels[i] = static_cast<unsigned char>(std::lround(std::clamp(u, 0.0, 1.0) * 255.0));
  }
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  require(static_cast<bool>(out), ErrorCode::kIo, "failed writing " + path);
}

}  // namespace eda
