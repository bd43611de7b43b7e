// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "eda/basis.hpp"
#include "eda/error.hpp"
#include "eda/linalg.hpp"
#include "eda/verify.hpp"

namespace eda {
namespace {

// Hand-written Legendre polynomials up to degree 3.
double legendre_p(int n, double x) {
  switch (n) {
    case 0: return 1.0;
    case 1: return x;
    case 2: return 0.5 * (3.0 * x * x - 1.0);
    case 3: return 0.5 * (5.0 * x * x * x - 3.0 * x);
  }
  return NAN;
}

// Independent re-evaluation of every rescaled function at one pixel.
double independent_sum(std::size_t n, std::size_t row, std::size_t col) {
  auto coord = [n](std::size_t i) { return -1.0 + 2.0 * static_cast<double>(i) / (n - 1.0); };
  auto rescaled_at = [&](auto fn) {
    double lo = 1e300, hi = -1e300;
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        const double v = fn(coord(c), coord(r));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    if (hi - lo <= 1e-12 * std::max(1.0, std::abs(hi))) return 1.0;
    return 0.9 + 0.2 * (fn(coord(col), coord(row)) - lo) / (hi - lo);
  };
  double total = 0.0;
  for (int m = 0; m <= 3; ++m) {
    for (int k = 0; m + k <= 3; ++k) {
      total += rescaled_at([&](double x, double y) { return legendre_p(m, x) * legendre_p(k, y); });
    }
  }
  for (int k = 2; k <= 5; ++k) {
    for (int deg = 0; deg <= 180; deg += 10) {
      const double th = deg * std::numbers::pi / 180.0;
      total += rescaled_at([&](double x, double y) {
        return std::cos(k * (x * std::cos(th) + y * std::sin(th)));
      });
      total += rescaled_at([&](double x, double y) {
        return std::sin(k * (x * std::cos(th) + y * std::sin(th)));
      });
    }
  }
  return total;
}

TEST(LegendreTrig, Counts) {
  EXPECT_EQ(legendre_trig_count(3, 2) - 2 * 19, 10u);
  EXPECT_EQ(legendre_trig_count(3, 5), 162u);
  EXPECT_EQ(legendre_trig_basis(3, 5, {8, 8}).count(), 162u);
}

TEST(LegendreTrig, ConstantMapsToOneAndRangeIsBand) {
  const BasisSet set = legendre_trig_basis(3, 5, {16, 16});
  const Basis& h = set.fixed_basis();
  for (double v : h.element(0).values()) EXPECT_EQ(v, 1.0);
  for (const Field& e : h.elements()) {
    for (double v : e.values()) {
      ASSERT_GE(v, 0.9 - 1e-12);
      ASSERT_LE(v, 1.1 + 1e-12);
    }
  }
}

TEST(LegendreTrig, SumMatchesIndependentResummation) {
  const BasisSet set = legendre_trig_basis(3, 5, {16, 16});
  const Field total = basis_sum(set);
  for (auto [r, c] : {std::pair<std::size_t, std::size_t>{8, 8}, {7, 7}, {0, 15}, {3, 11}}) {
    EXPECT_NEAR(total.at(r, c), independent_sum(16, r, c), 1e-12) << r << "," << c;
  }
}

TEST(LegendreTrig, KeepsBothAngleEndpoints) {
  const BasisSet set = legendre_trig_basis(3, 2, {6, 6});
  const Basis& h = set.fixed_basis();
  // cos at 0 and 180 degrees coincide; the duplicate is kept.
  const std::size_t first_trig = 10;
  EXPECT_LE(max_abs_diff(h.element(first_trig), h.element(first_trig + 36)), 1e-12);
}

TEST(PixelBasis, TwoByTwoIsIdentity) {
  const BasisSet set = pixel_basis({2, 2});
  EXPECT_EQ(set.count(), 4u);
  EXPECT_TRUE(set.fixed_basis().dense_covariance().isApprox(Eigen::MatrixXd::Identity(4, 4)));
  EXPECT_EQ(basis_sum(set), Field({2, 2}, 1.0));
  Rng rng(1);
  const Field v = randn({2, 2}, rng);
  EXPECT_EQ(set.fixed_basis().apply_covariance(v), v);
}

TEST(PixelBasis, SingleElement) {
  const BasisSet set = pixel_basis({1, 1});
  EXPECT_EQ(set.count(), 1u);
  EXPECT_EQ(set.fixed_basis().dense_covariance()(0, 0), 1.0);
}

TEST(ResidualBasis, HandCovariance) {
  const Field clean({2}, 0.0), degraded({2}, std::vector<double>{1.0, 2.0});
  const BasisSet set = residual_basis_set({2});
  auto h = set.bind({&clean, &degraded});
  EXPECT_EQ(h->element(0), degraded - clean);
  Eigen::MatrixXd expected(2, 2);
  expected << 1, 2, 2, 4;
  EXPECT_TRUE(h->dense_covariance().isApprox(expected));
  Eigen::FullPivLU<Eigen::MatrixXd> lu(h->dense_covariance());
  EXPECT_EQ(lu.rank(), 1);
  EXPECT_EQ(basis_sum(set, {&clean, &degraded}), degraded - clean);
  const CovarianceOp op(h);
  EXPECT_EQ(apply_covariance(op, Field({2}, std::vector<double>{1.0, 0.0})),
            Field({2}, std::vector<double>{1.0, 2.0}));
}

TEST(ResidualBasis, IdenticalPairGivesZero) {
  const Field x({3}, 0.4);
  const Basis h = residual_basis(x, x);
  EXPECT_EQ(max_abs(h.element(0)), 0.0);
  EXPECT_EQ(h.dense_covariance().norm(), 0.0);
}

TEST(ResidualBasis, NeedsConditioning) {
  EXPECT_THROW(residual_basis_set({2}).bind({}), Error);
}

TEST(FixedBasis, IgnoresConditioning) {
  Rng rng(2);
  const BasisSet set = random_basis({3}, 3, rng);
  const Field a = randn({3}, rng), b = randn({3}, rng);
  auto h1 = set.bind({}), h2 = set.bind({&a, &b});
  for (std::size_t m = 0; m < set.count(); ++m) EXPECT_EQ(h1->element(m), h2->element(m));
}

TEST(Covariance, OperatorMatchesDenseNonOrthogonal) {
  Rng rng(3);
  const BasisSet set = random_basis({3}, 3, rng);
  const Basis& h = set.fixed_basis();
  const Eigen::MatrixXd gram = h.matrix().transpose() * h.matrix();
  EXPECT_GT(std::abs(gram(0, 1)), 1e-3);  // deliberately not orthogonal
  const Eigen::MatrixXd sigma = h.dense_covariance();
  for (int k = 0; k < 20; ++k) {
    const Field v = randn({3}, rng);
    const Eigen::VectorXd dense = sigma * as_vector(v);
    const Field op = h.apply_covariance(v);
    for (Eigen::Index i = 0; i < 3; ++i) EXPECT_NEAR(op[static_cast<std::size_t>(i)], dense[i], 1e-10);
  }
}

TEST(Covariance, PositiveSemiDefinite) {
  Rng rng(4);
  const BasisSet set = random_basis({4}, 2, rng);
  for (int k = 0; k < 1000; ++k) {
    const Field v = randn({4}, rng);
    ASSERT_GE(dot(v, set.fixed_basis().apply_covariance(v)), -1e-12);
  }
}

TEST(Covariance, DenseCapEnforced) {
  const BasisSet big = pixel_basis({9, 9});
  EXPECT_THROW(big.fixed_basis().dense_covariance(), Error);
  const CovarianceOp op(big.bind());
  EXPECT_FALSE(op.has_dense());
  EXPECT_THROW(op.dense(), Error);
  const CovarianceOp small(pixel_basis({8, 8}).bind());
  EXPECT_TRUE(small.has_dense());
}

TEST(Basis, ShapeMismatchRejected) {
  EXPECT_THROW(Basis({2}, {Field({3})}), Error);
  EXPECT_THROW(Basis({2}, {}), Error);
}

TEST(SpdSolver, RejectsSingularAndSolvesRegular) {
  Eigen::MatrixXd singular(2, 2);
  singular << 1, 2, 2, 4;
  try {
    SpdSolver s(singular);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularCovariance);
  }
  Eigen::MatrixXd m(2, 2);
  m << 2, 1, 1, 3;
  const SpdSolver s(m);
  const Field x = s.solve(Field({2}, std::vector<double>{1.0, 0.0}));
  EXPECT_NEAR(x[0], 0.6, 1e-14);
  EXPECT_NEAR(x[1], -0.2, 1e-14);
  EXPECT_NEAR(s.log_determinant(), std::log(5.0), 1e-14);
}

}  // namespace
}  // namespace eda
