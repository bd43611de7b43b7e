// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "eda/error.hpp"
#include "eda/schedule.hpp"

namespace eda {
namespace {

Schedule vp() { return Schedule::vp(1e-4, 0.02, 100.0); }

TEST(Schedule, HeadlineValuesAtHorizon) {
  const Schedule s = vp();
  const double abar = std::exp(-(0.0001 * 100.0 + 0.0199 * 100.0 / 2.0));
  EXPECT_NEAR(abar, 0.366045, 1e-6);
  EXPECT_NEAR(s.alpha_bar(100.0), abar, 1e-15);
  EXPECT_NEAR(s.evaluate(100.0).sigma, std::sqrt(1.0 - abar), 1e-14);
  EXPECT_NEAR(s.evaluate(100.0).sigma, 0.79621, 5e-6);
}

TEST(Schedule, StartsUnperturbed) {
  const ScheduleValues v = vp().evaluate(0.0);
  EXPECT_EQ(v.s, 1.0);
  EXPECT_EQ(v.s_prime, 0.0);
  EXPECT_EQ(v.sigma, 0.0);
}

TEST(Schedule, SigmaIncreasingAndScalePositive) {
  for (const Schedule& s : {vp(), Schedule::ddpm(1e-4, 0.02, 100.0)}) {
    double prev = s.evaluate(0.0).sigma;
    for (int i = 1; i <= 1000; ++i) {
      const ScheduleValues v = s.evaluate(0.1 * i);
      ASSERT_GT(v.sigma, prev);
      ASSERT_GT(v.s, 0.0);
      prev = v.sigma;
    }
  }
}

TEST(Schedule, VpKeepsUnitScale) {
  const Schedule s = vp();
  for (double t : {0.5, 17.0, 63.2, 100.0}) {
    EXPECT_EQ(s.evaluate(t).s, 1.0);
    EXPECT_EQ(s.evaluate(t).s_prime, 0.0);
  }
}

TEST(Schedule, SigmaPrimeMatchesCentralDifference) {
  for (const Schedule& s : {vp(), Schedule::ddpm(1e-4, 0.02, 100.0)}) {
    const double t = 37.5, h = 1e-5;
    const double fd = (s.evaluate(t + h).sigma - s.evaluate(t - h).sigma) / (2.0 * h);
    EXPECT_LE(std::abs(fd - s.evaluate(t).sigma_prime) / std::abs(fd), 1e-6);
    const double fd_s = (s.evaluate(t + h).s - s.evaluate(t - h).s) / (2.0 * h);
    EXPECT_NEAR(fd_s, s.evaluate(t).s_prime, 1e-9);
  }
}

TEST(Schedule, DdpmCorrespondence) {
  const Schedule s = Schedule::ddpm(1e-4, 0.02, 100.0);
  for (double t : {1.0, 50.0, 100.0}) {
    const double abar = s.alpha_bar(t);
    const ScheduleValues v = s.evaluate(t);
    EXPECT_NEAR(v.s, std::sqrt(abar), 1e-14);
    EXPECT_NEAR(v.sigma, std::sqrt(1.0 - abar) / std::sqrt(abar), 1e-13);
  }
}

TEST(Schedule, DiscreteTableIsCumulativeProduct) {
  const Schedule s = vp();
  const auto& table = s.discrete_alpha_bar();
  ASSERT_EQ(table.size(), 100u);
  double prod = 1.0;
  for (int i = 1; i <= 100; ++i) {
    const double beta = 1e-4 + (0.02 - 1e-4) * (i - 1) / 99.0;
    prod *= 1.0 - beta;
    EXPECT_NEAR(table[static_cast<std::size_t>(i - 1)], prod, 1e-15);
  }
}

TEST(Schedule, OutOfRangeTimeIsDomainError) {
  try {
    vp().evaluate(100.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDomain);
  }
  EXPECT_THROW(vp().evaluate(-1.0), Error);
}

TEST(Schedule, InvalidParametersRejected) {
  EXPECT_THROW(Schedule::vp(0.02, 1e-4, 100.0), Error);
  EXPECT_THROW(Schedule::vp(1e-4, 0.02, 0.0), Error);
  EXPECT_THROW(parse_schedule_kind("cosine"), Error);
  EXPECT_EQ(parse_schedule_kind("vp"), ScheduleKind::kVp);
  EXPECT_EQ(parse_schedule_kind("ddpm"), ScheduleKind::kDdpm);
}

TEST(Schedule, CustomScheduleDerivedRate) {
  const Schedule s = Schedule::custom(1.0, [](double t) {
    return ScheduleValues{1.0, 0.0, t, 1.0};
  });
  EXPECT_DOUBLE_EQ(s.sigma_squared_rate(0.5), 1.0);
}

TEST(SdeCoefficients, UnitScaleHasNoDrift) {
  const Field ones({3}, 1.0);
  for (double t : {0.1, 10.0, 99.0}) EXPECT_EQ(sde_coefficients(vp(), 2.0, ones, t).f, 0.0);
}

TEST(SdeCoefficients, ZeroEtaHasNoShift) {
  const Field ones({3}, 1.0);
  EXPECT_EQ(max_abs(sde_coefficients(vp(), 0.0, ones, 40.0).phi), 0.0);
}

TEST(SdeCoefficients, EtaTenScalesDiffusionByOneEleventh) {
  const Field ones({3}, 1.0);
  for (double t : {0.3, 25.0, 100.0}) {
    const double g0 = sde_coefficients(vp(), 0.0, ones, t).g;
    const double g10 = sde_coefficients(vp(), 10.0, ones, t).g;
    EXPECT_NEAR(g10 / g0, 1.0 / 11.0, 1e-15);
  }
}

TEST(SdeCoefficients, ShiftFollowsSigmaPrime) {
  const Field h({2}, std::vector<double>{1.0, -2.0});
  const ScheduleValues v = vp().evaluate(30.0);
  const Field phi = sde_coefficients(vp(), 10.0, h, 30.0).phi;
  EXPECT_NEAR(phi[0], 10.0 / 11.0 * v.sigma_prime, 1e-15);
  EXPECT_NEAR(phi[1], -20.0 / 11.0 * v.sigma_prime, 1e-15);
}

TEST(SdeCoefficients, EndpointRejected) {
  try {
    sde_coefficients(vp(), 0.0, Field({1}, 1.0), 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDomain);
  }
}

}  // namespace
}  // namespace eda
