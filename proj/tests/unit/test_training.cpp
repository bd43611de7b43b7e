// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "../support/gradient_check.hpp"
#include "eda/error.hpp"
#include "eda/training.hpp"

namespace eda {
namespace {

Schedule vp() { return Schedule::vp(1e-4, 0.02, 100.0); }

double mean_of(const std::vector<double>& v, std::size_t begin, std::size_t end) {
  return std::accumulate(v.begin() + static_cast<long>(begin), v.begin() + static_cast<long>(end), 0.0) /
         static_cast<double>(end - begin);
}

DiracDataset two_points() {
  DiracDataset ds;
  ds.points = {Field({2}, std::vector<double>{0.8, -0.4}), Field({2}, std::vector<double>{-0.5, 0.6})};
  return ds;
}

TEST(Loss, ConstantOracleHasZeroX0Loss) {
  Rng rng(1);
  const DiffusionProcess p(vp(), pixel_basis({3}), 0.0);
  const Field x0 = randn({3}, rng);
  const TrainingSample s = draw_training_sample(p, x0, 42.0, {}, rng);
  EXPECT_EQ(denoiser_loss(ConstantDenoiser(x0), s), 0.0);
}

TEST(Loss, TrainingSampleFollowsForwardMap) {
  Rng rng(2);
  const DiffusionProcess p(vp(), pixel_basis({3}), 0.0);
  const Field x0 = randn({3}, rng);
  const TrainingSample s = draw_training_sample(p, x0, 42.0, {}, rng);
  EXPECT_EQ(s.xt, p.forward_from_noise(x0, 42.0, s.noise));
}

TEST(Loss, ZeroMaskReducesToPlainNoiseLoss) {
  Rng rng(3);
  const DiffusionProcess p(vp(), pixel_basis({4}), 0.0);
  const TinyNetwork net = TinyNetwork::initialized({5, 6, 4}, rng);
  const Field mask({4}, 0.0);
  TrainingSample s = draw_training_sample(p, randn({4}, rng), 30.0, {}, rng);
  s.mask = &mask;
  EXPECT_EQ(mask_weights(mask, s.noise), Field({4}, 1.0));
  const LossResult plain = loss_on_sample(LossObjective::kNoisePred, net, p, Parameterization::kPredictNoise, s);
  const LossResult weighted =
      loss_on_sample(LossObjective::kWeightedNoisePred, net, p, Parameterization::kPredictNoise, s);
  EXPECT_DOUBLE_EQ(plain.loss, weighted.loss);
}

TEST(Loss, WeightedLossNeedsMask) {
  Rng rng(4);
  const DiffusionProcess p(vp(), pixel_basis({2}), 0.0);
  const TinyNetwork net = TinyNetwork::initialized({3, 4, 2}, rng);
  const TrainingSample s = draw_training_sample(p, Field({2}), 10.0, {}, rng);
  EXPECT_THROW(loss_on_sample(LossObjective::kWeightedNoisePred, net, p, Parameterization::kPredictNoise, s),
               Error);
}

TEST(MaskWeights, FormulaAndGuard) {
  const Field mask({4}, std::vector<double>{1.0, 1.0, 0.0, 0.0});
  const Field noise({4}, std::vector<double>{4.0, -6.0, 1.0, -2.0});
  const Field w = mask_weights(mask, noise);
  EXPECT_EQ(w[0], 1.0);
  EXPECT_EQ(w[1], 1.0);
  EXPECT_DOUBLE_EQ(w[2], 1.0 + 6.0 / 2.0);
  EXPECT_DOUBLE_EQ(w[3], 1.0 + 6.0 / 2.0);
  for (double v : w.values()) EXPECT_GE(v, 1.0);
  const Field metal_only({4}, std::vector<double>{4.0, -6.0, 0.0, 0.0});
  EXPECT_EQ(mask_weights(mask, metal_only), Field({4}, 1.0));
}

TEST(MaskWeights, ExceedOneOffMaskWhenMetalDominates) {
  const Field mask({3}, std::vector<double>{1.0, 0.0, 0.0});
  const Field noise({3}, std::vector<double>{5.0, 0.5, -0.25});
  const Field w = mask_weights(mask, noise);
  EXPECT_GT(w[1], 1.0);
  EXPECT_GT(w[2], 1.0);
  EXPECT_EQ(w[0], 1.0);
}

TEST(Gradient, AllObjectivesMatchFiniteDifferences) {
  const std::vector<std::pair<LossObjective, Parameterization>> cases = {
      {LossObjective::kMseX0, Parameterization::kPredictNoise},
      {LossObjective::kMseX0, Parameterization::kPredictX0},
      {LossObjective::kNoisePred, Parameterization::kPredictNoise},
      {LossObjective::kWeightedNoisePred, Parameterization::kPredictNoise},
      {LossObjective::kX0Pred, Parameterization::kPredictX0},
  };
  for (const auto& [objective, param] : cases) {
    const auto check = testing::check_gradient(objective, param, 17);
    EXPECT_LE(check.worst_relative, 1e-5) << to_string(objective) << "/" << to_string(param);
  }
}

TEST(Train, ZeroLearningRateLeavesParametersUntouched) {
  Rng rng(5);
  const DiffusionProcess p(vp(), pixel_basis({2}), 0.0);
  const TinyNetwork net = TinyNetwork::initialized({3, 8, 2}, rng);
  TrainConfig cfg;
  cfg.steps = 20;
  cfg.learning_rate = 0.0;
  cfg.optimizer = OptimizerKind::kSgd;
  const TrainResult out = train(net, p, two_points(), cfg);
  EXPECT_TRUE(std::equal(net.parameters().begin(), net.parameters().end(),
                         out.network.parameters().begin()));
}

TEST(Train, SameSeedSameTrace) {
  Rng rng(6);
  const DiffusionProcess p(vp(), pixel_basis({2}), 0.0);
  const TinyNetwork net = TinyNetwork::initialized({3, 8, 2}, rng);
  TrainConfig cfg;
  cfg.steps = 200;
  cfg.seed = 99;
  EXPECT_EQ(train(net, p, two_points(), cfg).losses, train(net, p, two_points(), cfg).losses);
}

TEST(Train, LossDecreasesOnTwoPoints) {
  Rng rng(7);
  const DiffusionProcess p(vp(), pixel_basis({2}), 0.0);
  const TinyNetwork net = TinyNetwork::initialized({3, 32, 32, 2}, rng);
  TrainConfig cfg;
  cfg.steps = 5000;
  cfg.objective = LossObjective::kMseX0;
  cfg.parameterization = Parameterization::kPredictNoise;
  cfg.learning_rate = 1e-3;
  cfg.seed = 3;
  const TrainResult out = train(net, p, two_points(), cfg);
  ASSERT_EQ(out.losses.size(), 5000u);
  EXPECT_LT(mean_of(out.losses, 4900, 5000), mean_of(out.losses, 0, 100));
}

TEST(Train, TrainedLossRespectsAnalyticBound) {
  Rng rng(8);
  const DiffusionProcess p(vp(), pixel_basis({2}), 0.0);
  const DiracDataset ds = two_points();
  TrainConfig cfg;
  cfg.steps = 3000;
  cfg.objective = LossObjective::kMseX0;
  cfg.parameterization = Parameterization::kPredictX0;
  cfg.seed = 4;
  const TrainResult out = train(TinyNetwork::initialized({3, 32, 32, 2}, rng), p, ds, cfg);
  const PreconditionedDenoiser trained(std::make_shared<const TinyNetwork>(out.network), p,
                                       Parameterization::kPredictX0);
  const DiracMixtureDenoiser optimal(p, ds);
  // Paired Monte Carlo: the analytic denoiser is the population optimum.
  Rng mc(9);
  const int n = 20000;
  double sum_diff = 0.0, sum_sq = 0.0;
  for (int k = 0; k < n; ++k) {
    const Field& x0 = ds.points[mc.next_u64() % 2];
    const TrainingSample s = draw_training_sample(p, x0, draw_time(TimeSampling::kContinuous, 100.0, mc), {}, mc);
    const double diff = denoiser_loss(trained, s) - denoiser_loss(optimal, s);
    sum_diff += diff;
    sum_sq += diff * diff;
  }
  const double mean = sum_diff / n, se = std::sqrt((sum_sq / n - mean * mean) / n);
  EXPECT_GE(mean, -2.0 * se);
}

TEST(Train, NonFiniteLossAborts) {
  Rng rng(10);
  const DiffusionProcess p(vp(), pixel_basis({2}), 0.0);
  TinyNetwork net = TinyNetwork::initialized({3, 4, 2}, rng);
  for (double& w : net.parameters()) w = 1e200;
  TrainConfig cfg;
  cfg.steps = 3;
  try {
    train(net, p, two_points(), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNumerical);
  }
}

TEST(Train, TimeSamplingRanges) {
  Rng rng(11);
  for (int k = 0; k < 1000; ++k) {
    const double c = draw_time(TimeSampling::kContinuous, 100.0, rng);
    ASSERT_GT(c, 0.0);
    ASSERT_LE(c, 100.0);
    const double d = draw_time(TimeSampling::kDiscrete, 100.0, rng);
    ASSERT_EQ(d, std::floor(d));
    ASSERT_GE(d, 1.0);
    ASSERT_LE(d, 100.0);
  }
}

TEST(TrainConfig, Validation) {
  TrainConfig cfg;
  cfg.steps = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.steps = 1;
  cfg.batch = 0;
  EXPECT_THROW(cfg.validate(), Error);
  EXPECT_THROW(parse_loss_objective("l1"), Error);
}

}  // namespace
}  // namespace eda
