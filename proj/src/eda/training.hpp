// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "eda/denoiser.hpp"
#include "eda/network.hpp"
#include "eda/process.hpp"

namespace eda {

enum class LossObjective {
  kMseX0,              // ||D(x_t; t) - x_0||^2 through the preconditioning wrapper
  kNoisePred,          // ||F(x_t, t) - N||^2
  kWeightedNoisePred,  // mask-balanced ||F(x_t, t) - N||^2
  kX0Pred,             // ||F(x_t, t) - x_0||^2
};

enum class OptimizerKind { kSgd, kAdam };
enum class TimeSampling { kContinuous, kDiscrete };

const char* to_string(LossObjective o);
LossObjective parse_loss_objective(const std::string& name);
OptimizerKind parse_optimizer(const std::string& name);
TimeSampling parse_time_sampling(const std::string& name);

/// Parameterization a network trained with `o` should be wrapped with.
Parameterization default_parameterization(LossObjective o);

struct TrainConfig {
  int steps = 1000;
  int batch = 1;
  double learning_rate = 1e-3;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  LossObjective objective = LossObjective::kNoisePred;
  /// Wrapper used by kMseX0.
  Parameterization parameterization = Parameterization::kPredictNoise;
  TimeSampling time_sampling = TimeSampling::kContinuous;
  std::uint64_t seed = 0;
  /// Step decay: lr *= decay_factor every decay_every steps (0 disables).
  double decay_factor = 1.0;
  int decay_every = 0;
  /// Exponential moving average of the weights (0 disables).
  double ema_decay = 0.0;

  void validate() const;
};

/// One draw of the training inner loop: x_t built from x_0 and noise N.
struct TrainingSample {
  Field x0;
  Field xt;
  Field noise;
  double t = 0.0;
  const Field* mask = nullptr;
};

struct LossResult {
  double loss = 0.0;
  std::vector<double> gradient;
};

/// Per-pixel weight 1 + (1 - m) max|m N| / max|(1 - m) N|; the second term
/// is zero when the denominator vanishes.
Field mask_weights(const Field& mask, const Field& noise);

double draw_time(TimeSampling sampling, double horizon, Rng& rng);

TrainingSample draw_training_sample(const DiffusionProcess& process, const Field& x0, double t,
                                    const Conditioning& cond, Rng& rng);

/// Loss and parameter gradient (explicit backpropagation) on one sample.
LossResult loss_on_sample(LossObjective objective, const TinyNetwork& net,
                          const DiffusionProcess& process, Parameterization parameterization,
                          const TrainingSample& sample);

/// Loss value only, evaluated through a generic denoiser (kMseX0 form).
double denoiser_loss(const Denoiser& denoiser, const TrainingSample& sample);

LossResult compute_loss(LossObjective objective, const TinyNetwork& net,
                        const DiffusionProcess& process, Parameterization parameterization,
                        const Field& x0, double t, const Conditioning& cond, Rng& rng,
                        const Field* mask = nullptr);

struct TrainResult {
  TinyNetwork network;
  std::vector<double> losses;
};

/// Training loop. `masks`, when given, pairs one mask with each dataset point.
TrainResult train(TinyNetwork network, const DiffusionProcess& process, const DiracDataset& dataset,
                  const TrainConfig& config, const std::vector<Field>* masks = nullptr,
                  const std::function<void(int step, double loss)>& progress = {});

}  // namespace eda
