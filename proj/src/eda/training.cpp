// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#include "eda/training.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eda/error.hpp"

namespace eda {

const char* to_string(LossObjective o) {
  switch (o) {
    case LossObjective::kMseX0: return "mse-x0";
    case LossObjective::kNoisePred: return "noise-pred";
    case LossObjective::kWeightedNoisePred: return "weighted-noise-pred";
    case LossObjective::kX0Pred: return "x0-pred";
  }
  return "?";
}

LossObjective parse_loss_objective(const std::string& name) {
  if (name == "mse-x0") return LossObjective::kMseX0;
  if (name == "noise-pred") return LossObjective::kNoisePred;
  if (name == "weighted-noise-pred") return LossObjective::kWeightedNoisePred;
  if (name == "x0-pred") return LossObjective::kX0Pred;
  fail(ErrorCode::kParse, "unknown loss objective '" + name + "'");
}

OptimizerKind parse_optimizer(const std::string& name) {
  if (name == "adam") return OptimizerKind::kAdam;
  if (name == "sgd") return OptimizerKind::kSgd;
  fail(ErrorCode::kParse, "unknown optimizer '" + name + "'");
}

TimeSampling parse_time_sampling(const std::string& name) {
  if (name == "continuous") return TimeSampling::kContinuous;
  if (name == "discrete") return TimeSampling::kDiscrete;
  fail(ErrorCode::kParse, "unknown time sampling '" + name + "'");
}

Parameterization default_parameterization(LossObjective o) {
  return o == LossObjective::kX0Pred ? Parameterization::kPredictX0
                                     : Parameterization::kPredictNoise;
}

void TrainConfig::validate() const {
  require(steps >= 1, ErrorCode::kInvalidArgument, "train.steps must be >= 1");
  require(batch >= 1, ErrorCode::kInvalidArgument, "train.batch must be >= 1");
  require(learning_rate >= 0.0 && std::isfinite(learning_rate), ErrorCode::kInvalidArgument,
          "train.lr must be finite and >= 0");
  require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0 && adam_epsilon > 0.0,
          ErrorCode::kInvalidArgument, "invalid adam parameters");
  require(decay_factor > 0.0 && decay_every >= 0, ErrorCode::kInvalidArgument,
          "invalid learning-rate decay");
  require(ema_decay >= 0.0 && ema_decay < 1.0, ErrorCode::kInvalidArgument,
          "ema decay must lie in [0, 1)");
}

Field mask_weights(const Field& mask, const Field& noise) {
  require_same_shape(mask, noise, "mask weights");
  double inside = 0.0, outside = 0.0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    require(mask[i] == 0.0 || mask[i] == 1.0, ErrorCode::kInvalidArgument,
            "mask entries must be 0 or 1");
    inside = std::max(inside, std::abs(mask[i] * noise[i]));
    outside = std::max(outside, std::abs((1.0 - mask[i]) * noise[i]));
  }
  const double ratio = outside > 0.0 ? inside / outside : 0.0;
  Field w(mask.shape());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 1.0 + (1.0 - mask[i]) * ratio;
  return w;
}

double draw_time(TimeSampling sampling, double horizon, Rng& rng) {
  if (sampling == TimeSampling::kContinuous) return horizon * (1.0 - rng.uniform());
  const auto steps = static_cast<std::uint64_t>(std::max(1L, std::lround(horizon)));
  const double t = static_cast<double>(1 + rng.next_u64() % steps);
  return std::min(t, horizon);
}

TrainingSample draw_training_sample(const DiffusionProcess& process, const Field& x0, double t,
                                    const Conditioning& cond, Rng& rng) {
  TrainingSample s;
  s.x0 = x0;
  s.t = t;
  s.noise = process.sample_noise(cond, rng);
  s.xt = process.forward_from_noise(x0, t, s.noise);
  return s;
}

LossResult loss_on_sample(LossObjective objective, const TinyNetwork& net,
                          const DiffusionProcess& process, Parameterization parameterization,
                          const TrainingSample& sample) {
  require(objective != LossObjective::kWeightedNoisePred || sample.mask != nullptr,
          ErrorCode::kInvalidArgument, "weighted-noise-pred loss needs a mask");
  const Parameterization p =
      objective == LossObjective::kMseX0 ? parameterization : default_parameterization(objective);
  const Preconditioning pc = preconditioning(process.schedule(), p, sample.t);
  TinyNetwork::Tape tape;
  const std::vector<double> out = net.forward(network_input(sample.xt, pc), &tape);
  require(out.size() == sample.x0.size(), ErrorCode::kShapeMismatch, "network output size");

  std::vector<double> grad_out(out.size());
  double loss = 0.0;
  switch (objective) {
    case LossObjective::kMseX0:
      for (std::size_t i = 0; i < out.size(); ++i) {
        const double r = pc.c_skip * sample.xt[i] + pc.c_out * out[i] - sample.x0[i];
        loss += r * r;
        grad_out[i] = 2.0 * pc.c_out * r;
      }
      break;
    case LossObjective::kNoisePred:
      for (std::size_t i = 0; i < out.size(); ++i) {
        const double r = out[i] - sample.noise[i];
        loss += r * r;
        grad_out[i] = 2.0 * r;
      }
      break;
    case LossObjective::kWeightedNoisePred: {
      const Field w = mask_weights(*sample.mask, sample.noise);
      for (std::size_t i = 0; i < out.size(); ++i) {
        const double r = out[i] - sample.noise[i];
        loss += w[i] * r * r;
        grad_out[i] = 2.0 * w[i] * r;
      }
      break;
    }
    case LossObjective::kX0Pred:
      for (std::size_t i = 0; i < out.size(); ++i) {
        const double r = out[i] - sample.x0[i];
        loss += r * r;
        grad_out[i] = 2.0 * r;
      }
      break;
  }
  LossResult result;
  result.loss = loss;
  result.gradient.assign(net.parameter_count(), 0.0);
  net.backward(tape, grad_out, result.gradient);
  return result;
}

double denoiser_loss(const Denoiser& denoiser, const TrainingSample& sample) {
  return squared_norm(denoiser.evaluate(sample.xt, sample.t) - sample.x0);
}

LossResult compute_loss(LossObjective objective, const TinyNetwork& net,
                        const DiffusionProcess& process, Parameterization parameterization,
                        const Field& x0, double t, const Conditioning& cond, Rng& rng,
                        const Field* mask) {
  TrainingSample sample = draw_training_sample(process, x0, t, cond, rng);
  sample.mask = mask;
  return loss_on_sample(objective, net, process, parameterization, sample);
}

TrainResult train(TinyNetwork network, const DiffusionProcess& process, const DiracDataset& dataset,
                  const TrainConfig& config, const std::vector<Field>* masks,
                  const std::function<void(int, double)>& progress) {
  config.validate();
  dataset.validate(process.shape());
  require(network.input_dim() == element_count(process.shape()) + 1 &&
              network.output_dim() == element_count(process.shape()),
          ErrorCode::kShapeMismatch, "network does not fit the process data shape");
  const bool weighted = config.objective == LossObjective::kWeightedNoisePred;
  require(!weighted || (masks != nullptr && masks->size() == dataset.size()),
          ErrorCode::kInvalidArgument, "weighted-noise-pred needs one mask per dataset point");

  Rng rng(config.seed, 0x7472616e);  // "tran"
  const std::size_t n_params = network.parameter_count();
  std::vector<double> grad(n_params), m1(n_params, 0.0), m2(n_params, 0.0);
  std::vector<double> ema;
  if (config.ema_decay > 0.0) ema.assign(network.parameters().begin(), network.parameters().end());

  TrainResult result{network, {}};
  TinyNetwork& net = result.network;
  result.losses.reserve(static_cast<std::size_t>(config.steps));
  double lr = config.learning_rate;
  double beta1_pow = 1.0, beta2_pow = 1.0;

  for (int step = 1; step <= config.steps; ++step) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    for (int b = 0; b < config.batch; ++b) {
      const std::size_t i = static_cast<std::size_t>(rng.next_u64() % dataset.size());
      const double t = draw_time(config.time_sampling, process.horizon(), rng);
      TrainingSample sample =
          draw_training_sample(process, dataset.points[i], t, dataset.conditioning(i), rng);
      if (weighted) sample.mask = &(*masks)[i];
      const LossResult r =
          loss_on_sample(config.objective, net, process, config.parameterization, sample);
      loss += r.loss;
      for (std::size_t k = 0; k < n_params; ++k) grad[k] += r.gradient[k];
    }
    const double inv_batch = 1.0 / config.batch;
    loss *= inv_batch;
    if (!std::isfinite(loss)) {
      std::ostringstream os;
      os << "non-finite training loss at step " << step << " (lr " << lr << ")";
      fail(ErrorCode::kNumerical, os.str());
    }
    result.losses.push_back(loss);

    auto params = net.parameters();
    if (config.optimizer == OptimizerKind::kSgd) {
      for (std::size_t k = 0; k < n_params; ++k) params[k] -= lr * grad[k] * inv_batch;
    } else {
      beta1_pow *= config.beta1;
      beta2_pow *= config.beta2;
      for (std::size_t k = 0; k < n_params; ++k) {
        const double g = grad[k] * inv_batch;
        m1[k] = config.beta1 * m1[k] + (1.0 - config.beta1) * g;
        m2[k] = config.beta2 * m2[k] + (1.0 - config.beta2) * g * g;
        const double mhat = m1[k] / (1.0 - beta1_pow);
        const double vhat = m2[k] / (1.0 - beta2_pow);
        params[k] -= lr * mhat / (std::sqrt(vhat) + config.adam_epsilon);
      }
    }
    if (!ema.empty()) {
      for (std::size_t k = 0; k < n_params; ++k) {
        ema[k] = config.ema_decay * ema[k] + (1.0 - config.ema_decay) * params[k];
      }
    }
    if (config.decay_every > 0 && step % config.decay_every == 0) lr *= config.decay_factor;
    if (progress) progress(step, loss);
  }
  if (!ema.empty()) std::copy(ema.begin(), ema.end(), net.parameters().begin());
  return result;
}

}  // namespace eda
