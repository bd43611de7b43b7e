// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#include "eda/denoiser.hpp"

#include <cmath>

#include "eda/error.hpp"

namespace eda {

Field ConstantDenoiser::evaluate(const Field& x, double) const {
  require_same_shape(x, value_, "constant denoiser");
  return value_;
}

DiracMixtureDenoiser::DiracMixtureDenoiser(DiffusionProcess process, DiracDataset dataset)
    : process_(std::move(process)), dataset_(std::move(dataset)) {
  dataset_.validate(process_.shape());
  require(process_.basis().is_fixed(), ErrorCode::kInvalidArgument,
          "analytic denoiser needs a fixed basis");
}

std::vector<double> DiracMixtureDenoiser::weights(const Field& x, double t) const {
  return process_.mixture_weights(dataset_, t, x);
}

Field DiracMixtureDenoiser::evaluate(const Field& x, double t) const {
  const std::vector<double> w = weights(x, t);
  Field out(x.shape());
  for (std::size_t i = 0; i < w.size(); ++i) axpy(w[i], dataset_.points[i], out);
  return out;
}

const char* to_string(Parameterization p) {
  return p == Parameterization::kPredictNoise ? "predict-noise" : "predict-x0";
}

Parameterization parse_parameterization(const std::string& name) {
  if (name == "predict-noise") return Parameterization::kPredictNoise;
  if (name == "predict-x0") return Parameterization::kPredictX0;
  fail(ErrorCode::kParse, "unknown parameterization '" + name + "'");
}

Preconditioning preconditioning(const Schedule& schedule, Parameterization p, double t) {
  const ScheduleValues v = schedule.evaluate(t);
  Preconditioning pc;
  pc.c_in = 1.0 / std::sqrt(1.0 + v.sigma * v.sigma);
  pc.c_noise = t / schedule.horizon();
  if (p == Parameterization::kPredictNoise) {
    pc.c_skip = 1.0 / v.s;
    pc.c_out = -v.sigma;
  } else {
    pc.c_skip = 0.0;
    pc.c_out = 1.0;
  }
  return pc;
}

std::vector<double> network_input(const Field& x, const Preconditioning& pc) {
  std::vector<double> in(x.size() + 1);
  for (std::size_t i = 0; i < x.size(); ++i) in[i] = pc.c_in * x[i];
  in.back() = pc.c_noise;
  return in;
}

PreconditionedDenoiser::PreconditionedDenoiser(std::shared_ptr<const TinyNetwork> net,
                                               DiffusionProcess process,
                                               Parameterization parameterization)
    : net_(std::move(net)), process_(std::move(process)), param_(parameterization) {
  require(net_ != nullptr, ErrorCode::kInvalidArgument, "network missing");
  const std::size_t d = element_count(process_.shape());
  require(net_->input_dim() == d + 1 && net_->output_dim() == d, ErrorCode::kShapeMismatch,
          "network dims (" + std::to_string(net_->input_dim()) + " -> " +
              std::to_string(net_->output_dim()) + ") do not fit data dimension " +
              std::to_string(d));
}

Field PreconditionedDenoiser::evaluate(const Field& x, double t) const {
  require(x.shape() == process_.shape(), ErrorCode::kShapeMismatch, "denoiser input shape");
  const Preconditioning pc = preconditioning(process_.schedule(), param_, t);
  const std::vector<double> f = net_->forward(network_input(x, pc));
  Field out = x * pc.c_skip;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += pc.c_out * f[i];
  return out;
}

}  // namespace eda
