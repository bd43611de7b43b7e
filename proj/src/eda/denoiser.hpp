// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "eda/network.hpp"
#include "eda/process.hpp"

namespace eda {

/// Map (x, t) -> estimate of x_0.
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual Field evaluate(const Field& x, double t) const = 0;
  virtual std::string variant() const = 0;
};

/// Returns a fixed field regardless of input; the conditional optimum
/// D = x_0 used by the cancellation identities.
class ConstantDenoiser final : public Denoiser {
 public:
  explicit ConstantDenoiser(Field value) : value_(std::move(value)) {}
  Field evaluate(const Field& x, double t) const override;
  std::string variant() const override { return "constant-oracle"; }
  const Field& value() const noexcept { return value_; }

 private:
  Field value_;
};

/// Population-optimal denoiser for a Dirac-mixture dataset under a fixed
/// basis: the posterior mean sum_i w_i y_i.
class DiracMixtureDenoiser final : public Denoiser {
 public:
  DiracMixtureDenoiser(DiffusionProcess process, DiracDataset dataset);
  Field evaluate(const Field& x, double t) const override;
  std::string variant() const override { return "analytic-dirac"; }
  std::vector<double> weights(const Field& x, double t) const;
  const DiracDataset& dataset() const noexcept { return dataset_; }

 private:
  DiffusionProcess process_;
  DiracDataset dataset_;
};

enum class Parameterization {
  kPredictNoise,  // F ~ N: c_skip = 1/s, c_out = -sigma
  kPredictX0,     // F ~ x_0: c_skip = 0, c_out = 1
};

const char* to_string(Parameterization p);
Parameterization parse_parameterization(const std::string& name);

struct Preconditioning {
  double c_skip = 0.0;
  double c_out = 0.0;
  double c_in = 1.0;
  double c_noise = 0.0;
};

/// c_in = 1/sqrt(1 + sigma^2), c_noise = t/T.
Preconditioning preconditioning(const Schedule& schedule, Parameterization p, double t);

/// Network input [c_in * x, c_noise].
std::vector<double> network_input(const Field& x, const Preconditioning& pc);

/// D(x; t) = c_skip x + c_out F(c_in x, c_noise).
class PreconditionedDenoiser final : public Denoiser {
 public:
  PreconditionedDenoiser(std::shared_ptr<const TinyNetwork> net, DiffusionProcess process,
                         Parameterization parameterization);
  Field evaluate(const Field& x, double t) const override;
  std::string variant() const override { return "preconditioned-network"; }

  const TinyNetwork& network() const noexcept { return *net_; }
  Parameterization parameterization() const noexcept { return param_; }

 private:
  std::shared_ptr<const TinyNetwork> net_;
  DiffusionProcess process_;
  Parameterization param_;
};

}  // namespace eda
