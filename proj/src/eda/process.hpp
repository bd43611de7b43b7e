// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "eda/basis.hpp"
#include "eda/field.hpp"
#include "eda/linalg.hpp"
#include "eda/schedule.hpp"

namespace eda {

class Denoiser;

/// Finite training set treated as a mixture of point masses. `degraded`
/// is either empty or holds one paired observation per point.
struct DiracDataset {
  std::vector<Field> points;
  std::vector<Field> degraded;

  std::size_t size() const noexcept { return points.size(); }
  const Shape& shape() const;
  Conditioning conditioning(std::size_t i) const;
  void validate(const Shape& expected) const;
};

/// Gaussian perturbation kernel of x_t given x_0:
/// N(mean, cov_scale * Sigma).
struct ConditionalMoments {
  Field mean;
  double cov_scale = 0.0;
  CovarianceOp covariance;
};

/// One instance of the generalized diffusion: schedule (s, sigma), basis set
/// H, and stochasticity mediator eta >= 0.
class DiffusionProcess {
 public:
  DiffusionProcess(Schedule schedule, BasisSet basis, double eta);

  const Schedule& schedule() const noexcept { return schedule_; }
  const BasisSet& basis() const noexcept { return basis_; }
  double eta() const noexcept { return eta_; }
  const Shape& shape() const noexcept { return basis_.shape(); }
  double horizon() const noexcept { return schedule_.horizon(); }
  /// Smallest time used by grids and simulations, T / 1000.
  double epsilon() const noexcept { return schedule_.horizon() / 1000.0; }

  /// N = sum_m ((eta + e_m) / (eta + 1)) h_m, e_m ~ N(0, 1).
  Field sample_noise(const Basis& basis, Rng& rng) const;
  Field sample_noise(const Conditioning& cond, Rng& rng) const;

  /// x_t = s x_0 + s sigma N.
  Field forward_from_noise(const Field& x0, double t, const Field& noise) const;
  Field forward_sample(const Field& x0, double t, const Conditioning& cond, Rng& rng) const;

  /// Mean offset (eta s sigma / (eta + 1)) sum_m h_m.
  Field mean_shift(const Basis& basis, double t) const;
  /// s^2 sigma^2 / (eta + 1)^2.
  double covariance_scale(double t) const;
  ConditionalMoments conditional_moments(const Field& x0, double t, const Conditioning& cond) const;

  using PathObserver = std::function<void(double t, const Field& x)>;
  /// Euler–Maruyama on a uniform grid over [T/1000, T], bridged from x_0 by
  /// an exact forward draw at the grid start.
  Field simulate_sde(const Field& x0, int n_steps, const Conditioning& cond, Rng& rng,
                     const PathObserver& observer = {}) const;

  /// grad_x log N(x; mean, cov); needs an invertible dense Sigma.
  Field conditional_score(const Field& x0, double t, const Field& x, const Conditioning& cond) const;

  /// Posterior weights of the dataset points given x at time t (fixed basis);
  /// log-sum-exp stabilized, sum to 1.
  std::vector<double> mixture_weights(const DiracDataset& ds, double t, const Field& x) const;
  /// grad_x log p_t(x) for the Dirac-mixture marginal.
  Field marginal_score(const DiracDataset& ds, double t, const Field& x) const;

  /// f x + phi - (1/2) g^2 Sigma grad log P(x | x_0), assembled term by term.
  Field pfode_rhs_conditional(const Field& x0, double t, const Field& x,
                              const Conditioning& cond) const;
  /// f x + phi - (1/2) g^2 Sigma grad log p_t(x) with the Dirac-mixture marginal.
  Field pfode_rhs_marginal(const DiracDataset& ds, double t, const Field& x) const;
  /// (s'/s + sigma'/sigma) x - (sigma' s / sigma) D(x; t).
  Field pfode_rhs(const Denoiser& denoiser, double t, const Field& x) const;

  /// Solver for the fixed basis' dense Sigma; throws if Sigma is singular.
  const SpdSolver& fixed_solver() const;

 private:
  std::shared_ptr<const SpdSolver> solver_for(const Basis& basis) const;
  void require_positive_time(double t, const char* what) const;

  struct SolverCache;

  Schedule schedule_;
  BasisSet basis_;
  double eta_;
  std::shared_ptr<SolverCache> cache_;
};

}  // namespace eda
