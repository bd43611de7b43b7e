// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#include "eda/process.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "eda/denoiser.hpp"
#include "eda/error.hpp"

namespace eda {

const Shape& DiracDataset::shape() const {
  require(!points.empty(), ErrorCode::kInvalidArgument, "dataset is empty");
  return points.front().shape();
}

Conditioning DiracDataset::conditioning(std::size_t i) const {
  if (degraded.empty()) return {};
  return {&points.at(i), &degraded.at(i)};
}

void DiracDataset::validate(const Shape& expected) const {
  require(!points.empty(), ErrorCode::kInvalidArgument, "dataset is empty");
  require(degraded.empty() || degraded.size() == points.size(), ErrorCode::kInvalidArgument,
          "dataset degraded list must be empty or match the point count");
  for (const Field& p : points) {
    require(p.shape() == expected, ErrorCode::kShapeMismatch,
            "dataset point shape " + shape_string(p.shape()) + " differs from " +
                shape_string(expected));
  }
  for (const Field& p : degraded) {
    require(p.shape() == expected, ErrorCode::kShapeMismatch, "degraded shape mismatch");
  }
}

struct DiffusionProcess::SolverCache {
  std::once_flag once;
  std::shared_ptr<const SpdSolver> solver;
  std::exception_ptr error;
};

DiffusionProcess::DiffusionProcess(Schedule schedule, BasisSet basis, double eta)
    : schedule_(std::move(schedule)), basis_(std::move(basis)), eta_(eta),
      cache_(std::make_shared<SolverCache>()) {
  require(eta_ >= 0.0 && std::isfinite(eta_), ErrorCode::kInvalidArgument,
          "eta must be finite and >= 0");
}

void DiffusionProcess::require_positive_time(double t, const char* what) const {
  if (!(t > 0.0)) {
    fail(ErrorCode::kDomain, std::string(what) + " is undefined at t = 0 (sigma = 0)");
  }
}

Field DiffusionProcess::sample_noise(const Basis& basis, Rng& rng) const {
  require(basis.shape() == shape(), ErrorCode::kShapeMismatch, "noise basis shape mismatch");
  std::vector<double> weights(basis.count());
  for (double& w : weights) w = (eta_ + rng.normal()) / (eta_ + 1.0);
  return basis.combine(weights);
}

Field DiffusionProcess::sample_noise(const Conditioning& cond, Rng& rng) const {
  return sample_noise(*basis_.bind(cond), rng);
}

Field DiffusionProcess::forward_from_noise(const Field& x0, double t, const Field& noise) const {
  require_same_shape(x0, noise, "forward process");
  const ScheduleValues v = schedule_.evaluate(t);
  Field x = x0 * v.s;
  axpy(v.s * v.sigma, noise, x);
  return x;
}

Field DiffusionProcess::forward_sample(const Field& x0, double t, const Conditioning& cond,
                                       Rng& rng) const {
  require(x0.shape() == shape(), ErrorCode::kShapeMismatch, "x0 shape mismatch");
  schedule_.evaluate(t);
  return forward_from_noise(x0, t, sample_noise(cond, rng));
}

Field DiffusionProcess::mean_shift(const Basis& basis, double t) const {
  const ScheduleValues v = schedule_.evaluate(t);
  return basis.sum() * (eta_ * v.s * v.sigma / (eta_ + 1.0));
}

double DiffusionProcess::covariance_scale(double t) const {
  const ScheduleValues v = schedule_.evaluate(t);
  const double r = v.s * v.sigma / (eta_ + 1.0);
  return r * r;
}

ConditionalMoments DiffusionProcess::conditional_moments(const Field& x0, double t,
                                                         const Conditioning& cond) const {
  require(x0.shape() == shape(), ErrorCode::kShapeMismatch, "x0 shape mismatch");
  auto basis = basis_.bind(cond);
  const ScheduleValues v = schedule_.evaluate(t);
  Field mean = x0 * v.s;
  mean += mean_shift(*basis, t);
  return ConditionalMoments{std::move(mean), covariance_scale(t), CovarianceOp(basis)};
}

Field DiffusionProcess::simulate_sde(const Field& x0, int n_steps, const Conditioning& cond,
                                     Rng& rng, const PathObserver& observer) const {
  require(n_steps >= 1, ErrorCode::kInvalidArgument, "simulate_sde needs n_steps >= 1");
  auto basis = basis_.bind(cond);
  const double t_start = epsilon();
  const double dt = (horizon() - t_start) / n_steps;
  const double sqrt_dt = std::sqrt(dt);

  Field x = forward_from_noise(x0, t_start, sample_noise(*basis, rng));
  if (observer) observer(t_start, x);
  std::vector<double> increments(basis->count());
  for (int k = 0; k < n_steps; ++k) {
    const double t = t_start + k * dt;
    const SdeCoefficients c = sde_coefficients(schedule_, eta_, basis->sum(), t);
    for (double& w : increments) w = c.g * sqrt_dt * rng.normal();
    Field next = x;
    axpy(c.f * dt, x, next);
    axpy(dt, c.phi, next);
    next += basis->combine(increments);
    x = std::move(next);
    if (observer) observer(k + 1 == n_steps ? horizon() : t_start + (k + 1) * dt, x);
  }
  return x;
}

std::shared_ptr<const SpdSolver> DiffusionProcess::solver_for(const Basis& basis) const {
  return std::make_shared<const SpdSolver>(basis.dense_covariance());
}

const SpdSolver& DiffusionProcess::fixed_solver() const {
  const Basis& basis = basis_.fixed_basis();
  std::call_once(cache_->once, [&] {
    try {
      cache_->solver = solver_for(basis);
    } catch (...) {
      cache_->error = std::current_exception();
    }
  });
  if (cache_->error) std::rethrow_exception(cache_->error);
  return *cache_->solver;
}

Field DiffusionProcess::conditional_score(const Field& x0, double t, const Field& x,
                                          const Conditioning& cond) const {
  require_positive_time(t, "conditional score");
  require_same_shape(x, x0, "conditional score");
  const ConditionalMoments moments = conditional_moments(x0, t, cond);
  std::shared_ptr<const SpdSolver> local;
  const SpdSolver* solver = nullptr;
  if (basis_.is_fixed()) {
    solver = &fixed_solver();
  } else {
    local = solver_for(moments.covariance.basis());
    solver = local.get();
  }
  Field score = solver->solve(moments.mean - x);
  score *= 1.0 / moments.cov_scale;
  return score;
}

std::vector<double> DiffusionProcess::mixture_weights(const DiracDataset& ds, double t,
                                                      const Field& x) const {
  require_positive_time(t, "mixture weights");
  ds.validate(shape());
  require(x.shape() == shape(), ErrorCode::kShapeMismatch, "x shape mismatch");
  const SpdSolver& solver = fixed_solver();
  const ScheduleValues v = schedule_.evaluate(t);
  const Field shift = mean_shift(basis_.fixed_basis(), t);
  const double inv_scale = 1.0 / covariance_scale(t);

  std::vector<double> logw(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    Field r = x - ds.points[i] * v.s;
    r -= shift;
    logw[i] = -0.5 * inv_scale * solver.quadratic_form(r);
  }
  const double top = *std::max_element(logw.begin(), logw.end());
  double total = 0.0;
  for (double& w : logw) {
    w = std::exp(w - top);
    total += w;
  }
  for (double& w : logw) w /= total;
  return logw;
}

Field DiffusionProcess::marginal_score(const DiracDataset& ds, double t, const Field& x) const {
  const std::vector<double> w = mixture_weights(ds, t, x);
  const ScheduleValues v = schedule_.evaluate(t);
  Field target(shape());
  for (std::size_t i = 0; i < ds.size(); ++i) axpy(v.s * w[i], ds.points[i], target);
  target += mean_shift(basis_.fixed_basis(), t);
  target -= x;
  Field score = fixed_solver().solve(target);
  score *= 1.0 / covariance_scale(t);
  return score;
}

Field DiffusionProcess::pfode_rhs_conditional(const Field& x0, double t, const Field& x,
                                              const Conditioning& cond) const {
  auto basis = basis_.bind(cond);
  const SdeCoefficients c = sde_coefficients(schedule_, eta_, basis->sum(), t);
  const Field score = conditional_score(x0, t, x, cond);
  Field rhs = x * c.f;
  rhs += c.phi;
  axpy(-0.5 * c.g * c.g, basis->apply_covariance(score), rhs);
  return rhs;
}

Field DiffusionProcess::pfode_rhs_marginal(const DiracDataset& ds, double t, const Field& x) const {
  const Basis& basis = basis_.fixed_basis();
  const SdeCoefficients c = sde_coefficients(schedule_, eta_, basis.sum(), t);
  const Field score = marginal_score(ds, t, x);
  Field rhs = x * c.f;
  rhs += c.phi;
  axpy(-0.5 * c.g * c.g, basis.apply_covariance(score), rhs);
  return rhs;
}

Field DiffusionProcess::pfode_rhs(const Denoiser& denoiser, double t, const Field& x) const {
  require_positive_time(t, "deterministic update rule");
  const ScheduleValues v = schedule_.evaluate(t);
  const Field d = denoiser.evaluate(x, t);
  require_same_shape(x, d, "denoiser output");
  Field rhs = x * (v.s_prime / v.s + v.sigma_prime / v.sigma);
  axpy(-v.sigma_prime * v.s / v.sigma, d, rhs);
  return rhs;
}

}  // namespace eda
