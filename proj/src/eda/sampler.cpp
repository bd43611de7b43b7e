// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#include "eda/sampler.hpp"

#include <cmath>

#include "eda/error.hpp"

namespace eda {

GridScheme parse_grid_scheme(const std::string& name) {
  if (name == "uniform") return GridScheme::kUniform;
  if (name == "quadratic") return GridScheme::kQuadratic;
  fail(ErrorCode::kParse, "unknown grid scheme '" + name + "'");
}

const char* to_string(GridScheme scheme) {
  return scheme == GridScheme::kUniform ? "uniform" : "quadratic";
}

TimeGrid make_time_grid(double horizon, int steps, GridScheme scheme) {
  require(steps >= 1, ErrorCode::kInvalidArgument, "time grid needs steps >= 1");
  require(horizon > 0.0, ErrorCode::kInvalidArgument, "time grid needs a positive horizon");
  const double eps = horizon / 1000.0;
  TimeGrid grid;
  grid.knots.resize(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) {
    const double u = static_cast<double>(i) / steps;
    const double w = scheme == GridScheme::kUniform ? 1.0 - u : (1.0 - u) * (1.0 - u);
    grid.knots[static_cast<std::size_t>(i)] = eps + (horizon - eps) * w;
  }
  grid.knots.front() = horizon;
  grid.knots.back() = eps;
  return grid;
}

namespace {

void check_state(const Field& x, double t) {
  if (!x.all_finite()) {
    fail(ErrorCode::kNumerical, "sampler state became non-finite at t = " + std::to_string(t));
  }
}

}  // namespace

Field sample_euler(const DiffusionProcess& process, const Denoiser& denoiser, const Field& x_init,
                   const TimeGrid& grid, const TrajectoryObserver& observer, bool final_denoise) {
  require(grid.knots.size() >= 2, ErrorCode::kInvalidArgument, "time grid has no steps");
  require(x_init.shape() == process.shape(), ErrorCode::kShapeMismatch, "x_init shape mismatch");
  Field x = x_init;
  if (observer) observer(grid.knots.front(), x);
  for (std::size_t i = 0; i + 1 < grid.knots.size(); ++i) {
    const double t = grid.knots[i], t_next = grid.knots[i + 1];
    const Field d = process.pfode_rhs(denoiser, t, x);
    axpy(t_next - t, d, x);
    check_state(x, t_next);
    if (observer) observer(t_next, x);
  }
  if (final_denoise) return denoiser.evaluate(x, grid.knots.back());
  return x;
}

Field sample_reference(const DiffusionProcess& process, const Denoiser& denoiser,
                       const Field& x_init, int steps, GridScheme scheme) {
  require(steps >= 4, ErrorCode::kInvalidArgument, "reference integrator needs steps >= 4");
  require(x_init.shape() == process.shape(), ErrorCode::kShapeMismatch, "x_init shape mismatch");
  const TimeGrid grid = make_time_grid(process.horizon(), steps, scheme);
  Field x = x_init;
  for (std::size_t i = 0; i + 1 < grid.knots.size(); ++i) {
    const double t = grid.knots[i];
    const double h = grid.knots[i + 1] - t;
    const Field k1 = process.pfode_rhs(denoiser, t, x);
    const Field k2 = process.pfode_rhs(denoiser, t + 0.5 * h, x + k1 * (0.5 * h));
    const Field k3 = process.pfode_rhs(denoiser, t + 0.5 * h, x + k2 * (0.5 * h));
    const Field k4 = process.pfode_rhs(denoiser, t + h, x + k3 * h);
    axpy(h / 6.0, k1, x);
    axpy(h / 3.0, k2, x);
    axpy(h / 3.0, k3, x);
    axpy(h / 6.0, k4, x);
    check_state(x, grid.knots[i + 1]);
  }
  return x;
}

}  // namespace eda
