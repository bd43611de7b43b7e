// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "eda/denoiser.hpp"
#include "eda/process.hpp"

namespace eda {

enum class GridScheme { kUniform, kQuadratic };

GridScheme parse_grid_scheme(const std::string& name);
const char* to_string(GridScheme scheme);

/// Strictly decreasing knots from T down to T/1000.
struct TimeGrid {
  std::vector<double> knots;
  std::size_t steps() const noexcept { return knots.empty() ? 0 : knots.size() - 1; }
};

/// uniform: equispaced; quadratic: t_i = eps + (T - eps)(1 - i/n)^2, denser
/// near the terminal knot.
TimeGrid make_time_grid(double horizon, int steps, GridScheme scheme = GridScheme::kUniform);

using TrajectoryObserver = std::function<void(double t, const Field& x)>;

/// Euler integration of the deterministic update rule over `grid`, starting
/// from x_init at grid.knots.front(). With `final_denoise`, the result is
/// D(x; t_last) instead of x(t_last).
Field sample_euler(const DiffusionProcess& process, const Denoiser& denoiser, const Field& x_init,
                   const TimeGrid& grid, const TrajectoryObserver& observer = {},
                   bool final_denoise = false);

/// Classical fourth-order Runge–Kutta over the same vector field; used as a
/// high-accuracy oracle.
Field sample_reference(const DiffusionProcess& process, const Denoiser& denoiser,
                       const Field& x_init, int steps,
                       GridScheme scheme = GridScheme::kQuadratic);

}  // namespace eda
