// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "eda/field.hpp"

namespace eda {

struct ScheduleValues {
  double s = 1.0;
  double s_prime = 0.0;
  double sigma = 0.0;
  double sigma_prime = 0.0;
};

enum class ScheduleKind {
  kVp,      // s = 1, sigma = sqrt(1 - abar)
  kDdpm,    // s = sqrt(abar), sigma = sqrt(1 - abar) / sqrt(abar)
  kCustom,
};

const char* to_string(ScheduleKind kind);
ScheduleKind parse_schedule_kind(const std::string& name);

/// Signal scale s(t) and noise level sigma(t) on [0, T] with analytic
/// derivatives. The linear-beta kinds use the closed-form integral
/// abar(t) = exp(-(beta_min t + (beta_max - beta_min) t^2 / (2T))).
class Schedule {
 public:
  using CustomFn = std::function<ScheduleValues(double)>;

  static Schedule vp(double beta_min, double beta_max, double horizon);
  static Schedule ddpm(double beta_min, double beta_max, double horizon);
  /// `fn` must return sigma(0) = 0 and s > 0 on [0, horizon].
  static Schedule custom(double horizon, CustomFn fn);
  static Schedule make(ScheduleKind kind, double beta_min, double beta_max, double horizon);

  ScheduleKind kind() const noexcept { return kind_; }
  double beta_min() const noexcept { return beta_min_; }
  double beta_max() const noexcept { return beta_max_; }
  double horizon() const noexcept { return horizon_; }

  double beta(double t) const;
  /// Continuous abar(t); only meaningful for the linear-beta kinds.
  double alpha_bar(double t) const;

  ScheduleValues evaluate(double t) const;
  /// d(sigma^2)/dt, finite at t = 0 for the linear-beta kinds.
  double sigma_squared_rate(double t) const;

  /// Discrete DDPM table: entry i-1 holds abar_i = prod_{j<=i}(1 - beta_j),
  /// beta_j linear from beta_min (j = 1) to beta_max (j = round(T)).
  const std::vector<double>& discrete_alpha_bar() const noexcept { return discrete_; }

 private:
  Schedule() = default;
  void check_time(double t) const;
  double integrated_beta(double t) const;

  ScheduleKind kind_ = ScheduleKind::kVp;
  double beta_min_ = 0.0;
  double beta_max_ = 0.0;
  double horizon_ = 1.0;
  std::shared_ptr<const CustomFn> custom_;
  std::vector<double> discrete_;
};

/// Drift and diffusion coefficients of the multi-Wiener forward SDE
///   dx = [f x + phi] dt + g sum_m h_m dw_m.
struct SdeCoefficients {
  double f = 0.0;
  double g = 0.0;
  Field phi;
};

/// t must lie in (0, T]; the endpoint t = 0 is rejected because sigma'(0)
/// diverges for the linear-beta kinds.
SdeCoefficients sde_coefficients(const Schedule& schedule, double eta, const Field& basis_sum,
                                 double t);

}  // namespace eda
