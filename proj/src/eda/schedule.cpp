// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#include "eda/schedule.hpp"

#include <cmath>
#include <limits>

#include "eda/error.hpp"

namespace eda {

const char* to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::kVp: return "vp";
    case ScheduleKind::kDdpm: return "ddpm";
    case ScheduleKind::kCustom: return "custom";
  }
  return "?";
}

ScheduleKind parse_schedule_kind(const std::string& name) {
  if (name == "vp" || name == "vp-continuous") return ScheduleKind::kVp;
  if (name == "ddpm") return ScheduleKind::kDdpm;
  fail(ErrorCode::kParse, "unknown schedule kind '" + name + "' (expected vp or ddpm)");
}

namespace {

std::vector<double> discrete_table(double beta_min, double beta_max, double horizon) {
  const long steps = std::lround(horizon);
  std::vector<double> table;
  if (steps < 1) return table;
  table.reserve(static_cast<std::size_t>(steps));
  double prod = 1.0;
  for (long j = 1; j <= steps; ++j) {
    const double frac = steps > 1 ? static_cast<double>(j - 1) / static_cast<double>(steps - 1) : 0.0;
    prod *= 1.0 - (beta_min + (beta_max - beta_min) * frac);
    table.push_back(prod);
  }
  return table;
}

}  // namespace

Schedule Schedule::make(ScheduleKind kind, double beta_min, double beta_max, double horizon) {
  require(beta_min > 0.0 && beta_max >= beta_min, ErrorCode::kInvalidArgument,
          "schedule needs 0 < beta_min <= beta_max");
  require(horizon > 0.0 && std::isfinite(horizon), ErrorCode::kInvalidArgument,
          "schedule horizon must be positive");
  require(kind != ScheduleKind::kCustom, ErrorCode::kInvalidArgument,
          "custom schedules are built with Schedule::custom");
  Schedule s;
  s.kind_ = kind;
  s.beta_min_ = beta_min;
  s.beta_max_ = beta_max;
  s.horizon_ = horizon;
  s.discrete_ = discrete_table(beta_min, beta_max, horizon);
  return s;
}

Schedule Schedule::vp(double beta_min, double beta_max, double horizon) {
  return make(ScheduleKind::kVp, beta_min, beta_max, horizon);
}

Schedule Schedule::ddpm(double beta_min, double beta_max, double horizon) {
  return make(ScheduleKind::kDdpm, beta_min, beta_max, horizon);
}

Schedule Schedule::custom(double horizon, CustomFn fn) {
  require(horizon > 0.0, ErrorCode::kInvalidArgument, "schedule horizon must be positive");
  require(static_cast<bool>(fn), ErrorCode::kInvalidArgument, "custom schedule needs a function");
  Schedule s;
  s.kind_ = ScheduleKind::kCustom;
  s.horizon_ = horizon;
  s.custom_ = std::make_shared<const CustomFn>(std::move(fn));
  return s;
}

void Schedule::check_time(double t) const {
  const double slack = 1e-12 * horizon_;
  if (!(t >= 0.0 && t <= horizon_ + slack)) {
    fail(ErrorCode::kDomain,
         "time " + std::to_string(t) + " outside [0, " + std::to_string(horizon_) + "]");
  }
}

double Schedule::beta(double t) const {
  return beta_min_ + (beta_max_ - beta_min_) * t / horizon_;
}

double Schedule::integrated_beta(double t) const {
  return beta_min_ * t + (beta_max_ - beta_min_) * t * t / (2.0 * horizon_);
}

double Schedule::alpha_bar(double t) const {
  check_time(t);
  require(kind_ != ScheduleKind::kCustom, ErrorCode::kInvalidArgument,
          "alpha_bar is undefined for custom schedules");
  return std::exp(-integrated_beta(t));
}

ScheduleValues Schedule::evaluate(double t) const {
  check_time(t);
  ScheduleValues v;
  const double inf = std::numeric_limits<double>::infinity();
  switch (kind_) {
    case ScheduleKind::kVp: {
      const double a = integrated_beta(t);
      const double sigma_sq = -std::expm1(-a);
      v.s = 1.0;
      v.s_prime = 0.0;
      v.sigma = std::sqrt(sigma_sq);
      v.sigma_prime = v.sigma > 0.0 ? beta(t) * std::exp(-a) / (2.0 * v.sigma) : inf;
      break;
    }
    case ScheduleKind::kDdpm: {
      const double a = integrated_beta(t);
      const double sigma_sq = std::expm1(a);
      v.s = std::exp(-0.5 * a);
      v.s_prime = -0.5 * beta(t) * v.s;
      v.sigma = std::sqrt(sigma_sq);
      v.sigma_prime = v.sigma > 0.0 ? beta(t) * std::exp(a) / (2.0 * v.sigma) : inf;
      break;
    }
    case ScheduleKind::kCustom:
      v = (*custom_)(t);
      break;
  }
  return v;
}

double Schedule::sigma_squared_rate(double t) const {
  check_time(t);
  switch (kind_) {
    case ScheduleKind::kVp: return beta(t) * std::exp(-integrated_beta(t));
    case ScheduleKind::kDdpm: return beta(t) * std::exp(integrated_beta(t));
    case ScheduleKind::kCustom: {
      const ScheduleValues v = (*custom_)(t);
      return 2.0 * v.sigma * v.sigma_prime;
    }
  }
  return 0.0;
}

SdeCoefficients sde_coefficients(const Schedule& schedule, double eta, const Field& basis_sum,
                                 double t) {
  require(eta >= 0.0, ErrorCode::kInvalidArgument, "eta must be non-negative");
  if (!(t > 0.0)) {
    fail(ErrorCode::kDomain, "SDE coefficients are undefined at the endpoint t = 0");
  }
  const ScheduleValues v = schedule.evaluate(t);
  SdeCoefficients c;
  c.f = v.s_prime / v.s;
  c.g = v.s / (eta + 1.0) * std::sqrt(schedule.sigma_squared_rate(t));
  c.phi = basis_sum * (eta * v.s * v.sigma_prime / (eta + 1.0));
  return c;
}

}  // namespace eda
