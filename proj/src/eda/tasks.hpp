// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eda/basis.hpp"
#include "eda/denoiser.hpp"
#include "eda/process.hpp"
#include "eda/sampler.hpp"

namespace eda {

enum class DomainTransform { kIdentity, kLog };

const char* to_string(DomainTransform t);

Field to_domain(const Field& image, DomainTransform transform);
Field from_domain(const Field& values, DomainTransform transform);

/// A synthetic (clean, degraded) restoration pair.
struct TaskInstance {
  std::string name;
  Field clean;
  Field degraded;
  std::optional<Field> mask;
  DomainTransform transform = DomainTransform::kIdentity;
  /// Multiplicative bias of smooth-field tasks (empty otherwise).
  Field bias;

  void validate() const;
};

/// Procedural phantom: background plus 2-4 disks/rectangles, gray levels in
/// [0.2, 1].
Field make_phantom(const Shape& size, Rng& rng);

inline constexpr double kBiasFloor = 0.8;
inline constexpr double kBiasCeiling = 1.25;

/// degraded = clean x bias, with bias a normalized positive combination of
/// the basis functions stretched about 1 to peak deviation `amplitude` and
/// clamped to [0.8, 1.25]. Log transform.
TaskInstance gen_smooth_field_task(const Shape& size, const BasisSet& basis, Rng& rng,
                                   double amplitude = 0.2);

enum class ResidualPattern { kStreaks, kShadowBox };

ResidualPattern parse_residual_pattern(const std::string& name);

/// streaks: bright metal disk (the mask) plus oriented lines through it;
/// shadow-box: intensity scaled down inside a rectangle (the mask).
TaskInstance gen_residual_task(const Shape& size, ResidualPattern pattern, Rng& rng);
/// Degrades a given clean image with a freshly drawn artifact.
TaskInstance apply_residual_pattern(Field clean, ResidualPattern pattern, Rng& rng);

struct RegionMetrics {
  std::size_t pixels = 0;
  double mse = 0.0;
  double rmse = 0.0;
  double psnr = 0.0;
};

RegionMetrics region_metrics(const Field& a, const Field& b, const Field& mask, bool inside,
                             double peak);

struct RestorationReport {
  double psnr_in = 0.0;
  double psnr_out = 0.0;
  double rmse_in = 0.0;
  double rmse_out = 0.0;
  std::optional<RegionMetrics> mask_in, mask_out, rest_in, rest_out;
  int steps = 0;
  Field x_init;
  Field restored;
};

struct RestorationOptions {
  GridScheme scheme = GridScheme::kUniform;
  bool final_denoise = false;
  double peak = 1.0;
  TrajectoryObserver observer;
};

/// Samples from the transformed degraded image (no added noise) and reports
/// metrics in the image domain. steps = 0 returns the degraded image.
RestorationReport run_restoration(const TaskInstance& task, const DiffusionProcess& process,
                                  const Denoiser& denoiser, int steps,
                                  const RestorationOptions& options = {});

using ScalarSampler = std::function<double(Rng&)>;

/// h = Poisson(mean) - mean.
ScalarSampler centered_poisson(double mean);

/// Total variation distance between histograms of `a` and `b` over `bins`
/// equal bins on [lo, hi]; out-of-range values land in the edge bins.
double total_variation(std::span<const double> a, std::span<const double> b, double lo, double hi,
                       int bins = 64);

struct Case3Row {
  double eta = 0.0;
  double distance = 0.0;
  double noise_floor = 0.0;
};

/// For each eta, compares n draws of h against n draws of ((e + eta)/(eta + 1)) h'.
std::vector<Case3Row> case3_discrete_demo(const ScalarSampler& noise_sampler,
                                          std::span<const double> etas, int n, Rng& rng);

}  // namespace eda
