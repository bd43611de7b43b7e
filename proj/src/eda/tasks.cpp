// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#include "eda/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "eda/error.hpp"

namespace eda {

const char* to_string(DomainTransform t) {
  return t == DomainTransform::kLog ? "log" : "identity";
}

Field to_domain(const Field& image, DomainTransform transform) {
  if (transform == DomainTransform::kIdentity) return image;
  Field out = image;
  for (double& v : out.values()) {
    require(v > 0.0, ErrorCode::kDomain, "log transform needs strictly positive images");
    v = std::log(v);
  }
  return out;
}

Field from_domain(const Field& values, DomainTransform transform) {
  if (transform == DomainTransform::kIdentity) return values;
  Field out = values;
  for (double& v : out.values()) v = std::exp(v);
  return out;
}

void TaskInstance::validate() const {
  require_same_shape(clean, degraded, ("task " + name).c_str());
  if (mask) {
    require_same_shape(clean, *mask, "task mask");
    for (double m : mask->values()) {
      require(m == 0.0 || m == 1.0, ErrorCode::kInvalidArgument, "task mask must be binary");
    }
  }
  if (transform == DomainTransform::kLog) {
    for (const Field* f : {&clean, &degraded}) {
      for (double v : f->values()) {
        require(v > 0.0, ErrorCode::kDomain, "log-domain task needs strictly positive images");
      }
    }
  }
}

namespace {

double uniform_in(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

void require_2d(const Shape& size) {
  require(size.size() == 2 && size[0] > 0 && size[1] > 0, ErrorCode::kInvalidArgument,
          "task size must be a non-empty 2-D extent, got " + shape_string(size));
}

}  // namespace

Field make_phantom(const Shape& size, Rng& rng) {
  require_2d(size);
  const double rows = static_cast<double>(size[0]), cols = static_cast<double>(size[1]);
  const double background = uniform_in(rng, 0.2, 0.35);
  Field img(size, background);
  const int shapes = 2 + static_cast<int>(rng.next_u64() % 3);
  for (int k = 0; k < shapes; ++k) {
    const double level = uniform_in(rng, 0.45, 1.0);
    const double cy = uniform_in(rng, 0.2, 0.8) * rows, cx = uniform_in(rng, 0.2, 0.8) * cols;
    const bool disk = (rng.next_u64() & 1) == 0;
    const double ry = uniform_in(rng, 0.12, 0.3) * rows, rx = uniform_in(rng, 0.12, 0.3) * cols;
    for (std::size_t r = 0; r < size[0]; ++r) {
      for (std::size_t c = 0; c < size[1]; ++c) {
        const double dy = (static_cast<double>(r) + 0.5 - cy) / ry;
        const double dx = (static_cast<double>(c) + 0.5 - cx) / rx;
        const bool inside = disk ? dx * dx + dy * dy <= 1.0 : std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
        if (inside) img.at(r, c) = level;
      }
    }
  }
  return img;
}

TaskInstance gen_smooth_field_task(const Shape& size, const BasisSet& basis, Rng& rng,
                                   double amplitude) {
  require_2d(size);
  require(basis.is_fixed() && basis.shape() == size, ErrorCode::kInvalidArgument,
          "smooth-field task needs a fixed basis on the task grid");
  require(amplitude >= 0.0, ErrorCode::kInvalidArgument, "bias amplitude must be >= 0");
  const Basis& h = basis.fixed_basis();

  TaskInstance task;
  task.name = "smooth-field";
  task.transform = DomainTransform::kLog;
  task.clean = make_phantom(size, rng);

  std::vector<double> w(h.count());
  double total = 0.0;
  for (double& v : w) {
    v = rng.uniform();
    total += v;
  }
  for (double& v : w) v /= total;
  Field b = h.combine(w);
  const double mean = sum(b) / static_cast<double>(b.size());
  double dev = 0.0;
  for (double v : b.values()) dev = std::max(dev, std::abs(v - mean));
  task.bias = Field(size, 1.0);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double stretched = dev > 0.0 ? 1.0 + amplitude * (b[i] - mean) / dev : 1.0;
    task.bias[i] = std::clamp(stretched, kBiasFloor, kBiasCeiling);
  }
  task.degraded = hadamard(task.clean, task.bias);
  return task;
}

ResidualPattern parse_residual_pattern(const std::string& name) {
  if (name == "streaks") return ResidualPattern::kStreaks;
  if (name == "shadow-box") return ResidualPattern::kShadowBox;
  fail(ErrorCode::kParse, "unknown residual pattern '" + name + "'");
}

TaskInstance gen_residual_task(const Shape& size, ResidualPattern pattern, Rng& rng) {
  require_2d(size);
  Field clean = make_phantom(size, rng);
  return apply_residual_pattern(std::move(clean), pattern, rng);
}

TaskInstance apply_residual_pattern(Field clean, ResidualPattern pattern, Rng& rng) {
  const Shape size = clean.shape();
  require_2d(size);
  const double rows = static_cast<double>(size[0]), cols = static_cast<double>(size[1]);
  TaskInstance task;
  task.clean = std::move(clean);
  task.degraded = task.clean;
  Field mask(size);

  if (pattern == ResidualPattern::kStreaks) {
    task.name = "streaks";
    const double cy = uniform_in(rng, 0.3, 0.7) * rows, cx = uniform_in(rng, 0.3, 0.7) * cols;
    const double radius = std::max(1.0, 0.08 * std::min(rows, cols));
    const int lines = 2 + static_cast<int>(rng.next_u64() % 2);
    std::vector<double> angles(lines), amps(lines);
    for (int k = 0; k < lines; ++k) {
      angles[k] = uniform_in(rng, 0.0, std::numbers::pi);
      amps[k] = (k % 2 == 0 ? 1.0 : -1.0) * uniform_in(rng, 0.25, 0.45);
    }
    for (std::size_t r = 0; r < size[0]; ++r) {
      for (std::size_t c = 0; c < size[1]; ++c) {
        const double dy = static_cast<double>(r) + 0.5 - cy, dx = static_cast<double>(c) + 0.5 - cx;
        if (dx * dx + dy * dy <= radius * radius) {
          mask.at(r, c) = 1.0;
          task.degraded.at(r, c) += 1.5;
          continue;
        }
        for (int k = 0; k < lines; ++k) {
          const double dist = std::abs(-std::sin(angles[k]) * dx + std::cos(angles[k]) * dy);
          if (dist <= 0.5) task.degraded.at(r, c) += amps[k];
        }
      }
    }
  } else {
    task.name = "shadow-box";
    const double factor = uniform_in(rng, 0.4, 0.7);
    const auto r0 = static_cast<std::size_t>(uniform_in(rng, 0.1, 0.4) * rows);
    const auto c0 = static_cast<std::size_t>(uniform_in(rng, 0.1, 0.4) * cols);
    const auto r1 = std::max(r0 + 1, static_cast<std::size_t>(uniform_in(rng, 0.6, 0.9) * rows));
    const auto c1 = std::max(c0 + 1, static_cast<std::size_t>(uniform_in(rng, 0.6, 0.9) * cols));
    for (std::size_t r = r0; r < std::min(r1, size[0]); ++r) {
      for (std::size_t c = c0; c < std::min(c1, size[1]); ++c) {
        mask.at(r, c) = 1.0;
        task.degraded.at(r, c) *= factor;
      }
    }
  }
  task.mask = std::move(mask);
  return task;
}

RegionMetrics region_metrics(const Field& a, const Field& b, const Field& mask, bool inside,
                             double peak) {
  require_same_shape(a, b, "region metrics");
  require_same_shape(a, mask, "region metrics mask");
  RegionMetrics m;
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((mask[i] == 1.0) != inside) continue;
    const double d = a[i] - b[i];
    acc += d * d;
    ++m.pixels;
  }
  if (m.pixels == 0) return m;
  m.mse = acc / static_cast<double>(m.pixels);
  m.rmse = std::sqrt(m.mse);
  m.psnr = m.mse == 0.0 ? kPsnrInfinity : 10.0 * std::log10(peak * peak / m.mse);
  return m;
}

RestorationReport run_restoration(const TaskInstance& task, const DiffusionProcess& process,
                                  const Denoiser& denoiser, int steps,
                                  const RestorationOptions& options) {
  task.validate();
  require(steps >= 0, ErrorCode::kInvalidArgument, "restoration steps must be >= 0");
  require(task.clean.shape() == process.shape(), ErrorCode::kShapeMismatch,
          "task shape does not match the process");

  RestorationReport report;
  report.steps = steps;
  report.x_init = to_domain(task.degraded, task.transform);
  if (steps == 0) {
    report.restored = task.degraded;
  } else {
    const TimeGrid grid = make_time_grid(process.horizon(), steps, options.scheme);
    const Field x = sample_euler(process, denoiser, report.x_init, grid, options.observer,
                                 options.final_denoise);
    report.restored = from_domain(x, task.transform);
  }
  report.psnr_in = psnr(task.degraded, task.clean, options.peak);
  report.psnr_out = psnr(report.restored, task.clean, options.peak);
  report.rmse_in = rmse(task.degraded, task.clean);
  report.rmse_out = rmse(report.restored, task.clean);
  if (task.mask) {
    report.mask_in = region_metrics(task.degraded, task.clean, *task.mask, true, options.peak);
    report.rest_in = region_metrics(task.degraded, task.clean, *task.mask, false, options.peak);
    report.mask_out = region_metrics(report.restored, task.clean, *task.mask, true, options.peak);
    report.rest_out = region_metrics(report.restored, task.clean, *task.mask, false, options.peak);
  }
  return report;
}

ScalarSampler centered_poisson(double mean) {
  require(mean > 0.0, ErrorCode::kInvalidArgument, "poisson mean must be positive");
  return [mean](Rng& rng) { return static_cast<double>(rng.poisson(mean)) - mean; };
}

double total_variation(std::span<const double> a, std::span<const double> b, double lo, double hi,
                       int bins) {
  require(bins >= 1 && hi > lo, ErrorCode::kInvalidArgument, "invalid histogram grid");
  require(!a.empty() && !b.empty(), ErrorCode::kInvalidArgument, "empty sample");
  auto histogram = [&](std::span<const double> xs) {
    std::vector<double> h(static_cast<std::size_t>(bins), 0.0);
    for (double x : xs) {
      const double u = (x - lo) / (hi - lo) * bins;
      const long k = std::clamp(static_cast<long>(std::floor(u)), 0L, static_cast<long>(bins - 1));
      h[static_cast<std::size_t>(k)] += 1.0 / static_cast<double>(xs.size());
    }
    return h;
  };
  const auto ha = histogram(a), hb = histogram(b);
  double tv = 0.0;
  for (std::size_t k = 0; k < ha.size(); ++k) tv += std::abs(ha[k] - hb[k]);
  return 0.5 * tv;
}

std::vector<Case3Row> case3_discrete_demo(const ScalarSampler& noise_sampler,
                                          std::span<const double> etas, int n, Rng& rng) {
  require(n >= 1000, ErrorCode::kInvalidArgument, "case-3 demo needs n >= 1000");
  require(static_cast<bool>(noise_sampler), ErrorCode::kInvalidArgument, "noise sampler missing");
  auto draw = [&](int count) {
    std::vector<double> xs(static_cast<std::size_t>(count));
    for (double& x : xs) x = noise_sampler(rng);
    return xs;
  };
  const std::vector<double> reference = draw(n);
  const std::vector<double> replicate = draw(n);
  double reach = 0.0;
  for (double x : reference) reach = std::max(reach, std::abs(x));
  reach = std::max(1.0, 1.05 * reach);
  const double floor = total_variation(reference, replicate, -reach, reach);

  std::vector<Case3Row> rows;
  for (double eta : etas) {
    require(eta >= 0.0, ErrorCode::kInvalidArgument, "eta must be >= 0");
    std::vector<double> mixed(static_cast<std::size_t>(n));
    for (double& x : mixed) {
      const double h = noise_sampler(rng);
      x = (rng.normal() + eta) / (eta + 1.0) * h;
    }
    rows.push_back({eta, total_variation(reference, mixed, -reach, reach), floor});
  }
  return rows;
}

}  // namespace eda
