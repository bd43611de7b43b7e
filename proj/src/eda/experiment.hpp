// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "eda/denoiser.hpp"
#include "eda/process.hpp"
#include "eda/sampler.hpp"
#include "eda/schedule.hpp"
#include "eda/tasks.hpp"
#include "eda/training.hpp"

namespace eda {

struct ScheduleSpec {
  ScheduleKind kind = ScheduleKind::kVp;
  double beta_min = 1e-4;
  double beta_max = 0.02;
  double horizon = 100.0;
};

struct BasisSpec {
  std::string name = "legendre-trig";
  int n1 = 3;
  int n2 = 5;
};

struct TaskSpec {
  std::string kind = "smooth-field";
  std::size_t size = 16;
  int dataset_size = 64;
  double amplitude = 0.2;
  /// Whether the evaluation instance's clean image is one of the dataset
  /// points (its degradation is never seen in training).
  bool in_dataset = true;
};

struct NetworkSpec {
  std::vector<std::size_t> hidden{64, 64};
};

struct SamplerSpec {
  int steps = 5;
  GridScheme grid = GridScheme::kUniform;
  bool final_denoise = false;
  bool trajectory = false;
};

struct SimulateSpec {
  int paths = 256;
  int steps = 512;
  int record_every = 64;
};

struct Case3Spec {
  std::vector<double> etas{0.0, 1.0, 10.0, 100.0, 1e9};
  int n = 20000;
  double poisson_mean = 3.0;
};

struct VerifySpec {
  std::string suite = "all";
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  std::string checkpoint;  // empty: <output_dir>/checkpoint.bin
  ScheduleSpec schedule;
  BasisSpec basis;
  double eta = 0.0;
  TaskSpec task;
  NetworkSpec network;
  TrainConfig train;
  SamplerSpec sampler;
  SimulateSpec simulate;
  Case3Spec demo_case3;
  VerifySpec verify;

  std::string checkpoint_path() const;
};

/// Parses a JSON config document after applying dotted-path overrides of the
/// form "a.b.c=value" (value read as JSON, else as a string). `seed` is
/// mandatory.
ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});
/// kIo when the file is missing, kParse for malformed content.
ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});
/// Defaults plus overrides, for commands that can run without a file.
ExperimentConfig default_config(const std::vector<std::string>& overrides = {});

/// Everything a command needs, built deterministically from the config.
struct Experiment {
  ExperimentConfig config;
  Shape shape;
  std::unique_ptr<DiffusionProcess> process;
  DiracDataset dataset;
  std::vector<Field> masks;  // one per dataset point for weighted training
  TaskInstance task;         // held-out evaluation instance

  explicit Experiment(ExperimentConfig cfg);
  Experiment(const Experiment&) = delete;
  Experiment& operator=(const Experiment&) = delete;

  std::vector<std::size_t> network_widths() const;
  /// Trains a fresh network on the dataset.
  TrainResult train_network(std::ostream* log = nullptr) const;
  /// Loads the configured checkpoint, training and saving one if absent.
  std::shared_ptr<const TinyNetwork> network(std::ostream* log = nullptr) const;
  PreconditionedDenoiser denoiser(std::shared_ptr<const TinyNetwork> net) const;
};

int cmd_train(const ExperimentConfig& cfg, std::ostream& log);
int cmd_sample(const ExperimentConfig& cfg, std::ostream& log);
int cmd_restore(const ExperimentConfig& cfg, std::ostream& log);
int cmd_simulate(const ExperimentConfig& cfg, std::ostream& log);
int cmd_demo_case3(const ExperimentConfig& cfg, std::ostream& log);
/// Writes the report to `out_path` (or `report_out` when empty); exit 1 if
/// any check fails.
int cmd_verify(const std::string& suite, std::uint64_t seed, const std::string& out_path,
               std::ostream& report_out);

}  // namespace eda
