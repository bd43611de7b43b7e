// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "eda/eda.h"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

int exit_code_for(eda_status status) {
  switch (status) {
    case EDA_OK: return 0;
    case EDA_ERR_INVALID_ARGUMENT:
    case EDA_ERR_IO:
    case EDA_ERR_PARSE: return kExitUsage;
    default: return kExitFailure;
  }
}

int report_error(eda_status status) {
  std::cerr << "eda: " << eda_status_string(status) << ": " << eda_last_error() << "\n";
  return exit_code_for(status);
}

struct RunOptions {
  std::string config;
  std::vector<std::string> overrides;
  int steps = -1;
  std::string output_dir;
};

int run_experiment(const std::string& command, RunOptions opts) {
  if (opts.steps >= 0) opts.overrides.push_back("sampler.steps=" + std::to_string(opts.steps));
  if (!opts.output_dir.empty()) opts.overrides.push_back("output_dir=\"" + opts.output_dir + "\"");
  std::vector<const char*> raw;
  for (const std::string& o : opts.overrides) raw.push_back(o.c_str());

  eda_config* config = nullptr;
  eda_status status = eda_config_load(opts.config.c_str(), raw.data(), raw.size(), &config);
  if (status != EDA_OK) return report_error(status);
  int code = 0;
  status = eda_run_command(command.c_str(), config, &code);
  eda_config_destroy(config);
  if (status != EDA_OK) return report_error(status);
  return code;
}

int run_verify(const std::string& suite, uint64_t seed, const std::string& out) {
  eda_report* report = nullptr;
  const eda_status status = eda_verify_run(suite.c_str(), seed, &report);
  if (status != EDA_OK) return report_error(status);
  const std::string json = eda_report_json(report);
  const bool passed = eda_report_passed(report) != 0;
  eda_report_destroy(report);
  if (out.empty()) {
    std::cout << json;
  } else {
    std::ofstream file(out, std::ios::binary);
    if (!file || !(file << json)) {
      std::cerr << "eda: cannot write " << out << "\n";
      return kExitUsage;
    }
  }
  if (!passed) std::cerr << "eda: verification failed\n";
  return passed ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized diffusion toolkit: training, sampling, restoration and verification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(eda_version()));

  RunOptions opts;
  std::string command;
  for (const char* name : {"train", "sample", "restore", "simulate", "demo-case3"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("-c,--config", opts.config, "Experiment config (JSON)")->required();
    sub->add_option("--set", opts.overrides, "Override a config value, e.g. train.steps=200");
    sub->add_option("--steps", opts.steps, "Sampler step count");
    sub->add_option("--output-dir", opts.output_dir, "Output directory");
    sub->callback([&command, name] { command = name; });
  }

  std::string suite = "all", out, verify_config;
  uint64_t seed = 7;
  bool seed_given = false;
  CLI::App* verify = app.add_subcommand("verify", "Run verification suites");
  verify->add_option("--suite", suite, "coefficients | moments | score | cancellation | marginal | "
                                       "optimality | sampler | edm-reduction | all");
  verify->add_option("--seed", seed, "Seed")->each([&](const std::string&) { seed_given = true; });
  verify->add_option("--out", out, "Write the JSON report here instead of stdout");
  verify->add_option("-c,--config", verify_config, "Config supplying the default seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (verify->parsed()) {
    if (!verify_config.empty() && !seed_given) {
      eda_config* config = nullptr;
      const eda_status status = eda_config_load(verify_config.c_str(), nullptr, 0, &config);
      if (status != EDA_OK) return report_error(status);
      seed = eda_config_seed(config);
      eda_config_destroy(config);
    }
    return run_verify(suite, seed, out);
  }
  return run_experiment(command, opts);
}
