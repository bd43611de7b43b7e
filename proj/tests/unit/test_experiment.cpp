// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "eda/error.hpp"
#include "eda/experiment.hpp"

namespace eda {
namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::kCheckFailed;
}

TEST(Config, ParsesShippedConfig) {
  const ExperimentConfig cfg = load_config(EDA_CONFIG_DIR "/smooth_field.json");
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.basis.name, "legendre-trig");
  EXPECT_EQ(cfg.basis.n1, 3);
  EXPECT_EQ(cfg.basis.n2, 5);
  EXPECT_EQ(cfg.task.size, 16u);
  EXPECT_EQ(cfg.sampler.steps, 5);
  EXPECT_EQ(cfg.train.seed, 7u);
  EXPECT_EQ(cfg.train.objective, LossObjective::kMseX0);
  EXPECT_EQ(cfg.train.parameterization, Parameterization::kPredictX0);
}

TEST(Config, AllShippedConfigsLoad) {
  for (const char* name : {"smooth_field", "streaks", "shadow_box", "case3"}) {
    EXPECT_NO_THROW(load_config(std::string(EDA_CONFIG_DIR "/") + name + ".json")) << name;
  }
}

TEST(Config, OverridesApply) {
  const ExperimentConfig cfg =
      parse_config(R"({"seed": 1})", {"train.steps=17", "sampler.grid=quadratic", "eta=2.5", "seed=4"});
  EXPECT_EQ(cfg.train.steps, 17);
  EXPECT_EQ(cfg.sampler.grid, GridScheme::kQuadratic);
  EXPECT_EQ(cfg.eta, 2.5);
  EXPECT_EQ(cfg.seed, 4u);
  EXPECT_EQ(cfg.train.seed, 4u);
}

TEST(Config, Errors) {
  EXPECT_EQ(code_of([] { parse_config(R"({"eta": 0})"); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([] { parse_config(R"({"seed": 1, "bogus": 2})"); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([] { parse_config(R"({"seed": 1, "train": {"stpes": 2}})"); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([] { parse_config("{"); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([] { parse_config(R"({"seed": 1})", {"nodot"}); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([] { load_config("/nonexistent/cfg.json"); }), ErrorCode::kIo);
  try {
    load_config("/nonexistent/cfg.json");
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/cfg.json"), std::string::npos);
  }
}

TEST(Config, CommentsAllowed) {
  EXPECT_EQ(parse_config("// note\n{\"seed\": 9 /* inline */}").seed, 9u);
}

TEST(Experiment, DeterministicConstruction) {
  const ExperimentConfig cfg = load_config(EDA_CONFIG_DIR "/smooth_field.json");
  const Experiment a(cfg), b(cfg);
  EXPECT_EQ(a.task.clean, b.task.clean);
  EXPECT_EQ(a.task.degraded, b.task.degraded);
  ASSERT_EQ(a.dataset.size(), 8u);
  EXPECT_EQ(a.dataset.points, b.dataset.points);
  EXPECT_EQ(a.dataset.points[0], to_domain(a.task.clean, DomainTransform::kLog));
  EXPECT_EQ(a.network_widths().front(), 257u);
  EXPECT_EQ(a.network_widths().back(), 256u);
}

TEST(Experiment, HeldOutInstanceWhenRequested) {
  const ExperimentConfig cfg = load_config(EDA_CONFIG_DIR "/smooth_field.json", {"task.in_dataset=false"});
  const Experiment e(cfg);
  const Field target = to_domain(e.task.clean, DomainTransform::kLog);
  for (const Field& p : e.dataset.points) EXPECT_NE(p, target);
}

TEST(Experiment, ResidualTaskBuildsMasks) {
  const Experiment e(load_config(EDA_CONFIG_DIR "/shadow_box.json"));
  EXPECT_EQ(e.masks.size(), e.dataset.size());
  EXPECT_EQ(e.dataset.degraded.size(), e.dataset.size());
  EXPECT_FALSE(e.process->basis().is_fixed());
}

}  // namespace
}  // namespace eda
