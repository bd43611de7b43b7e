// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

// Exercises the shared library through its C header only.

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "eda/eda.h"

namespace {

TEST(CApi, VersionAndStatusStrings) {
  EXPECT_STREQ(eda_version(), "0.1.0");
  EXPECT_STREQ(eda_status_string(EDA_OK), "ok");
  EXPECT_NE(std::string(eda_status_string(EDA_ERR_IO)), "ok");
}

TEST(CApi, FieldLifecycleAndMetrics) {
  const size_t shape[2] = {2, 2};
  const double a_vals[4] = {0.0, 0.5, 1.0, 0.25};
  const double b_vals[4] = {0.1, 0.5, 1.0, 0.25};
  eda_field* a = nullptr;
  eda_field* b = nullptr;
  ASSERT_EQ(eda_field_create(shape, 2, a_vals, &a), EDA_OK);
  ASSERT_EQ(eda_field_create(shape, 2, b_vals, &b), EDA_OK);
  EXPECT_EQ(eda_field_rank(a), 2u);
  EXPECT_EQ(eda_field_size(a), 4u);
  size_t extents[2] = {0, 0};
  EXPECT_EQ(eda_field_shape(a, extents, 2), EDA_OK);
  EXPECT_EQ(extents[0], 2u);
  EXPECT_EQ(eda_field_shape(a, extents, 1), EDA_ERR_INVALID_ARGUMENT);
  double r = 0.0, p = 0.0;
  ASSERT_EQ(eda_rmse(a, b, &r), EDA_OK);
  EXPECT_DOUBLE_EQ(r, 0.05);
  ASSERT_EQ(eda_psnr(a, b, 1.0, &p), EDA_OK);
  EXPECT_NEAR(p, 10.0 * std::log10(1.0 / 0.0025), 1e-12);

  const std::string path = ::testing::TempDir() + "capi_field.bin";
  ASSERT_EQ(eda_field_save(a, path.c_str()), EDA_OK);
  eda_field* loaded = nullptr;
  ASSERT_EQ(eda_field_load(path.c_str(), &loaded), EDA_OK);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(eda_field_data(loaded)[i], a_vals[i]);
  std::remove(path.c_str());

  const size_t other[1] = {3};
  eda_field* c = nullptr;
  ASSERT_EQ(eda_field_create(other, 1, nullptr, &c), EDA_OK);
  EXPECT_EQ(eda_rmse(a, c, &r), EDA_ERR_SHAPE_MISMATCH);
  EXPECT_NE(std::string(eda_last_error()), "");
  eda_field_destroy(a);
  eda_field_destroy(b);
  eda_field_destroy(c);
  eda_field_destroy(loaded);
  eda_field_destroy(nullptr);
}

TEST(CApi, NullArgumentsRejected) {
  eda_field* f = nullptr;
  EXPECT_EQ(eda_field_create(nullptr, 1, nullptr, &f), EDA_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(eda_field_load("/nonexistent/field.bin", &f), EDA_ERR_IO);
  eda_schedule* s = nullptr;
  EXPECT_EQ(eda_schedule_create("cosine", 1e-4, 0.02, 100.0, &s), EDA_ERR_PARSE);
}

TEST(CApi, ScheduleAndProcess) {
  eda_schedule* sched = nullptr;
  ASSERT_EQ(eda_schedule_create("vp", 1e-4, 0.02, 100.0, &sched), EDA_OK);
  double s = 0, sp = 0, sigma = 0, sigp = 0;
  ASSERT_EQ(eda_schedule_evaluate(sched, 50.0, &s, &sp, &sigma, &sigp), EDA_OK);
  EXPECT_EQ(s, 1.0);
  EXPECT_EQ(sp, 0.0);
  const double abar = std::exp(-(1e-4 * 50.0 + (0.02 - 1e-4) * 2500.0 / 200.0));
  EXPECT_NEAR(sigma, std::sqrt(1.0 - abar), 1e-14);
  EXPECT_EQ(eda_schedule_evaluate(sched, -1.0, &s, &sp, &sigma, &sigp), EDA_ERR_DOMAIN);

  const size_t shape[1] = {3};
  eda_basis* basis = nullptr;
  ASSERT_EQ(eda_basis_create_pixel(shape, 1, &basis), EDA_OK);
  EXPECT_EQ(eda_basis_count(basis), 3u);
  eda_process* proc = nullptr;
  ASSERT_EQ(eda_process_create(sched, basis, 0.0, &proc), EDA_OK);
  EXPECT_EQ(eda_process_create(sched, basis, -1.0, &proc), EDA_ERR_INVALID_ARGUMENT);

  const double x0v[3] = {0.1, -0.2, 0.3};
  eda_field* x0 = nullptr;
  ASSERT_EQ(eda_field_create(shape, 1, x0v, &x0), EDA_OK);
  eda_field* xt = nullptr;
  eda_field* xt2 = nullptr;
  ASSERT_EQ(eda_process_forward_sample(proc, x0, 40.0, nullptr, nullptr, 5, &xt), EDA_OK);
  ASSERT_EQ(eda_process_forward_sample(proc, x0, 40.0, nullptr, nullptr, 5, &xt2), EDA_OK);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(eda_field_data(xt)[i], eda_field_data(xt2)[i]);

  // Pixel basis, eta = 0: score = -(x - x0) / sigma^2.
  eda_field* score = nullptr;
  ASSERT_EQ(eda_process_conditional_score(proc, x0, 40.0, xt, &score), EDA_OK);
  ASSERT_EQ(eda_schedule_evaluate(sched, 40.0, &s, &sp, &sigma, &sigp), EDA_OK);
  for (int i = 0; i < 3; ++i) {
    const double expected = -(eda_field_data(xt)[i] - x0v[i]) / (sigma * sigma);
    EXPECT_NEAR(eda_field_data(score)[i], expected, 1e-9 * std::abs(expected) + 1e-12);
  }
  // Constant denoiser at x0: rhs = (sigma'/sigma)(x - x0).
  eda_field* rhs = nullptr;
  ASSERT_EQ(eda_process_pfode_rhs(proc, x0, 40.0, xt, &rhs), EDA_OK);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(eda_field_data(rhs)[i], sigp / sigma * (eda_field_data(xt)[i] - x0v[i]), 1e-12);
  }

  for (eda_field* f : {x0, xt, xt2, score, rhs}) eda_field_destroy(f);
  eda_process_destroy(proc);
  eda_basis_destroy(basis);
  eda_schedule_destroy(sched);
}

TEST(CApi, ResidualProcessNeedsPair) {
  eda_schedule* sched = nullptr;
  ASSERT_EQ(eda_schedule_create("ddpm", 1e-4, 0.02, 100.0, &sched), EDA_OK);
  const size_t shape[1] = {2};
  eda_basis* basis = nullptr;
  ASSERT_EQ(eda_basis_create_residual(shape, 1, &basis), EDA_OK);
  eda_process* proc = nullptr;
  ASSERT_EQ(eda_process_create(sched, basis, 10.0, &proc), EDA_OK);
  const double cv[2] = {0.5, 0.5}, dv[2] = {0.7, 0.5};
  eda_field *clean = nullptr, *degraded = nullptr, *out = nullptr;
  ASSERT_EQ(eda_field_create(shape, 1, cv, &clean), EDA_OK);
  ASSERT_EQ(eda_field_create(shape, 1, dv, &degraded), EDA_OK);
  EXPECT_NE(eda_process_forward_sample(proc, clean, 10.0, nullptr, nullptr, 1, &out), EDA_OK);
  ASSERT_EQ(eda_process_forward_sample(proc, clean, 10.0, clean, degraded, 1, &out), EDA_OK);
  // Residual is zero on the second pixel, so noise never reaches it.
  double sv = 0, sp = 0, sigma = 0, sigp = 0;
  ASSERT_EQ(eda_schedule_evaluate(sched, 10.0, &sv, &sp, &sigma, &sigp), EDA_OK);
  EXPECT_NEAR(eda_field_data(out)[1], sv * 0.5, 1e-15);
  EXPECT_NE(eda_field_data(out)[0], sv * 0.5);
  for (eda_field* f : {clean, degraded, out}) eda_field_destroy(f);
  eda_process_destroy(proc);
  eda_basis_destroy(basis);
  eda_schedule_destroy(sched);
}

TEST(CApi, LegendreTrigCount) {
  eda_basis* basis = nullptr;
  ASSERT_EQ(eda_basis_create_legendre_trig(3, 5, 16, 16, &basis), EDA_OK);
  EXPECT_EQ(eda_basis_count(basis), 162u);
  eda_basis_destroy(basis);
}

TEST(CApi, ConfigAndVerify) {
  eda_config* cfg = nullptr;
  const char* overrides[] = {"seed=11"};
  ASSERT_EQ(eda_config_default(overrides, 1, &cfg), EDA_OK);
  EXPECT_EQ(eda_config_seed(cfg), 11u);
  int code = -1;
  EXPECT_EQ(eda_run_command("dance", cfg, &code), EDA_ERR_INVALID_ARGUMENT);
  eda_config_destroy(cfg);
  EXPECT_EQ(eda_config_load("/nonexistent.json", nullptr, 0, &cfg), EDA_ERR_IO);

  eda_report* report = nullptr;
  ASSERT_EQ(eda_verify_run("cancellation", 7, &report), EDA_OK);
  EXPECT_EQ(eda_report_passed(report), 1);
  EXPECT_GT(eda_report_check_count(report), 0u);
  EXPECT_NE(std::string(eda_report_json(report)).find("\"cancellation\""), std::string::npos);
  eda_report_destroy(report);
  EXPECT_EQ(eda_verify_run("bogus", 7, &report), EDA_ERR_INVALID_ARGUMENT);
}

}  // namespace
