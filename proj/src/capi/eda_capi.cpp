// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#include "eda/eda.h"

#include <iostream>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "eda/basis.hpp"
#include "eda/denoiser.hpp"
#include "eda/error.hpp"
#include "eda/experiment.hpp"
#include "eda/field.hpp"
#include "eda/process.hpp"
#include "eda/schedule.hpp"
#include "eda/verify.hpp"

struct eda_field {
  eda::Field value;
};

struct eda_schedule {
  eda::Schedule value;
};

struct eda_basis {
  eda::BasisSet value;
};

struct eda_process {
  eda::DiffusionProcess value;
};

struct eda_config {
  eda::ExperimentConfig value;
};

struct eda_report {
  eda::SuiteReport value;
  std::string json;
};

namespace {

thread_local std::string last_error;

eda_status to_status(eda::ErrorCode code) {
  switch (code) {
    case eda::ErrorCode::kInvalidArgument: return EDA_ERR_INVALID_ARGUMENT;
    case eda::ErrorCode::kShapeMismatch: return EDA_ERR_SHAPE_MISMATCH;
    case eda::ErrorCode::kDomain: return EDA_ERR_DOMAIN;
    case eda::ErrorCode::kSingularCovariance: return EDA_ERR_SINGULAR_COVARIANCE;
    case eda::ErrorCode::kNumerical: return EDA_ERR_NUMERICAL;
    case eda::ErrorCode::kIo: return EDA_ERR_IO;
    case eda::ErrorCode::kParse: return EDA_ERR_PARSE;
    case eda::ErrorCode::kCheckFailed: return EDA_ERR_CHECK_FAILED;
  }
  return EDA_ERR_INTERNAL;
}

template <class Fn>
eda_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return EDA_OK;
  } catch (const eda::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return EDA_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return EDA_ERR_INTERNAL;
  }
}

void require_arg(bool ok, const char* what) {
  eda::require(ok, eda::ErrorCode::kInvalidArgument, what);
}

eda::Shape make_shape(const size_t* shape, size_t rank) {
  require_arg(shape != nullptr && rank > 0, "shape must be non-empty");
  return eda::Shape(shape, shape + rank);
}

std::vector<std::string> make_overrides(const char* const* overrides, size_t count) {
  require_arg(count == 0 || overrides != nullptr, "overrides must not be NULL");
  std::vector<std::string> out;
  for (size_t i = 0; i < count; ++i) {
    require_arg(overrides[i] != nullptr, "override must not be NULL");
    out.emplace_back(overrides[i]);
  }
  return out;
}

eda_field* wrap(eda::Field f) { return new eda_field{std::move(f)}; }

}  // namespace

extern "C" {

const char* eda_version(void) { return "0.1.0"; }

const char* eda_status_string(eda_status status) {
  switch (status) {
    case EDA_OK: return "ok";
    case EDA_ERR_INVALID_ARGUMENT: return "invalid argument";
    case EDA_ERR_SHAPE_MISMATCH: return "shape mismatch";
    case EDA_ERR_DOMAIN: return "domain error";
    case EDA_ERR_SINGULAR_COVARIANCE: return "singular covariance";
    case EDA_ERR_NUMERICAL: return "numerical error";
    case EDA_ERR_IO: return "i/o error";
    case EDA_ERR_PARSE: return "parse error";
    case EDA_ERR_CHECK_FAILED: return "check failed";
    case EDA_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* eda_last_error(void) { return last_error.c_str(); }

eda_status eda_field_create(const size_t* shape, size_t rank, const double* values,
                            eda_field** out) {
  return guarded([&] {
    require_arg(out != nullptr, "out must not be NULL");
    eda::Shape s = make_shape(shape, rank);
    const size_t n = eda::element_count(s);
    *out = values ? wrap(eda::Field(std::move(s), std::vector<double>(values, values + n)))
                  : wrap(eda::Field(std::move(s)));
  });
}

void eda_field_destroy(eda_field* field) { delete field; }

size_t eda_field_rank(const eda_field* field) { return field ? field->value.rank() : 0; }

size_t eda_field_size(const eda_field* field) { return field ? field->value.size() : 0; }

eda_status eda_field_shape(const eda_field* field, size_t* extents, size_t capacity) {
  return guarded([&] {
    require_arg(field != nullptr && extents != nullptr, "field and extents must not be NULL");
    require_arg(capacity >= field->value.rank(), "extents buffer too small");
    for (size_t i = 0; i < field->value.rank(); ++i) extents[i] = field->value.shape()[i];
  });
}

const double* eda_field_data(const eda_field* field) {
  return field ? field->value.data() : nullptr;
}

eda_status eda_field_save(const eda_field* field, const char* path) {
  return guarded([&] {
    require_arg(field != nullptr && path != nullptr, "field and path must not be NULL");
    eda::save_field(path, field->value);
  });
}

eda_status eda_field_load(const char* path, eda_field** out) {
  return guarded([&] {
    require_arg(path != nullptr && out != nullptr, "path and out must not be NULL");
    *out = wrap(eda::load_field(path));
  });
}

eda_status eda_psnr(const eda_field* a, const eda_field* b, double peak, double* out) {
  return guarded([&] {
    require_arg(a && b && out, "arguments must not be NULL");
    *out = eda::psnr(a->value, b->value, peak);
  });
}

eda_status eda_rmse(const eda_field* a, const eda_field* b, double* out) {
  return guarded([&] {
    require_arg(a && b && out, "arguments must not be NULL");
    *out = eda::rmse(a->value, b->value);
  });
}

eda_status eda_schedule_create(const char* kind, double beta_min, double beta_max, double horizon,
                               eda_schedule** out) {
  return guarded([&] {
    require_arg(kind != nullptr && out != nullptr, "kind and out must not be NULL");
    *out = new eda_schedule{
        eda::Schedule::make(eda::parse_schedule_kind(kind), beta_min, beta_max, horizon)};
  });
}

void eda_schedule_destroy(eda_schedule* schedule) { delete schedule; }

eda_status eda_schedule_evaluate(const eda_schedule* schedule, double t, double* s,
                                 double* s_prime, double* sigma, double* sigma_prime) {
  return guarded([&] {
    require_arg(schedule != nullptr, "schedule must not be NULL");
    const eda::ScheduleValues v = schedule->value.evaluate(t);
    if (s) *s = v.s;
    if (s_prime) *s_prime = v.s_prime;
    if (sigma) *sigma = v.sigma;
    if (sigma_prime) *sigma_prime = v.sigma_prime;
  });
}

eda_status eda_basis_create_pixel(const size_t* shape, size_t rank, eda_basis** out) {
  return guarded([&] {
    require_arg(out != nullptr, "out must not be NULL");
    *out = new eda_basis{eda::pixel_basis(make_shape(shape, rank))};
  });
}

eda_status eda_basis_create_legendre_trig(int n1, int n2, size_t rows, size_t cols,
                                          eda_basis** out) {
  return guarded([&] {
    require_arg(out != nullptr, "out must not be NULL");
    *out = new eda_basis{eda::legendre_trig_basis(n1, n2, {rows, cols})};
  });
}

eda_status eda_basis_create_residual(const size_t* shape, size_t rank, eda_basis** out) {
  return guarded([&] {
    require_arg(out != nullptr, "out must not be NULL");
    *out = new eda_basis{eda::residual_basis_set(make_shape(shape, rank))};
  });
}

eda_status eda_basis_create_fixed(const size_t* shape, size_t rank, const double* elements,
                                  size_t count, eda_basis** out) {
  return guarded([&] {
    require_arg(out != nullptr && elements != nullptr, "elements and out must not be NULL");
    require_arg(count > 0, "basis needs at least one element");
    const eda::Shape s = make_shape(shape, rank);
    const size_t d = eda::element_count(s);
    std::vector<eda::Field> fields;
    for (size_t m = 0; m < count; ++m) {
      fields.emplace_back(s, std::vector<double>(elements + m * d, elements + (m + 1) * d));
    }
    *out = new eda_basis{eda::BasisSet::fixed("custom", eda::Basis(s, std::move(fields)))};
  });
}

void eda_basis_destroy(eda_basis* basis) { delete basis; }

size_t eda_basis_count(const eda_basis* basis) { return basis ? basis->value.count() : 0; }

eda_status eda_process_create(const eda_schedule* schedule, const eda_basis* basis, double eta,
                              eda_process** out) {
  return guarded([&] {
    require_arg(schedule && basis && out, "arguments must not be NULL");
    *out = new eda_process{eda::DiffusionProcess(schedule->value, basis->value, eta)};
  });
}

void eda_process_destroy(eda_process* process) { delete process; }

eda_status eda_process_forward_sample(const eda_process* process, const eda_field* x0, double t,
                                      const eda_field* clean, const eda_field* degraded,
                                      uint64_t seed, eda_field** out) {
  return guarded([&] {
    require_arg(process && x0 && out, "arguments must not be NULL");
    require_arg((clean == nullptr) == (degraded == nullptr),
                "clean and degraded must be given together");
    const eda::Conditioning cond =
        clean ? eda::Conditioning{&clean->value, &degraded->value} : eda::Conditioning{};
    eda::Rng rng(seed);
    *out = wrap(process->value.forward_sample(x0->value, t, cond, rng));
  });
}

eda_status eda_process_conditional_score(const eda_process* process, const eda_field* x0, double t,
                                         const eda_field* x, eda_field** out) {
  return guarded([&] {
    require_arg(process && x0 && x && out, "arguments must not be NULL");
    *out = wrap(process->value.conditional_score(x0->value, t, x->value, {}));
  });
}

eda_status eda_process_pfode_rhs(const eda_process* process, const eda_field* x0, double t,
                                 const eda_field* x, eda_field** out) {
  return guarded([&] {
    require_arg(process && x0 && x && out, "arguments must not be NULL");
    *out = wrap(process->value.pfode_rhs(eda::ConstantDenoiser(x0->value), t, x->value));
  });
}

eda_status eda_config_load(const char* path, const char* const* overrides, size_t count,
                           eda_config** out) {
  return guarded([&] {
    require_arg(path != nullptr && out != nullptr, "path and out must not be NULL");
    *out = new eda_config{eda::load_config(path, make_overrides(overrides, count))};
  });
}

eda_status eda_config_default(const char* const* overrides, size_t count, eda_config** out) {
  return guarded([&] {
    require_arg(out != nullptr, "out must not be NULL");
    *out = new eda_config{eda::default_config(make_overrides(overrides, count))};
  });
}

void eda_config_destroy(eda_config* config) { delete config; }

uint64_t eda_config_seed(const eda_config* config) { return config ? config->value.seed : 0; }

eda_status eda_run_command(const char* command, const eda_config* config, int* exit_code) {
  return guarded([&] {
    require_arg(command && config && exit_code, "arguments must not be NULL");
    const std::string cmd = command;
    const eda::ExperimentConfig& cfg = config->value;
    if (cmd == "train") {
      *exit_code = eda::cmd_train(cfg, std::cerr);
    } else if (cmd == "sample") {
      *exit_code = eda::cmd_sample(cfg, std::cerr);
    } else if (cmd == "restore") {
      *exit_code = eda::cmd_restore(cfg, std::cerr);
    } else if (cmd == "simulate") {
      *exit_code = eda::cmd_simulate(cfg, std::cerr);
    } else if (cmd == "demo-case3") {
      *exit_code = eda::cmd_demo_case3(cfg, std::cerr);
    } else {
      eda::fail(eda::ErrorCode::kInvalidArgument, "unknown command '" + cmd + "'");
    }
  });
}

eda_status eda_verify_run(const char* suite, uint64_t seed, eda_report** out) {
  return guarded([&] {
    require_arg(suite != nullptr && out != nullptr, "suite and out must not be NULL");
    auto report = std::make_unique<eda_report>();
    report->value = eda::run_suite(suite, seed);
    report->json = report->value.to_json();
    *out = report.release();
  });
}

void eda_report_destroy(eda_report* report) { delete report; }

int eda_report_passed(const eda_report* report) {
  return report && report->value.passed() ? 1 : 0;
}

size_t eda_report_check_count(const eda_report* report) {
  return report ? report->value.checks.size() : 0;
}

const char* eda_report_json(const eda_report* report) {
  return report ? report->json.c_str() : "";
}

}  // extern "C"
