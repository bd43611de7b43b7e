// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eda/basis.hpp"
#include "eda/field.hpp"

namespace eda {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::uint64_t seed = 0;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;

  bool passed() const;
  /// Deterministic JSON document (no timings).
  std::string to_json() const;
};

/// Suite names accepted by run_suite, "all" last.
const std::vector<std::string>& suite_names();

/// Runs one named suite (or every suite for "all") deterministically from `seed`.
SuiteReport run_suite(const std::string& name, std::uint64_t seed);

/// Basis of `count` Gaussian elements on `shape` plus a diagonal boost on the
/// first min(count, d) coordinates, so count >= d gives a well-conditioned
/// full-rank Sigma.
BasisSet random_basis(const Shape& shape, std::size_t count, Rng& rng);

}  // namespace eda
