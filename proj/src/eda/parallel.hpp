// Copyright (C) 2026 EDA contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace eda {

/// Worker count from EDA_NUM_THREADS, else hardware concurrency.
std::size_t thread_count();

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunk boundaries do
/// not affect results as long as `body` writes only to its own indices.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace eda
