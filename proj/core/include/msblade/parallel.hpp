// Copyright 2026 The msblade Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>

namespace msblade {

// Process-wide worker count used by ParallelFor. 0 selects
// std::thread::hardware_concurrency().
void SetThreadCount(int threads);
int ThreadCount();

// Runs body(i) for i in [begin, end). Iterations are split into contiguous
// blocks, one per worker. Bodies must not depend on execution order.
void ParallelFor(int begin, int end, const std::function<void(int)>& body);

}  // namespace msblade
