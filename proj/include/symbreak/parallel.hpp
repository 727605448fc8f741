// Copyright 2026 The symbreak-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace symbreak {

// Mixes a master seed and a counter into an independent 64-bit seed
// (two rounds of splitmix64). Ensemble member i always receives
// counter_seed(seed, i), whatever thread runs it.
std::uint64_t counter_seed(std::uint64_t seed, std::uint64_t index);

// Worker count: SYMBREAK_THREADS if set to a positive integer, otherwise
// std::thread::hardware_concurrency() (at least 1).
unsigned worker_count();

// Calls fn(i) for i in [0, count) on up to worker_count() threads. The
// first exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace symbreak
