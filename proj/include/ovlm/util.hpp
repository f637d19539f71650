// Copyright 2026 The ovlm Authors
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

#ifndef OVLM_UTIL_HPP_
#define OVLM_UTIL_HPP_

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace ovlm {

// Single RNG type used everywhere so seeded runs are reproducible.
using Rng = std::mt19937_64;

// Maximum worker threads: OVLM_THREADS if set and positive, else the
// hardware concurrency (at least 1).
int thread_limit();

// Runs fn(i) for i in [0, n) on up to thread_limit() workers. Results must be
// written to index-addressed slots by the caller; chunk order is unspecified
// but every index runs exactly once.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Hex-encoded SHA-256 of a byte string.
std::string sha256_hex(const std::string& data);

// Splits on runs of space/tab/newline/CR; no empty pieces.
std::vector<std::string> split_whitespace(const std::string& text);

}  // namespace ovlm

#endif  // OVLM_UTIL_HPP_
