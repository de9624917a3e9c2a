// Copyright 2026 The qmetro Authors
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

// Minimal fork-join helper. Work items are indexed, each writes only its own
// slot, and callers reduce in index order, so results never depend on the
// thread count.

#pragma once

#include <cstddef>
#include <functional>

namespace qmetro {

/// Thread cap: set_max_threads() if called, else QMETRO_THREADS, else the
/// hardware concurrency. Always >= 1.
unsigned max_threads();

/// Overrides the cap for this process; 0 restores the default.
void set_max_threads(unsigned n);

/// Runs body(i) for i in [0, count) on up to max_threads() threads using
/// contiguous blocks. If any call throws, the exception from the lowest
/// failing index is rethrown after all threads join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace qmetro
