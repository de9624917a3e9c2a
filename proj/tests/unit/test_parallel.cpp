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

#include "qmetro/parallel.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmetro {
namespace {

class ThreadCap : public ::testing::Test {
protected:
    void TearDown() override {
        set_max_threads(0);
        unsetenv("QMETRO_THREADS");
    }
};

TEST_F(ThreadCap, EnvironmentAndOverride) {
    setenv("QMETRO_THREADS", "3", 1);
    EXPECT_EQ(max_threads(), 3u);
    set_max_threads(5);
    EXPECT_EQ(max_threads(), 5u);
    set_max_threads(0);
    EXPECT_EQ(max_threads(), 3u);
    setenv("QMETRO_THREADS", "zero", 1);
    EXPECT_GE(max_threads(), 1u);
    setenv("QMETRO_THREADS", "-2", 1);
    EXPECT_GE(max_threads(), 1u);
}

TEST_F(ThreadCap, EveryIndexRunsOnce) {
    for (unsigned threads : {1u, 2u, 3u, 8u}) {
        set_max_threads(threads);
        for (std::size_t count : {0u, 1u, 7u, 100u}) {
            std::vector<std::atomic<int>> hits(count);
            parallel_for(count, [&](std::size_t i) { hits[i]++; });
            for (std::size_t i = 0; i < count; ++i) EXPECT_EQ(hits[i].load(), 1);
        }
    }
}

TEST_F(ThreadCap, ResultsIndependentOfThreadCount) {
    auto run = [] {
        std::vector<double> out(257);
        parallel_for(out.size(), [&](std::size_t i) {
            double x = 0.0;
            for (std::size_t k = 0; k <= i; ++k) x += 1.0 / static_cast<double>(k + 1);
            out[i] = x;
        });
        return out;
    };
    set_max_threads(1);
    const auto serial = run();
    set_max_threads(6);
    EXPECT_EQ(run(), serial);
}

TEST_F(ThreadCap, LowestFailingIndexIsRethrown) {
    for (unsigned threads : {1u, 4u}) {
        set_max_threads(threads);
        try {
            parallel_for(40, [](std::size_t i) {
                if (i == 13 || i == 31) throw std::runtime_error(std::to_string(i));
            });
            FAIL();
        } catch (const std::runtime_error& e) {
            EXPECT_STREQ(e.what(), "13");
        }
    }
}

}  // namespace
}  // namespace qmetro
