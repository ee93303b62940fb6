/*
 * Copyright 2026 The gncsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "gncsim/sampler.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

namespace gncsim {
namespace {

TEST(Sampler, ShardsPartitionTheBlock) {
  const BatchSampler sampler(8, 2, 2, 123);
  EXPECT_EQ(sampler.iterations_per_epoch(), 2u);
  const auto plan = sampler.epoch_plan(1);
  ASSERT_EQ(plan.size(), 2u);

  std::set<std::size_t> seen;
  for (const StepShards& step : plan) {
    EXPECT_EQ(step.merged.indices.size(), 4u);
    std::set<std::size_t> merged(step.merged.indices.begin(),
                                 step.merged.indices.end());
    EXPECT_EQ(merged.size(), 4u);

    std::set<std::size_t> from_shards;
    for (const Batch& shard : step.shards) {
      EXPECT_EQ(shard.indices.size(), 2u);
      from_shards.insert(shard.indices.begin(), shard.indices.end());
    }
    EXPECT_EQ(from_shards, merged);  // disjoint shards, union = d_t
    seen.insert(merged.begin(), merged.end());
  }
  EXPECT_EQ(seen.size(), 8u);  // the whole permuted prefix is used
}

TEST(Sampler, SameSeedReplaysExactly) {
  const BatchSampler a(32, 2, 4, 9);
  const BatchSampler b(32, 2, 4, 9);
  for (std::uint64_t epoch = 1; epoch <= 3; ++epoch) {
    const auto pa = a.epoch_plan(epoch);
    const auto pb = b.epoch_plan(epoch);
    ASSERT_EQ(pa.size(), pb.size());
    for (std::size_t k = 0; k < pa.size(); ++k) {
      EXPECT_EQ(pa[k].merged.indices, pb[k].merged.indices);
      for (std::size_t w = 0; w < pa[k].shards.size(); ++w) {
        EXPECT_EQ(pa[k].shards[w].indices, pb[k].shards[w].indices);
      }
    }
  }
}

TEST(Sampler, EpochsDifferAndSeedsMatter) {
  const BatchSampler sampler(32, 2, 4, 9);
  EXPECT_NE(sampler.epoch_plan(1)[0].merged.indices,
            sampler.epoch_plan(2)[0].merged.indices);
  const BatchSampler other(32, 2, 4, 10);
  EXPECT_NE(sampler.epoch_plan(1)[0].merged.indices,
            other.epoch_plan(1)[0].merged.indices);
}

TEST(Sampler, TrailingRemainderDropped) {
  const BatchSampler sampler(10, 2, 2, 4);
  EXPECT_EQ(sampler.iterations_per_epoch(), 2u);
  EXPECT_EQ(sampler.dropped_per_epoch(), 2u);
  const auto plan = sampler.epoch_plan(1);
  ASSERT_EQ(plan.size(), 2u);
  std::set<std::size_t> used;
  for (const auto& step : plan) {
    used.insert(step.merged.indices.begin(), step.merged.indices.end());
  }
  EXPECT_EQ(used.size(), 8u);
}

TEST(Sampler, RejectsOversizedBlocks) {
  EXPECT_THROW(BatchSampler(7, 2, 4, 0), std::invalid_argument);
  EXPECT_THROW(BatchSampler(7, 0, 4, 0), std::invalid_argument);
}

}  // namespace
}  // namespace gncsim
