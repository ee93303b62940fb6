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

#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "gncsim/dataset.hpp"
#include "gncsim/rng.hpp"

namespace gncsim {

/// One iteration's large batch d_t and its M disjoint worker shards.
struct StepShards {
  Batch merged;               // size b * M
  std::vector<Batch> shards;  // M batches of size b
};

/// Deterministic epoch sampler. Each epoch is a seeded permutation of the
/// dataset cut into consecutive blocks of b*M indices (the trailing
/// remainder is dropped), and each block into M consecutive shards of b.
/// Plans are a pure function of (seed, epoch): any epoch can be regenerated
/// in isolation, which is what checkpoint re-probing relies on.
class BatchSampler {
 public:
  BatchSampler(std::size_t n, std::size_t shard_size, std::size_t workers,
               std::uint64_t seed)
      : n_(n), b_(shard_size), m_(workers), seed_(seed) {
    if (b_ == 0 || m_ == 0) {
      throw std::invalid_argument("BatchSampler: b and M must be positive");
    }
    if (b_ * m_ > n_) {
      throw std::invalid_argument(
          "BatchSampler: shard_size * workers exceeds dataset size");
    }
  }

  std::size_t iterations_per_epoch() const { return n_ / (b_ * m_); }
  std::size_t dropped_per_epoch() const { return n_ % (b_ * m_); }

  /// Shard plan for a 1-based epoch.
  std::vector<StepShards> epoch_plan(std::uint64_t epoch) const {
    std::vector<std::size_t> perm(n_);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(seed_, epoch);
    for (std::size_t i = n_ - 1; i > 0; --i) {
      const std::size_t j = rng.below(i + 1);
      std::swap(perm[i], perm[j]);
    }

    const std::size_t block = b_ * m_;
    std::vector<StepShards> plan(iterations_per_epoch());
    for (std::size_t k = 0; k < plan.size(); ++k) {
      StepShards& step = plan[k];
      const std::size_t base = k * block;
      step.merged.indices.assign(perm.begin() + base,
                                 perm.begin() + base + block);
      step.shards.resize(m_);
      for (std::size_t w = 0; w < m_; ++w) {
        Batch& shard = step.shards[w];
        shard.worker = static_cast<std::uint32_t>(w);
        shard.indices.assign(perm.begin() + base + w * b_,
                             perm.begin() + base + (w + 1) * b_);
      }
    }
    return plan;
  }

 private:
  std::size_t n_;
  std::size_t b_;
  std::size_t m_;
  std::uint64_t seed_;
};

}  // namespace gncsim
