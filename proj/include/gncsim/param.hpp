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

#include <memory>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gncsim/partition.hpp"

namespace gncsim {

/// Flat model parameters plus the grouping structure they carry. The
/// partition set is immutable and shared between copies.
struct ParamVector {
  std::vector<double> values;
  std::shared_ptr<const PartitionSet> partition;

  ParamVector() = default;
  ParamVector(std::vector<double> v, std::shared_ptr<const PartitionSet> p)
      : values(std::move(v)), partition(std::move(p)) {
    if (!partition || partition->per_filter.dim() != values.size()) {
      throw std::invalid_argument("ParamVector: partition does not cover values");
    }
  }

  std::size_t dim() const { return values.size(); }
  std::span<const double> view() const { return values; }
};

/// Per-filter group norms, in partition order.
inline std::vector<double> filter_norms(const ParamVector& x) {
  return group_norms(x.values, x.partition->per_filter);
}

}  // namespace gncsim
