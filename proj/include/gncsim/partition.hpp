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

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gncsim/vec.hpp"

namespace gncsim {

/// Half-open contiguous index range [begin, end) of a flat parameter vector.
struct ParamGroup {
  std::string name;
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
};

enum class Grouping { per_filter, per_layer };

/// A named partition of [0, dim) into contiguous groups. Groups are sorted,
/// disjoint and exhaustive; this is validated on construction.
class FilterPartition {
 public:
  FilterPartition(Grouping level, std::vector<ParamGroup> groups)
      : level_(level), groups_(std::move(groups)) {
    if (groups_.empty()) {
      throw std::invalid_argument("FilterPartition: no groups");
    }
    std::size_t cursor = 0;
    for (const ParamGroup& g : groups_) {
      if (g.begin != cursor || g.end <= g.begin) {
        throw std::invalid_argument(
            "FilterPartition: groups must be sorted, disjoint and cover "
            "[0, dim) (offending group \"" +
            g.name + "\")");
      }
      cursor = g.end;
    }
    dim_ = cursor;
  }

  Grouping level() const { return level_; }
  std::size_t dim() const { return dim_; }
  const std::vector<ParamGroup>& groups() const { return groups_; }

 private:
  Grouping level_;
  std::vector<ParamGroup> groups_;
  std::size_t dim_ = 0;
};

/// True when every group of `fine` lies inside exactly one group of `coarse`.
inline bool is_coarsening(const FilterPartition& coarse,
                          const FilterPartition& fine) {
  if (coarse.dim() != fine.dim()) {
    return false;
  }
  std::size_t ci = 0;
  for (const ParamGroup& f : fine.groups()) {
    while (ci < coarse.groups().size() && coarse.groups()[ci].end <= f.begin) {
      ++ci;
    }
    if (ci == coarse.groups().size() || f.begin < coarse.groups()[ci].begin ||
        f.end > coarse.groups()[ci].end) {
      return false;
    }
  }
  return true;
}

/// Euclidean norm of each group's slice, in partition order.
inline std::vector<double> group_norms(std::span<const double> values,
                                       const FilterPartition& partition) {
  if (values.size() != partition.dim()) {
    throw std::invalid_argument("group_norms: dimension mismatch");
  }
  std::vector<double> out;
  out.reserve(partition.groups().size());
  for (const ParamGroup& g : partition.groups()) {
    out.push_back(norm(values.subspan(g.begin, g.size())));
  }
  return out;
}

/// The two grouping levels a model exposes: per-filter and its per-layer
/// coarsening.
struct PartitionSet {
  FilterPartition per_filter;
  FilterPartition per_layer;

  PartitionSet(FilterPartition filters, FilterPartition layers)
      : per_filter(std::move(filters)), per_layer(std::move(layers)) {
    if (per_filter.dim() != per_layer.dim()) {
      throw std::invalid_argument("PartitionSet: levels disagree on dim");
    }
    if (!is_coarsening(per_layer, per_filter)) {
      throw std::invalid_argument(
          "PartitionSet: per-layer grouping must coarsen per-filter grouping");
    }
  }

  /// Both levels equal to a single group covering the whole vector.
  static PartitionSet trivial(std::size_t dim, const std::string& name = "x") {
    FilterPartition p(Grouping::per_filter, {{name, 0, dim}});
    FilterPartition l(Grouping::per_layer, {{name, 0, dim}});
    return PartitionSet(std::move(p), std::move(l));
  }
};

}  // namespace gncsim
