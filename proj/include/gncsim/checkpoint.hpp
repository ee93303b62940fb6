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

#include <cstring>
#include <filesystem>
#include <fstream>

#include "gncsim/optimizer.hpp"

namespace gncsim {

// Trajectory checkpoint: everything the next iteration's noise needs.
// Binary, little-endian, saved after iteration t-1 completed (state.t = t).
inline constexpr char kCheckpointMagic[8] = {'G', 'N', 'C', 'C',
                                             'K', 'P', 'T', '1'};

inline void save_checkpoint(const std::filesystem::path& path,
                            const OptimizerState& st) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("save_checkpoint: cannot open " + path.string());
  }
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  const auto put_u64 = [&out](std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  };
  const auto put_vec = [&out](const std::vector<double>& v) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
  };
  put_u64(st.t);
  put_u64(st.x.dim());
  put_u64(st.prev_worker_grads.size());
  put_u64(st.has_prev ? 1 : 0);
  put_vec(st.x.values);
  put_vec(st.velocity);
  put_vec(st.prev_merged_grad);
  if (st.has_prev) {
    for (const auto& g : st.prev_worker_grads) {
      put_vec(g);
    }
  }
  if (!out) {
    throw IoError("save_checkpoint: write failed for " + path.string());
  }
}

/// Loads a checkpoint and reattaches the objective's partition. The stored
/// dimensions must match the objective the config reconstructs.
inline OptimizerState load_checkpoint(const std::filesystem::path& path,
                                      const Objective& obj) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("load_checkpoint: cannot open " + path.string());
  }
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw IoError("load_checkpoint: bad magic in " + path.string());
  }
  const auto get_u64 = [&in]() {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
  };
  OptimizerState st;
  st.t = get_u64();
  const std::uint64_t dim = get_u64();
  const std::uint64_t workers = get_u64();
  st.has_prev = get_u64() != 0;
  if (dim != obj.param_dim()) {
    throw IoError("load_checkpoint: parameter dim mismatch");
  }
  const auto get_vec = [&in, dim]() {
    std::vector<double> v(dim);
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(dim * sizeof(double)));
    return v;
  };
  st.x = ParamVector(get_vec(), obj.partition());
  st.velocity = get_vec();
  st.prev_merged_grad = get_vec();
  st.prev_worker_grads.assign(workers, {});
  if (st.has_prev) {
    for (auto& g : st.prev_worker_grads) {
      g = get_vec();
    }
  }
  if (!in) {
    throw IoError("load_checkpoint: truncated file " + path.string());
  }
  return st;
}

}  // namespace gncsim
