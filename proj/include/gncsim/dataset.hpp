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
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gncsim {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Fixed-width real records, one row per example. How a row is interpreted
/// (plain coordinates, features plus trailing class label, ...) is up to the
/// objective family.
struct Dataset {
  std::size_t n = 0;
  std::size_t width = 0;
  std::vector<double> values;  // row-major, n * width

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values).subspan(i * width, width);
  }
};

/// Indices into a Dataset. When the batch is a worker shard the provenance
/// fields say which (iteration, worker) cut it.
struct Batch {
  std::vector<std::size_t> indices;
  std::uint64_t iteration = 0;
  std::uint32_t worker = 0;
};

inline Batch full_batch(const Dataset& ds) {
  if (ds.n == 0) {
    throw std::invalid_argument("full_batch: empty dataset");
  }
  Batch b;
  b.indices.resize(ds.n);
  for (std::size_t i = 0; i < ds.n; ++i) {
    b.indices[i] = i;
  }
  return b;
}

/// Key/value sidecar describing the stored family; order-preserving.
struct DatasetMeta {
  std::vector<std::pair<std::string, std::string>> entries;

  void set(std::string key, std::string value) {
    entries.emplace_back(std::move(key), std::move(value));
  }
  std::string get(const std::string& key) const {
    for (const auto& [k, v] : entries) {
      if (k == key) {
        return v;
      }
    }
    throw IoError("dataset meta: missing key \"" + key + "\"");
  }
};

// Binary container: 8 magic bytes, u32 version, u64 n, u64 width, then
// n*width float64 values, all little-endian (native layout on the supported
// platforms). A text sidecar <path>.meta carries the family description.
inline constexpr char kDatasetMagic[8] = {'G', 'N', 'C', 'D',
                                          'S', 'E', 'T', '1'};
inline constexpr std::uint32_t kDatasetVersion = 1;

namespace detail {
template <typename T>
void write_raw(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T read_raw(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}
}  // namespace detail

inline void save_dataset(const std::filesystem::path& path, const Dataset& ds,
                         const DatasetMeta& meta) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("save_dataset: cannot open " + path.string());
  }
  out.write(kDatasetMagic, sizeof(kDatasetMagic));
  detail::write_raw(out, kDatasetVersion);
  detail::write_raw(out, static_cast<std::uint64_t>(ds.n));
  detail::write_raw(out, static_cast<std::uint64_t>(ds.width));
  out.write(reinterpret_cast<const char*>(ds.values.data()),
            static_cast<std::streamsize>(ds.values.size() * sizeof(double)));
  if (!out) {
    throw IoError("save_dataset: write failed for " + path.string());
  }
  out.close();

  std::ofstream side(path.string() + ".meta", std::ios::trunc);
  if (!side) {
    throw IoError("save_dataset: cannot open sidecar for " + path.string());
  }
  for (const auto& [k, v] : meta.entries) {
    side << k << " = " << v << "\n";
  }
}

inline std::pair<Dataset, DatasetMeta> load_dataset(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("load_dataset: cannot open " + path.string());
  }
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kDatasetMagic, sizeof(magic)) != 0) {
    throw IoError("load_dataset: bad magic in " + path.string());
  }
  const auto version = detail::read_raw<std::uint32_t>(in);
  if (version != kDatasetVersion) {
    throw IoError("load_dataset: unsupported version " +
                  std::to_string(version));
  }
  Dataset ds;
  ds.n = detail::read_raw<std::uint64_t>(in);
  ds.width = detail::read_raw<std::uint64_t>(in);
  if (ds.n == 0 || ds.width == 0) {
    throw IoError("load_dataset: empty dataset in " + path.string());
  }
  ds.values.resize(ds.n * ds.width);
  in.read(reinterpret_cast<char*>(ds.values.data()),
          static_cast<std::streamsize>(ds.values.size() * sizeof(double)));
  if (!in) {
    throw IoError("load_dataset: truncated payload in " + path.string());
  }

  DatasetMeta meta;
  std::ifstream side(path.string() + ".meta");
  if (!side) {
    throw IoError("load_dataset: missing sidecar for " + path.string());
  }
  std::string line;
  while (std::getline(side, line)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) {
      continue;
    }
    meta.set(line.substr(0, eq), line.substr(eq + 3));
  }
  return {std::move(ds), std::move(meta)};
}

}  // namespace gncsim
