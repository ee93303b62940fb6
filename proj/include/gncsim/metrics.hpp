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
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "gncsim/dataset.hpp"  // IoError

namespace gncsim {

// --- content digests --------------------------------------------------------

inline constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ull;

inline std::uint64_t fnv1a(std::uint64_t h, const void* data,
                           std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}

inline std::uint64_t fnv1a_doubles(std::uint64_t h,
                                   std::span<const double> v) {
  return fnv1a(h, v.data(), v.size() * sizeof(double));
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

/// Full round-trip formatting for reals; "na" marks a value that was not
/// computed at this log point.
inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string format_opt(const std::optional<double>& v) {
  return v.has_value() ? format_real(*v) : "na";
}

// --- metrics stream ---------------------------------------------------------

/// Column names after the fixed leading pair (t, epoch). Fixed per run.
struct MetricsSchema {
  std::vector<std::string> columns;
};

struct MetricsRecord {
  std::uint64_t t = 0;
  std::uint64_t epoch = 0;
  std::vector<std::optional<double>> values;  // aligned with the schema
};

/// Line-delimited metrics: one self-describing header line, one data line
/// per log point, and a terminal status line. The writer streams to
/// <path>.tmp and renames into place only after the terminal record, so a
/// metrics file either exists complete or not at all. The content digest is
/// accumulated over exactly the bytes written.
class MetricsWriter {
 public:
  MetricsWriter(std::filesystem::path path, MetricsSchema schema)
      : path_(std::move(path)),
        tmp_(path_.string() + ".tmp"),
        schema_(std::move(schema)),
        out_(tmp_, std::ios::binary | std::ios::trunc) {
    if (!out_) {
      throw IoError("metrics: cannot open " + tmp_.string());
    }
    std::string header = "# gncsim-metrics v1 columns= t epoch";
    for (const auto& c : schema_.columns) {
      header += " " + c;
    }
    header += "\n";
    emit(header);
  }

  MetricsWriter(const MetricsWriter&) = delete;
  MetricsWriter& operator=(const MetricsWriter&) = delete;

  ~MetricsWriter() {
    if (!finished_) {
      out_.close();
      std::error_code ec;
      std::filesystem::remove(tmp_, ec);
    }
  }

  const MetricsSchema& schema() const { return schema_; }

  void write(const MetricsRecord& rec) {
    if (rec.values.size() != schema_.columns.size()) {
      throw std::invalid_argument("metrics: record does not match schema");
    }
    std::string line = std::to_string(rec.t) + "\t" +
                       std::to_string(rec.epoch);
    for (const auto& v : rec.values) {
      line += "\t" + format_opt(v);
    }
    line += "\n";
    emit(line);
  }

  /// Terminal record, flush, atomic rename. Returns the content digest.
  std::uint64_t finish(std::string_view status, std::uint64_t final_t,
                       std::uint64_t param_digest) {
    std::string line = "# end status=";
    line += status;
    line += " t=" + std::to_string(final_t);
    line += " param_digest=" + hex64(param_digest) + "\n";
    emit(line);
    out_.flush();
    if (!out_) {
      throw IoError("metrics: write failed for " + tmp_.string());
    }
    out_.close();
    std::filesystem::rename(tmp_, path_);
    std::ofstream digest_file(path_.string() + ".digest", std::ios::trunc);
    digest_file << hex64(digest_) << "\n";
    finished_ = true;
    return digest_;
  }

  std::uint64_t digest() const { return digest_; }

 private:
  void emit(const std::string& s) {
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
    digest_ = fnv1a(digest_, s.data(), s.size());
  }

  std::filesystem::path path_;
  std::filesystem::path tmp_;
  MetricsSchema schema_;
  std::ofstream out_;
  std::uint64_t digest_ = kFnvOffset;
  bool finished_ = false;
};

struct MetricsFile {
  MetricsSchema schema;
  std::vector<MetricsRecord> records;
  std::string status;  // finished | diverged
  std::uint64_t final_t = 0;
  std::string param_digest;
};

inline MetricsFile read_metrics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("read_metrics: cannot open " + path.string());
  }
  MetricsFile file;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (line.rfind("# gncsim-metrics", 0) == 0) {
      const auto pos = line.find("columns= t epoch");
      if (pos == std::string::npos) {
        throw IoError("read_metrics: bad header in " + path.string());
      }
      std::istringstream cols(line.substr(pos + std::strlen("columns= t epoch")));
      std::string c;
      while (cols >> c) {
        file.schema.columns.push_back(c);
      }
      saw_header = true;
      continue;
    }
    if (line.rfind("# end", 0) == 0) {
      std::istringstream end(line.substr(5));
      std::string token;
      while (end >> token) {
        if (token.rfind("status=", 0) == 0) {
          file.status = token.substr(7);
        } else if (token.rfind("t=", 0) == 0) {
          file.final_t = std::stoull(token.substr(2));
        } else if (token.rfind("param_digest=", 0) == 0) {
          file.param_digest = token.substr(13);
        }
      }
      continue;
    }
    if (line.empty() || !saw_header) {
      continue;
    }
    std::istringstream row(line);
    MetricsRecord rec;
    row >> rec.t >> rec.epoch;
    std::string cell;
    while (row >> cell) {
      if (cell == "na") {
        rec.values.emplace_back(std::nullopt);
      } else {
        rec.values.emplace_back(std::stod(cell));
      }
    }
    if (rec.values.size() != file.schema.columns.size()) {
      throw IoError("read_metrics: ragged record in " + path.string());
    }
    file.records.push_back(std::move(rec));
  }
  if (!saw_header || file.status.empty()) {
    throw IoError("read_metrics: incomplete metrics file " + path.string());
  }
  return file;
}

/// Index of a column in the schema, or throws.
inline std::size_t column_index(const MetricsSchema& schema,
                                std::string_view name) {
  for (std::size_t i = 0; i < schema.columns.size(); ++i) {
    if (schema.columns[i] == name) {
      return i;
    }
  }
  throw std::invalid_argument("metrics: no column named " + std::string(name));
}

inline std::uint64_t file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("file_digest: cannot open " + path.string());
  }
  std::uint64_t h = kFnvOffset;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    h = fnv1a(h, buf, static_cast<std::size_t>(in.gcount()));
    if (!in) {
      break;
    }
  }
  return h;
}

}  // namespace gncsim
