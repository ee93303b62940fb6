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

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gncsim {

// Flat-vector arithmetic. Every reduction in this file accumulates strictly
// left to right in index order; results are bit-identical across runs and do
// not depend on any build-time parallelism.

namespace detail {
inline void check_same_size(std::span<const double> a, std::span<const double> b,
                            const char* who) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(who) + ": dimension mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
}
}  // namespace detail

inline double sum(std::span<const double> v) {
  double acc = 0.0;
  for (const double x : v) {
    acc += x;
  }
  return acc;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  detail::check_same_size(a, b, "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += a[i] * b[i];
  }
  return acc;
}

inline double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (const double x : v) {
    m = std::max(m, std::abs(x));
  }
  return m;
}

/// y += a * x
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  detail::check_same_size(x, y, "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] += a * x[i];
  }
}

inline void scale(std::span<double> v, double a) {
  for (double& x : v) {
    x *= a;
  }
}

inline std::vector<double> diff(std::span<const double> a,
                                std::span<const double> b) {
  detail::check_same_size(a, b, "diff");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = a[i] - b[i];
  }
  return out;
}

inline double distance(std::span<const double> a, std::span<const double> b) {
  detail::check_same_size(a, b, "distance");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

inline bool all_finite(std::span<const double> v) {
  for (const double x : v) {
    if (!std::isfinite(x)) {
      return false;
    }
  }
  return true;
}

/// <u,v> / (|u||v|). Zero-norm input is rejected.
inline double cosine_similarity(std::span<const double> u,
                                std::span<const double> v) {
  detail::check_same_size(u, v, "cosine_similarity");
  const double nu = norm(u);
  const double nv = norm(v);
  if (nu == 0.0 || nv == 0.0) {
    throw std::invalid_argument("cosine_similarity: zero-norm input");
  }
  return dot(u, v) / (nu * nv);
}

inline double rel_err(double got, double want) {
  const double scale = std::max(std::abs(got), std::abs(want));
  if (scale == 0.0) {
    return 0.0;
  }
  return std::abs(got - want) / scale;
}

}  // namespace gncsim
