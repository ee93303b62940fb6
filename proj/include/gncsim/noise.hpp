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
#include <stdexcept>
#include <vector>

#include "gncsim/eigen.hpp"
#include "gncsim/rng.hpp"
#include "gncsim/vec.hpp"

namespace gncsim {

/// The noise vectors of one iteration, one column per worker.
struct NoiseBank {
  std::vector<std::vector<double>> columns;
  bool centered = false;

  std::size_t workers() const { return columns.size(); }
  std::size_t dim() const { return columns.empty() ? 0 : columns.front().size(); }
  bool empty() const { return columns.empty(); }
};

inline NoiseBank zero_bank(std::size_t workers, std::size_t dim) {
  NoiseBank bank;
  bank.columns.assign(workers, std::vector<double>(dim, 0.0));
  bank.centered = true;
  return bank;
}

/// i.i.d. uniform [0, 1) coordinates. Unbiasedness across workers is the
/// caller's job (see rnc_noise).
inline std::vector<double> uniform_noise(std::size_t dim, Rng& rng) {
  if (dim == 0) {
    throw std::invalid_argument("uniform_noise: dim must be positive");
  }
  std::vector<double> v(dim);
  for (double& x : v) {
    x = rng.uniform();
  }
  return v;
}

/// Isotropic noise bank: M uniform-cube draws minus their cross-worker mean,
/// so the columns sum to zero up to rounding.
inline NoiseBank rnc_noise(std::size_t workers, std::size_t dim, Rng& rng) {
  if (workers < 2) {
    throw std::invalid_argument("rnc_noise: need at least 2 workers");
  }
  NoiseBank bank;
  bank.columns.reserve(workers);
  for (std::size_t i = 0; i < workers; ++i) {
    bank.columns.push_back(uniform_noise(dim, rng));
  }
  std::vector<double> mean(dim, 0.0);
  for (const auto& col : bank.columns) {
    axpy(1.0, col, mean);
  }
  scale(mean, 1.0 / static_cast<double>(workers));
  for (auto& col : bank.columns) {
    axpy(-1.0, mean, col);
  }
  bank.centered = true;
  return bank;
}

inline std::vector<double> column_sum(const NoiseBank& bank) {
  std::vector<double> s(bank.dim(), 0.0);
  for (const auto& col : bank.columns) {
    axpy(1.0, col, s);
  }
  return s;
}

inline double max_column_norm(const NoiseBank& bank) {
  double m = 0.0;
  for (const auto& col : bank.columns) {
    m = std::max(m, norm(col));
  }
  return m;
}

/// Eigenvalues of the M x M Gram matrix (1/M) Omega^T Omega, ascending.
/// By Gram duality these are the M largest eigenvalues of the sample
/// covariance (1/M) Omega Omega^T, at a cost independent of the parameter
/// dimension.
inline EigenResult gram_eigenvalues(const NoiseBank& bank) {
  const std::size_t m = bank.workers();
  if (m < 2) {
    throw std::invalid_argument("gram_eigenvalues: need at least 2 columns");
  }
  const std::size_t dim = bank.dim();
  for (const auto& col : bank.columns) {
    if (col.size() != dim) {
      throw std::invalid_argument("gram_eigenvalues: ragged noise bank");
    }
  }
  SymMatrix gram(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      const double g = dot(bank.columns[i], bank.columns[j]) /
                       static_cast<double>(m);
      gram.at(i, j) = g;
      gram.at(j, i) = g;
    }
  }
  EigenResult out{jacobi_eigenvalues(std::move(gram))};
  if (out.eigenvalues.front() < -out.psd_slack()) {
    throw NumericalError("gram_eigenvalues: spectrum below PSD slack");
  }
  return out;
}

}  // namespace gncsim
