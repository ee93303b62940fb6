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
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gncsim/eigen.hpp"
#include "gncsim/objective.hpp"
#include "gncsim/vec.hpp"

namespace gncsim {

/// Curvature and data distribution of the quadratic ensemble
/// f(z; x) = 1/2 (x - z)^T A (x - z) with z ~ N(mean, sigma^2 I).
/// A is stored as eigenvalues plus an optional orthonormal eigenbasis
/// (absent basis means A is diagonal in the coordinate axes).
struct QuadraticSpec {
  std::size_t dim = 0;
  std::vector<double> eigenvalues;  // of A, all >= 0, ascending not required
  bool rotate = false;              // draw a random eigenbasis
  std::uint64_t basis_seed = 0;
  double data_mean = 0.0;
  double data_sigma = 1.0;

  /// Geometric spectrum spanning [lambda_max / cond, lambda_max].
  static QuadraticSpec conditioned(std::size_t dim, double cond,
                                   double lambda_max = 1.0) {
    if (dim == 0 || cond < 1.0 || lambda_max <= 0.0) {
      throw std::invalid_argument("QuadraticSpec: bad conditioning request");
    }
    QuadraticSpec spec;
    spec.dim = dim;
    spec.eigenvalues.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      const double f =
          dim == 1 ? 1.0
                   : static_cast<double>(i) / static_cast<double>(dim - 1);
      spec.eigenvalues[i] = lambda_max * std::pow(1.0 / cond, 1.0 - f);
    }
    return spec;
  }

  /// A few sharp directions over a flat bulk: `spikes` eigenvalues at
  /// lambda_max, the rest at lambda_max / cond.
  static QuadraticSpec spiked(std::size_t dim, double cond,
                              std::size_t spikes, double lambda_max = 1.0) {
    if (dim == 0 || cond < 1.0 || lambda_max <= 0.0 || spikes == 0 ||
        spikes > dim) {
      throw std::invalid_argument("QuadraticSpec: bad spike request");
    }
    QuadraticSpec spec;
    spec.dim = dim;
    spec.eigenvalues.assign(dim, lambda_max / cond);
    for (std::size_t i = dim - spikes; i < dim; ++i) {
      spec.eigenvalues[i] = lambda_max;
    }
    return spec;
  }
};

class QuadraticEnsemble final : public Objective {
 public:
  explicit QuadraticEnsemble(QuadraticSpec spec)
      : spec_(std::move(spec)),
        partition_(std::make_shared<PartitionSet>(
            PartitionSet::trivial(spec_.dim))) {
    if (spec_.dim == 0 || spec_.eigenvalues.size() != spec_.dim) {
      throw std::invalid_argument("QuadraticEnsemble: bad spectrum size");
    }
    for (const double l : spec_.eigenvalues) {
      if (!(l >= 0.0)) {
        throw std::invalid_argument("QuadraticEnsemble: A must be PSD");
      }
    }
    if (spec_.rotate) {
      basis_ = random_orthonormal(spec_.dim, spec_.basis_seed);
    }
  }

  std::string_view family() const override { return "quadratic"; }
  std::size_t param_dim() const override { return spec_.dim; }
  std::shared_ptr<const PartitionSet> partition() const override {
    return partition_;
  }
  const QuadraticSpec& spec() const { return spec_; }

  /// A v, via the eigenbasis when one is attached.
  std::vector<double> apply_a(std::span<const double> v) const {
    if (v.size() != spec_.dim) {
      throw std::invalid_argument("apply_a: dimension mismatch");
    }
    if (basis_.empty()) {
      std::vector<double> out(spec_.dim);
      for (std::size_t i = 0; i < spec_.dim; ++i) {
        out[i] = spec_.eigenvalues[i] * v[i];
      }
      return out;
    }
    std::vector<double> w(spec_.dim);
    for (std::size_t i = 0; i < spec_.dim; ++i) {  // w = Q^T v
      w[i] = dot(basis_column(i), v);
    }
    std::vector<double> out(spec_.dim, 0.0);
    for (std::size_t i = 0; i < spec_.dim; ++i) {  // out = Q (lambda w)
      axpy(spec_.eigenvalues[i] * w[i], basis_column(i), out);
    }
    return out;
  }

  /// 1/2 u^T A u
  double quad_form(std::span<const double> u) const {
    if (basis_.empty()) {
      double acc = 0.0;
      for (std::size_t i = 0; i < spec_.dim; ++i) {
        acc += spec_.eigenvalues[i] * u[i] * u[i];
      }
      return 0.5 * acc;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < spec_.dim; ++i) {
      const double w = dot(basis_column(i), u);
      acc += spec_.eigenvalues[i] * w * w;
    }
    return 0.5 * acc;
  }

  double lambda_max() const {
    double m = 0.0;
    for (const double l : spec_.eigenvalues) {
      m = std::max(m, l);
    }
    return m;
  }

  /// Unit eigenvector for the largest eigenvalue.
  std::vector<double> top_eigenvector() const {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < spec_.dim; ++i) {
      if (spec_.eigenvalues[i] > spec_.eigenvalues[arg]) {
        arg = i;
      }
    }
    if (basis_.empty()) {
      std::vector<double> e(spec_.dim, 0.0);
      e[arg] = 1.0;
      return e;
    }
    const auto col = basis_column(arg);
    return {col.begin(), col.end()};
  }

  double loss(const Dataset& data, const Batch& batch,
              const ParamVector& x) const override {
    check_batch(data, batch, x);
    check_rows(data);
    double acc = 0.0;
    std::vector<double> u(spec_.dim);
    for (const std::size_t idx : batch.indices) {
      const auto z = data.row(idx);
      for (std::size_t i = 0; i < spec_.dim; ++i) {
        u[i] = x.values[i] - z[i];
      }
      acc += quad_form(u);
    }
    return acc / static_cast<double>(batch.indices.size());
  }

  // The batch gradient collapses to one operator application,
  // A (x - mean z); tests cross-check against per-example accumulation.
  std::vector<double> grad(const Dataset& data, const Batch& batch,
                           const ParamVector& x) const override {
    check_batch(data, batch, x);
    check_rows(data);
    std::vector<double> centered(x.values);
    std::vector<double> zbar(spec_.dim, 0.0);
    for (const std::size_t idx : batch.indices) {
      axpy(1.0, data.row(idx), zbar);
    }
    axpy(-1.0 / static_cast<double>(batch.indices.size()), zbar, centered);
    return apply_a(centered);
  }

  ParamVector init_params(Rng& rng) const override {
    std::vector<double> v(spec_.dim);
    for (double& x : v) {
      x = 2.0 * rng.uniform() - 1.0;
    }
    return ParamVector(std::move(v), partition_);
  }

 private:
  std::span<const double> basis_column(std::size_t i) const {
    return std::span<const double>(basis_).subspan(i * spec_.dim, spec_.dim);
  }

  void check_rows(const Dataset& data) const {
    if (data.width != spec_.dim) {
      throw std::invalid_argument("QuadraticEnsemble: row width != dim");
    }
  }

  /// Orthonormal basis from Gram-Schmidt on a Gaussian matrix; the second
  /// orthogonalization pass brings the loss of orthogonality down to
  /// rounding level.
  static std::vector<double> random_orthonormal(std::size_t n,
                                                std::uint64_t seed) {
    Rng rng(seed, 0xba515);
    std::vector<double> q(n * n);
    for (double& x : q) {
      x = rng.gaussian();
    }
    auto col = [&](std::size_t i) {
      return std::span<double>(q).subspan(i * n, n);
    };
    for (std::size_t i = 0; i < n; ++i) {
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < i; ++j) {
          axpy(-dot(col(i), col(j)), col(j), col(i));
        }
      }
      const double nrm = norm(col(i));
      if (nrm < 1e-8) {
        throw NumericalError("random_orthonormal: rank deficiency");
      }
      scale(col(i), 1.0 / nrm);
    }
    return q;
  }

  QuadraticSpec spec_;
  std::shared_ptr<const PartitionSet> partition_;
  std::vector<double> basis_;  // column i at [i*dim, (i+1)*dim)
};

/// Draws n examples z ~ N(mean, sigma^2 I) for the quadratic family.
inline Dataset make_quadratic_dataset(const QuadraticSpec& spec, std::size_t n,
                                      Rng& rng) {
  if (n == 0) {
    throw std::invalid_argument("make_quadratic_dataset: n must be positive");
  }
  Dataset ds;
  ds.n = n;
  ds.width = spec.dim;
  ds.values.resize(n * spec.dim);
  for (double& v : ds.values) {
    v = spec.data_mean + spec.data_sigma * rng.gaussian();
  }
  return ds;
}

}  // namespace gncsim
