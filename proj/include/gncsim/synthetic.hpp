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

#include <stdexcept>
#include <utility>
#include <vector>

#include "gncsim/dataset.hpp"
#include "gncsim/rng.hpp"
#include "gncsim/softmax_models.hpp"
#include "gncsim/vec.hpp"

namespace gncsim {

/// Gaussian class blobs for the classifier families. Class centers are
/// `separation` apart from the origin along random unit directions; labels
/// cycle 0..C-1 so every class has (almost) equal support. Rows are laid out
/// [features..., label]. All randomness comes from the supplied stream, so a
/// train set followed by an eval set from the same Rng is reproducible as a
/// pair.
namespace detail {

inline std::vector<double> draw_blob_centers(const ClassifierShape& shape,
                                             double separation, Rng& rng) {
  const std::size_t d = shape.features;
  std::vector<double> centers(shape.classes * d);
  for (std::size_t c = 0; c < shape.classes; ++c) {
    const std::span<double> center =
        std::span<double>(centers).subspan(c * d, d);
    for (double& x : center) {
      x = rng.gaussian();
    }
    const double nrm = norm(center);
    if (nrm > 0.0) {
      scale(center, separation / nrm);
    }
  }
  return centers;
}

inline Dataset fill_blob_rows(const ClassifierShape& shape, std::size_t n,
                              const std::vector<double>& centers, double sigma,
                              Rng& rng) {
  const std::size_t d = shape.features;
  Dataset ds;
  ds.n = n;
  ds.width = d + 1;
  ds.values.resize(n * ds.width);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t label = i % shape.classes;
    double* row = ds.values.data() + i * ds.width;
    for (std::size_t j = 0; j < d; ++j) {
      row[j] = centers[label * d + j] + sigma * rng.gaussian();
    }
    row[d] = static_cast<double>(label);
  }
  return ds;
}

}  // namespace detail

inline Dataset make_blob_dataset(const ClassifierShape& shape, std::size_t n,
                                 double separation, double sigma, Rng& rng) {
  if (n == 0) {
    throw std::invalid_argument("make_blob_dataset: n must be positive");
  }
  const auto centers = detail::draw_blob_centers(shape, separation, rng);
  return detail::fill_blob_rows(shape, n, centers, sigma, rng);
}

/// Train/eval pair over the same class centers, drawn from one stream.
inline std::pair<Dataset, Dataset> make_blob_datasets(
    const ClassifierShape& shape, std::size_t n_train, std::size_t n_eval,
    double separation, double sigma, Rng& rng) {
  if (n_train == 0) {
    throw std::invalid_argument("make_blob_datasets: n_train must be positive");
  }
  const auto centers = detail::draw_blob_centers(shape, separation, rng);
  Dataset train = detail::fill_blob_rows(shape, n_train, centers, sigma, rng);
  Dataset eval;
  if (n_eval > 0) {
    eval = detail::fill_blob_rows(shape, n_eval, centers, sigma, rng);
  }
  return {std::move(train), std::move(eval)};
}

}  // namespace gncsim
