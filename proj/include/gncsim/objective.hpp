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
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gncsim/dataset.hpp"
#include "gncsim/param.hpp"
#include "gncsim/rng.hpp"

namespace gncsim {

/// A differentiable objective with an analytic gradient. Implementations are
/// immutable after construction; loss/grad are pure and safe to call
/// concurrently. Batch losses and gradients are averages of per-example
/// terms, accumulated in fixed index order.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::string_view family() const = 0;
  virtual std::size_t param_dim() const = 0;
  virtual std::shared_ptr<const PartitionSet> partition() const = 0;

  /// Mean per-example loss over the batch.
  virtual double loss(const Dataset& data, const Batch& batch,
                      const ParamVector& x) const = 0;

  /// Mean per-example gradient over the batch.
  virtual std::vector<double> grad(const Dataset& data, const Batch& batch,
                                   const ParamVector& x) const = 0;

  virtual ParamVector init_params(Rng& rng) const = 0;

  /// Classification accuracy over a dataset; families without a notion of
  /// accuracy return nullopt.
  virtual std::optional<double> accuracy(const Dataset&,
                                         const ParamVector&) const {
    return std::nullopt;
  }

 protected:
  void check_batch(const Dataset& data, const Batch& batch,
                   const ParamVector& x) const {
    if (batch.indices.empty()) {
      throw std::invalid_argument("objective: empty batch");
    }
    for (const std::size_t i : batch.indices) {
      if (i >= data.n) {
        throw std::invalid_argument("objective: batch index out of range");
      }
    }
    if (x.dim() != param_dim()) {
      throw std::invalid_argument("objective: parameter dimension mismatch");
    }
  }
};

inline double full_loss(const Objective& obj, const Dataset& data,
                        const ParamVector& x) {
  return obj.loss(data, full_batch(data), x);
}

inline std::vector<double> full_grad(const Objective& obj, const Dataset& data,
                                     const ParamVector& x) {
  return obj.grad(data, full_batch(data), x);
}

}  // namespace gncsim
