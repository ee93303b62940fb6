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

#include <algorithm>
#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gncsim/optimizer.hpp"

namespace gncsim {

// All observers in this file are pure: they never touch optimizer state, so
// running them cannot change a trajectory.

/// Percentile by linear interpolation on the order statistics, p in [0, 100].
inline double percentile(std::span<const double> sorted_ascending, double p) {
  if (sorted_ascending.empty()) {
    throw std::invalid_argument("percentile: empty sample");
  }
  if (p < 0.0 || p > 100.0) {
    throw std::invalid_argument("percentile: p outside [0, 100]");
  }
  const double rank =
      p / 100.0 * static_cast<double>(sorted_ascending.size() - 1);
  const auto lo = static_cast<std::size_t>(rank);
  if (lo + 1 >= sorted_ascending.size()) {
    return sorted_ascending.back();
  }
  const double frac = rank - static_cast<double>(lo);
  return sorted_ascending[lo] * (1.0 - frac) + sorted_ascending[lo + 1] * frac;
}

struct AnisotropyGroup {
  std::string name;
  std::optional<double> kappa;       // missing when the spectrum degenerates
  std::vector<double> percentiles;   // of the group's noise spectrum
};

struct AnisotropyReport {
  std::vector<AnisotropyGroup> groups;
};

/// Per-group noise anisotropy: restrict the bank's rows to each group,
/// take the Gram spectrum, and report the condition number plus the
/// requested eigenvalue percentiles.
inline AnisotropyReport anisotropy(const NoiseBank& bank,
                                   const FilterPartition& partition,
                                   std::span<const double> pcts) {
  if (!bank.centered) {
    throw std::invalid_argument("anisotropy: bank must be centered");
  }
  if (bank.workers() < 3) {
    throw std::invalid_argument("anisotropy: need at least 3 workers");
  }
  if (bank.dim() != partition.dim()) {
    throw std::invalid_argument("anisotropy: partition does not fit bank");
  }
  AnisotropyReport report;
  NoiseBank sub;
  sub.centered = true;
  sub.columns.resize(bank.workers());
  for (const ParamGroup& g : partition.groups()) {
    for (std::size_t i = 0; i < bank.workers(); ++i) {
      const auto col = std::span<const double>(bank.columns[i])
                           .subspan(g.begin, g.size());
      sub.columns[i].assign(col.begin(), col.end());
    }
    const EigenResult eigs = gram_eigenvalues(sub);
    AnisotropyGroup out;
    out.name = g.name;
    out.kappa = condition_number(eigs);
    out.percentiles.reserve(pcts.size());
    for (const double p : pcts) {
      out.percentiles.push_back(percentile(eigs.eigenvalues, p));
    }
    report.groups.push_back(std::move(out));
  }
  return report;
}

/// Cosine similarity between the unperturbed full gradient at x and the
/// gradient the method actually used. Vanishing gradients are reported as
/// missing rather than as an error.
inline std::optional<double> fg_similarity(const Objective& obj,
                                           const Dataset& data,
                                           const ParamVector& x,
                                           std::span<const double> g_used) {
  const std::vector<double> fg = full_grad(obj, data, x);
  if (norm(fg) == 0.0 || norm(g_used) == 0.0) {
    return std::nullopt;
  }
  return cosine_similarity(fg, g_used);
}

struct WorkerSpread {
  double center_loss = 0.0;           // loss(d_t, x_t)
  std::vector<double> worker_losses;  // loss(d_t^i, x_t^i)

  double min() const {
    return *std::min_element(worker_losses.begin(), worker_losses.end());
  }
  double max() const {
    return *std::max_element(worker_losses.begin(), worker_losses.end());
  }
};

inline WorkerSpread worker_spread(const Objective& obj, const Dataset& data,
                                  const StepShards& shards,
                                  const ParamVector& x,
                                  std::span<const ParamVector> points) {
  if (points.size() != shards.shards.size()) {
    throw std::invalid_argument("worker_spread: points/shards mismatch");
  }
  WorkerSpread spread;
  spread.center_loss = obj.loss(data, shards.merged, x);
  spread.worker_losses.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    spread.worker_losses.push_back(
        obj.loss(data, shards.shards[i], points[i]));
  }
  return spread;
}

/// Noise-convolved evaluation: probe losses and gradients are taken with
/// every worker perturbed by its bank column, mirroring how the noisy
/// methods actually see the objective.
struct ConvolvedEval {
  const NoiseBank* bank = nullptr;
  double alpha = 0.0;
  NoiseScaling scaling = NoiseScaling::plain;
  NoiseKind kind = NoiseKind::gnc;
};

inline constexpr std::size_t kProbeSteps = 8;

/// Loss stability, gradient predictiveness and the local gradient-Lipschitz
/// ratio along the descent direction. Probe points are x - s_k g with the
/// eight step lengths s_k evenly spaced on [lr/2, 2 lr], both endpoints
/// included.
struct SmoothnessProbe {
  std::array<double, kProbeSteps> step_lengths{};
  std::array<double, kProbeSteps> losses{};
  std::array<double, kProbeSteps> grad_distances{};
  double beta = 0.0;

  double loss_range() const {
    const auto [lo, hi] = std::minmax_element(losses.begin(), losses.end());
    return *hi - *lo;
  }
  double grad_distance_range() const {
    const auto [lo, hi] =
        std::minmax_element(grad_distances.begin(), grad_distances.end());
    return *hi - *lo;
  }
};

inline SmoothnessProbe smoothness_probe(const Objective& obj,
                                        const Dataset& data,
                                        const StepShards& shards,
                                        const ParamVector& x,
                                        std::span<const double> direction,
                                        double lr,
                                        const ConvolvedEval* convolved =
                                            nullptr) {
  const double dir_norm = norm(direction);
  if (dir_norm == 0.0) {
    throw std::invalid_argument("smoothness_probe: zero direction");
  }
  if (direction.size() != x.dim()) {
    throw std::invalid_argument("smoothness_probe: dimension mismatch");
  }

  const auto evaluate = [&](const ParamVector& p) {
    struct Eval {
      double loss;
      std::vector<double> grad;
    };
    if (convolved == nullptr) {
      return Eval{obj.loss(data, shards.merged, p),
                  obj.grad(data, shards.merged, p)};
    }
    const NoiseBank& bank = *convolved->bank;
    std::vector<ParamVector> points;
    points.reserve(bank.workers());
    for (std::size_t i = 0; i < bank.workers(); ++i) {
      points.push_back(perturb(p, bank.columns[i], convolved->alpha, lr,
                               convolved->scaling, convolved->kind));
    }
    double loss_acc = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      loss_acc += obj.loss(data, shards.shards[i], points[i]);
    }
    MergedGrad mg = merged_grad(obj, data, shards.shards, points);
    return Eval{loss_acc / static_cast<double>(points.size()),
                std::move(mg.merged)};
  };

  const auto base = evaluate(x);

  SmoothnessProbe probe;
  double beta = 0.0;
  for (std::size_t k = 0; k < kProbeSteps; ++k) {
    const double multiplier =
        0.5 + static_cast<double>(k) * (1.5 / (kProbeSteps - 1));
    const double s = lr * multiplier;
    ParamVector moved = x;
    axpy(-s, direction, moved.values);
    const auto at = evaluate(moved);
    probe.step_lengths[k] = s;
    probe.losses[k] = at.loss;
    probe.grad_distances[k] = distance(base.grad, at.grad);
    // probe offsets are exact elementwise s * direction
    beta = std::max(beta, probe.grad_distances[k] / (s * dir_norm));
  }
  probe.beta = beta;
  return probe;
}

}  // namespace gncsim
