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
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gncsim/noise.hpp"
#include "gncsim/objective.hpp"
#include "gncsim/sampler.hpp"
#include "gncsim/schedule.hpp"

namespace gncsim {

enum class Method { baseline, gnc, rnc, gnc_to_rnc };
enum class NoiseKind { gnc, rnc };
enum class NoiseScaling { plain, filter_wise };

struct LarsConfig {
  bool enabled = false;
  double tau = 0.001;
};

struct OptimConfig {
  Method method = Method::baseline;
  std::size_t workers = 1;     // M
  std::size_t shard_size = 1;  // b
  double alpha = 0.0;
  double alpha_rnc = 0.0;          // gnc_to_rnc second phase
  std::uint64_t switch_epoch = 0;  // gnc_to_rnc: completed epochs
  double momentum = 0.0;
  double weight_decay = 0.0;
  LarsConfig lars;
  NoiseScaling scaling = NoiseScaling::plain;
  ScheduleSpec schedule;

  void validate(std::uint64_t total_epochs) const {
    if (workers == 0 || shard_size == 0) {
      throw std::invalid_argument("optim: workers and shard_size must be >= 1");
    }
    if (alpha < 0.0 || alpha_rnc < 0.0) {
      throw std::invalid_argument("optim: alpha must be >= 0");
    }
    if (momentum < 0.0 || momentum >= 1.0) {
      throw std::invalid_argument("optim: momentum must lie in [0, 1)");
    }
    if (weight_decay < 0.0) {
      throw std::invalid_argument("optim: weight_decay must be >= 0");
    }
    if (lars.enabled && lars.tau <= 0.0) {
      throw std::invalid_argument("optim: lars tau must be positive");
    }
    if (method == Method::gnc_to_rnc &&
        (switch_epoch == 0 || switch_epoch >= total_epochs)) {
      throw std::invalid_argument(
          "optim: switch_epoch must fall inside the training horizon");
    }
    schedule.validate();
  }
};

/// Everything the step loop carries between iterations. Worker state is
/// stored array-of-vectors: prev_worker_grads[i] is worker i's previous
/// shard gradient g_{t-1}^i.
struct OptimizerState {
  ParamVector x;
  std::vector<double> velocity;
  std::vector<std::vector<double>> prev_worker_grads;
  std::vector<double> prev_merged_grad;
  bool has_prev = false;
  std::uint64_t t = 1;
  std::uint64_t lars_skipped_total = 0;

  static OptimizerState init(const Objective& obj, Rng& init_rng,
                             std::size_t workers) {
    OptimizerState st;
    st.x = obj.init_params(init_rng);
    st.velocity.assign(st.x.dim(), 0.0);
    st.prev_worker_grads.assign(workers, {});
    st.prev_merged_grad.assign(st.x.dim(), 0.0);
    return st;
  }
};

/// Which noise source a method uses at iteration t (gnc_to_rnc switches once
/// switch_epoch epochs have completed).
inline NoiseKind active_noise_kind(const OptimConfig& cfg, std::uint64_t t) {
  switch (cfg.method) {
    case Method::baseline:
    case Method::gnc:
      return NoiseKind::gnc;
    case Method::rnc:
      return NoiseKind::rnc;
    case Method::gnc_to_rnc: {
      const std::uint64_t epochs_done =
          (t - 1) / cfg.schedule.iterations_per_epoch;
      return epochs_done >= cfg.switch_epoch ? NoiseKind::rnc : NoiseKind::gnc;
    }
  }
  throw std::logic_error("active_noise_kind: unreachable");
}

inline double active_alpha(const OptimConfig& cfg, std::uint64_t t) {
  if (cfg.method == Method::baseline) {
    return 0.0;
  }
  if (cfg.method == Method::gnc_to_rnc &&
      active_noise_kind(cfg, t) == NoiseKind::rnc) {
    return cfg.alpha_rnc;
  }
  return cfg.alpha;
}

/// Gradient noise: w_t^i = g_{t-1}^i - merged_{t-1}. The bank is centered by
/// construction because the merged gradient is the mean of the worker
/// gradients. Before any step has run the bank is all zeros.
inline NoiseBank gnc_noise(const OptimizerState& st) {
  const std::size_t m = st.prev_worker_grads.size();
  if (!st.has_prev) {
    if (st.t > 1) {
      throw std::runtime_error("gnc_noise: previous gradients missing");
    }
    return zero_bank(m, st.x.dim());
  }
  NoiseBank bank;
  bank.columns.reserve(m);
  for (const auto& g : st.prev_worker_grads) {
    if (g.size() != st.prev_merged_grad.size()) {
      throw std::runtime_error("gnc_noise: inconsistent worker state");
    }
    bank.columns.push_back(diff(g, st.prev_merged_grad));
  }
  bank.centered = true;
  return bank;
}

/// x - alpha * lr * (scaled) noise. alpha = 0 is an exact identity. In
/// filter-wise mode the noise on filter p is scaled by |x^(p)|, and for rnc
/// noise additionally normalized to unit length per filter; a zero-noise
/// filter is left untouched.
inline ParamVector perturb(const ParamVector& x, std::span<const double> noise,
                           double alpha, double lr, NoiseScaling scaling,
                           NoiseKind kind) {
  if (noise.size() != x.dim()) {
    throw std::invalid_argument("perturb: dimension mismatch");
  }
  if (alpha == 0.0) {
    return x;
  }
  ParamVector out = x;
  if (scaling == NoiseScaling::plain) {
    axpy(-alpha * lr, noise, out.values);
    return out;
  }
  for (const ParamGroup& g : x.partition->per_filter.groups()) {
    const auto xs = std::span<const double>(x.values).subspan(g.begin, g.size());
    const auto ns = noise.subspan(g.begin, g.size());
    double c = alpha * lr * norm(xs);
    if (kind == NoiseKind::rnc) {
      const double nn = norm(ns);
      if (nn == 0.0) {
        continue;
      }
      c /= nn;
    }
    axpy(-c, ns, std::span<double>(out.values).subspan(g.begin, g.size()));
  }
  return out;
}

struct MergedGrad {
  std::vector<double> merged;                  // fixed-order mean
  std::vector<std::vector<double>> per_worker; // g_t^i
};

/// Per-worker shard gradients at the (possibly perturbed) evaluation points,
/// merged in fixed worker order.
inline MergedGrad merged_grad(const Objective& obj, const Dataset& data,
                              std::span<const Batch> shards,
                              std::span<const ParamVector> points) {
  if (shards.empty() || shards.size() != points.size()) {
    throw std::invalid_argument("merged_grad: shards/points mismatch");
  }
  MergedGrad out;
  out.per_worker.reserve(shards.size());
  for (std::size_t i = 0; i < shards.size(); ++i) {
    out.per_worker.push_back(obj.grad(data, shards[i], points[i]));
  }
  out.merged.assign(out.per_worker.front().size(), 0.0);
  for (const auto& g : out.per_worker) {
    axpy(1.0, g, out.merged);
  }
  scale(out.merged, 1.0 / static_cast<double>(shards.size()));
  return out;
}

/// LARS local rate for one layer group.
inline double lars_local_lr(double global_lr, double tau, double x_norm,
                            double grad_norm, double weight_decay) {
  return global_lr * tau * x_norm / (grad_norm + weight_decay * x_norm);
}

struct UpdateStats {
  std::size_t lars_skipped = 0;
};

/// Momentum update v = m v - eta (g + wd * x); x += v. Weight decay enters
/// as an additive term on the merged data gradient. With LARS enabled the
/// step rate is computed per layer group from the data-gradient and weight
/// norms; a group whose denominator vanishes is skipped whole.
inline UpdateStats apply_update(OptimizerState& st,
                                std::span<const double> merged,
                                const OptimConfig& cfg, double lr) {
  if (merged.size() != st.x.dim()) {
    throw std::invalid_argument("apply_update: dimension mismatch");
  }
  auto& x = st.x.values;
  auto& v = st.velocity;
  UpdateStats stats;
  if (!cfg.lars.enabled) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double g = merged[j] + cfg.weight_decay * x[j];
      v[j] = cfg.momentum * v[j] - lr * g;
      x[j] += v[j];
    }
    return stats;
  }
  for (const ParamGroup& grp : st.x.partition->per_layer.groups()) {
    const auto xs = std::span<const double>(x).subspan(grp.begin, grp.size());
    const auto gs = merged.subspan(grp.begin, grp.size());
    const double xn = norm(xs);
    const double gn = norm(gs);
    const double denom = gn + cfg.weight_decay * xn;
    if (denom == 0.0) {
      ++stats.lars_skipped;
      continue;
    }
    const double local = lars_local_lr(lr, cfg.lars.tau, xn, gn,
                                       cfg.weight_decay);
    for (std::size_t j = grp.begin; j < grp.end; ++j) {
      const double g = merged[j] + cfg.weight_decay * x[j];
      v[j] = cfg.momentum * v[j] - local * g;
      x[j] += v[j];
    }
  }
  st.lars_skipped_total += stats.lars_skipped;
  return stats;
}

/// Read-only record of what one step did, for diagnostics and logging.
struct StepSnapshot {
  std::uint64_t t = 0;
  double lr = 0.0;
  double alpha = 0.0;
  NoiseKind kind = NoiseKind::gnc;
  bool perturbed = false;  // false for baseline steps
  ParamVector x_before;
  NoiseBank bank;  // empty for baseline
  std::vector<ParamVector> points;
  MergedGrad grads;
  UpdateStats update;
};

/// One full iteration: build the noise bank for the active method, evaluate
/// every worker's shard gradient at its perturbed point, merge in fixed
/// order, stash the per-worker gradients for the next iteration's noise, and
/// apply the momentum update. Baseline steps skip perturbation entirely; for
/// every method the first iteration runs with zero noise.
inline StepSnapshot step(OptimizerState& st, const OptimConfig& cfg,
                         const Objective& obj, const Dataset& data,
                         const StepShards& shards, Rng& rnc_rng) {
  if (shards.shards.size() != cfg.workers) {
    throw std::invalid_argument("step: shard count != worker count");
  }
  StepSnapshot snap;
  snap.t = st.t;
  snap.lr = lr_at(cfg.schedule, st.t);
  snap.x_before = st.x;

  if (cfg.method == Method::baseline) {
    snap.alpha = 0.0;
    snap.points.assign(cfg.workers, st.x);
  } else {
    snap.kind = active_noise_kind(cfg, st.t);
    snap.alpha = active_alpha(cfg, st.t);
    if (snap.kind == NoiseKind::gnc || st.t == 1) {
      snap.bank = gnc_noise(st);
    } else {
      snap.bank = rnc_noise(cfg.workers, st.x.dim(), rnc_rng);
    }
    snap.perturbed = snap.alpha != 0.0;
    snap.points.reserve(cfg.workers);
    for (std::size_t i = 0; i < cfg.workers; ++i) {
      snap.points.push_back(perturb(st.x, snap.bank.columns[i], snap.alpha,
                                    snap.lr, cfg.scaling, snap.kind));
    }
  }

  snap.grads = merged_grad(obj, data, shards.shards, snap.points);

  st.prev_worker_grads = snap.grads.per_worker;
  st.prev_merged_grad = snap.grads.merged;
  st.has_prev = true;

  snap.update = apply_update(st, snap.grads.merged, cfg, snap.lr);
  st.t += 1;
  return snap;
}

}  // namespace gncsim
