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
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gncsim {

enum class DecayRule { none, step, polynomial };

/// Learning-rate schedule: optional linear warmup, then a decay rule.
///
/// Conventions, pinned for reproducibility:
///  - iterations t are 1-based;
///  - warmup interpolates per iteration from start_lr at t = 1 to base_lr at
///    the last warmup iteration;
///  - "at epoch E" means once E epochs have completed, i.e. from the first
///    iteration of epoch E+1 on (milestones, final collapse and the
///    gnc-to-rnc switch all share this reading);
///  - the polynomial rule is base_lr * (1 - t/T)^power with T and t counted
///    in iterations, t global (warmup iterations included).
struct ScheduleSpec {
  double base_lr = 0.1;
  std::uint64_t warmup_epochs = 0;
  double warmup_start_lr = 0.0;
  DecayRule decay = DecayRule::none;
  std::vector<std::uint64_t> milestones;  // epochs, strictly increasing
  double decay_factor = 0.1;
  std::uint64_t poly_total = 0;  // T, iterations
  double poly_power = 2.0;
  std::uint64_t collapse_epoch = 0;  // 0 = off; polynomial only
  double collapse_divisor = 1.0;
  std::uint64_t iterations_per_epoch = 1;

  void validate() const {
    if (base_lr <= 0.0) {
      throw std::invalid_argument("schedule: base_lr must be positive");
    }
    if (iterations_per_epoch == 0) {
      throw std::invalid_argument(
          "schedule: iterations_per_epoch must be positive");
    }
    if (warmup_epochs > 0 &&
        (warmup_start_lr <= 0.0 || warmup_start_lr > base_lr)) {
      throw std::invalid_argument(
          "schedule: warmup start lr must lie in (0, base_lr]");
    }
    if (decay == DecayRule::step) {
      if (decay_factor <= 0.0 || decay_factor > 1.0) {
        throw std::invalid_argument("schedule: decay_factor must be in (0, 1]");
      }
      for (std::size_t i = 1; i < milestones.size(); ++i) {
        if (milestones[i] <= milestones[i - 1]) {
          throw std::invalid_argument(
              "schedule: milestones must be strictly increasing");
        }
      }
    }
    if (decay == DecayRule::polynomial) {
      if (poly_total == 0) {
        throw std::invalid_argument("schedule: polynomial decay needs T >= 1");
      }
      if (poly_power < 0.0) {
        throw std::invalid_argument("schedule: poly_power must be >= 0");
      }
      if (collapse_epoch > 0 && collapse_divisor < 1.0) {
        throw std::invalid_argument(
            "schedule: collapse_divisor must be >= 1");
      }
    }
  }
};

inline double lr_at(const ScheduleSpec& s, std::uint64_t t) {
  if (t == 0) {
    throw std::invalid_argument("lr_at: iterations are 1-based");
  }
  const std::uint64_t warm = s.warmup_epochs * s.iterations_per_epoch;
  if (t <= warm) {
    if (warm == 1) {
      return s.base_lr;
    }
    const double f = static_cast<double>(t - 1) / static_cast<double>(warm - 1);
    return s.warmup_start_lr + (s.base_lr - s.warmup_start_lr) * f;
  }

  const std::uint64_t epochs_done = (t - 1) / s.iterations_per_epoch;
  switch (s.decay) {
    case DecayRule::none:
      return s.base_lr;
    case DecayRule::step: {
      double lr = s.base_lr;
      for (const std::uint64_t m : s.milestones) {
        if (epochs_done >= m) {
          lr *= s.decay_factor;
        }
      }
      return lr;
    }
    case DecayRule::polynomial: {
      const double frac =
          static_cast<double>(t) / static_cast<double>(s.poly_total);
      const double u = frac >= 1.0 ? 0.0 : 1.0 - frac;
      double lr = s.base_lr * std::pow(u, s.poly_power);
      if (s.collapse_epoch > 0 && epochs_done >= s.collapse_epoch) {
        lr /= s.collapse_divisor;
      }
      return lr;
    }
  }
  throw std::logic_error("lr_at: unreachable");
}

}  // namespace gncsim
