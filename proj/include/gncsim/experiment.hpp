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
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gncsim/checkpoint.hpp"
#include "gncsim/config.hpp"
#include "gncsim/diagnostics.hpp"
#include "gncsim/metrics.hpp"
#include "gncsim/presets.hpp"
#include "gncsim/quadratic.hpp"
#include "gncsim/softmax_models.hpp"
#include "gncsim/synthetic.hpp"

namespace gncsim {

inline constexpr double kDivergenceLossLimit = 1e12;
inline constexpr int kDivergenceStreak = 3;

inline std::unique_ptr<Objective> make_objective(const ExperimentConfig& cfg) {
  const ObjectiveConfig& oc = cfg.objective;
  if (oc.family == "quadratic") {
    QuadraticSpec spec =
        oc.spectrum == "spiked"
            ? QuadraticSpec::spiked(oc.dim, oc.cond, oc.spikes, oc.lambda_max)
            : QuadraticSpec::conditioned(oc.dim, oc.cond, oc.lambda_max);
    spec.rotate = oc.rotate;
    spec.basis_seed = oc.basis_seed;
    spec.data_mean = cfg.dataset.mean;
    spec.data_sigma = cfg.dataset.sigma;
    return std::make_unique<QuadraticEnsemble>(std::move(spec));
  }
  ClassifierShape shape;
  shape.features = oc.features;
  shape.classes = oc.classes;
  if (oc.family == "mlp") {
    shape.hidden = oc.hidden;
  }
  return std::make_unique<SoftmaxClassifier>(std::move(shape));
}

struct RunDatasets {
  Dataset train;
  std::optional<Dataset> eval;
  bool synthesized = false;
};

/// Synthesize (from the pinned dataset stream of the init seed) or load the
/// training data; an eval split, when requested, comes from the same stream
/// so train/eval pairs are reproducible together.
inline RunDatasets build_datasets(const ExperimentConfig& cfg,
                                  const Objective& obj) {
  RunDatasets out;
  if (!cfg.dataset.path.empty()) {
    auto [ds, meta] = load_dataset(cfg.dataset.path);
    if (meta.get("family") != cfg.objective.family) {
      throw ConfigError("dataset: stored family \"" + meta.get("family") +
                        "\" does not match objective.family");
    }
    out.train = std::move(ds);
    if (!cfg.dataset.eval_path.empty()) {
      out.eval = load_dataset(cfg.dataset.eval_path).first;
    }
    return out;
  }

  out.synthesized = true;
  Rng rng(cfg.seeds.init, kStreamDataset);
  if (cfg.objective.family == "quadratic") {
    const auto& quad = dynamic_cast<const QuadraticEnsemble&>(obj);
    out.train = make_quadratic_dataset(quad.spec(), cfg.dataset.n, rng);
    if (cfg.dataset.eval_n > 0) {
      out.eval = make_quadratic_dataset(quad.spec(), cfg.dataset.eval_n, rng);
    }
  } else {
    const auto& cls = dynamic_cast<const SoftmaxClassifier&>(obj);
    const auto [train, eval] =
        make_blob_datasets(cls.shape(), cfg.dataset.n, cfg.dataset.eval_n,
                           cfg.dataset.separation, cfg.dataset.sigma, rng);
    out.train = train;
    if (cfg.dataset.eval_n > 0) {
      out.eval = eval;
    }
  }
  return out;
}

inline DatasetMeta describe_dataset(const ExperimentConfig& cfg) {
  DatasetMeta meta;
  meta.set("family", cfg.objective.family);
  if (cfg.objective.family == "quadratic") {
    meta.set("dim", std::to_string(cfg.objective.dim));
    meta.set("cond", format_real(cfg.objective.cond));
    meta.set("sigma", format_real(cfg.dataset.sigma));
    meta.set("mean", format_real(cfg.dataset.mean));
  } else {
    meta.set("features", std::to_string(cfg.objective.features));
    meta.set("classes", std::to_string(cfg.objective.classes));
    meta.set("separation", format_real(cfg.dataset.separation));
    meta.set("sigma", format_real(cfg.dataset.sigma));
  }
  meta.set("seed_init", std::to_string(cfg.seeds.init));
  return meta;
}

struct RunResult {
  std::filesystem::path out_dir;
  std::filesystem::path metrics_path;
  std::uint64_t digest = 0;        // metrics file content digest
  std::uint64_t param_digest = 0;  // trajectory digest, every iteration
  bool diverged = false;
  std::uint64_t final_t = 0;
  MetricsSchema schema;
  std::vector<MetricsRecord> records;
  double final_train_loss = 0.0;
  std::optional<double> final_eval_loss;
  std::optional<double> final_eval_acc;
};

namespace detail {

struct SchemaLayout {
  MetricsSchema schema;
  std::size_t lr, train_loss, noise_sum, noise_max;
  std::optional<std::size_t> eval_loss, eval_acc, fg_cos;
  std::optional<std::size_t> w_center, w_min, w_max;
  std::size_t kappa_first = 0, kappa_count = 0;
  std::size_t eigp_first = 0, eigp_count = 0;
  std::optional<std::size_t> loss_range, grad_range, beta;
};

inline SchemaLayout build_schema(const ExperimentConfig& cfg,
                                 const Objective& obj, bool has_eval,
                                 std::uint64_t fg_every) {
  SchemaLayout lay;
  auto add = [&lay](const std::string& name) {
    lay.schema.columns.push_back(name);
    return lay.schema.columns.size() - 1;
  };
  lay.lr = add("lr");
  lay.train_loss = add("train_loss");
  lay.noise_sum = add("noise_sum_norm");
  lay.noise_max = add("noise_max_norm");
  if (has_eval) {
    lay.eval_loss = add("eval_loss");
    lay.eval_acc = add("eval_acc");
  }
  if (fg_every > 0) {
    lay.fg_cos = add("fg_cos");
  }
  if (cfg.diag_cadence > 0) {
    lay.w_center = add("wloss_center");
    lay.w_min = add("wloss_min");
    lay.w_max = add("wloss_max");
    const auto& groups = obj.partition()->per_layer.groups();
    lay.kappa_first = lay.schema.columns.size();
    lay.kappa_count = groups.size();
    for (const auto& g : groups) {
      add("kappa." + g.name);
    }
    lay.eigp_first = lay.schema.columns.size();
    lay.eigp_count = cfg.eig_percentiles.size();
    for (const double p : cfg.eig_percentiles) {
      add("eigp" + format_real(p));
    }
  }
  if (cfg.probe_cadence > 0) {
    lay.loss_range = add("loss_range");
    lay.grad_range = add("grad_range");
    lay.beta = add("beta");
  }
  return lay;
}

inline std::vector<double> applied_noise_sum(const StepSnapshot& snap) {
  std::vector<double> sum(snap.x_before.dim(), 0.0);
  for (const auto& p : snap.points) {
    for (std::size_t j = 0; j < sum.size(); ++j) {
      sum[j] += snap.x_before.values[j] - p.values[j];
    }
  }
  return sum;
}

inline double applied_noise_max(const StepSnapshot& snap) {
  double m = 0.0;
  for (const auto& p : snap.points) {
    m = std::max(m, distance(snap.x_before.values, p.values));
  }
  return m;
}

}  // namespace detail

/// One deterministic training run. Writes metrics (+digest), a config
/// snapshot and, for synthetic data, the dataset container into the output
/// directory. Byte-identical outputs for identical configs.
inline RunResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.out_dir.empty()) {
    throw ConfigError("config: run.out is required to run an experiment");
  }
  const std::filesystem::path out(cfg.out_dir);
  std::filesystem::create_directories(out);

  const std::unique_ptr<Objective> obj = make_objective(cfg);
  const RunDatasets data = build_datasets(cfg, *obj);
  const std::size_t n = data.train.n;
  if (cfg.optim.shard_size * cfg.optim.workers > n) {
    throw ConfigError(
        "config: constraint violated: shard_size * workers <= dataset size");
  }

  OptimConfig optim = cfg.optim;
  const BatchSampler sampler(n, optim.shard_size, optim.workers,
                             cfg.seeds.sampler);
  const std::size_t ipe = sampler.iterations_per_epoch();
  optim.schedule.iterations_per_epoch = ipe;
  optim.validate(cfg.epochs);
  const std::uint64_t total = cfg.epochs * ipe;
  const std::uint64_t fg_every =
      cfg.fg_cadence.has_value() ? *cfg.fg_cadence : ipe;

  {
    std::ofstream snap_file(out / "config.snapshot", std::ios::trunc);
    snap_file << cfg.normalized_snapshot;
  }
  if (data.synthesized) {
    save_dataset(out / "dataset.bin", data.train, describe_dataset(cfg));
    if (data.eval.has_value()) {
      save_dataset(out / "dataset_eval.bin", *data.eval,
                   describe_dataset(cfg));
    }
  }

  const detail::SchemaLayout lay =
      detail::build_schema(cfg, *obj, data.eval.has_value(), fg_every);
  MetricsWriter writer(out / "metrics.tsv", lay.schema);

  Rng init_rng(cfg.seeds.init, kStreamParamInit);
  OptimizerState st = OptimizerState::init(*obj, init_rng, optim.workers);

  RunResult result;
  result.out_dir = out;
  result.metrics_path = out / "metrics.tsv";
  result.schema = lay.schema;

  std::uint64_t param_digest = kFnvOffset;
  int bad_streak = 0;
  bool diverged = false;

  std::vector<StepShards> plan;
  for (std::uint64_t t = 1; t <= total && !diverged; ++t) {
    const std::uint64_t epoch = (t - 1) / ipe + 1;
    const std::size_t k = (t - 1) % ipe;
    if (k == 0) {
      plan = sampler.epoch_plan(epoch);
      for (auto& step_shards : plan) {
        step_shards.merged.iteration = 0;  // filled per iteration below
      }
    }
    StepShards& shards = plan[k];
    shards.merged.iteration = t;
    for (auto& shard : shards.shards) {
      shard.iteration = t;
    }

    Rng rnc_rng(cfg.seeds.rnc, t);
    const StepSnapshot snap = step(st, optim, *obj, data.train, shards,
                                   rnc_rng);
    param_digest = fnv1a_doubles(param_digest, st.x.values);

    const bool log_now = t % cfg.log_cadence == 0 || t == total;
    if (log_now) {
      MetricsRecord rec;
      rec.t = t;
      rec.epoch = epoch;
      rec.values.assign(lay.schema.columns.size(), std::nullopt);
      rec.values[lay.lr] = snap.lr;
      const double train_loss =
          obj->loss(data.train, shards.merged, snap.x_before);
      rec.values[lay.train_loss] = train_loss;
      rec.values[lay.noise_sum] = norm(detail::applied_noise_sum(snap));
      rec.values[lay.noise_max] = detail::applied_noise_max(snap);

      if (data.eval.has_value() && (t % ipe == 0 || t == total)) {
        rec.values[*lay.eval_loss] = full_loss(*obj, *data.eval, st.x);
        if (const auto acc = obj->accuracy(*data.eval, st.x)) {
          rec.values[*lay.eval_acc] = *acc;
        }
      }
      if (fg_every > 0 && lay.fg_cos.has_value() && t % fg_every == 0) {
        if (const auto cos = fg_similarity(*obj, data.train, snap.x_before,
                                           snap.grads.merged)) {
          rec.values[*lay.fg_cos] = *cos;
        }
      }
      if (cfg.diag_cadence > 0 && t % cfg.diag_cadence == 0) {
        const WorkerSpread spread = worker_spread(
            *obj, data.train, shards, snap.x_before, snap.points);
        rec.values[*lay.w_center] = spread.center_loss;
        rec.values[*lay.w_min] = spread.min();
        rec.values[*lay.w_max] = spread.max();
        if (!snap.bank.empty() && snap.bank.centered &&
            snap.bank.workers() >= 3) {
          const AnisotropyReport report =
              anisotropy(snap.bank, obj->partition()->per_layer,
                         cfg.eig_percentiles);
          for (std::size_t g = 0; g < report.groups.size(); ++g) {
            rec.values[lay.kappa_first + g] = report.groups[g].kappa;
          }
          // spectrum view over the whole bank
          const EigenResult eigs = gram_eigenvalues(snap.bank);
          for (std::size_t p = 0; p < lay.eigp_count; ++p) {
            rec.values[lay.eigp_first + p] =
                percentile(eigs.eigenvalues, cfg.eig_percentiles[p]);
          }
        }
      }
      if (cfg.probe_cadence > 0 && t % cfg.probe_cadence == 0 &&
          norm(snap.grads.merged) > 0.0) {
        ConvolvedEval conv;
        conv.bank = &snap.bank;
        conv.alpha = snap.alpha;
        conv.scaling = optim.scaling;
        conv.kind = snap.kind;
        const SmoothnessProbe probe = smoothness_probe(
            *obj, data.train, shards, snap.x_before, snap.grads.merged,
            snap.lr, snap.perturbed ? &conv : nullptr);
        rec.values[*lay.loss_range] = probe.loss_range();
        rec.values[*lay.grad_range] = probe.grad_distance_range();
        rec.values[*lay.beta] = probe.beta;
      }

      writer.write(rec);
      result.records.push_back(rec);
      result.final_train_loss = train_loss;

      const bool bad =
          !std::isfinite(train_loss) || train_loss > kDivergenceLossLimit;
      bad_streak = bad ? bad_streak + 1 : 0;
      if (bad_streak >= kDivergenceStreak) {
        diverged = true;
      }
    }

    if (cfg.checkpoint_cadence > 0 && t % cfg.checkpoint_cadence == 0) {
      char name[32];
      std::snprintf(name, sizeof(name), "ckpt_t%06llu.bin",
                    static_cast<unsigned long long>(st.t));
      save_checkpoint(out / name, st);
    }
    result.final_t = t;
  }

  result.diverged = diverged;
  result.param_digest = param_digest;
  result.digest = writer.finish(diverged ? "diverged" : "finished",
                                result.final_t, param_digest);

  if (!result.records.empty() && data.eval.has_value()) {
    const auto& last = result.records.back();
    if (lay.eval_loss.has_value()) {
      result.final_eval_loss = last.values[*lay.eval_loss];
      result.final_eval_acc = last.values[*lay.eval_acc];
    }
  }
  return result;
}

// --- method comparison --------------------------------------------------------

struct ComparisonPlan {
  ExperimentConfig base;
  std::vector<Method> methods;
  std::size_t runs = 1;
  std::size_t seed_set_base = 0;
  std::map<Method, double> alpha_override;
  std::map<Method, double> alpha_rnc_override;
};

struct MethodSummary {
  Method method = Method::baseline;
  std::size_t runs = 0;
  std::size_t diverged = 0;
  std::string metric;  // eval_acc | train_loss
  std::vector<double> finals;
  std::optional<double> mean;
  std::optional<double> stddev;  // sample std, 0 for a single run
};

struct CompareResult {
  std::filesystem::path summary_path;
  std::vector<MethodSummary> rows;
  std::map<std::string, RunResult> cells;  // "<method>/run<k>"
};

/// Runs every (method, seed-set) cell with shared init and sampler seeds
/// inside a replication; rnc noise draws from its own seed stream, so
/// adding rnc to a plan cannot move the baseline or gnc trajectories.
inline CompareResult compare_methods(const ComparisonPlan& plan) {
  if (plan.methods.empty() || plan.runs == 0) {
    throw ConfigError("compare: need at least one method and one run");
  }
  if (plan.base.out_dir.empty()) {
    throw ConfigError("compare: run.out is required");
  }
  const std::filesystem::path out(plan.base.out_dir);
  std::filesystem::create_directories(out);

  CompareResult result;
  for (const Method m : plan.methods) {
    MethodSummary row;
    row.method = m;
    row.runs = plan.runs;
    for (std::size_t r = 0; r < plan.runs; ++r) {
      ExperimentConfig cell = plan.base;
      cell.optim.method = m;
      if (const auto it = plan.alpha_override.find(m);
          it != plan.alpha_override.end()) {
        cell.optim.alpha = it->second;
      }
      if (const auto it = plan.alpha_rnc_override.find(m);
          it != plan.alpha_rnc_override.end()) {
        cell.optim.alpha_rnc = it->second;
      }
      cell.seeds = seed_set(plan.seed_set_base + r);
      const std::string cell_name = ExperimentConfig::method_name(m) +
                                    std::string("/run") + std::to_string(r);
      cell.out_dir = (out / cell_name).string();

      const RunResult res = run_experiment(cell);
      if (res.diverged) {
        ++row.diverged;
      } else {
        if (res.final_eval_acc.has_value()) {
          row.metric = "eval_acc";
          row.finals.push_back(*res.final_eval_acc);
        } else {
          row.metric = "train_loss";
          row.finals.push_back(res.final_train_loss);
        }
      }
      result.cells.emplace(cell_name, res);
    }
    if (!row.finals.empty()) {
      double acc = 0.0;
      for (const double v : row.finals) {
        acc += v;
      }
      const double mean = acc / static_cast<double>(row.finals.size());
      row.mean = mean;
      if (row.finals.size() > 1) {
        double ss = 0.0;
        for (const double v : row.finals) {
          ss += (v - mean) * (v - mean);
        }
        row.stddev =
            std::sqrt(ss / static_cast<double>(row.finals.size() - 1));
      } else {
        row.stddev = 0.0;
      }
    }
    result.rows.push_back(std::move(row));
  }

  // summary table, one row per method: mean +- std of the final metric
  result.summary_path = out / "summary.tsv";
  {
    std::ofstream sum(result.summary_path, std::ios::trunc);
    sum << "method\truns\tdiverged\tmetric\tmean\tstd\tmean_pm_std\tfinals\n";
    for (const MethodSummary& row : result.rows) {
      sum << ExperimentConfig::method_name(row.method) << "\t" << row.runs
          << "\t" << row.diverged << "\t"
          << (row.metric.empty() ? "na" : row.metric) << "\t"
          << format_opt(row.mean) << "\t" << format_opt(row.stddev) << "\t";
      if (row.mean.has_value()) {
        char pm[64];
        std::snprintf(pm, sizeof(pm), "%.4f+-%.4f", *row.mean, *row.stddev);
        sum << pm;
      } else {
        sum << "na";
      }
      sum << "\t";
      for (std::size_t i = 0; i < row.finals.size(); ++i) {
        sum << (i ? "," : "") << format_real(row.finals[i]);
      }
      if (row.finals.empty()) {
        sum << "na";
      }
      sum << "\n";
    }
  }
  // per-cell digests, for seed-isolation checks
  {
    std::ofstream cells(out / "cells.tsv", std::ios::trunc);
    cells << "cell\tstatus\tdigest\tparam_digest\n";
    for (const auto& [name, res] : result.cells) {
      cells << name << "\t" << (res.diverged ? "diverged" : "finished")
            << "\t" << hex64(res.digest) << "\t" << hex64(res.param_digest)
            << "\n";
    }
  }
  return result;
}

// --- checkpoint re-probing -----------------------------------------------------

/// Recomputes the diagnostic suite at a saved trajectory checkpoint: the
/// shards, learning rate and noise bank of iteration t are reconstructed
/// from the config seeds, so the probe sees exactly what the run loop saw.
inline std::filesystem::path probe_checkpoint(
    const ExperimentConfig& cfg, const std::filesystem::path& ckpt_path,
    const std::filesystem::path& out_path) {
  cfg.validate();
  const std::unique_ptr<Objective> obj = make_objective(cfg);
  const RunDatasets data = build_datasets(cfg, *obj);
  OptimizerState st = load_checkpoint(ckpt_path, *obj);

  OptimConfig optim = cfg.optim;
  const BatchSampler sampler(data.train.n, optim.shard_size, optim.workers,
                             cfg.seeds.sampler);
  const std::size_t ipe = sampler.iterations_per_epoch();
  optim.schedule.iterations_per_epoch = ipe;

  const std::uint64_t t = st.t;
  const std::uint64_t epoch = (t - 1) / ipe + 1;
  auto plan = sampler.epoch_plan(epoch);
  const StepShards& shards = plan[(t - 1) % ipe];
  const double lr = lr_at(optim.schedule, t);

  NoiseBank bank;
  double alpha = 0.0;
  NoiseKind kind = NoiseKind::gnc;
  bool perturbed = false;
  if (optim.method != Method::baseline) {
    kind = active_noise_kind(optim, t);
    alpha = active_alpha(optim, t);
    if (kind == NoiseKind::gnc || t == 1) {
      bank = gnc_noise(st);
    } else {
      Rng rnc_rng(cfg.seeds.rnc, t);
      bank = rnc_noise(optim.workers, st.x.dim(), rnc_rng);
    }
    perturbed = alpha != 0.0;
  }
  std::vector<ParamVector> points;
  if (bank.empty()) {
    points.assign(optim.workers, st.x);
  } else {
    for (std::size_t i = 0; i < optim.workers; ++i) {
      points.push_back(
          perturb(st.x, bank.columns[i], alpha, lr, optim.scaling, kind));
    }
  }
  const MergedGrad grads =
      merged_grad(*obj, data.train, shards.shards, points);

  MetricsSchema schema;
  schema.columns = {"lr",       "train_loss", "fg_cos",     "wloss_center",
                    "wloss_min", "wloss_max",  "loss_range", "grad_range",
                    "beta"};
  for (const auto& g : obj->partition()->per_layer.groups()) {
    schema.columns.push_back("kappa." + g.name);
  }
  MetricsWriter writer(out_path, schema);
  MetricsRecord rec;
  rec.t = t;
  rec.epoch = epoch;
  rec.values.assign(schema.columns.size(), std::nullopt);
  rec.values[0] = lr;
  rec.values[1] = obj->loss(data.train, shards.merged, st.x);
  if (const auto cos = fg_similarity(*obj, data.train, st.x, grads.merged)) {
    rec.values[2] = *cos;
  }
  const WorkerSpread spread =
      worker_spread(*obj, data.train, shards, st.x, points);
  rec.values[3] = spread.center_loss;
  rec.values[4] = spread.min();
  rec.values[5] = spread.max();
  if (norm(grads.merged) > 0.0) {
    ConvolvedEval conv;
    conv.bank = &bank;
    conv.alpha = alpha;
    conv.scaling = optim.scaling;
    conv.kind = kind;
    const SmoothnessProbe probe =
        smoothness_probe(*obj, data.train, shards, st.x, grads.merged, lr,
                         perturbed ? &conv : nullptr);
    rec.values[6] = probe.loss_range();
    rec.values[7] = probe.grad_distance_range();
    rec.values[8] = probe.beta;
  }
  if (!bank.empty() && bank.centered && bank.workers() >= 3) {
    const AnisotropyReport report =
        anisotropy(bank, obj->partition()->per_layer, cfg.eig_percentiles);
    for (std::size_t g = 0; g < report.groups.size(); ++g) {
      rec.values[9 + g] = report.groups[g].kappa;
    }
  }
  writer.write(rec);
  writer.finish("finished", t, fnv1a_doubles(kFnvOffset, st.x.values));
  return out_path;
}

}  // namespace gncsim
