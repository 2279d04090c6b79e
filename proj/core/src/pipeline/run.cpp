// Copyright 2026 The featfuse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <chrono>
#include <future>
#include <numeric>

#include "featfuse/pipeline.hpp"

namespace featfuse {
namespace {

class StageClock {
 public:
  explicit StageClock(RunManifest& manifest) : manifest_(manifest) {}

  template <typename Fn>
  auto run(const std::string& stage, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<decltype(fn())>) {
        fn();
        record(stage, start);
      } else {
        auto result = fn();
        record(stage, start);
        return result;
      }
    } catch (const Error& e) {
      throw Error(e.kind(), "[" + stage + "] " + e.what());
    }
  }

 private:
  void record(const std::string& stage, std::chrono::steady_clock::time_point start) {
    const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start;
    manifest_.timings.push_back({stage, d.count()});
  }

  RunManifest& manifest_;
};

struct Prepared {
  Dataset train;
  Dataset test;
  ScalerParams scaler;
};

Prepared prepare_data(const PipelineConfig& cfg, nlohmann::json& summary) {
  const FeatureSchema schema = cfg.dataset.resolve_schema();
  Dataset raw = cfg.dataset.kind == DatasetSource::Kind::kCsv
                    ? load_csv(cfg.dataset.path, schema)
                    : generate_sensor_dataset(cfg.dataset.generator);
  summary["raw_rows"] = raw.size();
  Dataset cleaned = map_labels(clean(raw), cfg.mode);
  summary["clean_rows"] = cleaned.size();
  const std::uint64_t balance_seed = derive_seed(cfg.seed, {fnv1a64("balance")});
  const SamplerConfig sampler{derive_seed(cfg.seed, {fnv1a64("split")}), cfg.train_fraction};

  Prepared out;
  if (cfg.balance_before_split) {
    if (cfg.balance) cleaned = undersample(cleaned, balance_seed);
    SplitResult split = split_and_scale(cleaned, sampler);
    out = {std::move(split.train), std::move(split.test), std::move(split.scaler)};
  } else {
    auto [train, test] = stratified_split(cleaned, sampler);
    if (cfg.balance) train = undersample(train, balance_seed);
    out.scaler = fit_scaler(train.rows);
    train.rows = apply_scaler(train.rows, out.scaler);
    test.rows = apply_scaler(test.rows, out.scaler);
    out.train = std::move(train);
    out.test = std::move(test);
  }
  auto counts = [](const Dataset& d) {
    nlohmann::json c = nlohmann::json::object();
    for (const auto& [label, n] : d.class_counts) c[std::to_string(label)] = n;
    return c;
  };
  summary["train_rows"] = out.train.size();
  summary["test_rows"] = out.test.size();
  summary["train_class_counts"] = counts(out.train);
  summary["test_class_counts"] = counts(out.test);
  std::vector<std::string> constant;
  for (std::size_t j = 0; j < out.scaler.constant.size(); ++j) {
    if (out.scaler.constant[j]) constant.push_back(out.train.schema.feature_names()[j]);
  }
  summary["constant_features"] = constant;
  return out;
}

// Seeded subsample of row indices, kept in ascending order.
std::vector<std::size_t> subsample(std::size_t n, std::size_t cap, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (n <= cap) return idx;
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(idx));
  idx.resize(cap);
  std::sort(idx.begin(), idx.end());
  return idx;
}

ImportanceVector explain(const TrainedModel& model, ExplainerMethod method, const Dataset& train,
                         const Dataset& explain_set, const ScalerParams& stats,
                         const ExplainerConfig& cfg) {
  switch (method) {
    case ExplainerMethod::kShap: {
      const Matrix background = select_background(train.rows, cfg.background_size, cfg.seed);
      const std::size_t n = std::min(cfg.shap_instances, explain_set.size());
      std::vector<std::size_t> first(n);
      std::iota(first.begin(), first.end(), std::size_t{0});
      return shap_global(shap_values(shap_output(model), explain_set.rows.select_rows(first),
                                     background, cfg.max_exact_features));
    }
    case ExplainerMethod::kLime:
      return lime_global(lime_output(model), explain_set.rows, stats, cfg);
    case ExplainerMethod::kPermutation:
      return permutation_importance(predictor(model), explain_set.rows, explain_set.labels,
                                    cfg.permutation_rounds, cfg.seed);
  }
  throw Error(ErrorKind::kExplanation, "unknown explainer");
}

void run_fixture_only(const PipelineConfig& cfg, StageClock& clock, PipelineArtifacts& art) {
  const Fixtures fx = clock.run("load_fixtures", [&] { return load_fixtures(cfg.fixtures_dir); });
  art.fixture_fusions = clock.run("fuse", [&] { return fuse_fixtures(fx, cfg.fusion); });
  art.conformance = clock.run("conformance", [&] { return conformance_check(art.fixture_fusions, fx); });
  art.reference = fx.reference;
  art.reference_setup = cfg.reference_setup;
  art.top_k = cfg.fusion.top_k;
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg) {
  cfg.validate();
  PipelineResult result;
  RunManifest& manifest = result.manifest;
  manifest.version = std::string(toolkit_version());
  manifest.config_hash = cfg.hash();
  manifest.seed = cfg.seed;
  PipelineArtifacts& art = result.artifacts;
  StageClock clock(manifest);

  if (cfg.fixture_only) {
    run_fixture_only(cfg, clock, art);
    clock.run("emit", [&] { emit_report(manifest, art, cfg.output_dir); });
    return result;
  }

  art.top_k = cfg.fusion.top_k;
  art.reference_setup = cfg.reference_setup;
  const Prepared data = clock.run("prepare", [&] { return prepare_data(cfg, art.dataset_summary); });
  art.feature_names = data.train.schema.feature_names();

  std::vector<TrainedModel> models;
  clock.run("train", [&] {
    for (std::size_t i = 0; i < cfg.models.size(); ++i) {
      const auto& spec = cfg.models[i];
      TrainedModel model = train(spec.hp, data.train, derive_seed(cfg.seed, {fnv1a64("train"), i}));
      const std::vector<int> predicted = model.predict(data.test.rows);
      std::vector<int> roster = model.classes();
      for (int c : data.test.labels) {
        if (std::find(roster.begin(), roster.end(), c) == roster.end()) roster.push_back(c);
      }
      std::sort(roster.begin(), roster.end());
      art.models.push_back({spec.label, family_of(spec.hp), model.warning(),
                            classification_metrics(
                                confusion_matrix(data.test.labels, predicted, roster),
                                cfg.averaging, cfg.positive_class)});
      models.push_back(std::move(model));
    }
  });

  clock.run("explain", [&] {
    const auto rows = subsample(data.test.size(), cfg.max_explained_instances,
                                derive_seed(cfg.seed, {fnv1a64("explain_rows")}));
    const Dataset explain_set = data.test.select(rows);
    // Explanations run on already standardized data; these statistics drive LIME's perturbations.
    const ScalerParams stats = fit_scaler(data.train.rows);
    const std::size_t n_models = models.size();
    const std::size_t n_methods = cfg.explainers.size();
    std::vector<ImportanceVector> grid(n_models * n_methods);
    auto cell = [&](std::size_t i, std::size_t m) {
      ExplainerConfig local = cfg.explainer;
      local.seed = derive_seed(cfg.seed, {fnv1a64("explain"), i, m});
      ImportanceVector iv =
          explain(models[i], cfg.explainers[m], data.train, explain_set, stats, local);
      iv.method = cfg.explainers[m];
      iv.model = cfg.models[i].label;
      return iv;
    };
    if (cfg.parallel) {
      std::vector<std::future<ImportanceVector>> futures;
      for (std::size_t i = 0; i < n_models; ++i) {
        for (std::size_t m = 0; m < n_methods; ++m) {
          futures.push_back(std::async(std::launch::async, cell, i, m));
        }
      }
      for (std::size_t k = 0; k < futures.size(); ++k) grid[k] = futures[k].get();
    } else {
      for (std::size_t i = 0; i < n_models; ++i) {
        for (std::size_t m = 0; m < n_methods; ++m) grid[i * n_methods + m] = cell(i, m);
      }
    }
    for (std::size_t m = 0; m < n_methods; ++m) {
      RankTable table;
      table.features = art.feature_names;
      for (std::size_t i = 0; i < n_models; ++i) {
        const ImportanceVector& iv = grid[i * n_methods + m];
        table.sources.push_back(cfg.models[i].label);
        table.ranks.push_back(to_ranks(iv.scores));
        art.importances.push_back({iv, art.feature_names});
      }
      art.rank_tables.emplace_back(std::string(to_string(cfg.explainers[m])), std::move(table));
    }
  });

  clock.run("fuse", [&] { art.fusion = two_level_fuse(art.rank_tables, cfg.fusion); });

  clock.run("evaluate", [&] {
    std::vector<std::pair<std::string, std::vector<std::string>>> sets;
    for (const auto& [method, fused] : art.fusion->per_method) {
      sets.emplace_back(method, top_k_names(fused, cfg.fusion.top_k));
    }
    sets.emplace_back(std::string(kLeveledColumn), top_k_names(art.fusion->leveled, cfg.fusion.top_k));
    sets.emplace_back("all", art.feature_names);
    for (std::size_t c = 0; c < cfg.independent.size(); ++c) {
      const auto& spec = cfg.independent[c];
      const std::uint64_t seed = derive_seed(cfg.seed, {fnv1a64("independent"), c});
      for (const auto& [name, features] : sets) {
        art.evaluations.push_back({spec.label, name, features,
                                   evaluate_feature_subset(data.train, data.test, features, spec.hp,
                                                           seed, cfg.averaging,
                                                           cfg.positive_class)});
      }
    }
  });

  if (cfg.fixtures_enabled) {
    clock.run("conformance", [&] {
      const Fixtures fx = load_fixtures(cfg.fixtures_dir);
      art.fixture_fusions = fuse_fixtures(fx, cfg.fusion);
      art.conformance = conformance_check(art.fixture_fusions, fx);
      art.reference = fx.reference;
    });
  }

  clock.run("emit", [&] { emit_report(manifest, art, cfg.output_dir); });
  return result;
}

}  // namespace featfuse
