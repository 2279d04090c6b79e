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

// featfuse command-line front end.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "featfuse/data.hpp"
#include "featfuse/evaluation.hpp"
#include "featfuse/fusion.hpp"
#include "featfuse/pipeline.hpp"

namespace ff = featfuse;

namespace {

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ff::Error(ff::ErrorKind::kConfig, "cannot open config " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ff::Error(ff::ErrorKind::kConfig, path + " is not valid JSON: " + e.what());
  }
}

std::vector<double> parse_points(const std::string& text) {
  std::vector<double> points;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      points.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ff::Error(ff::ErrorKind::kConfig, "bad points value '" + item + "'");
    }
  }
  return points;
}

ff::FusionSpec fusion_from(const nlohmann::json& doc) {
  ff::FusionSpec spec;
  if (!doc.contains("fusion")) return spec;
  const auto& f = doc.at("fusion");
  spec.mode = ff::parse_fusion_mode(f.value("mode", "weighted_points"));
  spec.points = f.value("points", spec.points);
  spec.top_k = f.value("top_k", spec.top_k);
  return spec;
}

int cmd_generate(const std::optional<std::string>& config, std::optional<std::uint64_t> seed,
                 const std::string& out, std::optional<std::size_t> n,
                 std::optional<double> fraction) {
  ff::SensorGeneratorConfig gen;
  if (config) {
    const auto doc = read_json(*config);
    const auto& d = doc.contains("dataset") ? doc.at("dataset") : doc;
    gen.n = d.value("n", gen.n);
    gen.anomaly_fraction = d.value("anomaly_fraction", gen.anomaly_fraction);
    gen.discriminative = d.value("discriminative", gen.discriminative);
    if (!seed && doc.contains("seed")) seed = doc.at("seed").get<std::uint64_t>();
  }
  if (n) gen.n = *n;
  if (fraction) gen.anomaly_fraction = *fraction;
  if (!seed) throw ff::Error(ff::ErrorKind::kConfig, "a seed is required (--seed or config)");
  gen.seed = *seed;
  const ff::Dataset d = ff::generate_sensor_dataset(gen);
  ff::write_csv(out, d);
  std::cout << "wrote " << d.size() << " rows to " << out << "\n";
  return 0;
}

int cmd_run(const std::string& config, std::optional<std::uint64_t> seed,
            const std::optional<std::string>& out) {
  std::optional<std::filesystem::path> out_dir;
  if (out) out_dir = *out;
  const ff::PipelineConfig cfg = ff::load_config(config, seed, out_dir);
  const ff::PipelineResult result = ff::run_pipeline(cfg);
  for (const auto& t : result.manifest.timings) {
    std::cout << t.stage << ": " << t.seconds << " s\n";
  }
  if (result.artifacts.conformance) {
    std::cout << "conformance: " << (result.artifacts.conformance->passed() ? "pass" : "FAIL")
              << "\n";
  }
  std::cout << "artifacts in " << cfg.output_dir.string() << "\n";
  return 0;
}

int cmd_fuse(const std::optional<std::string>& config, const std::vector<std::string>& tables,
             const std::optional<std::string>& points, const std::optional<std::string>& mode,
             std::optional<std::size_t> k, const std::string& out) {
  ff::FusionSpec spec;
  ff::MethodTables inputs;
  if (config) {
    const auto doc = read_json(*config);
    spec = fusion_from(doc);
    if (doc.contains("tables")) {
      for (const auto& [method, path] : doc.at("tables").items()) {
        inputs.emplace_back(method, ff::read_rank_table(path.get<std::string>()));
      }
    }
  }
  for (const auto& item : tables) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw ff::Error(ff::ErrorKind::kConfig, "--table expects method=path, got " + item);
    }
    inputs.emplace_back(item.substr(0, eq), ff::read_rank_table(item.substr(eq + 1)));
  }
  if (inputs.empty()) throw ff::Error(ff::ErrorKind::kConfig, "no rank tables given");
  if (points) spec.points = parse_points(*points);
  if (mode) spec.mode = ff::parse_fusion_mode(*mode);
  if (k) spec.top_k = *k;
  spec.validate(inputs.front().second.feature_count());

  const ff::TwoLevelResult result = ff::two_level_fuse(inputs, spec);
  std::filesystem::create_directories(out);
  for (const auto& [method, fused] : result.per_method) {
    ff::write_fused_csv(std::filesystem::path(out) / ("fused_" + method + ".csv"), fused);
    std::cout << method << ":";
    for (const auto& name : ff::top_k_names(fused, spec.top_k)) std::cout << ' ' << name;
    std::cout << "\n";
  }
  ff::write_rank_table(std::filesystem::path(out) / "ranks_level2.csv", result.level2);
  ff::write_fused_csv(std::filesystem::path(out) / "fused_leveled.csv", result.leveled);
  std::cout << "leveled:";
  for (const auto& name : ff::top_k_names(result.leveled, spec.top_k)) std::cout << ' ' << name;
  std::cout << "\n";
  return 0;
}

int cmd_conformance(const std::optional<std::string>& config,
                    const std::optional<std::string>& fixtures, const std::string& out) {
  ff::FusionSpec spec;
  std::filesystem::path dir = ff::default_fixtures_dir();
  if (config) {
    const auto doc = read_json(*config);
    spec = fusion_from(doc);
    if (doc.contains("fixtures") && doc.at("fixtures").is_object() &&
        doc.at("fixtures").contains("dir")) {
      dir = doc.at("fixtures").at("dir").get<std::string>();
    }
  }
  if (fixtures) dir = *fixtures;
  const ff::Fixtures fx = ff::load_fixtures(dir);
  const ff::ConformanceReport report = ff::conformance_check(ff::fuse_fixtures(fx, spec), fx);
  std::filesystem::create_directories(out);
  std::ofstream(std::filesystem::path(out) / "conformance.json") << report.to_json().dump(2) << "\n";
  std::ofstream(std::filesystem::path(out) / "conformance.md") << report.to_markdown();
  std::cout << report.to_markdown();
  return report.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"featfuse: explainer-based feature ranking and rank fusion"};
  app.set_version_flag("--version", std::string(ff::toolkit_version()));
  app.require_subcommand(1);

  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;

  auto* gen = app.add_subcommand("generate", "Write a synthetic Sensor-style CSV");
  std::optional<std::size_t> gen_n;
  std::optional<double> gen_fraction;
  gen->add_option("--config", config, "JSON with generator settings");
  gen->add_option("--seed", seed, "Generator seed");
  gen->add_option("--out", out, "Output CSV path")->required();
  gen->add_option("--n", gen_n, "Number of rows");
  gen->add_option("--anomaly-fraction", gen_fraction, "Share of anomalous rows");

  auto* run = app.add_subcommand("run", "Run the full pipeline from a JSON config");
  run->add_option("--config", config, "Pipeline config")->required();
  run->add_option("--seed", seed, "Override the master seed");
  run->add_option("--out", out, "Override the output directory");

  auto* fuse = app.add_subcommand("fuse", "Two-level fusion of rank-table CSVs");
  std::vector<std::string> tables;
  std::optional<std::string> points;
  std::optional<std::string> mode;
  std::optional<std::size_t> k;
  fuse->add_option("--config", config, "JSON with 'tables' and 'fusion'");
  fuse->add_option("--table", tables, "method=path, repeatable");
  fuse->add_option("--points", points, "Comma-separated points, e.g. 3,2,1");
  fuse->add_option("--mode", mode, "weighted_points or mean_rank");
  fuse->add_option("--k", k, "Top-k size");
  fuse->add_option("--seed", seed, "Accepted for interface symmetry; fusion is deterministic");
  fuse->add_option("--out", out, "Output directory")->required();

  auto* conf = app.add_subcommand("conformance", "Check fusion of the shipped tables");
  std::optional<std::string> fixtures;
  conf->add_option("--config", config, "JSON with 'fusion' and optional 'fixtures.dir'");
  conf->add_option("--fixtures", fixtures, "Fixture directory");
  conf->add_option("--seed", seed, "Accepted for interface symmetry; fusion is deterministic");
  conf->add_option("--out", out, "Output directory")->required();

  auto* report = app.add_subcommand("report", "Re-render summary.md of a finished run");
  report->add_option("--config", config, "Unused; accepted for interface symmetry");
  report->add_option("--seed", seed, "Unused; accepted for interface symmetry");
  report->add_option("--out", out, "Run output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ff::exit_code(ff::ErrorKind::kConfig);
  }

  try {
    if (*gen) return cmd_generate(config, seed, *out, gen_n, gen_fraction);
    if (*run) return cmd_run(*config, seed, out);
    if (*fuse) return cmd_fuse(config, tables, points, mode, k, *out);
    if (*conf) return cmd_conformance(config, fixtures, *out);
    if (*report) {
      ff::rerender_summary(*out);
      std::cout << "rewrote " << (std::filesystem::path(*out) / "summary.md").string() << "\n";
      return 0;
    }
  } catch (const ff::Error& e) {
    std::cerr << "featfuse: " << ff::to_string(e.kind()) << " error: " << e.what() << "\n";
    return ff::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "featfuse: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
