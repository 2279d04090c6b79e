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

#include <cstdio>
#include <fstream>
#include <sstream>

#include "featfuse/pipeline.hpp"

namespace featfuse {
namespace {

const std::vector<std::string>& summary_columns() {
  static const std::vector<std::string> cols{"shap", "lime", "permutation", "leveled", "all"};
  return cols;
}

std::string column_title(const std::string& c) {
  if (c == "shap") return "SHAP";
  if (c == "lime") return "LIME";
  if (c == "permutation") return "DALEX";
  if (c == "leveled") return "Leveled";
  if (c == "all") return "All features";
  return c;
}

std::string fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? ", " : "") + names[i];
  return out;
}

class Emitter {
 public:
  Emitter(const std::filesystem::path& dir, RunManifest& manifest) : dir_(dir), manifest_(manifest) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_)) {
      throw Error(ErrorKind::kIo, "cannot create output directory " + dir_.string());
    }
  }

  std::filesystem::path path(const std::string& name) {
    manifest_.artifacts.push_back(name);
    return dir_ / name;
  }

  void text(const std::string& name, const std::string& body) {
    std::ofstream out(path(name), std::ios::binary);
    out << body;
    if (!out) throw Error(ErrorKind::kIo, "failed writing " + (dir_ / name).string());
  }

  void json(const std::string& name, const nlohmann::json& doc) { text(name, doc.dump(2) + "\n"); }

 private:
  std::filesystem::path dir_;
  RunManifest& manifest_;
};

nlohmann::json fused_json(const FusedRanking& fused, std::size_t k) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& e : top_k(fused, std::min(k, fused.ordering.size()))) {
    list.push_back({{"feature", e.feature}, {"score", e.score}, {"flagged", e.flagged}});
  }
  return list;
}

nlohmann::json metrics_document(const PipelineArtifacts& art) {
  nlohmann::json doc;
  doc["dataset"] = art.dataset_summary.is_null() ? nlohmann::json::object() : art.dataset_summary;
  doc["features"] = art.feature_names;
  doc["top_k"] = art.top_k;
  nlohmann::json models = nlohmann::json::array();
  for (const auto& m : art.models) {
    models.push_back({{"label", m.label},
                      {"family", std::string(to_string(m.family))},
                      {"warning", m.warning},
                      {"test_metrics", m.test_metrics.to_json()}});
  }
  doc["models"] = models;
  nlohmann::json sets = nlohmann::json::object();
  if (art.fusion) {
    for (const auto& [method, fused] : art.fusion->per_method) {
      sets[method] = fused_json(fused, art.top_k);
    }
    sets[std::string(kLeveledColumn)] = fused_json(art.fusion->leveled, art.top_k);
  }
  doc["feature_sets"] = sets;
  nlohmann::json evals = nlohmann::json::array();
  for (const auto& e : art.evaluations) {
    evals.push_back({{"classifier", e.classifier},
                     {"feature_set", e.feature_set},
                     {"features", e.features},
                     {"metrics", e.metrics.to_json()}});
  }
  doc["independent"] = evals;
  nlohmann::json fixture_sets = nlohmann::json::object();
  for (const auto& [setup, result] : art.fixture_fusions) {
    const std::size_t k = fixture_top_k(setup);
    nlohmann::json s = nlohmann::json::object();
    for (const auto& [method, fused] : result.per_method) s[method] = fused_json(fused, k);
    s[std::string(kLeveledColumn)] = fused_json(result.leveled, k);
    fixture_sets[setup] = s;
  }
  doc["fixture_feature_sets"] = fixture_sets;
  nlohmann::json ref = nlohmann::json::array();
  for (const auto& r : art.reference) {
    if (!art.reference_setup.empty() && r.setup != art.reference_setup) continue;
    ref.push_back({{"setup", r.setup},
                   {"classifier", r.classifier},
                   {"metric", r.metric},
                   {"values", r.values}});
  }
  doc["reference"] = {{"setup", art.reference_setup}, {"rows", ref}};
  return doc;
}

}  // namespace

nlohmann::json RunManifest::to_json() const {
  nlohmann::json timings_doc = nlohmann::json::array();
  for (const auto& t : timings) timings_doc.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(config_hash));
  return {{"version", version},
          {"config_hash", hash},
          {"seed", seed},
          {"timings", timings_doc},
          {"artifacts", artifacts}};
}

void emit_report(RunManifest& manifest, const PipelineArtifacts& art,
                 const std::filesystem::path& dir) {
  Emitter out(dir, manifest);
  for (const auto& [method, table] : art.rank_tables) {
    write_rank_table(out.path("ranks_" + method + ".csv"), table);
  }
  if (!art.importances.empty()) write_importance_csv(out.path("importance.csv"), art.importances);
  if (art.fusion) {
    for (const auto& [method, fused] : art.fusion->per_method) {
      write_fused_csv(out.path("fused_" + method + ".csv"), fused);
    }
    write_rank_table(out.path("ranks_level2.csv"), art.fusion->level2);
    write_fused_csv(out.path("fused_leveled.csv"), art.fusion->leveled);
  }
  for (const auto& [setup, result] : art.fixture_fusions) {
    for (const auto& [method, fused] : result.per_method) {
      write_fused_csv(out.path("fixture_" + setup + "_fused_" + method + ".csv"), fused);
    }
    write_rank_table(out.path("fixture_" + setup + "_ranks_level2.csv"), result.level2);
    write_fused_csv(out.path("fixture_" + setup + "_fused_leveled.csv"), result.leveled);
  }
  const nlohmann::json metrics = metrics_document(art);
  out.json("metrics.json", metrics);
  const nlohmann::json conformance =
      art.conformance ? art.conformance->to_json() : nlohmann::json(nullptr);
  out.json("conformance.json", conformance);
  if (art.conformance) out.text("conformance.md", art.conformance->to_markdown());
  // The summary and manifest list themselves.
  manifest.artifacts.push_back("summary.md");
  manifest.artifacts.push_back("manifest.json");
  const nlohmann::json manifest_doc = manifest.to_json();
  {
    std::ofstream md(dir / "summary.md", std::ios::binary);
    md << render_summary(manifest_doc, metrics, conformance);
    if (!md) throw Error(ErrorKind::kIo, "failed writing summary.md");
  }
  std::ofstream mf(dir / "manifest.json", std::ios::binary);
  mf << manifest_doc.dump(2) << "\n";
  if (!mf) throw Error(ErrorKind::kIo, "failed writing manifest.json");
}

std::string render_summary(const nlohmann::json& manifest, const nlohmann::json& metrics,
                           const nlohmann::json& conformance) {
  std::ostringstream md;
  md << "# featfuse run summary\n\n";
  md << "- version: " << manifest.value("version", "") << "\n";
  md << "- config hash: " << manifest.value("config_hash", "") << "\n";
  md << "- seed: " << manifest.value("seed", 0ULL) << "\n";

  const auto& dataset = metrics.at("dataset");
  if (!dataset.empty()) {
    md << "\n## Dataset\n\n";
    for (const auto& [key, value] : dataset.items()) md << "- " << key << ": " << value.dump() << "\n";
  }

  if (!metrics.at("models").empty()) {
    md << "\n## Explained models (test split)\n\n";
    md << "| Model | Acc | Prec | Rec | F1 | Warning |\n|---|---|---|---|---|---|\n";
    for (const auto& m : metrics.at("models")) {
      const auto& t = m.at("test_metrics");
      md << "| " << m.at("label").get<std::string>() << " | " << fixed(t.at("accuracy"), 4) << " | "
         << fixed(t.at("precision"), 4) << " | " << fixed(t.at("recall"), 4) << " | "
         << fixed(t.at("f1"), 4) << " | " << (m.at("warning").get<bool>() ? "yes" : "no")
         << " |\n";
    }
  }

  if (!metrics.at("feature_sets").empty()) {
    md << "\n## Top-" << metrics.at("top_k").get<std::size_t>() << " features\n\n";
    md << "| Column | Features (score) |\n|---|---|\n";
    for (const auto& col : summary_columns()) {
      if (!metrics.at("feature_sets").contains(col)) continue;
      md << "| " << column_title(col) << " | ";
      bool first = true;
      for (const auto& e : metrics.at("feature_sets").at(col)) {
        md << (first ? "" : ", ") << e.at("feature").get<std::string>() << " ("
           << format_number(e.at("score").get<double>())
           << (e.at("flagged").get<bool>() ? ", index tie-break" : "") << ")";
        first = false;
      }
      md << " |\n";
    }
  }

  static const std::vector<std::pair<std::string, std::string>> metric_rows{
      {"accuracy", "Acc"}, {"precision", "Prec"}, {"recall", "Rec"}, {"f1", "F-1"}};
  const auto& evals = metrics.at("independent");
  if (!evals.empty()) {
    md << "\n## Independent classifiers\n";
    std::vector<std::string> classifiers;
    for (const auto& e : evals) {
      const auto name = e.at("classifier").get<std::string>();
      if (std::find(classifiers.begin(), classifiers.end(), name) == classifiers.end()) {
        classifiers.push_back(name);
      }
    }
    for (const auto& name : classifiers) {
      md << "\n### " << name << "\n\n| Metrics |";
      std::vector<const nlohmann::json*> cols;
      for (const auto& col : summary_columns()) {
        for (const auto& e : evals) {
          if (e.at("classifier") == name && e.at("feature_set") == col) {
            cols.push_back(&e);
            md << ' ' << column_title(col) << " |";
          }
        }
      }
      md << "\n|---|";
      for (std::size_t i = 0; i < cols.size(); ++i) md << "---|";
      md << "\n";
      for (const auto& [key, title] : metric_rows) {
        md << "| " << title << " |";
        for (const auto* e : cols) md << ' ' << fixed(e->at("metrics").at(key), 4) << " |";
        md << "\n";
      }
    }
  }

  const auto& ref = metrics.at("reference");
  if (!ref.at("rows").empty()) {
    md << "\n## Published reference values (" << ref.at("setup").get<std::string>()
       << ", reference only, not reproduced)\n";
    std::vector<std::string> classifiers;
    for (const auto& r : ref.at("rows")) {
      const auto name = r.at("classifier").get<std::string>();
      if (std::find(classifiers.begin(), classifiers.end(), name) == classifiers.end()) {
        classifiers.push_back(name);
      }
    }
    for (const auto& name : classifiers) {
      md << "\n### " << name << " (reference)\n\n| Metrics | SHAP | LIME | DALEX | Leveled |\n"
         << "|---|---|---|---|---|\n";
      for (const auto& [key, title] : metric_rows) {
        for (const auto& r : ref.at("rows")) {
          if (r.at("classifier") != name || r.at("metric") != key) continue;
          md << "| " << title << " |";
          for (const auto& v : r.at("values")) md << ' ' << fixed(v.get<double>(), 2) << " |";
          md << "\n";
        }
      }
    }
  }

  const auto& fixture_sets = metrics.at("fixture_feature_sets");
  if (!fixture_sets.empty()) {
    md << "\n## Fusion of the published rank tables\n\n| Setup | Column | Top features |\n|---|---|---|\n";
    for (const auto& [setup, cols] : fixture_sets.items()) {
      for (const auto& col : summary_columns()) {
        if (!cols.contains(col)) continue;
        std::vector<std::string> names;
        for (const auto& e : cols.at(col)) names.push_back(e.at("feature").get<std::string>());
        md << "| " << setup << " | " << column_title(col) << " | " << join(names) << " |\n";
      }
    }
  }

  md << "\n## Conformance\n\n";
  if (conformance.is_null()) {
    md << "Fixtures disabled.\n";
  } else {
    md << ConformanceReport::from_json(conformance).to_markdown();
  }
  return md.str();
}

void rerender_summary(const std::filesystem::path& dir) {
  auto read = [&dir](const std::string& name) {
    std::ifstream in(dir / name);
    if (!in) throw Error(ErrorKind::kIo, "missing " + (dir / name).string());
    try {
      return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kData, name + " is not valid JSON: " + e.what());
    }
  };
  const nlohmann::json manifest = read("manifest.json");
  const nlohmann::json metrics = read("metrics.json");
  const nlohmann::json conformance = read("conformance.json");
  std::ofstream md(dir / "summary.md", std::ios::binary);
  md << render_summary(manifest, metrics, conformance);
  if (!md) throw Error(ErrorKind::kIo, "failed writing summary.md");
}

}  // namespace featfuse
