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
#include <fstream>
#include <set>
#include <sstream>

#include "featfuse/evaluation.hpp"

namespace featfuse {
namespace {

std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path,
                                                const std::vector<std::string>& header) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "missing fixture file " + path.string());
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::ostringstream expected;
  for (std::size_t i = 0; i < header.size(); ++i) expected << (i ? "," : "") << header[i];
  if (line != expected.str()) {
    throw Error(ErrorKind::kData, "unexpected header in " + path.string());
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::kData, "ragged row in " + path.string() + ": " + line);
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? ", " : "") + names[i];
  return out;
}

std::string_view column_title(std::string_view column) {
  if (column == "shap") return "SHAP";
  if (column == "lime") return "LIME";
  if (column == "permutation") return "DALEX";
  return "Leveled";
}

ConformanceCell compare(std::string setup, std::string column, CheckKind kind, bool required,
                        std::vector<std::string> expected, std::vector<std::string> computed) {
  ConformanceCell cell;
  cell.setup = std::move(setup);
  cell.column = std::move(column);
  cell.kind = kind;
  cell.required = required;
  cell.expected = std::move(expected);
  cell.computed = std::move(computed);
  const std::set<std::string> want(cell.expected.begin(), cell.expected.end());
  const std::set<std::string> got(cell.computed.begin(), cell.computed.end());
  std::set_difference(want.begin(), want.end(), got.begin(), got.end(),
                      std::back_inserter(cell.missing));
  std::set_difference(got.begin(), got.end(), want.begin(), want.end(),
                      std::back_inserter(cell.extra));
  if (!cell.computed.empty() && cell.computed == cell.expected) {
    cell.verdict = Verdict::kExactOrderMatch;
  } else if (!cell.computed.empty() && want == got) {
    cell.verdict = Verdict::kSetMatch;
  } else {
    cell.verdict = Verdict::kMismatch;
  }
  return cell;
}

}  // namespace

const std::vector<std::string>& fixture_setups() {
  static const std::vector<std::string> setups{"veremi_binary", "sensor", "veremi_multiclass"};
  return setups;
}

const std::vector<std::string>& fixture_methods() {
  static const std::vector<std::string> methods{"shap", "lime", "permutation"};
  return methods;
}

std::size_t fixture_top_k(std::string_view setup) { return setup == "sensor" ? 5 : 4; }

Fixtures load_fixtures(const std::filesystem::path& dir) {
  Fixtures fx;
  fx.dir = dir;
  for (const auto& setup : fixture_setups()) {
    MethodTables tables;
    for (const auto& method : fixture_methods()) {
      tables.emplace_back(method, read_rank_table(dir / ("ranks_" + setup + "_" + method + ".csv")));
    }
    fx.tables.emplace(setup, std::move(tables));
  }
  for (const auto& row :
       read_rows(dir / "combined_features.csv", {"setup", "column", "position", "feature"})) {
    auto& col = fx.combined[row[0]][row[1]];
    const auto pos = static_cast<std::size_t>(std::stoul(row[2]));
    if (pos != col.size() + 1) {
      throw Error(ErrorKind::kData, "combined_features positions out of order for " + row[0] + "/" +
                                        row[1]);
    }
    col.push_back(row[3]);
  }
  for (const auto& row :
       read_rows(dir / "reference_results.csv",
                 {"setup", "classifier", "metric", "shap", "lime", "permutation", "leveled"})) {
    ReferenceRow ref{row[0], row[1], row[2], {}};
    for (std::size_t c = 3; c < row.size(); ++c) ref.values.push_back(std::stod(row[c]));
    fx.reference.push_back(std::move(ref));
  }
  return fx;
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kExactOrderMatch:
      return "exact_order_match";
    case Verdict::kSetMatch:
      return "set_match";
    case Verdict::kMismatch:
      return "mismatch";
  }
  return "unknown";
}

std::string_view to_string(CheckKind kind) {
  switch (kind) {
    case CheckKind::kSet:
      return "set";
    case CheckKind::kOrder:
      return "order";
    case CheckKind::kNonzeroPrefixOrder:
      return "nonzero_prefix_order";
  }
  return "unknown";
}

bool ConformanceCell::passed() const {
  if (kind == CheckKind::kSet) return verdict != Verdict::kMismatch;
  return verdict == Verdict::kExactOrderMatch;
}

bool ConformanceReport::passed() const {
  return std::all_of(cells.begin(), cells.end(),
                     [](const ConformanceCell& c) { return !c.required || c.passed(); });
}

const ConformanceCell* ConformanceReport::find(std::string_view setup,
                                               std::string_view column) const {
  for (const auto& c : cells) {
    if (c.setup == setup && c.column == column) return &c;
  }
  return nullptr;
}

nlohmann::json ConformanceReport::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  nlohmann::json required = nlohmann::json::array();
  for (const auto& c : cells) {
    list.push_back({{"setup", c.setup},
                    {"column", c.column},
                    {"check", std::string(featfuse::to_string(c.kind))},
                    {"required", c.required},
                    {"expected", c.expected},
                    {"computed", c.computed},
                    {"verdict", std::string(featfuse::to_string(c.verdict))},
                    {"passed", c.passed()},
                    {"missing", c.missing},
                    {"extra", c.extra},
                    {"note", c.note}});
    if (c.required) required.push_back(c.setup + "/" + c.column);
  }
  return {{"passed", passed()}, {"required", required}, {"cells", list}};
}

ConformanceReport ConformanceReport::from_json(const nlohmann::json& doc) {
  ConformanceReport report;
  try {
    for (const auto& c : doc.at("cells")) {
      ConformanceCell cell;
      cell.setup = c.at("setup").get<std::string>();
      cell.column = c.at("column").get<std::string>();
      const auto check = c.at("check").get<std::string>();
      cell.kind = check == "order"                  ? CheckKind::kOrder
                  : check == "nonzero_prefix_order" ? CheckKind::kNonzeroPrefixOrder
                                                    : CheckKind::kSet;
      cell.required = c.at("required").get<bool>();
      cell.expected = c.at("expected").get<std::vector<std::string>>();
      cell.computed = c.at("computed").get<std::vector<std::string>>();
      const auto verdict = c.at("verdict").get<std::string>();
      cell.verdict = verdict == "exact_order_match" ? Verdict::kExactOrderMatch
                     : verdict == "set_match"       ? Verdict::kSetMatch
                                                    : Verdict::kMismatch;
      cell.missing = c.at("missing").get<std::vector<std::string>>();
      cell.extra = c.at("extra").get<std::vector<std::string>>();
      cell.note = c.at("note").get<std::string>();
      report.cells.push_back(std::move(cell));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kData, std::string("malformed conformance document: ") + e.what());
  }
  return report;
}

std::string ConformanceReport::to_markdown() const {
  std::ostringstream md;
  md << "| Setup | Column | Check | Published | Computed | Verdict | Required |\n";
  md << "|---|---|---|---|---|---|---|\n";
  for (const auto& c : cells) {
    md << "| " << c.setup << " | " << column_title(c.column) << " | " << featfuse::to_string(c.kind)
       << " | " << join(c.expected) << " | " << join(c.computed) << " | "
       << featfuse::to_string(c.verdict) << " | "
       << (c.required ? (c.passed() ? "pass" : "FAIL") : "-") << " |\n";
  }
  md << "\nOverall: " << (passed() ? "PASS" : "FAIL") << "\n";
  bool any_note = false;
  for (const auto& c : cells) {
    if (c.note.empty()) continue;
    if (!any_note) md << "\nNotes:\n\n";
    any_note = true;
    md << "- " << c.setup << "/" << column_title(c.column) << ": " << c.note << "\n";
  }
  return md.str();
}

std::map<std::string, TwoLevelResult> fuse_fixtures(const Fixtures& fixtures,
                                                    const FusionSpec& spec) {
  std::map<std::string, TwoLevelResult> out;
  for (const auto& [setup, tables] : fixtures.tables) {
    FusionSpec local = spec;
    local.top_k = fixture_top_k(setup);
    out.emplace(setup, two_level_fuse(tables, local));
  }
  return out;
}

ConformanceReport conformance_check(const std::map<std::string, TwoLevelResult>& computed,
                                    const Fixtures& fixtures) {
  ConformanceReport report;
  for (const auto& setup : fixture_setups()) {
    const auto fixture_it = fixtures.combined.find(setup);
    if (fixture_it == fixtures.combined.end()) {
      throw Error(ErrorKind::kIo, "combined_features fixture lacks setup " + setup);
    }
    const auto result_it = computed.find(setup);
    std::vector<std::string> columns = fixture_methods();
    columns.emplace_back(kLeveledColumn);
    for (const auto& column : columns) {
      const auto col_it = fixture_it->second.find(column);
      if (col_it == fixture_it->second.end()) {
        throw Error(ErrorKind::kIo, "combined_features fixture lacks " + setup + "/" + column);
      }
      const auto& expected = col_it->second;
      CheckKind kind = CheckKind::kSet;
      bool required = false;
      if (setup == "veremi_binary" || setup == "veremi_multiclass") {
        required = column == kLeveledColumn;
      }
      if (setup == "veremi_binary" && column == "lime") {
        kind = CheckKind::kOrder;
        required = true;
      }
      if (setup == "veremi_binary" && column == "permutation") {
        kind = CheckKind::kNonzeroPrefixOrder;
        required = true;
      }
      if (result_it == computed.end()) {
        ConformanceCell cell = compare(setup, column, kind, required, expected, {});
        cell.note = "setup not computed";
        report.cells.push_back(std::move(cell));
        continue;
      }
      const FusedRanking& fused = column == kLeveledColumn ? result_it->second.leveled
                                                           : result_it->second.method(column);
      std::vector<std::string> got;
      std::vector<std::string> want = expected;
      if (kind == CheckKind::kNonzeroPrefixOrder) {
        for (const auto& e : top_k(fused, std::min(expected.size(), fused.ordering.size()))) {
          if (!e.flagged) got.push_back(e.feature);
        }
        want.resize(std::min(want.size(), got.size()));
      } else {
        got = top_k_names(fused, std::min(expected.size(), fused.ordering.size()));
      }
      ConformanceCell cell = compare(setup, column, kind, required, want, got);
      if (setup == "sensor" && column == "shap" && cell.verdict == Verdict::kMismatch) {
        cell.note =
            "published top list puts Location first while the published SHAP rank table ranks it "
            "10th for five of six models; the two tables disagree";
      }
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

}  // namespace featfuse
