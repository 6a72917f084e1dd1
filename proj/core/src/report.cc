/* Copyright 2026 The kex Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "kex/report.h"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "kex/error.h"

namespace kex {
namespace {

std::string Fixed(double value, int decimals) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, value);
  return buffer;
}

std::string Percent(double fraction) { return Fixed(100.0 * fraction, 2); }

std::vector<std::string> SplitTabs(std::string_view line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    const size_t tab = line.find('\t', start);
    fields.emplace_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

std::vector<std::string> Lines(std::string_view text) {
  std::vector<std::string> lines;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::optional<double> ParseNumber(const std::string& text) {
  if (text.empty()) return std::nullopt;
  try {
    size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size()) return std::nullopt;
    return value;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

// Index of the variant with the highest F1, first column on ties.
std::optional<size_t> BestVariant(const ResultsTable& table,
                                  const ResultLine& line) {
  std::optional<size_t> best;
  double best_f1 = 0.0;
  for (size_t v = 0; v < table.variants.size(); ++v) {
    auto it = line.cells.find(table.variants[v]);
    if (it == line.cells.end()) continue;
    if (!best || it->second.f1 > best_f1) {
      best = v;
      best_f1 = it->second.f1;
    }
  }
  return best;
}

std::string RowKey(const ResultLine& line) {
  return line.method + "@" + line.top_n;
}

}  // namespace

ResultsTable BuildResultsTable(std::span<const MatrixRow> rows) {
  ResultsTable table;
  std::map<std::string, size_t> line_index;
  for (const MatrixRow& row : rows) {
    if (std::find(table.variants.begin(), table.variants.end(),
                  row.variant) == table.variants.end()) {
      table.variants.push_back(row.variant);
    }
    ResultLine key{std::string(MethodName(row.method)),
                   row.top_n == 0 ? "all" : std::to_string(row.top_n),
                   {}};
    auto [it, inserted] = line_index.emplace(RowKey(key), table.lines.size());
    if (inserted) table.lines.push_back(std::move(key));
    table.lines[it->second].cells[row.variant] = row.prf;
  }
  return table;
}

std::string ResultsToTsv(const ResultsTable& table) {
  std::string out = "method\ttop_n";
  for (const std::string& v : table.variants) {
    out += "\t" + v + "_P\t" + v + "_R\t" + v + "_F1";
  }
  out += "\tbest_variant\n";
  for (const ResultLine& line : table.lines) {
    out += line.method + "\t" + line.top_n;
    for (const std::string& v : table.variants) {
      auto it = line.cells.find(v);
      if (it == line.cells.end()) {
        out += "\tNA\tNA\tNA";
      } else {
        out += "\t" + Percent(it->second.precision) + "\t" +
               Percent(it->second.recall) + "\t" + Percent(it->second.f1);
      }
    }
    const auto best = BestVariant(table, line);
    out += "\t" + (best ? table.variants[*best] : std::string("NA")) + "\n";
  }
  return out;
}

ResultsTable ParseResultsTsv(std::string_view tsv) {
  const auto lines = Lines(tsv);
  if (lines.empty()) throw Error("results table is empty");
  const auto header = SplitTabs(lines[0]);
  if (header.size() < 3 || header[0] != "method" || header[1] != "top_n" ||
      header.back() != "best_variant" || (header.size() - 3) % 3 != 0) {
    throw Error("not a results table: bad header");
  }
  ResultsTable table;
  for (size_t c = 2; c + 1 < header.size(); c += 3) {
    const std::string& p = header[c];
    if (p.size() < 3 || p.substr(p.size() - 2) != "_P") {
      throw Error("not a results table: unexpected column " + p);
    }
    const std::string variant = p.substr(0, p.size() - 2);
    if (header[c + 1] != variant + "_R" || header[c + 2] != variant + "_F1") {
      throw Error("not a results table: columns of " + variant);
    }
    table.variants.push_back(variant);
  }
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = SplitTabs(lines[i]);
    if (fields.size() != header.size()) {
      throw Error("results table line " + std::to_string(i + 1) + " has " +
                  std::to_string(fields.size()) + " fields, expected " +
                  std::to_string(header.size()));
    }
    ResultLine line{fields[0], fields[1], {}};
    for (size_t v = 0; v < table.variants.size(); ++v) {
      const size_t c = 2 + 3 * v;
      if (fields[c] == "NA") continue;
      const auto p = ParseNumber(fields[c]);
      const auto r = ParseNumber(fields[c + 1]);
      const auto f = ParseNumber(fields[c + 2]);
      if (!p || !r || !f) {
        throw Error("results table line " + std::to_string(i + 1) +
                    ": non-numeric cell for " + table.variants[v]);
      }
      line.cells[table.variants[v]] = Prf{*p / 100.0, *r / 100.0, *f / 100.0};
    }
    table.lines.push_back(std::move(line));
  }
  return table;
}

std::string ResultsToText(const ResultsTable& table) {
  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> header = {"method", "N"};
  for (const std::string& v : table.variants) {
    header.push_back(v + " P");
    header.push_back(v + " R");
    header.push_back(v + " F1");
  }
  grid.push_back(header);
  for (const ResultLine& line : table.lines) {
    std::vector<std::string> cells = {line.method, line.top_n};
    const auto best = BestVariant(table, line);
    for (size_t v = 0; v < table.variants.size(); ++v) {
      auto it = line.cells.find(table.variants[v]);
      if (it == line.cells.end()) {
        cells.insert(cells.end(), {"-", "-", "-"});
        continue;
      }
      cells.push_back(Percent(it->second.precision));
      cells.push_back(Percent(it->second.recall));
      cells.push_back(Percent(it->second.f1) + (best == v ? "*" : " "));
    }
    grid.push_back(std::move(cells));
  }
  std::vector<size_t> width(header.size(), 0);
  for (const auto& row : grid) {
    for (size_t c = 0; c < row.size(); ++c) {
      width[c] = std::max(width[c], row[c].size());
    }
  }
  std::string out;
  for (const auto& row : grid) {
    std::string line;
    for (size_t c = 0; c < row.size(); ++c) {
      if (c > 0) line += "  ";
      const std::string pad(width[c] - row[c].size(), ' ');
      // Text columns flush left, numbers flush right.
      line += c < 2 ? row[c] + pad : pad + row[c];
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

std::vector<std::pair<double, double>> PairF1(const ResultsTable& a,
                                              const std::string& variant_a,
                                              const ResultsTable& b,
                                              const std::string& variant_b) {
  const auto index = [](const ResultsTable& table, const std::string& variant,
                        const char* side) {
    if (std::find(table.variants.begin(), table.variants.end(), variant) ==
        table.variants.end()) {
      throw Error(std::string("report ") + side + " has no variant " +
                  variant);
    }
    std::map<std::string, double> f1;
    for (const ResultLine& line : table.lines) {
      if (auto it = line.cells.find(variant); it != line.cells.end()) {
        f1[RowKey(line)] = it->second.f1;
      }
    }
    return f1;
  };
  const auto f1_a = index(a, variant_a, "a");
  const auto f1_b = index(b, variant_b, "b");

  std::vector<std::string> missing;
  for (const auto& [key, value] : f1_a) {
    if (!f1_b.count(key)) missing.push_back(key + " (missing in b)");
  }
  for (const auto& [key, value] : f1_b) {
    if (!f1_a.count(key)) missing.push_back(key + " (missing in a)");
  }
  if (!missing.empty()) {
    std::string message = "reports do not share rows:";
    for (const std::string& m : missing) message += " " + m;
    throw Error(message);
  }
  // Row order of report a.
  std::vector<std::pair<double, double>> pairs;
  for (const ResultLine& line : a.lines) {
    auto it = f1_a.find(RowKey(line));
    if (it == f1_a.end() || !line.cells.count(variant_a)) continue;
    pairs.emplace_back(it->second, f1_b.at(RowKey(line)));
  }
  return pairs;
}

std::vector<std::pair<double, double>> ParsePairsTsv(std::string_view tsv) {
  std::vector<std::pair<double, double>> pairs;
  const auto lines = Lines(tsv);
  for (size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty() || line[0] == '#') continue;
    const auto fields = SplitTabs(line);
    const auto a = fields.size() == 2 ? ParseNumber(fields[0]) : std::nullopt;
    const auto b = fields.size() == 2 ? ParseNumber(fields[1]) : std::nullopt;
    if (!a || !b) {
      if (pairs.empty() && i == 0 && fields.size() == 2) continue;  // header
      throw Error("pairs line " + std::to_string(i + 1) +
                  ": expected two numeric columns");
    }
    pairs.emplace_back(*a, *b);
  }
  return pairs;
}

std::vector<TimingLine> TimingRatios(std::span<const CellTiming> timings) {
  std::map<std::string, const CellTiming*> baseline;
  std::map<std::string, bool> trains;
  for (const CellTiming& t : timings) {
    const std::string method(MethodName(t.method));
    if (t.train_seconds < 0.0 || t.test_seconds < 0.0) {
      throw Error("negative time for " + method + " on " + t.variant);
    }
    if (t.variant == "TA") baseline[method] = &t;
    trains[method] = trains[method] || IsSupervised(t.method);
  }
  std::vector<TimingLine> lines;
  for (const CellTiming& t : timings) {
    const std::string method(MethodName(t.method));
    auto it = baseline.find(method);
    if (it == baseline.end()) {
      throw Error("no TA timing to compare " + method + " against");
    }
    const CellTiming& ta = *it->second;
    if (ta.test_seconds <= 0.0) {
      throw Error("TA test time of " + method + " is zero");
    }
    TimingLine line{method, t.variant, t.train_seconds, t.test_seconds,
                    std::nullopt, t.test_seconds / ta.test_seconds};
    if (trains[method]) {
      if (ta.train_seconds <= 0.0) {
        throw Error("TA train time of " + method + " is zero");
      }
      line.train_ratio = t.train_seconds / ta.train_seconds;
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

std::string TimingToCsv(std::span<const TimingLine> lines) {
  std::string out = "method,variant,train_s,test_s,train_ratio,test_ratio\n";
  for (const TimingLine& line : lines) {
    out += line.method + "," + line.variant + "," +
           Fixed(line.train_seconds, 3) + "," + Fixed(line.test_seconds, 3) +
           "," + (line.train_ratio ? Fixed(*line.train_ratio, 1) : "NA") +
           "," + Fixed(line.test_ratio, 1) + "\n";
  }
  return out;
}

std::string AblationToTsv(const AblationResult& result) {
  std::string out = "removed\tf1\tdelta\tpositive\n";
  out += "none\t" + Percent(result.baseline_f1) + "\t0.00\tbaseline\n";
  for (const AblationRow& row : result.rows) {
    out += FeatureName(row.removed) + "\t" + Percent(row.f1) + "\t" +
           Percent(row.delta) + "\t" + (row.positive ? "yes" : "no") + "\n";
  }
  out += "#selected\t" + result.selected.ToString() + "\n";
  out += "#best\t" + result.best.ToString() + "\n";
  return out;
}

std::string ExtractionsToTsv(std::span<const DocumentExtraction> extractions,
                             size_t top_n) {
  std::string out = "doc_id\trank\tphrase\tweight\n";
  for (const DocumentExtraction& e : extractions) {
    const size_t keep =
        top_n == 0 ? e.phrases.size() : std::min(top_n, e.phrases.size());
    for (size_t k = 0; k < keep; ++k) {
      char weight[40];
      std::snprintf(weight, sizeof(weight), "%.6g", e.phrases[k].weight);
      out += e.doc_id + "\t" + std::to_string(k + 1) + "\t" +
             e.phrases[k].text + "\t" + weight + "\n";
    }
  }
  return out;
}

std::vector<DocumentExtraction> ParseExtractionsTsv(std::string_view tsv) {
  const auto lines = Lines(tsv);
  if (lines.empty() || lines[0] != "doc_id\trank\tphrase\tweight") {
    throw Error("not an extraction table: bad header");
  }
  std::vector<DocumentExtraction> out;
  std::map<std::string, size_t> index;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = SplitTabs(lines[i]);
    const auto weight = fields.size() == 4 ? ParseNumber(fields[3])
                                           : std::nullopt;
    if (!weight) {
      throw Error("extraction line " + std::to_string(i + 1) +
                  ": expected doc_id, rank, phrase, weight");
    }
    auto [it, inserted] = index.emplace(fields[0], out.size());
    if (inserted) out.push_back({fields[0], {}});
    out[it->second].phrases.push_back({fields[2], *weight});
  }
  return out;
}

std::string ErrorsToTsv(std::span<const CellError> errors) {
  std::string out = "method\tvariant\tmessage\n";
  for (const CellError& e : errors) {
    std::string message = e.message;
    std::replace(message.begin(), message.end(), '\t', ' ');
    std::replace(message.begin(), message.end(), '\n', ' ');
    out += std::string(MethodName(e.method)) + "\t" + e.variant + "\t" +
           message + "\n";
  }
  return out;
}

}  // namespace kex
