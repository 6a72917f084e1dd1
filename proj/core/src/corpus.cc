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

#include "kex/corpus.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "kex/error.h"

namespace kex {
namespace {

using Json = nlohmann::json;

constexpr std::array<std::string_view, 10> kCanonicalCodes = {
    "TA",  "TAI", "TAC",  "TAFp",     "TALp",
    "TAR", "TAF", "TAFR", "TAICFpLp", "TAICFpLpR"};

constexpr std::array<std::string_view, 10> kDatasetKeys = {
    "id",         "title",           "abstract",         "introduction",
    "conclusion", "first_sentences", "last_sentences",   "reference_titles",
    "full_text",  "keyphrases"};

uint64_t SectionMask(std::span<const Section> sections) {
  uint64_t mask = 0;
  for (Section s : sections) mask |= uint64_t{1} << static_cast<int>(s);
  return mask;
}

std::vector<Section> SectionsFromMask(uint64_t mask) {
  std::vector<Section> sections;
  for (size_t i = 0; i < kNumSections; ++i) {
    if (mask & (uint64_t{1} << i)) sections.push_back(static_cast<Section>(i));
  }
  return sections;
}

std::string FieldError(std::string_view what, std::string_view field,
                       size_t line) {
  return std::string(what) + " " + std::string(field) + " at line " +
         std::to_string(line);
}

std::string GetString(const Json& object, std::string_view key, size_t line) {
  auto it = object.find(key);
  if (it == object.end()) throw Error(FieldError("missing field", key, line));
  if (!it->is_string()) {
    throw Error(FieldError("expected string for field", key, line));
  }
  return it->get<std::string>();
}

std::vector<std::string> GetStringList(const Json& object,
                                       std::string_view key, size_t line) {
  auto it = object.find(key);
  if (it == object.end()) throw Error(FieldError("missing field", key, line));
  if (!it->is_array()) {
    throw Error(FieldError("expected list of strings for field", key, line));
  }
  std::vector<std::string> values;
  for (const Json& item : *it) {
    if (!item.is_string()) {
      throw Error(FieldError("expected list of strings for field", key, line));
    }
    values.push_back(item.get<std::string>());
  }
  return values;
}

// Uniform integer in [0, bound) by rejection, independent of the standard
// library's distribution implementation.
uint64_t UniformBelow(std::mt19937_64& rng, uint64_t bound) {
  // 2^64 mod bound; draws below it would bias the remainder.
  const uint64_t threshold = (uint64_t{0} - bound) % bound;
  uint64_t draw;
  do {
    draw = rng();
  } while (draw < threshold);
  return draw % bound;
}

void AppendPart(std::string& out, std::string_view part) {
  size_t begin = 0;
  size_t end = part.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(part[begin])))
    ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(part[end - 1])))
    --end;
  if (begin == end) return;
  if (!out.empty()) out += ". ";
  out.append(part.substr(begin, end - begin));
}

}  // namespace

std::string_view SectionCode(Section section) {
  switch (section) {
    case Section::kTitle: return "T";
    case Section::kAbstract: return "A";
    case Section::kIntroduction: return "I";
    case Section::kConclusion: return "C";
    case Section::kFirstSentences: return "Fp";
    case Section::kLastSentences: return "Lp";
    case Section::kReferenceTitles: return "R";
    case Section::kFullText: return "F";
  }
  return "?";
}

std::vector<Section> ParseSections(std::string_view code) {
  if (code.empty()) throw Error("empty section code");
  uint64_t mask = 0;
  for (size_t i = 0; i < code.size(); ++i) {
    Section section;
    switch (code[i]) {
      case 'T': section = Section::kTitle; break;
      case 'A': section = Section::kAbstract; break;
      case 'I': section = Section::kIntroduction; break;
      case 'C': section = Section::kConclusion; break;
      case 'R': section = Section::kReferenceTitles; break;
      case 'F':
        if (i + 1 < code.size() && code[i + 1] == 'p') {
          section = Section::kFirstSentences;
          ++i;
        } else {
          section = Section::kFullText;
        }
        break;
      case 'L':
        if (i + 1 < code.size() && code[i + 1] == 'p') {
          section = Section::kLastSentences;
          ++i;
          break;
        }
        [[fallthrough]];
      default:
        throw Error("malformed section code '" + std::string(code) + "'");
    }
    const uint64_t bit = uint64_t{1} << static_cast<int>(section);
    if (mask & bit) {
      throw Error("section " + std::string(SectionCode(section)) +
                  " repeated in '" + std::string(code) + "'");
    }
    mask |= bit;
  }
  return SectionsFromMask(mask);
}

std::string SectionsCode(std::span<const Section> sections) {
  const uint64_t mask = SectionMask(sections);
  for (std::string_view canonical : kCanonicalCodes) {
    if (SectionMask(ParseSections(canonical)) == mask) {
      return std::string(canonical);
    }
  }
  std::string code;
  for (Section s : SectionsFromMask(mask)) {
    code += SectionCode(s);
  }
  return code;
}

CorpusVariant CorpusVariant::Parse(std::string_view code) {
  CorpusVariant variant;
  variant.sections_ = ParseSections(code);
  if (!variant.Contains(Section::kTitle) ||
      !variant.Contains(Section::kAbstract)) {
    throw Error("corpus variant '" + std::string(code) +
                "' must include T and A");
  }
  const uint64_t mask = SectionMask(variant.sections_);
  for (std::string_view canonical : kCanonicalCodes) {
    if (SectionMask(ParseSections(canonical)) == mask) {
      variant.code_ = std::string(canonical);
      variant.canonical_ = true;
      return variant;
    }
  }
  variant.code_ = SectionsCode(variant.sections_);
  return variant;
}

const std::vector<CorpusVariant>& CorpusVariant::Canonical() {
  static const std::vector<CorpusVariant> variants = [] {
    std::vector<CorpusVariant> out;
    for (std::string_view code : kCanonicalCodes) out.push_back(Parse(code));
    return out;
  }();
  return variants;
}

bool CorpusVariant::Contains(Section section) const {
  return std::find(sections_.begin(), sections_.end(), section) !=
         sections_.end();
}

std::vector<Document> ParseDataset(std::string_view jsonl) {
  std::vector<Document> docs;
  std::unordered_set<std::string> ids;
  size_t line_number = 0;
  while (!jsonl.empty()) {
    const size_t eol = jsonl.find('\n');
    std::string_view line = jsonl.substr(0, eol);
    jsonl.remove_prefix(eol == std::string_view::npos ? jsonl.size()
                                                      : eol + 1);
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    Json object;
    try {
      object = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw Error("malformed JSON at line " + std::to_string(line_number) +
                  ": " + e.what());
    }
    if (!object.is_object()) {
      throw Error("expected a JSON object at line " +
                  std::to_string(line_number));
    }
    for (const auto& [key, value] : object.items()) {
      if (std::find(kDatasetKeys.begin(), kDatasetKeys.end(), key) ==
          kDatasetKeys.end()) {
        throw Error(FieldError("unexpected field", key, line_number));
      }
    }

    Document doc;
    doc.id = GetString(object, "id", line_number);
    doc.title = GetString(object, "title", line_number);
    doc.abstract = GetString(object, "abstract", line_number);
    doc.introduction = GetString(object, "introduction", line_number);
    doc.conclusion = GetString(object, "conclusion", line_number);
    doc.first_sentences =
        GetStringList(object, "first_sentences", line_number);
    doc.last_sentences = GetStringList(object, "last_sentences", line_number);
    doc.reference_titles =
        GetStringList(object, "reference_titles", line_number);
    doc.full_text = GetString(object, "full_text", line_number);
    doc.gold_keyphrases = GetStringList(object, "keyphrases", line_number);

    if (doc.id.empty()) throw Error(FieldError("empty", "id", line_number));
    if (doc.gold_keyphrases.empty()) {
      throw Error(FieldError("empty", "keyphrases", line_number));
    }
    if (!ids.insert(doc.id).second) {
      throw Error("duplicate id " + doc.id + " at line " +
                  std::to_string(line_number));
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<Document> LoadDataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open dataset " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return ParseDataset(buffer.str());
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

std::string DocumentToJsonLine(const Document& doc) {
  nlohmann::ordered_json json;
  json["id"] = doc.id;
  json["title"] = doc.title;
  json["abstract"] = doc.abstract;
  json["introduction"] = doc.introduction;
  json["conclusion"] = doc.conclusion;
  json["first_sentences"] = doc.first_sentences;
  json["last_sentences"] = doc.last_sentences;
  json["reference_titles"] = doc.reference_titles;
  json["full_text"] = doc.full_text;
  json["keyphrases"] = doc.gold_keyphrases;
  return json.dump();
}

std::string AssembleSections(const Document& doc,
                             std::span<const Section> sections) {
  std::string out;
  const auto append_list = [&](const std::vector<std::string>& items) {
    for (const std::string& item : items) AppendPart(out, item);
  };
  for (Section section : SectionsFromMask(SectionMask(sections))) {
    switch (section) {
      case Section::kTitle: AppendPart(out, doc.title); break;
      case Section::kAbstract: AppendPart(out, doc.abstract); break;
      case Section::kIntroduction: AppendPart(out, doc.introduction); break;
      case Section::kConclusion: AppendPart(out, doc.conclusion); break;
      case Section::kFirstSentences: append_list(doc.first_sentences); break;
      case Section::kLastSentences: append_list(doc.last_sentences); break;
      case Section::kReferenceTitles: append_list(doc.reference_titles); break;
      case Section::kFullText: AppendPart(out, doc.full_text); break;
    }
  }
  return out;
}

std::string AssembleVariant(const Document& doc, const CorpusVariant& variant) {
  return AssembleSections(doc, variant.sections());
}

DatasetSplit SplitDataset(std::span<const Document> docs, uint64_t seed) {
  return SplitDataset(docs, seed, 2);
}

DatasetSplit SplitDataset(std::span<const Document> docs, uint64_t seed,
                          size_t test_tenths) {
  if (test_tenths < 1 || test_tenths > 9) {
    throw Error("test share must be between 1 and 9 tenths");
  }
  const size_t n = docs.size();
  if (n < 5) {
    throw Error("need at least 5 documents to split, got " +
                std::to_string(n));
  }
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (size_t i = n - 1; i > 0; --i) {
    std::swap(order[i], order[UniformBelow(rng, i + 1)]);
  }
  const size_t num_test = (test_tenths * n + 5) / 10;
  std::vector<bool> is_test(n, false);
  for (size_t i = 0; i < num_test; ++i) is_test[order[i]] = true;

  DatasetSplit split;
  split.seed = seed;
  for (size_t i = 0; i < n; ++i) {
    (is_test[i] ? split.test : split.train).push_back(docs[i].id);
  }
  return split;
}

std::string SplitToTsv(const DatasetSplit& split) {
  std::string out = "#seed\t" + std::to_string(split.seed) + "\n";
  for (const std::string& id : split.train) out += id + "\ttrain\n";
  for (const std::string& id : split.test) out += id + "\ttest\n";
  return out;
}

DatasetSplit SplitFromTsv(std::string_view text) {
  DatasetSplit split;
  std::istringstream in{std::string(text)};
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error("split manifest line " + std::to_string(line_number) +
                  ": expected two tab-separated columns");
    }
    const std::string key = line.substr(0, tab);
    const std::string value = line.substr(tab + 1);
    if (key == "#seed") {
      split.seed = std::stoull(value);
    } else if (value == "train") {
      split.train.push_back(key);
    } else if (value == "test") {
      split.test.push_back(key);
    } else {
      throw Error("split manifest line " + std::to_string(line_number) +
                  ": unknown partition '" + value + "'");
    }
  }
  return split;
}

std::vector<Document> SelectDocuments(std::span<const Document> docs,
                                      std::span<const std::string> ids) {
  std::unordered_map<std::string, const Document*> by_id;
  for (const Document& doc : docs) by_id.emplace(doc.id, &doc);
  std::vector<Document> selected;
  selected.reserve(ids.size());
  for (const std::string& id : ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw Error("unknown document id " + id);
    selected.push_back(*it->second);
  }
  return selected;
}

bool ContainsSequence(std::span<const std::string> haystack,
                      std::span<const std::string> needle) {
  if (needle.empty() || needle.size() > haystack.size()) return false;
  return std::search(haystack.begin(), haystack.end(), needle.begin(),
                     needle.end()) != haystack.end();
}

std::vector<std::string> MatchableLemmas(std::string_view text,
                                         const PipelineConfig& config) {
  std::vector<std::string> lemmas;
  for (Token& token : Preprocess(text, config)) {
    lemmas.push_back(std::move(token.lemma));
  }
  return lemmas;
}

CoverageReport KeyphraseCoverage(
    std::span<const Document> docs,
    std::span<const std::vector<Section>> section_sets,
    const PhraseMatcher& matcher) {
  if (docs.empty()) throw Error("coverage needs at least one document");
  CoverageReport report;
  report.num_documents = docs.size();
  for (const auto& set : section_sets) {
    report.per_section_set.push_back({SectionsCode(set), 0, 0, 0.0});
  }
  report.reference_only.sections = "R-TA";

  const std::vector<Section> title_abstract = {Section::kTitle,
                                               Section::kAbstract};
  const std::vector<Section> references = {Section::kReferenceTitles};

  for (const Document& doc : docs) {
    std::vector<std::vector<std::string>> gold;
    for (const std::string& phrase :
         matcher.NormalizeSet(doc.gold_keyphrases)) {
      gold.push_back(matcher.NormalizeWords(phrase));
    }
    report.total_gold += gold.size();
    for (const auto& words : gold) {
      ++report.length_distribution[words.size()].count;
    }

    for (size_t s = 0; s < section_sets.size(); ++s) {
      const auto lemmas = MatchableLemmas(
          AssembleSections(doc, section_sets[s]), matcher.config());
      for (const auto& words : gold) {
        if (ContainsSequence(lemmas, words)) {
          ++report.per_section_set[s].covered;
        }
      }
    }

    const auto ta_lemmas =
        MatchableLemmas(AssembleSections(doc, title_abstract), matcher.config());
    const auto ref_lemmas =
        MatchableLemmas(AssembleSections(doc, references), matcher.config());
    for (const auto& words : gold) {
      if (ContainsSequence(ref_lemmas, words) &&
          !ContainsSequence(ta_lemmas, words)) {
        ++report.reference_only.covered;
      }
    }
  }

  const auto fraction = [&](size_t covered) {
    return report.total_gold == 0
               ? 0.0
               : static_cast<double>(covered) /
                     static_cast<double>(report.total_gold);
  };
  for (SectionCoverage& coverage : report.per_section_set) {
    coverage.total = report.total_gold;
    coverage.fraction = fraction(coverage.covered);
  }
  report.reference_only.total = report.total_gold;
  report.reference_only.fraction = fraction(report.reference_only.covered);
  report.avg_gold_per_doc = static_cast<double>(report.total_gold) /
                            static_cast<double>(docs.size());
  for (auto& [words, bucket] : report.length_distribution) {
    bucket.proportion = fraction(bucket.count);
  }
  return report;
}

namespace {

std::string FormatDouble(double value, const char* format) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), format, value);
  return buffer;
}

}  // namespace

std::string CoverageToTsv(const CoverageReport& report) {
  std::string out = "sections\tcovered\ttotal\tfraction\n";
  const auto row = [&](const SectionCoverage& c) {
    out += c.sections + "\t" + std::to_string(c.covered) + "\t" +
           std::to_string(c.total) + "\t" + FormatDouble(c.fraction, "%.6f") +
           "\n";
  };
  for (const SectionCoverage& c : report.per_section_set) row(c);
  row(report.reference_only);
  return out;
}

std::string DatasetStatsToTsv(const CoverageReport& report) {
  std::string out;
  out += "#documents\t" + std::to_string(report.num_documents) + "\n";
  out += "#total_gold\t" + std::to_string(report.total_gold) + "\n";
  out += "#avg_gold_per_doc\t" +
         FormatDouble(report.avg_gold_per_doc, "%.3f") + "\n";
  out += "words\tcount\tproportion\n";
  for (const auto& [words, bucket] : report.length_distribution) {
    out += std::to_string(words) + "\t" + std::to_string(bucket.count) +
           "\t" + FormatDouble(bucket.proportion, "%.6f") + "\n";
  }
  return out;
}

}  // namespace kex
