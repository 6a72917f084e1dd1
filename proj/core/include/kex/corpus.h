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

// Structured documents, corpus variants, train/test splitting and gold
// keyphrase coverage statistics.

#ifndef KEX_CORPUS_H_
#define KEX_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kex/eval.h"

namespace kex {

struct Document {
  std::string id;
  std::string title;
  std::string abstract;
  std::string introduction;
  std::string conclusion;
  std::vector<std::string> first_sentences;
  std::vector<std::string> last_sentences;
  std::vector<std::string> reference_titles;
  std::string full_text;
  std::vector<std::string> gold_keyphrases;
};

// Logical-structure sections in their fixed concatenation order.
enum class Section { kTitle, kAbstract, kIntroduction, kConclusion,
                     kFirstSentences, kLastSentences, kReferenceTitles,
                     kFullText };

inline constexpr size_t kNumSections = 8;

// "T", "A", "I", "C", "Fp", "Lp", "R", "F".
std::string_view SectionCode(Section section);

// A named selection of sections. Sections are kept in canonical order and
// the code is their concatenated section codes, so code and section set
// determine each other.
class CorpusVariant {
 public:
  // Parses a code such as "TAR" or "TAICFpLpR". Throws kex::Error if the
  // code is malformed, repeats a section or omits T or A.
  static CorpusVariant Parse(std::string_view code);

  // The ten predefined variants, in report column order.
  static const std::vector<CorpusVariant>& Canonical();

  const std::string& code() const { return code_; }
  const std::vector<Section>& sections() const { return sections_; }
  bool canonical() const { return canonical_; }
  bool Contains(Section section) const;

  bool operator==(const CorpusVariant& other) const {
    return code_ == other.code_;
  }

 private:
  CorpusVariant() = default;
  std::string code_;
  std::vector<Section> sections_;
  bool canonical_ = false;
};

// Parses a section-set code without the T/A requirement (coverage analysis
// uses sets such as "R" or "I").
std::vector<Section> ParseSections(std::string_view code);
std::string SectionsCode(std::span<const Section> sections);

// Reads the JSONL dataset format. Throws kex::Error naming the line and
// field on malformed input, and on duplicate ids or empty keyphrase lists.
std::vector<Document> LoadDataset(const std::string& path);
std::vector<Document> ParseDataset(std::string_view jsonl);
std::string DocumentToJsonLine(const Document& doc);

// Concatenates the selected sections in canonical order, separating
// sections and list items with ". ". Empty parts are skipped.
std::string AssembleSections(const Document& doc,
                             std::span<const Section> sections);
std::string AssembleVariant(const Document& doc, const CorpusVariant& variant);

struct DatasetSplit {
  std::vector<std::string> train;
  std::vector<std::string> test;
  uint64_t seed = 0;
};

// Seeded Fisher-Yates shuffle, then |test| = round(0.2 N). Both sides keep
// the original document order. Requires at least 5 documents.
DatasetSplit SplitDataset(std::span<const Document> docs, uint64_t seed);
// Same shuffle with |test| = round(test_tenths / 10 * N).
DatasetSplit SplitDataset(std::span<const Document> docs, uint64_t seed,
                          size_t test_tenths);

// Split manifest: one "id<TAB>train|test" line per document plus a seed
// header line.
std::string SplitToTsv(const DatasetSplit& split);
DatasetSplit SplitFromTsv(std::string_view text);

// Documents of `docs` whose ids are listed, in `ids` order.
std::vector<Document> SelectDocuments(std::span<const Document> docs,
                                      std::span<const std::string> ids);

struct SectionCoverage {
  std::string sections;
  size_t covered = 0;
  size_t total = 0;
  double fraction = 0.0;
};

struct LengthBucket {
  size_t count = 0;
  double proportion = 0.0;
};

struct CoverageReport {
  std::vector<SectionCoverage> per_section_set;
  // Gold phrases covered by reference titles but not by title + abstract.
  SectionCoverage reference_only;
  size_t total_gold = 0;
  size_t num_documents = 0;
  double avg_gold_per_doc = 0.0;
  // Gold phrase word count -> count and proportion.
  std::map<size_t, LengthBucket> length_distribution;
};

// Gold phrases are counted once per (document, normalized phrase) pair. A
// phrase is covered when its normalized words occur contiguously in the
// lemma sequence of the assembled section text.
CoverageReport KeyphraseCoverage(
    std::span<const Document> docs,
    std::span<const std::vector<Section>> section_sets,
    const PhraseMatcher& matcher);

// True if `needle` occurs as a contiguous run in `haystack`.
bool ContainsSequence(std::span<const std::string> haystack,
                      std::span<const std::string> needle);

// Lemma sequence used for coverage matching: word lemmas, with symbol
// tokens kept as barriers.
std::vector<std::string> MatchableLemmas(std::string_view text,
                                         const PipelineConfig& config);

// TSV with columns sections, covered, total, fraction.
std::string CoverageToTsv(const CoverageReport& report);
// TSV with columns words, count, proportion plus summary lines.
std::string DatasetStatsToTsv(const CoverageReport& report);

}  // namespace kex

#endif  // KEX_CORPUS_H_
