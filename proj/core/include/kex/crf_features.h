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

// Token features for the keyphrase CRF:
//
//   F1 part of speech            F6 enclosing phrase appears in the title
//   F2 word length               F7 enclosing phrase appears in a reference title
//   F3 first occurrence          F8 TF*IDF
//   F4 frequency in full text    F9 TextRank
//   F5 frequency in reference titles
//
// and their conversion into indicator attributes.

#ifndef KEX_CRF_FEATURES_H_
#define KEX_CRF_FEATURES_H_

#include <bitset>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kex/corpus.h"
#include "kex/crf.h"
#include "kex/rank_unsup.h"

namespace kex {

enum class Feature : int {
  kPos = 1,
  kWordLength = 2,
  kFirstOccurrence = 3,
  kFreqFullText = 4,
  kFreqRefTitle = 5,
  kInTitle = 6,
  kInRefTitle = 7,
  kTfIdf = 8,
  kTextRank = 9,
};

inline constexpr int kNumFeatures = 9;

// "F1" .. "F9".
std::string FeatureName(Feature feature);

class FeatureSet {
 public:
  FeatureSet() = default;
  static FeatureSet All();
  // Parses "F1,F6,F8" (also accepts "all"). Throws kex::Error on unknown
  // names.
  static FeatureSet Parse(std::string_view text);

  bool Contains(Feature feature) const;
  FeatureSet With(Feature feature) const;
  FeatureSet Without(Feature feature) const;
  // Adds F8 and F9, which are always part of a final feature set.
  FeatureSet WithMandatory() const;
  std::vector<Feature> Members() const;
  bool empty() const { return bits_.none(); }

  // "F1,F6,F8"; empty string for the empty set.
  std::string ToString() const;

  bool operator==(const FeatureSet&) const = default;

 private:
  std::bitset<kNumFeatures + 1> bits_;
};

struct FeatureVector {
  std::optional<Pos> pos;                    // F1
  std::optional<size_t> word_length;         // F2
  std::optional<double> first_occurrence;    // F3
  std::optional<size_t> freq_fulltext;       // F4
  std::optional<size_t> freq_reftitle;       // F5
  std::optional<bool> in_title;              // F6
  std::optional<bool> in_reftitle;           // F7
  double tfidf = 0.0;                        // F8, always present
  double textrank = 0.0;                     // F9, always present
};

struct FeatureContext {
  const PipelineConfig* config = &PipelineConfig::Default();
  // DF statistics of the corpus the tokens come from (for F8).
  const DfIndex* df_index = nullptr;
  TextRankParams textrank;
};

// One FeatureVector per token of `tokens` (the preprocessed variant text of
// `doc`). F4 always counts over doc.full_text and F5 over the reference
// titles, whatever the variant. Inactive features are left empty.
std::vector<FeatureVector> ExtractFeatures(const Document& doc,
                                           const TokenSeq& tokens,
                                           const FeatureSet& active,
                                           const FeatureContext& context);

// Equal-frequency bins for the continuous features F3, F8 and F9.
class FeatureBuckets {
 public:
  static constexpr size_t kDefaultBins = 8;
  static constexpr size_t kMaxWordLength = 20;

  static FeatureBuckets Fit(std::span<const FeatureVector> vectors,
                            size_t bins = kDefaultBins);

  size_t Bucket(Feature feature, double value) const;

  // 0, 1, 2, 3-4, 5-8, 9+ -> 0 .. 5.
  static size_t CountBucket(size_t count);

  // Serialized as space-separated cut points per feature.
  std::string CutsString(Feature feature) const;
  void SetCuts(Feature feature, std::string_view text);

 private:
  std::vector<double>& CutsFor(Feature feature);
  const std::vector<double>& CutsFor(Feature feature) const;

  std::vector<double> first_occurrence_;
  std::vector<double> tfidf_;
  std::vector<double> textrank_;
};

// Indicator attributes of position `i`: a bias attribute plus one per
// active feature. F1 also contributes the tags of the neighbouring tokens.
std::vector<std::string> TokenAttributes(
    std::span<const FeatureVector> vectors, size_t i,
    const FeatureSet& active, const FeatureBuckets& buckets);

// One sentence of one document, symbols removed.
struct LabeledSequence {
  std::string doc_id;
  size_t sentence = 0;
  std::vector<std::string> lemmas;
  std::vector<FeatureVector> features;
  std::vector<Tag> tags;  // empty when unlabeled
};

// Splits the token sequence into sentences, dropping symbol tokens. When
// `gold` (normalized lemma sequences) is given, tags are encoded.
std::vector<LabeledSequence> BuildSequences(
    const Document& doc, const TokenSeq& tokens,
    const std::vector<FeatureVector>& features,
    const std::vector<std::vector<std::string>>* gold);

struct AblationRow {
  Feature removed;
  double f1 = 0.0;
  double delta = 0.0;  // f1 - baseline
  // Removal strictly lowered F1.
  bool positive = false;
};

struct AblationResult {
  double baseline_f1 = 0.0;
  std::vector<AblationRow> rows;
  // Features whose removal strictly decreased F1.
  FeatureSet selected;
  // `selected` plus the mandatory F8 and F9.
  FeatureSet best;
};

// Leave-one-out ablation. `evaluate_f1` returns the F1 obtained with a
// feature set; it is called once for `all` and once per member.
AblationResult AblateFeatures(
    const FeatureSet& all,
    const std::function<double(const FeatureSet&)>& evaluate_f1);

}  // namespace kex

#endif  // KEX_CRF_FEATURES_H_
