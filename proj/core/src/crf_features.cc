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

#include "kex/crf_features.h"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>
#include <unordered_map>

#include "kex/binning.h"
#include "kex/error.h"

namespace kex {
namespace {

bool IsPhraseToken(const Token& token) {
  return IsContentToken(token) &&
         (token.pos == Pos::kNoun || token.pos == Pos::kAdj);
}

struct Span {
  size_t begin = 0;
  size_t end = 0;
};

// For every token, the maximal (ADJ)*(NOUN)+ span containing it, if any.
std::vector<std::optional<Span>> EnclosingPhrases(const TokenSeq& tokens) {
  std::vector<std::optional<Span>> enclosing(tokens.size());
  size_t i = 0;
  while (i < tokens.size()) {
    if (!IsPhraseToken(tokens[i])) {
      ++i;
      continue;
    }
    const size_t begin = i;
    while (i < tokens.size() && IsPhraseToken(tokens[i]) &&
           tokens[i].pos == Pos::kAdj) {
      ++i;
    }
    const size_t first_noun = i;
    while (i < tokens.size() && IsPhraseToken(tokens[i]) &&
           tokens[i].pos == Pos::kNoun) {
      ++i;
    }
    if (i > first_noun) {
      for (size_t k = begin; k < i; ++k) enclosing[k] = Span{begin, i};
    }
  }
  return enclosing;
}

std::unordered_map<std::string, size_t> WordLemmaCounts(
    std::string_view text, const PipelineConfig& config) {
  std::unordered_map<std::string, size_t> counts;
  for (const Token& token : Preprocess(text, config)) {
    if (!token.is_symbol) ++counts[token.lemma];
  }
  return counts;
}

size_t CountOf(const std::unordered_map<std::string, size_t>& counts,
               const std::string& lemma) {
  auto it = counts.find(lemma);
  return it == counts.end() ? 0 : it->second;
}

std::string FormatExact(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

}  // namespace

std::string FeatureName(Feature feature) {
  return "F" + std::to_string(static_cast<int>(feature));
}

FeatureSet FeatureSet::All() {
  FeatureSet set;
  for (int f = 1; f <= kNumFeatures; ++f) set.bits_.set(f);
  return set;
}

FeatureSet FeatureSet::Parse(std::string_view text) {
  FeatureSet set;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(),
                              [](unsigned char c) { return std::isspace(c); }),
               item.end());
    if (item.empty()) continue;
    if (item == "all") {
      set = All();
      continue;
    }
    int index = 0;
    if (item.size() >= 2 && (item[0] == 'F' || item[0] == 'f')) {
      try {
        size_t used = 0;
        index = std::stoi(item.substr(1), &used);
        if (used != item.size() - 1) index = 0;
      } catch (const std::exception&) {
        index = 0;
      }
    }
    if (index < 1 || index > kNumFeatures) {
      throw Error("unknown feature '" + item + "' (expected F1..F9)");
    }
    set.bits_.set(index);
  }
  return set;
}

bool FeatureSet::Contains(Feature feature) const {
  return bits_.test(static_cast<int>(feature));
}

FeatureSet FeatureSet::With(Feature feature) const {
  FeatureSet out = *this;
  out.bits_.set(static_cast<int>(feature));
  return out;
}

FeatureSet FeatureSet::Without(Feature feature) const {
  FeatureSet out = *this;
  out.bits_.reset(static_cast<int>(feature));
  return out;
}

FeatureSet FeatureSet::WithMandatory() const {
  return With(Feature::kTfIdf).With(Feature::kTextRank);
}

std::vector<Feature> FeatureSet::Members() const {
  std::vector<Feature> members;
  for (int f = 1; f <= kNumFeatures; ++f) {
    if (bits_.test(f)) members.push_back(static_cast<Feature>(f));
  }
  return members;
}

std::string FeatureSet::ToString() const {
  std::string out;
  for (Feature f : Members()) {
    if (!out.empty()) out += ',';
    out += FeatureName(f);
  }
  return out;
}

std::vector<FeatureVector> ExtractFeatures(const Document& doc,
                                           const TokenSeq& tokens,
                                           const FeatureSet& active,
                                           const FeatureContext& context) {
  const PipelineConfig& config = *context.config;
  std::vector<FeatureVector> vectors(tokens.size());

  if (active.Contains(Feature::kPos)) {
    for (size_t i = 0; i < tokens.size(); ++i) vectors[i].pos = tokens[i].pos;
  }
  if (active.Contains(Feature::kWordLength)) {
    for (size_t i = 0; i < tokens.size(); ++i) {
      vectors[i].word_length = Utf8Length(tokens[i].surface);
    }
  }
  if (active.Contains(Feature::kFirstOccurrence)) {
    std::unordered_map<std::string, size_t> first_position;
    size_t words = 0;
    for (const Token& token : tokens) {
      if (token.is_symbol) continue;
      first_position.emplace(token.lemma, words);
      ++words;
    }
    for (size_t i = 0; i < tokens.size(); ++i) {
      auto it = first_position.find(tokens[i].lemma);
      vectors[i].first_occurrence =
          (words == 0 || it == first_position.end())
              ? 0.0
              : static_cast<double>(it->second) / static_cast<double>(words);
    }
  }
  if (active.Contains(Feature::kFreqFullText)) {
    const auto counts = WordLemmaCounts(doc.full_text, config);
    for (size_t i = 0; i < tokens.size(); ++i) {
      vectors[i].freq_fulltext = CountOf(counts, tokens[i].lemma);
    }
  }
  const std::vector<Section> references = {Section::kReferenceTitles};
  const std::string reference_text = AssembleSections(doc, references);
  if (active.Contains(Feature::kFreqRefTitle)) {
    const auto counts = WordLemmaCounts(reference_text, config);
    for (size_t i = 0; i < tokens.size(); ++i) {
      vectors[i].freq_reftitle = CountOf(counts, tokens[i].lemma);
    }
  }
  if (active.Contains(Feature::kInTitle) ||
      active.Contains(Feature::kInRefTitle)) {
    const auto enclosing = EnclosingPhrases(tokens);
    const auto title_lemmas = MatchableLemmas(doc.title, config);
    const auto reference_lemmas = MatchableLemmas(reference_text, config);
    for (size_t i = 0; i < tokens.size(); ++i) {
      std::vector<std::string> phrase;
      if (enclosing[i]) {
        for (size_t k = enclosing[i]->begin; k < enclosing[i]->end; ++k) {
          phrase.push_back(tokens[k].lemma);
        }
      } else if (!tokens[i].is_symbol) {
        phrase.push_back(tokens[i].lemma);
      }
      if (active.Contains(Feature::kInTitle)) {
        vectors[i].in_title = ContainsSequence(title_lemmas, phrase);
      }
      if (active.Contains(Feature::kInRefTitle)) {
        vectors[i].in_reftitle = ContainsSequence(reference_lemmas, phrase);
      }
    }
  }

  if (context.df_index == nullptr) {
    throw Error("feature extraction needs a DF index for TF*IDF");
  }
  const WordWeights tfidf = TfIdfWeights(tokens, *context.df_index);
  const TextRankResult textrank = TextRankScores(
      BuildWordGraph(tokens, context.textrank.window, context.textrank.damping),
      context.textrank.iteration);
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (auto it = tfidf.find(tokens[i].lemma);
        it != tfidf.end() && IsContentToken(tokens[i])) {
      vectors[i].tfidf = it->second;
    }
    if (auto it = textrank.scores.find(tokens[i].lemma);
        it != textrank.scores.end() && IsContentToken(tokens[i])) {
      vectors[i].textrank = it->second;
    }
  }
  return vectors;
}

FeatureBuckets FeatureBuckets::Fit(std::span<const FeatureVector> vectors,
                                   size_t bins) {
  FeatureBuckets buckets;
  std::vector<double> first, tfidf, textrank;
  for (const FeatureVector& v : vectors) {
    if (v.first_occurrence) first.push_back(*v.first_occurrence);
    tfidf.push_back(v.tfidf);
    textrank.push_back(v.textrank);
  }
  buckets.first_occurrence_ = EqualFrequencyCuts(first, bins);
  buckets.tfidf_ = EqualFrequencyCuts(tfidf, bins);
  buckets.textrank_ = EqualFrequencyCuts(textrank, bins);
  return buckets;
}

std::vector<double>& FeatureBuckets::CutsFor(Feature feature) {
  return const_cast<std::vector<double>&>(
      static_cast<const FeatureBuckets*>(this)->CutsFor(feature));
}

const std::vector<double>& FeatureBuckets::CutsFor(Feature feature) const {
  switch (feature) {
    case Feature::kFirstOccurrence: return first_occurrence_;
    case Feature::kTfIdf: return tfidf_;
    case Feature::kTextRank: return textrank_;
    default:
      throw Error("feature " + FeatureName(feature) + " is not bucketed");
  }
}

size_t FeatureBuckets::Bucket(Feature feature, double value) const {
  return BinIndex(CutsFor(feature), value);
}

size_t FeatureBuckets::CountBucket(size_t count) {
  if (count <= 2) return count;
  if (count <= 4) return 3;
  if (count <= 8) return 4;
  return 5;
}

std::string FeatureBuckets::CutsString(Feature feature) const {
  std::string out;
  for (double cut : CutsFor(feature)) {
    if (!out.empty()) out += ' ';
    out += FormatExact(cut);
  }
  return out;
}

void FeatureBuckets::SetCuts(Feature feature, std::string_view text) {
  std::vector<double> cuts;
  std::istringstream in{std::string(text)};
  double value;
  while (in >> value) cuts.push_back(value);
  if (!in.eof()) {
    throw Error("malformed bucket boundaries for " + FeatureName(feature));
  }
  if (!std::is_sorted(cuts.begin(), cuts.end())) {
    throw Error("bucket boundaries for " + FeatureName(feature) +
                " are not sorted");
  }
  CutsFor(feature) = std::move(cuts);
}

std::vector<std::string> TokenAttributes(
    std::span<const FeatureVector> vectors, size_t i,
    const FeatureSet& active, const FeatureBuckets& buckets) {
  const FeatureVector& v = vectors[i];
  std::vector<std::string> attributes = {"bias"};
  const auto add = [&](Feature f, const std::string& value) {
    attributes.push_back(FeatureName(f) + "=" + value);
  };
  if (active.Contains(Feature::kPos) && v.pos) {
    add(Feature::kPos, std::string(PosName(*v.pos)));
    const auto neighbour = [&](size_t k) {
      return vectors[k].pos ? std::string(PosName(*vectors[k].pos))
                            : std::string("?");
    };
    attributes.push_back("F1[-1]=" + (i == 0 ? "BOS" : neighbour(i - 1)));
    attributes.push_back(
        "F1[+1]=" + (i + 1 == vectors.size() ? "EOS" : neighbour(i + 1)));
  }
  if (active.Contains(Feature::kWordLength) && v.word_length) {
    add(Feature::kWordLength,
        std::to_string(std::min(*v.word_length, FeatureBuckets::kMaxWordLength)));
  }
  if (active.Contains(Feature::kFirstOccurrence) && v.first_occurrence) {
    add(Feature::kFirstOccurrence,
        std::to_string(
            buckets.Bucket(Feature::kFirstOccurrence, *v.first_occurrence)));
  }
  if (active.Contains(Feature::kFreqFullText) && v.freq_fulltext) {
    add(Feature::kFreqFullText,
        std::to_string(FeatureBuckets::CountBucket(*v.freq_fulltext)));
  }
  if (active.Contains(Feature::kFreqRefTitle) && v.freq_reftitle) {
    add(Feature::kFreqRefTitle,
        std::to_string(FeatureBuckets::CountBucket(*v.freq_reftitle)));
  }
  if (active.Contains(Feature::kInTitle) && v.in_title) {
    add(Feature::kInTitle, *v.in_title ? "1" : "0");
  }
  if (active.Contains(Feature::kInRefTitle) && v.in_reftitle) {
    add(Feature::kInRefTitle, *v.in_reftitle ? "1" : "0");
  }
  if (active.Contains(Feature::kTfIdf)) {
    add(Feature::kTfIdf,
        std::to_string(buckets.Bucket(Feature::kTfIdf, v.tfidf)));
  }
  if (active.Contains(Feature::kTextRank)) {
    add(Feature::kTextRank,
        std::to_string(buckets.Bucket(Feature::kTextRank, v.textrank)));
  }
  return attributes;
}

std::vector<LabeledSequence> BuildSequences(
    const Document& doc, const TokenSeq& tokens,
    const std::vector<FeatureVector>& features,
    const std::vector<std::vector<std::string>>* gold) {
  if (features.size() != tokens.size()) {
    throw Error("feature vectors do not match tokens for document " + doc.id);
  }
  std::vector<LabeledSequence> sequences;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].is_symbol) continue;
    if (sequences.empty() || sequences.back().sentence != tokens[i].sentence) {
      LabeledSequence sequence;
      sequence.doc_id = doc.id;
      sequence.sentence = tokens[i].sentence;
      sequences.push_back(std::move(sequence));
    }
    sequences.back().lemmas.push_back(tokens[i].lemma);
    sequences.back().features.push_back(features[i]);
  }
  if (gold != nullptr) {
    for (LabeledSequence& sequence : sequences) {
      sequence.tags = EncodeTags(sequence.lemmas, *gold);
    }
  }
  return sequences;
}

AblationResult AblateFeatures(
    const FeatureSet& all,
    const std::function<double(const FeatureSet&)>& evaluate_f1) {
  AblationResult result;
  result.baseline_f1 = evaluate_f1(all);
  for (Feature feature : all.Members()) {
    AblationRow row;
    row.removed = feature;
    row.f1 = evaluate_f1(all.Without(feature));
    row.delta = row.f1 - result.baseline_f1;
    row.positive = row.f1 < result.baseline_f1;
    if (row.positive) result.selected = result.selected.With(feature);
    result.rows.push_back(row);
  }
  result.best = result.selected.WithMandatory();
  return result;
}

}  // namespace kex
