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

#include "kex/eval.h"

#include <unordered_set>

#include "kex/error.h"

namespace kex {

PhraseMatcher::PhraseMatcher(const PipelineConfig& config) : config_(config) {}

std::vector<std::string> PhraseMatcher::NormalizeWords(
    std::string_view phrase) const {
  std::vector<std::string> words;
  for (const Token& token : Tokenize(phrase)) {
    if (IsSymbolSurface(token.surface)) continue;
    words.push_back(LemmatizeWord(token.surface, config_));
  }
  return words;
}

std::string PhraseMatcher::Normalize(std::string_view phrase) const {
  std::string out;
  for (const std::string& word : NormalizeWords(phrase)) {
    if (!out.empty()) out += ' ';
    out += word;
  }
  return out;
}

std::vector<std::string> PhraseMatcher::NormalizeSet(
    std::span<const std::string> phrases) const {
  std::vector<std::string> unique;
  std::unordered_set<std::string> seen;
  for (const std::string& phrase : phrases) {
    std::string normalized = Normalize(phrase);
    if (normalized.empty() || !seen.insert(normalized).second) continue;
    unique.push_back(std::move(normalized));
  }
  return unique;
}

EvalCounts PhraseMatcher::Match(std::span<const std::string> extracted,
                                std::span<const std::string> gold) const {
  const std::vector<std::string> extracted_set = NormalizeSet(extracted);
  const std::vector<std::string> gold_set = NormalizeSet(gold);
  const std::unordered_set<std::string> gold_lookup(gold_set.begin(),
                                                    gold_set.end());
  EvalCounts counts;
  counts.te = extracted_set.size();
  counts.ta = gold_set.size();
  for (const std::string& phrase : extracted_set) {
    if (gold_lookup.contains(phrase)) ++counts.tp;
  }
  return counts;
}

Prf ComputePrf(const EvalCounts& counts) {
  if (counts.ta == 0) throw Error("cannot compute recall: no gold phrases");
  if (counts.tp > counts.te || counts.tp > counts.ta) {
    throw Error("inconsistent counts: TP exceeds TE or TA");
  }
  Prf prf;
  prf.precision = counts.te == 0 ? 0.0
                                 : static_cast<double>(counts.tp) /
                                       static_cast<double>(counts.te);
  prf.recall =
      static_cast<double>(counts.tp) / static_cast<double>(counts.ta);
  const double sum = prf.precision + prf.recall;
  prf.f1 = sum == 0.0 ? 0.0 : 2.0 * prf.precision * prf.recall / sum;
  return prf;
}

EvalCounts MicroSum(std::span<const EvalCounts> per_document) {
  EvalCounts total;
  for (const EvalCounts& counts : per_document) total += counts;
  return total;
}

}  // namespace kex
