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

// Phrase matching and precision / recall / F1.
//
// Matching is exact on normalized lemma sequences: each phrase is tokenized,
// stripped of symbols, lemmatized and case-folded, and the words are joined
// with single spaces. Corpus coverage statistics use the same normalizer.

#ifndef KEX_EVAL_H_
#define KEX_EVAL_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kex/preprocess.h"

namespace kex {

struct EvalCounts {
  size_t tp = 0;  // correct extracted phrases
  size_t te = 0;  // total extracted phrases
  size_t ta = 0;  // total gold phrases

  EvalCounts& operator+=(const EvalCounts& other) {
    tp += other.tp;
    te += other.te;
    ta += other.ta;
    return *this;
  }
  bool operator==(const EvalCounts&) const = default;
};

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

class PhraseMatcher {
 public:
  explicit PhraseMatcher(
      const PipelineConfig& config = PipelineConfig::Default());

  // Lemma words of the phrase, symbols removed. Empty if nothing remains.
  std::vector<std::string> NormalizeWords(std::string_view phrase) const;
  std::string Normalize(std::string_view phrase) const;

  // Unique normalized forms, first-seen order, empty forms dropped.
  std::vector<std::string> NormalizeSet(
      std::span<const std::string> phrases) const;

  // Counts for one document. Both sides are normalized and de-duplicated;
  // each gold phrase can be credited at most once.
  EvalCounts Match(std::span<const std::string> extracted,
                   std::span<const std::string> gold) const;

  const PipelineConfig& config() const { return config_; }

 private:
  const PipelineConfig& config_;
};

// P = TP/TE, R = TP/TA, F1 = 2PR/(P+R). TE = 0 gives P = 0 and P = R = 0
// gives F1 = 0. Throws kex::Error when TA = 0.
Prf ComputePrf(const EvalCounts& counts);

// Pooled counts over documents (micro averaging).
EvalCounts MicroSum(std::span<const EvalCounts> per_document);

}  // namespace kex

#endif  // KEX_EVAL_H_
