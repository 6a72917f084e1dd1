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

// KEA-style Naive Bayes keyphrase classifier over two discretized features:
// the phrase TF*IDF and the relative position of its first occurrence.

#ifndef KEX_NAIVE_BAYES_H_
#define KEX_NAIVE_BAYES_H_

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kex/rank_unsup.h"

namespace kex {

struct KeaFeatures {
  double tfidf = 0.0;
  // Word-token index of the first occurrence over the number of word
  // tokens in the text, in [0, 1].
  double first_occurrence = 0.0;
};

inline constexpr size_t kNumKeaFeatures = 2;
inline constexpr size_t kDefaultNbBins = 5;

struct ScoredCandidate {
  CandidatePhrase phrase;
  KeaFeatures features;
};

// Throws kex::Error if `doc` has no word tokens.
std::vector<ScoredCandidate> ComputeKeaFeatures(
    const TokenSeq& doc, std::vector<CandidatePhrase> candidates,
    const DfIndex& index);

struct LabeledExample {
  KeaFeatures features;
  bool is_key = false;
};

enum class NbClass { kKey = 0, kNotKey = 1 };

class NbModel {
 public:
  // Per-feature conditional table, indexed [class][bin].
  using Table = std::array<std::vector<double>, 2>;

  NbModel(std::array<double, 2> priors,
          std::array<std::vector<double>, kNumKeaFeatures> cuts,
          std::array<Table, kNumKeaFeatures> conditionals);

  size_t bins() const { return conditionals_[0][0].size(); }
  double prior(NbClass y) const { return priors_[static_cast<size_t>(y)]; }
  const std::vector<double>& cuts(size_t feature) const {
    return cuts_[feature];
  }
  double Conditional(size_t feature, NbClass y, size_t bin) const {
    return conditionals_[feature][static_cast<size_t>(y)][bin];
  }
  std::array<size_t, kNumKeaFeatures> Bins(const KeaFeatures& f) const;

  void Save(std::ostream& out) const;
  static NbModel Load(std::istream& in);

 private:
  std::array<double, 2> priors_;
  std::array<std::vector<double>, kNumKeaFeatures> cuts_;
  std::array<Table, kNumKeaFeatures> conditionals_;
};

// Equal-frequency bins fit on the pooled training values of each feature,
// add-one smoothed conditionals and frequency priors. Throws kex::Error
// unless both classes are present and bins >= 2.
NbModel TrainNb(std::span<const LabeledExample> examples,
                size_t bins = kDefaultNbBins);

// P(x|y) P(y) / P(x) for already computed terms.
double BayesPosterior(double likelihood, double prior, double evidence);

// P(key | x) under the independence assumption.
double Posterior(const NbModel& model, const KeaFeatures& features);

// Candidates by posterior descending, ties by earlier first occurrence.
// The phrase weight is set to the posterior.
std::vector<CandidatePhrase> RankCandidatesNb(
    const NbModel& model, std::span<const ScoredCandidate> candidates);

}  // namespace kex

#endif  // KEX_NAIVE_BAYES_H_
