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

#include "kex/naive_bayes.h"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "kex/binning.h"
#include "kex/error.h"

namespace kex {
namespace {

constexpr std::string_view kMagic = "kex-nb";
constexpr int kFormatVersion = 1;
constexpr std::array<std::string_view, kNumKeaFeatures> kFeatureNames = {
    "tfidf", "first_occurrence"};
constexpr std::array<std::string_view, 2> kClassNames = {"key", "not_key"};

double FeatureValue(const KeaFeatures& f, size_t feature) {
  return feature == 0 ? f.tfidf : f.first_occurrence;
}

std::string FormatExact(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream in(line);
  std::string field;
  while (std::getline(in, field, '\t')) fields.push_back(field);
  return fields;
}

size_t IndexOf(std::span<const std::string_view> names, const std::string& s,
               std::string_view what) {
  for (size_t i = 0; i < names.size(); ++i) {
    if (names[i] == s) return i;
  }
  throw Error("nb model: unknown " + std::string(what) + " '" + s + "'");
}

}  // namespace

std::vector<ScoredCandidate> ComputeKeaFeatures(
    const TokenSeq& doc, std::vector<CandidatePhrase> candidates,
    const DfIndex& index) {
  // word_position[i]: number of word tokens before token i.
  std::vector<size_t> word_position(doc.size() + 1, 0);
  for (size_t i = 0; i < doc.size(); ++i) {
    word_position[i + 1] = word_position[i] + (doc[i].is_symbol ? 0 : 1);
  }
  const size_t word_count = word_position[doc.size()];
  if (word_count == 0) throw Error("document has no word tokens");

  const WordWeights tfidf = TfIdfWeights(doc, index);
  std::vector<ScoredCandidate> scored;
  scored.reserve(candidates.size());
  for (CandidatePhrase& phrase : candidates) {
    if (phrase.begin >= doc.size()) {
      throw Error("candidate span outside document");
    }
    ScoredCandidate item;
    item.features.tfidf = PhraseWeight(phrase, tfidf);
    item.features.first_occurrence =
        static_cast<double>(word_position[phrase.begin]) /
        static_cast<double>(word_count);
    item.phrase = std::move(phrase);
    scored.push_back(std::move(item));
  }
  return scored;
}

NbModel::NbModel(std::array<double, 2> priors,
                 std::array<std::vector<double>, kNumKeaFeatures> cuts,
                 std::array<Table, kNumKeaFeatures> conditionals)
    : priors_(priors), cuts_(std::move(cuts)),
      conditionals_(std::move(conditionals)) {
  if (std::fabs(priors_[0] + priors_[1] - 1.0) > 1e-9 || priors_[0] <= 0.0 ||
      priors_[1] <= 0.0) {
    throw Error("nb priors must be positive and sum to 1");
  }
  const size_t bins = conditionals_[0][0].size();
  if (bins < 2) throw Error("nb model needs at least 2 bins");
  for (size_t f = 0; f < kNumKeaFeatures; ++f) {
    if (cuts_[f].size() != bins - 1) {
      throw Error("nb model: expected " + std::to_string(bins - 1) +
                  " cut points for feature " + std::string(kFeatureNames[f]));
    }
    if (!std::is_sorted(cuts_[f].begin(), cuts_[f].end())) {
      throw Error("nb model: cut points must be sorted");
    }
    for (const auto& row : conditionals_[f]) {
      if (row.size() != bins) throw Error("nb model: ragged tables");
      double sum = 0.0;
      for (double p : row) {
        if (!(p > 0.0)) throw Error("nb model: probabilities must be > 0");
        sum += p;
      }
      if (std::fabs(sum - 1.0) > 1e-9) {
        throw Error("nb model: conditional table row does not sum to 1");
      }
    }
  }
}

std::array<size_t, kNumKeaFeatures> NbModel::Bins(const KeaFeatures& f) const {
  std::array<size_t, kNumKeaFeatures> bins{};
  for (size_t i = 0; i < kNumKeaFeatures; ++i) {
    bins[i] = BinIndex(cuts_[i], FeatureValue(f, i));
  }
  return bins;
}

void NbModel::Save(std::ostream& out) const {
  out << kMagic << '\t' << kFormatVersion << '\n';
  out << "prior\t" << FormatExact(priors_[0]) << '\t'
      << FormatExact(priors_[1]) << '\n';
  for (size_t f = 0; f < kNumKeaFeatures; ++f) {
    out << "bins\t" << kFeatureNames[f];
    for (double cut : cuts_[f]) out << '\t' << FormatExact(cut);
    out << '\n';
  }
  for (size_t y = 0; y < 2; ++y) {
    for (size_t f = 0; f < kNumKeaFeatures; ++f) {
      out << "cond\t" << kClassNames[y] << '\t' << kFeatureNames[f];
      for (double p : conditionals_[f][y]) out << '\t' << FormatExact(p);
      out << '\n';
    }
  }
}

NbModel NbModel::Load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("nb model: empty input");
  const auto header = SplitTabs(line);
  if (header.size() != 2 || header[0] != kMagic) {
    throw Error("nb model: bad header");
  }
  if (std::stoi(header[1]) != kFormatVersion) {
    throw Error("nb model: unsupported version " + header[1]);
  }
  std::array<double, 2> priors{};
  std::array<std::vector<double>, kNumKeaFeatures> cuts;
  std::array<Table, kNumKeaFeatures> tables;
  bool have_prior = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = SplitTabs(line);
    if (fields[0] == "prior" && fields.size() == 3) {
      priors = {std::stod(fields[1]), std::stod(fields[2])};
      have_prior = true;
    } else if (fields[0] == "bins" && fields.size() >= 2) {
      const size_t f = IndexOf(kFeatureNames, fields[1], "feature");
      for (size_t i = 2; i < fields.size(); ++i) {
        cuts[f].push_back(std::stod(fields[i]));
      }
    } else if (fields[0] == "cond" && fields.size() >= 3) {
      const size_t y = IndexOf(kClassNames, fields[1], "class");
      const size_t f = IndexOf(kFeatureNames, fields[2], "feature");
      for (size_t i = 3; i < fields.size(); ++i) {
        tables[f][y].push_back(std::stod(fields[i]));
      }
    } else {
      throw Error("nb model: unrecognized line '" + line + "'");
    }
  }
  if (!have_prior) throw Error("nb model: missing prior line");
  return NbModel(priors, std::move(cuts), std::move(tables));
}

NbModel TrainNb(std::span<const LabeledExample> examples, size_t bins) {
  if (bins < 2) throw Error("nb training needs at least 2 bins");
  size_t num_keys = 0;
  for (const auto& ex : examples) num_keys += ex.is_key ? 1 : 0;
  if (num_keys == 0 || num_keys == examples.size()) {
    throw Error("nb training needs both key and non-key examples");
  }

  std::array<std::vector<double>, kNumKeaFeatures> cuts;
  for (size_t f = 0; f < kNumKeaFeatures; ++f) {
    std::vector<double> values;
    values.reserve(examples.size());
    for (const auto& ex : examples) values.push_back(FeatureValue(ex.features, f));
    cuts[f] = EqualFrequencyCuts(values, bins);
  }

  std::array<size_t, 2> class_count = {num_keys, examples.size() - num_keys};
  std::array<NbModel::Table, kNumKeaFeatures> tables;
  for (size_t f = 0; f < kNumKeaFeatures; ++f) {
    std::array<std::vector<size_t>, 2> counts = {std::vector<size_t>(bins, 0),
                                                 std::vector<size_t>(bins, 0)};
    for (const auto& ex : examples) {
      const size_t y = ex.is_key ? 0 : 1;
      ++counts[y][BinIndex(cuts[f], FeatureValue(ex.features, f))];
    }
    for (size_t y = 0; y < 2; ++y) {
      tables[f][y].resize(bins);
      for (size_t b = 0; b < bins; ++b) {
        tables[f][y][b] = static_cast<double>(counts[y][b] + 1) /
                          static_cast<double>(class_count[y] + bins);
      }
    }
  }
  const double n = static_cast<double>(examples.size());
  return NbModel({static_cast<double>(class_count[0]) / n,
                  static_cast<double>(class_count[1]) / n},
                 std::move(cuts), std::move(tables));
}

double BayesPosterior(double likelihood, double prior, double evidence) {
  if (!(evidence > 0.0)) throw Error("evidence P(x) must be positive");
  return likelihood * prior / evidence;
}

double Posterior(const NbModel& model, const KeaFeatures& features) {
  const auto bins = model.Bins(features);
  std::array<double, 2> joint{};
  for (NbClass y : {NbClass::kKey, NbClass::kNotKey}) {
    double likelihood = 1.0;
    for (size_t f = 0; f < kNumKeaFeatures; ++f) {
      likelihood *= model.Conditional(f, y, bins[f]);
    }
    joint[static_cast<size_t>(y)] = likelihood * model.prior(y);
  }
  return BayesPosterior(joint[0], 1.0, joint[0] + joint[1]);
}

std::vector<CandidatePhrase> RankCandidatesNb(
    const NbModel& model, std::span<const ScoredCandidate> candidates) {
  std::vector<CandidatePhrase> ranked;
  ranked.reserve(candidates.size());
  for (const ScoredCandidate& c : candidates) {
    CandidatePhrase phrase = c.phrase;
    phrase.weight = Posterior(model, c.features);
    phrase.source = WeightSource::kNaiveBayes;
    ranked.push_back(std::move(phrase));
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const CandidatePhrase& a, const CandidatePhrase& b) {
                     if (a.weight != b.weight) return a.weight > b.weight;
                     return a.begin < b.begin;
                   });
  return ranked;
}

}  // namespace kex
