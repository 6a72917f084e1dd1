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

// Helpers shared by the test binaries.

#ifndef KEX_TESTS_TEST_UTIL_H_
#define KEX_TESTS_TEST_UTIL_H_

#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kex/crf.h"
#include "kex/preprocess.h"
#include "kex/rank_unsup.h"

namespace kex::testing {

inline std::string FixturePath(const std::string& name) {
  return std::string(KEX_FIXTURE_DIR) + "/" + name;
}

inline std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// A preprocessed token built by hand.
inline Token MakeToken(const std::string& lemma, Pos pos, size_t index,
                       bool stopword = false, bool symbol = false,
                       size_t sentence = 0) {
  Token token;
  token.surface = lemma;
  token.lemma = lemma;
  token.pos = pos;
  token.index = index;
  token.sentence = sentence;
  token.is_stopword = stopword;
  token.is_symbol = symbol;
  return token;
}

// Content nouns, one per lemma.
inline TokenSeq Nouns(const std::vector<std::string>& lemmas) {
  TokenSeq tokens;
  for (const auto& lemma : lemmas) {
    tokens.push_back(MakeToken(lemma, Pos::kNoun, tokens.size()));
  }
  return tokens;
}

// Random toy corpus: up to 10 documents of up to 50 tokens drawn from a
// small vocabulary, with some stopwords mixed in.
inline std::vector<TokenSeq> RandomCorpus(std::mt19937_64& rng) {
  static const std::vector<std::string> vocabulary = {
      "alpha", "beta", "gamma", "delta", "eps", "zeta", "eta", "theta"};
  std::uniform_int_distribution<int> num_docs(1, 10), length(1, 50);
  std::uniform_int_distribution<size_t> word(0, vocabulary.size() - 1);
  std::bernoulli_distribution stop(0.15);
  std::vector<TokenSeq> corpus(num_docs(rng));
  for (TokenSeq& doc : corpus) {
    const int n = length(rng);
    for (int i = 0; i < n; ++i) {
      const bool is_stop = stop(rng);
      doc.push_back(MakeToken(is_stop ? "the" : vocabulary[word(rng)],
                              Pos::kNoun, doc.size(), is_stop));
    }
  }
  return corpus;
}

// Direct count-and-formula TF*IDF.
inline double BruteForceTfIdf(const std::vector<TokenSeq>& corpus,
                              const TokenSeq& doc, const std::string& word) {
  std::map<std::string, double> freq;
  for (const Token& t : doc) {
    if (!t.is_stopword && !t.is_symbol) freq[t.lemma] += 1.0;
  }
  double max_freq = 0.0;
  for (const auto& [w, f] : freq) max_freq = std::max(max_freq, f);
  double containing = 0.0;
  for (const TokenSeq& d : corpus) {
    bool found = false;
    for (const Token& t : d) {
      found = found || (!t.is_stopword && !t.is_symbol && t.lemma == word);
    }
    containing += found ? 1.0 : 0.0;
  }
  const double n_docs = static_cast<double>(corpus.size());
  return freq[word] / max_freq *
         std::log2((n_docs + 1.0) / (containing + 1.0));
}

// Every span of content tokens that fits the pattern, by enumeration.
inline std::set<std::string> BruteForceCandidates(const TokenSeq& doc,
                                                  size_t max_len) {
  std::set<std::string> out;
  for (size_t i = 0; i < doc.size(); ++i) {
    for (size_t len = 1; len <= max_len && i + len <= doc.size(); ++len) {
      bool ok = true;
      bool seen_noun = false;
      std::string text;
      for (size_t k = i; k < i + len; ++k) {
        const Token& t = doc[k];
        if (!IsContentToken(t)) ok = false;
        if (t.pos == Pos::kNoun) seen_noun = true;
        else if (t.pos != Pos::kAdj || seen_noun) ok = false;
        text += (k == i ? "" : " ") + t.lemma;
      }
      if (ok && doc[i + len - 1].pos == Pos::kNoun) out.insert(text);
    }
  }
  return out;
}

// Random CRF instance over `num_attributes` attributes, 1-3 per position.
inline CrfInstance RandomInstance(std::mt19937_64& rng, size_t length,
                                  uint32_t num_attributes, bool labeled) {
  std::uniform_int_distribution<uint32_t> attribute(0, num_attributes - 1);
  std::uniform_int_distribution<int> count(1, 3);
  CrfInstance instance;
  for (size_t i = 0; i < length; ++i) {
    std::set<uint32_t> ids;
    const int k = count(rng);
    for (int j = 0; j < k; ++j) ids.insert(attribute(rng));
    instance.attributes.emplace_back(ids.begin(), ids.end());
  }
  if (labeled) {
    // A random legal sequence: walk the transition mask.
    std::vector<Tag> tags;
    for (size_t i = 0; i < length; ++i) {
      std::vector<Tag> options;
      for (Tag t : kAllTags) {
        if (i == 0 || IsLegalTransition(tags.back(), t)) options.push_back(t);
      }
      std::uniform_int_distribution<size_t> pick(0, options.size() - 1);
      tags.push_back(options[pick(rng)]);
    }
    instance.tags = tags;
  }
  return instance;
}

// A model with `num_attributes` attributes and N(0, scale) weights.
inline CrfModel RandomModel(std::mt19937_64& rng, uint32_t num_attributes,
                            double scale = 1.0) {
  CrfModel model;
  for (uint32_t a = 0; a < num_attributes; ++a) {
    model.AddAttribute("a" + std::to_string(a));
  }
  std::normal_distribution<double> normal(0.0, scale);
  std::vector<double> weights(model.num_weights());
  for (double& w : weights) w = normal(rng);
  model.set_weights(weights);
  return model;
}

// Every tag sequence of `length`, legal or not.
inline std::vector<std::vector<Tag>> AllTagSequences(size_t length) {
  std::vector<std::vector<Tag>> out = {{}};
  for (size_t i = 0; i < length; ++i) {
    std::vector<std::vector<Tag>> next;
    for (const auto& prefix : out) {
      for (Tag t : kAllTags) {
        auto seq = prefix;
        seq.push_back(t);
        next.push_back(std::move(seq));
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace kex::testing

#endif  // KEX_TESTS_TEST_UTIL_H_
