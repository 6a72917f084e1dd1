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

// Unsupervised keyphrase ranking: TF*IDF and TextRank word weights,
// (ADJ)*(NOUN)+ candidate phrases, phrase weights as the mean of member word
// weights, and top-N selection.

#ifndef KEX_RANK_UNSUP_H_
#define KEX_RANK_UNSUP_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kex/preprocess.h"

namespace kex {

using WordWeights = std::unordered_map<std::string, double>;

// Tokens that carry content: neither stopwords nor symbols.
inline bool IsContentToken(const Token& token) {
  return !token.is_stopword && !token.is_symbol;
}

// Document frequencies over a corpus of preprocessed documents.
class DfIndex {
 public:
  // Throws kex::Error for an empty corpus.
  static DfIndex Build(std::span<const TokenSeq> corpus);

  size_t num_docs() const { return num_docs_; }
  // Number of documents containing `lemma`; 0 when unseen.
  size_t DocFreq(std::string_view lemma) const;
  size_t vocabulary_size() const { return df_.size(); }

 private:
  size_t num_docs_ = 0;
  std::unordered_map<std::string, size_t> df_;
};

// Freq(w) / max_Freq * log2((N + 1) / (n + 1)), with frequencies over the
// document's content tokens. Throws kex::Error if `lemma` is not a content
// lemma of `doc`.
double TfIdfScore(const TokenSeq& doc, std::string_view lemma,
                  const DfIndex& index);

// TF*IDF of every content lemma of `doc`.
WordWeights TfIdfWeights(const TokenSeq& doc, const DfIndex& index);

// Undirected weighted co-occurrence graph used by TextRank.
class WordGraph {
 public:
  struct Edge {
    size_t to;
    double weight;
  };

  explicit WordGraph(double damping = 0.85);

  // Returns the node id, adding the node if new.
  size_t AddNode(std::string_view word);
  // Adds `weight` to the undirected edge (a, b). Self-loops are ignored.
  void AddEdge(std::string_view a, std::string_view b, double weight = 1.0);

  double EdgeWeight(std::string_view a, std::string_view b) const;
  size_t num_nodes() const { return nodes_.size(); }
  size_t num_edges() const;
  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<Edge>& neighbors(size_t node) const {
    return adjacency_[node];
  }
  double damping() const { return damping_; }

 private:
  double damping_;
  std::vector<std::string> nodes_;
  std::unordered_map<std::string, size_t> ids_;
  std::vector<std::vector<Edge>> adjacency_;
};

inline constexpr double kDefaultDamping = 0.85;
inline constexpr size_t kDefaultWindow = 2;

// Nodes are the distinct NOUN/VERB/ADJ content lemmas. Two nodes are linked
// once for each pair of such tokens at most `window` - 1 positions apart in
// the filtered token stream of one sentence. Throws for window < 2 or a
// damping outside (0, 1).
WordGraph BuildWordGraph(const TokenSeq& doc, size_t window = kDefaultWindow,
                         double damping = kDefaultDamping);

struct TextRankOptions {
  double tolerance = 1e-6;
  int max_iterations = 200;
  double initial_score = 1.0;
};

struct TextRankResult {
  std::map<std::string, double> scores;
  int iterations = 0;
  // False when max_iterations was reached first; scores hold the last
  // iterate.
  bool converged = true;
};

// Synchronous (Jacobi) iteration of
//   S(i) = (1 - d) + d * sum_j w_ji / sum_k w_jk * S(j)
// until the largest per-node change drops below the tolerance.
TextRankResult TextRankScores(const WordGraph& graph,
                              const TextRankOptions& options = {});

enum class WeightSource { kNone, kTfIdf, kTextRank, kNaiveBayes };

struct CandidatePhrase {
  std::vector<std::string> lemmas;
  // Token range [begin, end) of the first occurrence.
  size_t begin = 0;
  size_t end = 0;
  double weight = 0.0;
  WeightSource source = WeightSource::kNone;

  std::string Text() const;
};

struct CandidateOptions {
  size_t max_phrase_len = 4;
  // Keep only spans not contained in a longer matching span.
  bool maximal_only = false;
};

// All token spans of 1..max_phrase_len content tokens matching
// (ADJ)*(NOUN)+, de-duplicated by lemma sequence keeping the earliest
// occurrence. Ordered by first occurrence, then length.
std::vector<CandidatePhrase> ExtractCandidates(
    const TokenSeq& doc, const CandidateOptions& options = {});

// Mean of the member word weights; missing words count as 0.
double PhraseWeight(const CandidatePhrase& phrase, const WordWeights& weights);

// Sorts by weight descending, then earlier first occurrence, then lemma
// sequence, and keeps the first min(n, size) entries.
std::vector<CandidatePhrase> TopNPhrases(
    std::vector<CandidatePhrase> candidates, size_t n);

// Candidates weighted by TF*IDF, fully ranked.
std::vector<CandidatePhrase> RankByTfIdf(const TokenSeq& doc,
                                         const DfIndex& index,
                                         const CandidateOptions& options = {});

struct TextRankParams {
  size_t window = kDefaultWindow;
  double damping = kDefaultDamping;
  TextRankOptions iteration;
};

// Candidates weighted by TextRank, fully ranked.
std::vector<CandidatePhrase> RankByTextRank(
    const TokenSeq& doc, const TextRankParams& params = {},
    const CandidateOptions& options = {});

}  // namespace kex

#endif  // KEX_RANK_UNSUP_H_
