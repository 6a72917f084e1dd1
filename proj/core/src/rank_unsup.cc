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

#include "kex/rank_unsup.h"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "kex/error.h"

namespace kex {
namespace {

bool IsGraphCandidate(const Token& token) {
  return IsContentToken(token) &&
         (token.pos == Pos::kNoun || token.pos == Pos::kVerb ||
          token.pos == Pos::kAdj);
}

bool IsPhraseToken(const Token& token) {
  return IsContentToken(token) &&
         (token.pos == Pos::kNoun || token.pos == Pos::kAdj);
}

// True if tokens [begin, end) match (ADJ)*(NOUN)+.
bool MatchesPattern(const TokenSeq& doc, size_t begin, size_t end) {
  if (doc[end - 1].pos != Pos::kNoun) return false;
  bool seen_noun = false;
  for (size_t i = begin; i < end; ++i) {
    if (!IsPhraseToken(doc[i])) return false;
    if (doc[i].pos == Pos::kNoun) {
      seen_noun = true;
    } else if (seen_noun) {
      return false;
    }
  }
  return true;
}

std::unordered_map<std::string, size_t> ContentFrequencies(
    const TokenSeq& doc) {
  std::unordered_map<std::string, size_t> freq;
  for (const Token& token : doc) {
    if (IsContentToken(token)) ++freq[token.lemma];
  }
  return freq;
}

double Idf(size_t num_docs, size_t doc_freq) {
  return std::log2(static_cast<double>(num_docs + 1) /
                   static_cast<double>(doc_freq + 1));
}

}  // namespace

DfIndex DfIndex::Build(std::span<const TokenSeq> corpus) {
  if (corpus.empty()) throw Error("cannot build a DF index of no documents");
  DfIndex index;
  index.num_docs_ = corpus.size();
  for (const TokenSeq& doc : corpus) {
    std::unordered_set<std::string> seen;
    for (const Token& token : doc) {
      if (IsContentToken(token) && seen.insert(token.lemma).second) {
        ++index.df_[token.lemma];
      }
    }
  }
  return index;
}

size_t DfIndex::DocFreq(std::string_view lemma) const {
  auto it = df_.find(std::string(lemma));
  return it == df_.end() ? 0 : it->second;
}

double TfIdfScore(const TokenSeq& doc, std::string_view lemma,
                  const DfIndex& index) {
  const auto freq = ContentFrequencies(doc);
  auto it = freq.find(std::string(lemma));
  if (it == freq.end()) {
    throw Error("word '" + std::string(lemma) + "' does not occur in document");
  }
  size_t max_freq = 0;
  for (const auto& [word, count] : freq) max_freq = std::max(max_freq, count);
  return static_cast<double>(it->second) / static_cast<double>(max_freq) *
         Idf(index.num_docs(), index.DocFreq(lemma));
}

WordWeights TfIdfWeights(const TokenSeq& doc, const DfIndex& index) {
  const auto freq = ContentFrequencies(doc);
  size_t max_freq = 0;
  for (const auto& [word, count] : freq) max_freq = std::max(max_freq, count);
  WordWeights weights;
  for (const auto& [word, count] : freq) {
    weights[word] = static_cast<double>(count) /
                    static_cast<double>(max_freq) *
                    Idf(index.num_docs(), index.DocFreq(word));
  }
  return weights;
}

WordGraph::WordGraph(double damping) : damping_(damping) {
  if (!(damping > 0.0 && damping < 1.0)) {
    throw Error("damping must lie in (0, 1)");
  }
}

size_t WordGraph::AddNode(std::string_view word) {
  auto [it, inserted] = ids_.emplace(std::string(word), nodes_.size());
  if (inserted) {
    nodes_.emplace_back(word);
    adjacency_.emplace_back();
  }
  return it->second;
}

void WordGraph::AddEdge(std::string_view a, std::string_view b,
                        double weight) {
  if (!(weight > 0.0)) throw Error("edge weight must be positive");
  const size_t u = AddNode(a);
  const size_t v = AddNode(b);
  if (u == v) return;
  const auto bump = [&](size_t from, size_t to) {
    for (Edge& edge : adjacency_[from]) {
      if (edge.to == to) {
        edge.weight += weight;
        return;
      }
    }
    adjacency_[from].push_back({to, weight});
  };
  bump(u, v);
  bump(v, u);
}

double WordGraph::EdgeWeight(std::string_view a, std::string_view b) const {
  auto ia = ids_.find(std::string(a));
  auto ib = ids_.find(std::string(b));
  if (ia == ids_.end() || ib == ids_.end()) return 0.0;
  for (const Edge& edge : adjacency_[ia->second]) {
    if (edge.to == ib->second) return edge.weight;
  }
  return 0.0;
}

size_t WordGraph::num_edges() const {
  size_t directed = 0;
  for (const auto& edges : adjacency_) directed += edges.size();
  return directed / 2;
}

WordGraph BuildWordGraph(const TokenSeq& doc, size_t window, double damping) {
  if (window < 2) throw Error("co-occurrence window must be at least 2");
  WordGraph graph(damping);
  std::vector<const Token*> filtered;
  const auto flush = [&] {
    for (size_t i = 0; i < filtered.size(); ++i) {
      for (size_t j = i + 1; j < filtered.size() && j - i < window; ++j) {
        graph.AddEdge(filtered[i]->lemma, filtered[j]->lemma);
      }
    }
    filtered.clear();
  };
  size_t sentence = doc.empty() ? 0 : doc.front().sentence;
  for (const Token& token : doc) {
    if (token.sentence != sentence) {
      flush();
      sentence = token.sentence;
    }
    if (IsGraphCandidate(token)) {
      graph.AddNode(token.lemma);
      filtered.push_back(&token);
    }
  }
  flush();
  return graph;
}

TextRankResult TextRankScores(const WordGraph& graph,
                              const TextRankOptions& options) {
  if (!(options.tolerance > 0.0)) throw Error("tolerance must be positive");
  if (options.max_iterations < 1) throw Error("max_iterations must be >= 1");

  const size_t n = graph.num_nodes();
  const double d = graph.damping();
  std::vector<double> out_weight(n, 0.0);
  for (size_t j = 0; j < n; ++j) {
    for (const auto& edge : graph.neighbors(j)) out_weight[j] += edge.weight;
  }

  std::vector<double> score(n, options.initial_score);
  std::vector<double> next(n);
  TextRankResult result;
  result.converged = false;
  for (int iteration = 1; iteration <= options.max_iterations; ++iteration) {
    double max_change = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      // Undirected graph: the in-neighbours of i are its neighbours.
      for (const auto& edge : graph.neighbors(i)) {
        sum += edge.weight / out_weight[edge.to] * score[edge.to];
      }
      next[i] = (1.0 - d) + d * sum;
      max_change = std::max(max_change, std::fabs(next[i] - score[i]));
    }
    score.swap(next);
    result.iterations = iteration;
    if (max_change < options.tolerance) {
      result.converged = true;
      break;
    }
  }
  for (size_t i = 0; i < n; ++i) result.scores[graph.nodes()[i]] = score[i];
  return result;
}

std::string CandidatePhrase::Text() const {
  std::string text;
  for (const std::string& lemma : lemmas) {
    if (!text.empty()) text += ' ';
    text += lemma;
  }
  return text;
}

std::vector<CandidatePhrase> ExtractCandidates(const TokenSeq& doc,
                                               const CandidateOptions& options) {
  if (options.max_phrase_len < 1) throw Error("max_phrase_len must be >= 1");
  struct Span {
    size_t begin, end;
  };
  std::vector<Span> spans;
  for (size_t begin = 0; begin < doc.size(); ++begin) {
    for (size_t len = 1;
         len <= options.max_phrase_len && begin + len <= doc.size(); ++len) {
      if (!IsPhraseToken(doc[begin + len - 1])) break;
      if (MatchesPattern(doc, begin, begin + len)) {
        spans.push_back({begin, begin + len});
      }
    }
  }
  if (options.maximal_only) {
    std::vector<Span> maximal;
    for (const Span& s : spans) {
      const bool contained = std::any_of(
          spans.begin(), spans.end(), [&](const Span& other) {
            return other.begin <= s.begin && s.end <= other.end &&
                   (other.end - other.begin) > (s.end - s.begin);
          });
      if (!contained) maximal.push_back(s);
    }
    spans.swap(maximal);
  }

  std::vector<CandidatePhrase> candidates;
  std::unordered_set<std::string> seen;
  for (const Span& s : spans) {
    CandidatePhrase phrase;
    for (size_t i = s.begin; i < s.end; ++i) {
      phrase.lemmas.push_back(doc[i].lemma);
    }
    phrase.begin = s.begin;
    phrase.end = s.end;
    if (seen.insert(phrase.Text()).second) {
      candidates.push_back(std::move(phrase));
    }
  }
  return candidates;
}

double PhraseWeight(const CandidatePhrase& phrase, const WordWeights& weights) {
  if (phrase.lemmas.empty()) return 0.0;
  double sum = 0.0;
  for (const std::string& lemma : phrase.lemmas) {
    auto it = weights.find(lemma);
    if (it != weights.end()) sum += it->second;
  }
  return sum / static_cast<double>(phrase.lemmas.size());
}

std::vector<CandidatePhrase> TopNPhrases(
    std::vector<CandidatePhrase> candidates, size_t n) {
  if (n < 1) throw Error("top-N needs n >= 1");
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const CandidatePhrase& a, const CandidatePhrase& b) {
                     if (a.weight != b.weight) return a.weight > b.weight;
                     if (a.begin != b.begin) return a.begin < b.begin;
                     return a.lemmas < b.lemmas;
                   });
  if (candidates.size() > n) candidates.resize(n);
  return candidates;
}

std::vector<CandidatePhrase> RankByTfIdf(const TokenSeq& doc,
                                         const DfIndex& index,
                                         const CandidateOptions& options) {
  const WordWeights weights = TfIdfWeights(doc, index);
  auto candidates = ExtractCandidates(doc, options);
  for (CandidatePhrase& phrase : candidates) {
    phrase.weight = PhraseWeight(phrase, weights);
    phrase.source = WeightSource::kTfIdf;
  }
  const size_t n = candidates.size();
  return n == 0 ? candidates : TopNPhrases(std::move(candidates), n);
}

std::vector<CandidatePhrase> RankByTextRank(const TokenSeq& doc,
                                            const TextRankParams& params,
                                            const CandidateOptions& options) {
  const WordGraph graph = BuildWordGraph(doc, params.window, params.damping);
  const TextRankResult ranked = TextRankScores(graph, params.iteration);
  const WordWeights weights(ranked.scores.begin(), ranked.scores.end());
  auto candidates = ExtractCandidates(doc, options);
  for (CandidatePhrase& phrase : candidates) {
    phrase.weight = PhraseWeight(phrase, weights);
    phrase.source = WeightSource::kTextRank;
  }
  const size_t n = candidates.size();
  return n == 0 ? candidates : TopNPhrases(std::move(candidates), n);
}

}  // namespace kex
