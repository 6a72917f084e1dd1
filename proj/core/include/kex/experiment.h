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

// Extraction methods behind a common interface, and the experiment matrix
// (methods x corpus variants x top-N) used by the command-line driver.

#ifndef KEX_EXPERIMENT_H_
#define KEX_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kex/corpus.h"
#include "kex/crf.h"
#include "kex/crf_features.h"
#include "kex/eval.h"
#include "kex/naive_bayes.h"
#include "kex/rank_unsup.h"

namespace kex {

enum class Method { kTfIdf, kTextRank, kNaiveBayes, kCrf };

// "tfidf", "textrank", "nb", "crf".
std::string_view MethodName(Method method);
Method ParseMethod(std::string_view name);
bool IsSupervised(Method method);
// Methods in report row order.
const std::vector<Method>& AllMethods();

// The documents of one split rendered as one corpus variant, preprocessed,
// with DF statistics over exactly these documents.
struct PreparedCorpus {
  CorpusVariant variant;
  std::vector<Document> docs;
  std::vector<TokenSeq> tokens;
  DfIndex df;
};

PreparedCorpus PrepareCorpus(std::span<const Document> docs,
                             const CorpusVariant& variant,
                             const PipelineConfig& config);

struct ExtractorParams {
  TextRankParams textrank;
  CandidateOptions candidates;
  size_t nb_bins = kDefaultNbBins;
  size_t crf_bins = FeatureBuckets::kDefaultBins;
  FeatureSet crf_features = FeatureSet::All();
  CrfTrainOptions crf;
};

struct ExtractedPhrase {
  std::string text;  // space-joined lemmas
  double weight = 0.0;
};

struct DocumentExtraction {
  std::string doc_id;
  // Best first for ranked methods; sorted by text for the CRF, whose
  // output carries no weights.
  std::vector<ExtractedPhrase> phrases;
};

class Extractor {
 public:
  virtual ~Extractor() = default;

  virtual Method method() const = 0;
  bool supervised() const { return IsSupervised(method()); }

  // Unsupervised methods ignore training.
  virtual void Train(const PreparedCorpus& train) { (void)train; }
  virtual std::vector<DocumentExtraction> Extract(
      const PreparedCorpus& corpus) const = 0;

  // Model persistence; throws kex::Error for unsupervised methods or an
  // untrained model.
  virtual void Save(std::ostream& out) const;
  virtual void Load(std::istream& in);
};

std::unique_ptr<Extractor> MakeExtractor(Method method,
                                         const ExtractorParams& params,
                                         const PipelineConfig& config);

// Candidate-level training examples for the Naive Bayes classifier. A
// candidate is positive when its lemma sequence equals a normalized gold
// phrase of its document.
std::vector<LabeledExample> NbTrainingExamples(const PreparedCorpus& corpus,
                                               const CandidateOptions& options,
                                               const PhraseMatcher& matcher);

// Sentence sequences with features for every document of `corpus`. Gold
// tags are attached when `labeled`.
std::vector<LabeledSequence> CrfSequences(const PreparedCorpus& corpus,
                                          const FeatureSet& active,
                                          const TextRankParams& textrank,
                                          const PhraseMatcher& matcher,
                                          bool labeled);

// Micro-averaged counts of `extractions` against the gold phrases of
// `corpus`, keeping the first `top_n` phrases per document (0 keeps all).
EvalCounts EvaluateExtractions(const PreparedCorpus& corpus,
                               std::span<const DocumentExtraction> extractions,
                               size_t top_n, const PhraseMatcher& matcher);

// Leave-one-out CRF feature ablation on an internal 90/10 split of `train`.
AblationResult AblateCrf(std::span<const Document> train,
                         const CorpusVariant& variant,
                         const ExtractorParams& params,
                         const PipelineConfig& config, uint64_t seed);

inline constexpr size_t kCanonicalTopN[] = {3, 5, 7, 10};

struct MatrixConfig {
  std::vector<Method> methods;
  std::vector<CorpusVariant> variants;
  std::vector<size_t> top_n = {3, 5, 7, 10};
  ExtractorParams params;
  std::optional<uint64_t> seed;
  size_t jobs = 1;
};

struct MatrixRow {
  Method method;
  std::string variant;
  size_t top_n = 0;  // 0: all phrases (CRF)
  EvalCounts counts;
  Prf prf;
};

struct CellTiming {
  Method method;
  std::string variant;
  double train_seconds = 0.0;
  double test_seconds = 0.0;
};

struct CellError {
  Method method;
  std::string variant;
  std::string message;
};

struct MatrixResult {
  std::vector<MatrixRow> rows;        // method, variant, top_n order
  std::vector<CellTiming> timings;    // method, variant order
  std::vector<CellError> errors;
  bool ok() const { return errors.empty(); }
};

// Runs every method x variant cell: train on `train`, extract from `test`,
// evaluate at each N. Cells run on up to `jobs` threads and are merged in
// a fixed order. A failing cell is recorded and the rest continue. Throws
// kex::Error before running if a supervised method is requested without a
// seed.
MatrixResult RunMatrix(std::span<const Document> train,
                       std::span<const Document> test,
                       const MatrixConfig& config,
                       const PipelineConfig& pipeline);

}  // namespace kex

#endif  // KEX_EXPERIMENT_H_
