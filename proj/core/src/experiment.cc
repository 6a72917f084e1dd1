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

#include "kex/experiment.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "kex/error.h"

namespace kex {
namespace {

std::vector<ExtractedPhrase> ToExtracted(
    const std::vector<CandidatePhrase>& ranked) {
  std::vector<ExtractedPhrase> out;
  out.reserve(ranked.size());
  for (const CandidatePhrase& phrase : ranked) {
    out.push_back({phrase.Text(), phrase.weight});
  }
  return out;
}

bool HasWordToken(const TokenSeq& tokens) {
  return std::any_of(tokens.begin(), tokens.end(),
                     [](const Token& t) { return !t.is_symbol; });
}

class TfIdfExtractor : public Extractor {
 public:
  explicit TfIdfExtractor(const ExtractorParams& params) : params_(params) {}
  Method method() const override { return Method::kTfIdf; }

  std::vector<DocumentExtraction> Extract(
      const PreparedCorpus& corpus) const override {
    std::vector<DocumentExtraction> out;
    for (size_t i = 0; i < corpus.docs.size(); ++i) {
      out.push_back({corpus.docs[i].id,
                     ToExtracted(RankByTfIdf(corpus.tokens[i], corpus.df,
                                             params_.candidates))});
    }
    return out;
  }

 private:
  ExtractorParams params_;
};

class TextRankExtractor : public Extractor {
 public:
  explicit TextRankExtractor(const ExtractorParams& params)
      : params_(params) {}
  Method method() const override { return Method::kTextRank; }

  std::vector<DocumentExtraction> Extract(
      const PreparedCorpus& corpus) const override {
    std::vector<DocumentExtraction> out;
    for (size_t i = 0; i < corpus.docs.size(); ++i) {
      out.push_back(
          {corpus.docs[i].id,
           ToExtracted(RankByTextRank(corpus.tokens[i], params_.textrank,
                                      params_.candidates))});
    }
    return out;
  }

 private:
  ExtractorParams params_;
};

class NbExtractor : public Extractor {
 public:
  NbExtractor(const ExtractorParams& params, const PipelineConfig& config)
      : params_(params), matcher_(config) {}
  Method method() const override { return Method::kNaiveBayes; }

  void Train(const PreparedCorpus& train) override {
    const auto examples =
        NbTrainingExamples(train, params_.candidates, matcher_);
    model_ = TrainNb(examples, params_.nb_bins);
  }

  std::vector<DocumentExtraction> Extract(
      const PreparedCorpus& corpus) const override {
    if (!model_) throw Error("nb model is not trained");
    std::vector<DocumentExtraction> out;
    for (size_t i = 0; i < corpus.docs.size(); ++i) {
      DocumentExtraction extraction{corpus.docs[i].id, {}};
      if (HasWordToken(corpus.tokens[i])) {
        const auto scored = ComputeKeaFeatures(
            corpus.tokens[i],
            ExtractCandidates(corpus.tokens[i], params_.candidates),
            corpus.df);
        extraction.phrases = ToExtracted(RankCandidatesNb(*model_, scored));
      }
      out.push_back(std::move(extraction));
    }
    return out;
  }

  void Save(std::ostream& out) const override {
    if (!model_) throw Error("nb model is not trained");
    model_->Save(out);
  }
  void Load(std::istream& in) override { model_ = NbModel::Load(in); }

 private:
  ExtractorParams params_;
  PhraseMatcher matcher_;
  std::optional<NbModel> model_;
};

constexpr Feature kBucketedFeatures[] = {Feature::kFirstOccurrence,
                                         Feature::kTfIdf, Feature::kTextRank};

std::string FormatDouble(double value) {
  std::ostringstream out;
  out.precision(17);
  out << value;
  return out.str();
}

class CrfExtractor : public Extractor {
 public:
  CrfExtractor(const ExtractorParams& params, const PipelineConfig& config)
      : params_(params), matcher_(config) {}
  Method method() const override { return Method::kCrf; }

  void Train(const PreparedCorpus& train) override {
    const FeatureSet& active = params_.crf_features;
    const auto sequences =
        CrfSequences(train, active, params_.textrank, matcher_, true);
    if (sequences.empty()) throw Error("crf training data is empty");
    std::vector<FeatureVector> pooled;
    for (const auto& sequence : sequences) {
      pooled.insert(pooled.end(), sequence.features.begin(),
                    sequence.features.end());
    }
    buckets_ = FeatureBuckets::Fit(pooled, params_.crf_bins);

    CrfModel model;
    model.set_l2(params_.crf.l2);
    std::vector<CrfInstance> instances;
    instances.reserve(sequences.size());
    for (const auto& sequence : sequences) {
      instances.push_back(model.Compile(
          Attributes(sequence, active), sequence.tags,
          sequence.doc_id + "#" + std::to_string(sequence.sentence), true));
    }
    const CrfTrainReport report = TrainCrf(model, instances, params_.crf);

    auto& meta = model.metadata();
    meta["features"] = active.ToString();
    for (Feature f : kBucketedFeatures) {
      meta["cuts." + FeatureName(f)] = buckets_.CutsString(f);
    }
    meta["textrank.window"] = std::to_string(params_.textrank.window);
    meta["textrank.damping"] = FormatDouble(params_.textrank.damping);
    meta["train.epochs"] = std::to_string(report.epochs);
    meta["train.converged"] = report.converged ? "1" : "0";
    meta["train.seed"] = std::to_string(params_.crf.seed);
    model_ = std::move(model);
  }

  std::vector<DocumentExtraction> Extract(
      const PreparedCorpus& corpus) const override {
    if (!model_) throw Error("crf model is not trained");
    const FeatureSet& active = params_.crf_features;
    const auto sequences =
        CrfSequences(corpus, active, params_.textrank, matcher_, false);
    std::map<std::string, std::set<std::string>> found;
    for (const auto& sequence : sequences) {
      const CrfInstance instance = model_->CompileFrozen(
          Attributes(sequence, active), {}, sequence.doc_id);
      const auto tags = ViterbiDecode(*model_, instance);
      for (std::string phrase : DecodeSpans(tags, sequence.lemmas)) {
        found[sequence.doc_id].insert(std::move(phrase));
      }
    }
    std::vector<DocumentExtraction> out;
    for (const Document& doc : corpus.docs) {
      DocumentExtraction extraction{doc.id, {}};
      for (const std::string& phrase : found[doc.id]) {
        extraction.phrases.push_back({phrase, 0.0});
      }
      out.push_back(std::move(extraction));
    }
    return out;
  }

  void Save(std::ostream& out) const override {
    if (!model_) throw Error("crf model is not trained");
    model_->Save(out);
  }

  void Load(std::istream& in) override {
    CrfModel model = CrfModel::Load(in);
    const auto& meta = model.metadata();
    const auto get = [&](const std::string& key) -> const std::string& {
      auto it = meta.find(key);
      if (it == meta.end()) throw Error("crf model lacks metadata " + key);
      return it->second;
    };
    params_.crf_features = FeatureSet::Parse(get("features"));
    for (Feature f : kBucketedFeatures) {
      buckets_.SetCuts(f, get("cuts." + FeatureName(f)));
    }
    params_.textrank.window = std::stoul(get("textrank.window"));
    params_.textrank.damping = std::stod(get("textrank.damping"));
    params_.crf.l2 = model.l2();
    model_ = std::move(model);
  }

 private:
  std::vector<std::vector<std::string>> Attributes(
      const LabeledSequence& sequence, const FeatureSet& active) const {
    std::vector<std::vector<std::string>> attributes;
    attributes.reserve(sequence.features.size());
    for (size_t i = 0; i < sequence.features.size(); ++i) {
      attributes.push_back(
          TokenAttributes(sequence.features, i, active, buckets_));
    }
    return attributes;
  }

  ExtractorParams params_;
  PhraseMatcher matcher_;
  FeatureBuckets buckets_;
  std::optional<CrfModel> model_;
};

double SecondsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

}  // namespace

std::string_view MethodName(Method method) {
  switch (method) {
    case Method::kTfIdf: return "tfidf";
    case Method::kTextRank: return "textrank";
    case Method::kNaiveBayes: return "nb";
    case Method::kCrf: return "crf";
  }
  return "?";
}

Method ParseMethod(std::string_view name) {
  for (Method method : AllMethods()) {
    if (MethodName(method) == name) return method;
  }
  throw Error("unknown method '" + std::string(name) +
              "' (expected tfidf, textrank, nb or crf)");
}

bool IsSupervised(Method method) {
  return method == Method::kNaiveBayes || method == Method::kCrf;
}

const std::vector<Method>& AllMethods() {
  static const std::vector<Method> methods = {
      Method::kTfIdf, Method::kTextRank, Method::kNaiveBayes, Method::kCrf};
  return methods;
}

PreparedCorpus PrepareCorpus(std::span<const Document> docs,
                             const CorpusVariant& variant,
                             const PipelineConfig& config) {
  if (docs.empty()) throw Error("corpus " + variant.code() + " is empty");
  std::vector<TokenSeq> tokens;
  tokens.reserve(docs.size());
  for (const Document& doc : docs) {
    tokens.push_back(Preprocess(AssembleVariant(doc, variant), config));
  }
  DfIndex df = DfIndex::Build(tokens);
  return PreparedCorpus{variant, std::vector<Document>(docs.begin(), docs.end()),
                        std::move(tokens), std::move(df)};
}

void Extractor::Save(std::ostream&) const {
  throw Error(std::string(MethodName(method())) + " has no model to save");
}

void Extractor::Load(std::istream&) {
  throw Error(std::string(MethodName(method())) + " has no model to load");
}

std::unique_ptr<Extractor> MakeExtractor(Method method,
                                         const ExtractorParams& params,
                                         const PipelineConfig& config) {
  switch (method) {
    case Method::kTfIdf: return std::make_unique<TfIdfExtractor>(params);
    case Method::kTextRank: return std::make_unique<TextRankExtractor>(params);
    case Method::kNaiveBayes:
      return std::make_unique<NbExtractor>(params, config);
    case Method::kCrf: return std::make_unique<CrfExtractor>(params, config);
  }
  throw Error("unknown method");
}

std::vector<LabeledExample> NbTrainingExamples(const PreparedCorpus& corpus,
                                               const CandidateOptions& options,
                                               const PhraseMatcher& matcher) {
  std::vector<LabeledExample> examples;
  for (size_t i = 0; i < corpus.docs.size(); ++i) {
    if (!HasWordToken(corpus.tokens[i])) continue;
    const auto gold_list = matcher.NormalizeSet(corpus.docs[i].gold_keyphrases);
    const std::unordered_set<std::string> gold(gold_list.begin(),
                                               gold_list.end());
    const auto scored = ComputeKeaFeatures(
        corpus.tokens[i], ExtractCandidates(corpus.tokens[i], options),
        corpus.df);
    for (const ScoredCandidate& c : scored) {
      examples.push_back({c.features, gold.count(c.phrase.Text()) > 0});
    }
  }
  return examples;
}

std::vector<LabeledSequence> CrfSequences(const PreparedCorpus& corpus,
                                          const FeatureSet& active,
                                          const TextRankParams& textrank,
                                          const PhraseMatcher& matcher,
                                          bool labeled) {
  FeatureContext context;
  context.config = &matcher.config();
  context.df_index = &corpus.df;
  context.textrank = textrank;
  std::vector<LabeledSequence> sequences;
  for (size_t i = 0; i < corpus.docs.size(); ++i) {
    const Document& doc = corpus.docs[i];
    const auto features =
        ExtractFeatures(doc, corpus.tokens[i], active, context);
    std::vector<std::vector<std::string>> gold;
    if (labeled) {
      for (const std::string& phrase : doc.gold_keyphrases) {
        auto words = matcher.NormalizeWords(phrase);
        if (!words.empty()) gold.push_back(std::move(words));
      }
    }
    auto doc_sequences = BuildSequences(doc, corpus.tokens[i], features,
                                        labeled ? &gold : nullptr);
    for (auto& sequence : doc_sequences) {
      sequences.push_back(std::move(sequence));
    }
  }
  return sequences;
}

EvalCounts EvaluateExtractions(const PreparedCorpus& corpus,
                               std::span<const DocumentExtraction> extractions,
                               size_t top_n, const PhraseMatcher& matcher) {
  std::unordered_map<std::string, const DocumentExtraction*> by_id;
  for (const DocumentExtraction& e : extractions) by_id[e.doc_id] = &e;
  EvalCounts total;
  for (const Document& doc : corpus.docs) {
    std::vector<std::string> extracted;
    if (auto it = by_id.find(doc.id); it != by_id.end()) {
      const auto& phrases = it->second->phrases;
      const size_t keep =
          top_n == 0 ? phrases.size() : std::min(top_n, phrases.size());
      for (size_t k = 0; k < keep; ++k) extracted.push_back(phrases[k].text);
    }
    total += matcher.Match(extracted, doc.gold_keyphrases);
  }
  return total;
}

AblationResult AblateCrf(std::span<const Document> train,
                         const CorpusVariant& variant,
                         const ExtractorParams& params,
                         const PipelineConfig& config, uint64_t seed) {
  const DatasetSplit split = SplitDataset(train, seed, 1);
  const auto inner_train = SelectDocuments(train, split.train);
  const auto dev = SelectDocuments(train, split.test);
  const PreparedCorpus train_corpus = PrepareCorpus(inner_train, variant, config);
  const PreparedCorpus dev_corpus = PrepareCorpus(dev, variant, config);
  const PhraseMatcher matcher(config);
  const auto evaluate = [&](const FeatureSet& features) {
    ExtractorParams p = params;
    p.crf_features = features;
    p.crf.seed = seed;
    auto extractor = MakeExtractor(Method::kCrf, p, config);
    extractor->Train(train_corpus);
    const auto extractions = extractor->Extract(dev_corpus);
    return ComputePrf(EvaluateExtractions(dev_corpus, extractions, 0, matcher))
        .f1;
  };
  return AblateFeatures(params.crf_features, evaluate);
}

MatrixResult RunMatrix(std::span<const Document> train,
                       std::span<const Document> test,
                       const MatrixConfig& config,
                       const PipelineConfig& pipeline) {
  const bool needs_seed =
      std::any_of(config.methods.begin(), config.methods.end(), IsSupervised);
  if (needs_seed && !config.seed) {
    throw Error("supervised methods need an explicit seed");
  }
  for (size_t n : config.top_n) {
    if (n == 0) throw Error("top-N values must be positive");
  }

  struct Cell {
    Method method;
    const CorpusVariant* variant;
    std::vector<MatrixRow> rows;
    CellTiming timing;
    std::optional<std::string> error;
  };
  std::vector<Cell> cells;
  for (Method method : config.methods) {
    for (const CorpusVariant& variant : config.variants) {
      Cell cell{method, &variant, {}, {method, variant.code(), 0.0, 0.0}, {}};
      cells.push_back(std::move(cell));
    }
  }

  const PhraseMatcher matcher(pipeline);
  const auto run_cell = [&](Cell& cell) {
    try {
      ExtractorParams params = config.params;
      if (config.seed) params.crf.seed = *config.seed;
      auto extractor = MakeExtractor(cell.method, params, pipeline);

      auto start = std::chrono::steady_clock::now();
      if (extractor->supervised()) {
        const PreparedCorpus train_corpus =
            PrepareCorpus(train, *cell.variant, pipeline);
        extractor->Train(train_corpus);
      }
      cell.timing.train_seconds = SecondsSince(start);

      start = std::chrono::steady_clock::now();
      const PreparedCorpus test_corpus =
          PrepareCorpus(test, *cell.variant, pipeline);
      const auto extractions = extractor->Extract(test_corpus);
      cell.timing.test_seconds = SecondsSince(start);

      std::vector<size_t> top_n = config.top_n;
      if (cell.method == Method::kCrf) top_n = {0};
      for (size_t n : top_n) {
        MatrixRow row{cell.method, cell.variant->code(), n, {}, {}};
        row.counts = EvaluateExtractions(test_corpus, extractions, n, matcher);
        row.prf = ComputePrf(row.counts);
        cell.rows.push_back(row);
      }
    } catch (const std::exception& e) {
      cell.rows.clear();
      cell.error = e.what();
    }
  };

  const size_t jobs = std::max<size_t>(1, std::min(config.jobs, cells.size()));
  std::atomic<size_t> next{0};
  const auto worker = [&] {
    for (size_t i = next++; i < cells.size(); i = next++) run_cell(cells[i]);
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (size_t j = 0; j < jobs; ++j) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }

  MatrixResult result;
  for (Cell& cell : cells) {
    if (cell.error) {
      result.errors.push_back(
          {cell.method, cell.variant->code(), std::move(*cell.error)});
      continue;
    }
    result.rows.insert(result.rows.end(), cell.rows.begin(), cell.rows.end());
    result.timings.push_back(cell.timing);
  }
  return result;
}

}  // namespace kex
