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

#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <functional>
#include <memory>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "kex/error.h"
#include "test_util.h"

namespace kex {
namespace {

bool HasAttribute(const std::vector<std::string>& attrs,
                  const std::string& prefix) {
  return std::any_of(attrs.begin(), attrs.end(), [&](const std::string& a) {
    return a.rfind(prefix, 0) == 0;
  });
}

size_t IndexOf(const TokenSeq& tokens, const std::string& lemma) {
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].lemma == lemma) return i;
  }
  ADD_FAILURE() << "no token " << lemma;
  return 0;
}

class FeatureFixture : public ::testing::Test {
 protected:
  FeatureFixture() {
    doc_.id = "d";
    doc_.title = "Data mining for text";
    doc_.abstract = "Data mining is useful. Extraordinarilylongwordforms help.";
    doc_.reference_titles = {"Useful data", "Mining data streams"};
    doc_.full_text =
        "data data data data data data data mining useful";
    doc_.gold_keyphrases = {"data mining"};
    tokens_ = Preprocess(AssembleVariant(doc_, CorpusVariant::Parse("TA")),
                         config_);
    corpus_ = {tokens_, Preprocess("other words", config_)};
    index_ = std::make_unique<DfIndex>(DfIndex::Build(corpus_));
    context_.df_index = index_.get();
  }

  const PipelineConfig& config_ = PipelineConfig::Default();
  Document doc_;
  TokenSeq tokens_;
  std::vector<TokenSeq> corpus_;
  std::unique_ptr<DfIndex> index_;
  FeatureContext context_;
};

TEST(FeatureSetTest, ParseAndFormat) {
  const FeatureSet s = FeatureSet::Parse("F1, F6,F8");
  EXPECT_EQ(s.ToString(), "F1,F6,F8");
  EXPECT_TRUE(s.Contains(Feature::kInTitle));
  EXPECT_FALSE(s.Contains(Feature::kTextRank));
  EXPECT_EQ(FeatureSet::Parse("all"), FeatureSet::All());
  EXPECT_EQ(FeatureSet::All().Members().size(), 9u);
  EXPECT_EQ(s.WithMandatory().ToString(), "F1,F6,F8,F9");
  EXPECT_EQ(s.Without(Feature::kPos).ToString(), "F6,F8");
  EXPECT_TRUE(FeatureSet().empty());
  EXPECT_EQ(FeatureSet().ToString(), "");
  EXPECT_THROW(FeatureSet::Parse("F10"), Error);
  EXPECT_THROW(FeatureSet::Parse("F0"), Error);
  EXPECT_THROW(FeatureSet::Parse("G1"), Error);
  EXPECT_EQ(FeatureName(Feature::kTfIdf), "F8");
}

TEST_F(FeatureFixture, FullTextFrequency) {
  const auto v =
      ExtractFeatures(doc_, tokens_, FeatureSet::Parse("F4,F5"), context_);
  const size_t data = IndexOf(tokens_, "data");
  EXPECT_EQ(v[data].freq_fulltext, 7u);
  EXPECT_EQ(v[data].freq_reftitle, 2u);
  EXPECT_EQ(v[IndexOf(tokens_, "mining")].freq_reftitle, 1u);
  EXPECT_EQ(v[IndexOf(tokens_, "help")].freq_fulltext, 0u);
}

TEST_F(FeatureFixture, TitleAndReferenceMembership) {
  const auto v =
      ExtractFeatures(doc_, tokens_, FeatureSet::Parse("F6,F7"), context_);
  const size_t data = IndexOf(tokens_, "data");
  EXPECT_EQ(v[data].in_title, true);
  EXPECT_EQ(v[IndexOf(tokens_, "mining")].in_title, true);
  // The enclosing phrase "data mining" is not a reference title substring.
  EXPECT_EQ(v[data].in_reftitle, false);
  EXPECT_EQ(v[IndexOf(tokens_, "useful")].in_reftitle, true);
  EXPECT_EQ(v[IndexOf(tokens_, "useful")].in_title, false);
}

TEST_F(FeatureFixture, LengthPositionAndPos) {
  const auto v = ExtractFeatures(doc_, tokens_, FeatureSet::Parse("F1,F2,F3"),
                                 context_);
  EXPECT_EQ(v[0].first_occurrence, 0.0);
  EXPECT_EQ(v[0].word_length, 4u);
  EXPECT_EQ(v[0].pos, tokens_[0].pos);
  for (const auto& f : v) {
    ASSERT_TRUE(f.first_occurrence.has_value());
    EXPECT_GE(*f.first_occurrence, 0.0);
    EXPECT_LT(*f.first_occurrence, 1.0);
    EXPECT_FALSE(f.freq_fulltext.has_value());
    EXPECT_FALSE(f.in_title.has_value());
  }
  // A repeated lemma shares its first position.
  const size_t second_data = [&] {
    size_t seen = 0;
    for (size_t i = 0; i < tokens_.size(); ++i) {
      if (tokens_[i].lemma == "data" && seen++ == 1) return i;
    }
    return size_t{0};
  }();
  ASSERT_GT(second_data, 0u);
  EXPECT_EQ(v[second_data].first_occurrence, v[0].first_occurrence);
}

TEST_F(FeatureFixture, MandatoryFeaturesAlwaysComputed) {
  const auto v =
      ExtractFeatures(doc_, tokens_, FeatureSet::Parse("F1"), context_);
  const size_t useful = IndexOf(tokens_, "useful");
  EXPECT_GT(v[useful].tfidf, 0.0);
  EXPECT_GE(v[useful].textrank, 0.15);
  FeatureContext missing;
  EXPECT_THROW(ExtractFeatures(doc_, tokens_, FeatureSet::All(), missing),
               Error);
}

TEST_F(FeatureFixture, AttributesFollowActiveSet) {
  const auto v = ExtractFeatures(doc_, tokens_, FeatureSet::All(), context_);
  const FeatureBuckets buckets = FeatureBuckets::Fit(v);
  const auto all = TokenAttributes(v, 0, FeatureSet::All(), buckets);
  EXPECT_EQ(all[0], "bias");
  for (int f = 1; f <= 9; ++f) {
    EXPECT_TRUE(HasAttribute(all, "F" + std::to_string(f) + "=")) << f;
  }
  EXPECT_TRUE(HasAttribute(all, "F1[-1]=BOS"));
  const auto last =
      TokenAttributes(v, v.size() - 1, FeatureSet::All(), buckets);
  EXPECT_TRUE(HasAttribute(last, "F1[+1]=EOS"));
  const auto some =
      TokenAttributes(v, 0, FeatureSet::Parse("F6,F8"), buckets);
  EXPECT_EQ(some.size(), 3u);
  EXPECT_TRUE(HasAttribute(some, "F6=1"));
  EXPECT_FALSE(HasAttribute(some, "F9="));
}

TEST(FeatureBucketsTest, CountBuckets) {
  const std::map<size_t, size_t> expected = {
      {0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 3}, {5, 4}, {8, 4}, {9, 5}, {500, 5}};
  for (const auto& [count, bucket] : expected) {
    EXPECT_EQ(FeatureBuckets::CountBucket(count), bucket) << count;
  }
}

TEST(FeatureBucketsTest, WordLengthCapped) {
  std::vector<FeatureVector> v(1);
  v[0].word_length = 31;
  const auto attrs = TokenAttributes(v, 0, FeatureSet::Parse("F2"),
                                     FeatureBuckets::Fit(v));
  EXPECT_TRUE(HasAttribute(attrs, "F2=20"));
}

TEST(FeatureBucketsTest, EqualFrequency) {
  std::vector<FeatureVector> v(80);
  for (size_t i = 0; i < v.size(); ++i) {
    v[i].tfidf = static_cast<double>(i);
    v[i].textrank = 1.0;
    v[i].first_occurrence = i / 80.0;
  }
  const FeatureBuckets b = FeatureBuckets::Fit(v);
  std::vector<size_t> per_bucket(FeatureBuckets::kDefaultBins, 0);
  for (const auto& f : v) ++per_bucket.at(b.Bucket(Feature::kTfIdf, f.tfidf));
  for (size_t count : per_bucket) EXPECT_EQ(count, 10u);
  EXPECT_EQ(b.Bucket(Feature::kTfIdf, -5.0), 0u);
  EXPECT_EQ(b.Bucket(Feature::kTfIdf, 1e9), FeatureBuckets::kDefaultBins - 1);
  EXPECT_LT(b.Bucket(Feature::kTextRank, 1.0), FeatureBuckets::kDefaultBins);
  EXPECT_THROW(b.Bucket(Feature::kPos, 0.0), Error);
}

TEST(FeatureBucketsTest, CutsRoundTrip) {
  std::vector<FeatureVector> v(20);
  for (size_t i = 0; i < v.size(); ++i) v[i].tfidf = 0.1 * i + 1.0 / 3.0;
  const FeatureBuckets b = FeatureBuckets::Fit(v);
  FeatureBuckets restored;
  restored.SetCuts(Feature::kTfIdf, b.CutsString(Feature::kTfIdf));
  for (const auto& f : v) {
    EXPECT_EQ(restored.Bucket(Feature::kTfIdf, f.tfidf),
              b.Bucket(Feature::kTfIdf, f.tfidf));
  }
  EXPECT_THROW(restored.SetCuts(Feature::kTfIdf, "2 1"), Error);
  EXPECT_THROW(restored.SetCuts(Feature::kTfIdf, "1 x"), Error);
}

TEST_F(FeatureFixture, SequencesPerSentence) {
  const auto v = ExtractFeatures(doc_, tokens_, FeatureSet::All(), context_);
  const std::vector<std::vector<std::string>> gold = {{"data", "mining"}};
  const auto seqs = BuildSequences(doc_, tokens_, v, &gold);
  ASSERT_EQ(seqs.size(), 3u);
  EXPECT_EQ(seqs[0].lemmas, (std::vector<std::string>{"data", "mining", "for",
                                                      "text"}));
  EXPECT_EQ(seqs[0].tags,
            (std::vector<Tag>{Tag::kB, Tag::kE, Tag::kN, Tag::kN}));
  for (const auto& s : seqs) {
    EXPECT_EQ(s.doc_id, "d");
    EXPECT_EQ(s.lemmas.size(), s.features.size());
    EXPECT_EQ(s.lemmas.size(), s.tags.size());
    EXPECT_EQ(std::count(s.lemmas.begin(), s.lemmas.end(), "."), 0);
  }
  EXPECT_TRUE(BuildSequences(doc_, tokens_, v, nullptr)[0].tags.empty());
  const std::vector<FeatureVector> short_vectors(1);
  EXPECT_THROW(BuildSequences(doc_, tokens_, short_vectors, nullptr), Error);
}

// F1 per column after removing F1..F9, with the baseline first.
struct AblationColumn {
  const char* name;
  double baseline;
  std::array<double, 9> removed;
  const char* selected;
};

const AblationColumn kColumns[] = {
    {"SemEvalCrf", 9.57,
     {8.93, 11.11, 12.02, 10.04, 10.67, 7.08, 9.65, 7.21, 11.91}, "F1,F6,F8"},
    {"PubMedCrf", 18.45,
     {17.27, 16.92, 17.47, 17.58, 17.26, 17.89, 18.02, 17.48, 18.59},
     "F1,F2,F3,F4,F5,F6,F7,F8"},
    {"LisCrf", 22.24,
     {22.23, 22.72, 22.07, 23.65, 22.16, 22.20, 22.47, 23.28, 22.58},
     "F1,F3,F5,F6"},
    {"SemEvalBiLstm", 18.06,
     {15.58, 14.84, 15.73, 14.57, 16.24, 17.09, 17.54, 16.86, 18.38},
     "F1,F2,F3,F4,F5,F6,F7,F8"},
    {"PubMedBiLstm", 19.17,
     {20.37, 19.60, 19.29, 19.59, 19.71, 18.91, 19.76, 19.16, 19.87},
     "F6,F8"},
    {"LisBiLstm", 19.33,
     {18.97, 18.80, 18.70, 19.74, 18.65, 18.35, 19.30, 18.22, 18.65},
     "F1,F2,F3,F5,F6,F7,F8,F9"},
};

std::function<double(const FeatureSet&)> TableLookup(
    const AblationColumn& column) {
  return [&column](const FeatureSet& set) {
    const auto members = set.Members();
    if (members.size() == 9) return column.baseline;
    for (int f = 1; f <= 9; ++f) {
      if (!set.Contains(static_cast<Feature>(f))) return column.removed[f - 1];
    }
    return -1.0;
  };
}

class TableColumnTest : public ::testing::TestWithParam<AblationColumn> {};

TEST_P(TableColumnTest, SelectsPublishedSet) {
  const AblationColumn& column = GetParam();
  const AblationResult r = AblateFeatures(FeatureSet::All(),
                                          TableLookup(column));
  EXPECT_EQ(r.selected.ToString(), column.selected);
  EXPECT_EQ(r.best, r.selected.WithMandatory());
  EXPECT_DOUBLE_EQ(r.baseline_f1, column.baseline);
  ASSERT_EQ(r.rows.size(), 9u);
  for (const auto& row : r.rows) {
    EXPECT_DOUBLE_EQ(row.delta, row.f1 - column.baseline);
    EXPECT_EQ(row.positive, row.f1 < column.baseline);
  }
}

INSTANTIATE_TEST_SUITE_P(
    AllColumns, TableColumnTest, ::testing::ValuesIn(kColumns),
    [](const ::testing::TestParamInfo<AblationColumn>& info) {
      return std::string(info.param.name);
    });

TEST(AblateFeaturesTest, UnchangedRemovalExcluded) {
  const AblationResult r = AblateFeatures(
      FeatureSet::Parse("F1,F2,F3"), [](const FeatureSet& s) {
        if (!s.Contains(Feature::kWordLength)) return 0.5;
        if (!s.Contains(Feature::kPos)) return 0.4;
        return 0.5;
      });
  EXPECT_EQ(r.selected.ToString(), "F1");
  EXPECT_EQ(r.best.ToString(), "F1,F8,F9");
}

// Trains a CRF on synthetic vectors where F6 marks one-word keyphrases and
// F2 is noise, then scores token-level F1 on held-out sequences.
class NoiseAblation {
 public:
  NoiseAblation() {
    std::mt19937_64 rng(2718);
    std::bernoulli_distribution key(0.3);
    std::uniform_int_distribution<size_t> length(1, 12);
    for (int s = 0; s < 120; ++s) {
      Sequence seq;
      for (int i = 0; i < 8; ++i) {
        FeatureVector f;
        const bool is_key = key(rng);
        f.in_title = is_key;
        f.word_length = length(rng);
        seq.vectors.push_back(f);
        seq.tags.push_back(is_key ? Tag::kS : Tag::kN);
      }
      (s < 90 ? train_ : dev_).push_back(seq);
    }
  }

  double F1(const FeatureSet& active) const {
    CrfModel model;
    FeatureBuckets buckets;
    std::vector<CrfInstance> train;
    for (const auto& seq : train_) {
      train.push_back(model.Compile(Attributes(seq, active, buckets),
                                    seq.tags, "t", true));
    }
    CrfTrainOptions opts;
    opts.max_epochs = 100;
    TrainCrf(model, train, opts);
    double tp = 0, predicted = 0, gold = 0;
    for (const auto& seq : dev_) {
      const auto tags = ViterbiDecode(
          model, model.CompileFrozen(Attributes(seq, active, buckets), {}, "d"));
      for (size_t i = 0; i < tags.size(); ++i) {
        predicted += tags[i] == Tag::kS;
        gold += seq.tags[i] == Tag::kS;
        tp += tags[i] == Tag::kS && seq.tags[i] == Tag::kS;
      }
    }
    if (tp == 0) return 0.0;
    const double p = tp / predicted, r = tp / gold;
    return 2 * p * r / (p + r);
  }

 private:
  struct Sequence {
    std::vector<FeatureVector> vectors;
    std::vector<Tag> tags;
  };

  static std::vector<std::vector<std::string>> Attributes(
      const Sequence& seq, const FeatureSet& active,
      const FeatureBuckets& buckets) {
    std::vector<std::vector<std::string>> out;
    for (size_t i = 0; i < seq.vectors.size(); ++i) {
      out.push_back(TokenAttributes(seq.vectors, i, active, buckets));
    }
    return out;
  }

  std::vector<Sequence> train_;
  std::vector<Sequence> dev_;
};

TEST(AblateFeaturesTest, NoiseFeatureExcluded) {
  const NoiseAblation data;
  const AblationResult r =
      AblateFeatures(FeatureSet::Parse("F2,F6"),
                     [&](const FeatureSet& s) { return data.F1(s); });
  EXPECT_GT(r.baseline_f1, 0.95);
  EXPECT_EQ(r.selected.ToString(), "F6");
}

}  // namespace
}  // namespace kex
