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

#include "kex/crf.h"

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kex/error.h"
#include "test_util.h"

namespace kex {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;

std::vector<std::vector<std::string>> Gold(
    std::vector<std::vector<std::string>> phrases) {
  return phrases;
}

TEST(TagTest, NamesAndTransitions) {
  EXPECT_EQ(TagName(Tag::kS), "key_S");
  EXPECT_EQ(ParseTag("key_E"), Tag::kE);
  EXPECT_FALSE(ParseTag("key_X").has_value());
  EXPECT_FALSE(IsLegalTransition(Tag::kN, Tag::kM));
  EXPECT_FALSE(IsLegalTransition(Tag::kB, Tag::kN));
  EXPECT_TRUE(IsLegalTransition(Tag::kB, Tag::kE));
  EXPECT_TRUE(IsLegalTransition(Tag::kE, Tag::kS));
  const std::vector<Tag> ok = {Tag::kN, Tag::kB, Tag::kM, Tag::kE, Tag::kS};
  const std::vector<Tag> bad = {Tag::kN, Tag::kM, Tag::kE};
  EXPECT_TRUE(IsLegalSequence(ok));
  EXPECT_FALSE(IsLegalSequence(bad));
}

TEST(EncodeTagsTest, Examples) {
  const std::vector<std::string> words = {"we", "use", "data", "mining"};
  EXPECT_THAT(EncodeTags(words, Gold({{"data", "mining"}})),
              ElementsAre(Tag::kN, Tag::kN, Tag::kB, Tag::kE));
  const std::vector<std::string> crf = {"crf"};
  EXPECT_THAT(EncodeTags(crf, Gold({{"crf"}})), ElementsAre(Tag::kS));
  EXPECT_THAT(EncodeTags(words, Gold({{"tree"}})),
              ElementsAre(Tag::kN, Tag::kN, Tag::kN, Tag::kN));
}

TEST(EncodeTagsTest, LeftmostLongest) {
  const std::vector<std::string> words = {"a", "b", "c", "b", "c"};
  EXPECT_THAT(EncodeTags(words, Gold({{"b"}, {"a", "b", "c"}, {"b", "c"}})),
              ElementsAre(Tag::kB, Tag::kM, Tag::kE, Tag::kB, Tag::kE));
}

TEST(DecodeSpansTest, Examples) {
  const std::vector<std::string> three = {"x", "y", "z"};
  EXPECT_EQ(DecodeSpans(std::vector<Tag>{Tag::kB, Tag::kM, Tag::kE}, three),
            std::set<std::string>{"x y z"});
  EXPECT_TRUE(
      DecodeSpans(std::vector<Tag>{Tag::kM, Tag::kE, Tag::kN}, three).empty());
  EXPECT_EQ(DecodeSpans(std::vector<Tag>{Tag::kS, Tag::kN, Tag::kS}, three),
            (std::set<std::string>{"x", "z"}));
  EXPECT_TRUE(
      DecodeSpans(std::vector<Tag>{Tag::kN, Tag::kB, Tag::kM}, three).empty());
  EXPECT_THROW(DecodeSpans(std::vector<Tag>{Tag::kS}, three), Error);
}

TEST(EncodeDecodeTest, RecoversTaggedOccurrences) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> word(0, 3), len(0, 25), glen(1, 3),
      ngold(0, 4);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> words;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) words.push_back("w" + std::to_string(word(rng)));
    std::vector<std::vector<std::string>> gold;
    const int g = ngold(rng);
    for (int i = 0; i < g; ++i) {
      std::vector<std::string> phrase;
      const int k = glen(rng);
      for (int j = 0; j < k; ++j) {
        phrase.push_back("w" + std::to_string(word(rng)));
      }
      gold.push_back(phrase);
    }
    const auto tags = EncodeTags(words, gold);
    ASSERT_EQ(tags.size(), words.size());
    EXPECT_TRUE(IsLegalSequence(tags));
    // Reconstruct the tagged runs directly and compare.
    std::set<std::string> expected;
    for (size_t i = 0; i < tags.size(); ++i) {
      if (tags[i] == Tag::kS) expected.insert(words[i]);
      if (tags[i] == Tag::kB) {
        std::string text = words[i];
        size_t j = i + 1;
        while (tags[j] != Tag::kE) text += " " + words[j++];
        expected.insert(text + " " + words[j]);
      }
    }
    const auto decoded = DecodeSpans(tags, words);
    EXPECT_EQ(decoded, expected);
    for (const auto& phrase : decoded) {
      bool in_gold = false;
      for (const auto& p : gold) {
        std::string text;
        for (const auto& w : p) text += (text.empty() ? "" : " ") + w;
        in_gold = in_gold || text == phrase;
      }
      EXPECT_TRUE(in_gold) << phrase;
    }
  }
}

CrfInstance Instance(std::vector<std::vector<uint32_t>> attrs,
                     std::vector<Tag> tags = {}) {
  CrfInstance inst;
  inst.attributes = std::move(attrs);
  inst.tags = std::move(tags);
  inst.id = "inst";
  return inst;
}

TEST(NllTest, UniformSingleToken) {
  CrfModel model;
  model.AddAttribute("a");
  const std::vector<CrfInstance> batch = {Instance({{0}}, {Tag::kS})};
  EXPECT_NEAR(NllAndGradient(model, batch).value, std::log(5.0), 1e-12);
}

TEST(NllTest, FiniteDifferenceGradient) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    CrfModel model = testing::RandomModel(rng, 4, 0.5);
    model.set_l2(0.7);
    const std::vector<CrfInstance> batch = {
        testing::RandomInstance(rng, 3, 4, true),
        testing::RandomInstance(rng, 2, 4, true)};
    const NllGradient at = NllAndGradient(model, batch);
    const double h = 1e-5;
    for (size_t k = 0; k < model.num_weights(); ++k) {
      CrfModel plus = model, minus = model;
      plus.mutable_weights()[k] += h;
      minus.mutable_weights()[k] -= h;
      const double fd = (NllAndGradient(plus, batch).value -
                         NllAndGradient(minus, batch).value) /
                        (2.0 * h);
      const double scale = std::max({std::abs(fd), std::abs(at.gradient[k]),
                                     1e-2});
      EXPECT_LT(std::abs(fd - at.gradient[k]) / scale, 1e-4) << "weight " << k;
    }
  }
}

TEST(NllTest, RegularizerGradientIsRhoLambda) {
  std::mt19937_64 rng(3);
  CrfModel model = testing::RandomModel(rng, 3);
  const std::vector<CrfInstance> batch = {
      testing::RandomInstance(rng, 4, 3, true)};
  model.set_l2(0.0);
  const NllGradient data = NllAndGradient(model, batch);
  model.set_l2(2.5);
  const NllGradient full = NllAndGradient(model, batch);
  for (size_t k = 0; k < model.num_weights(); ++k) {
    EXPECT_NEAR(full.gradient[k] - data.gradient[k],
                2.5 * model.weights()[k], 1e-12);
  }
}

TEST(NllTest, GradientVanishesAtOptimum) {
  std::mt19937_64 rng(12);
  std::vector<CrfInstance> data;
  for (int i = 0; i < 6; ++i) {
    data.push_back(testing::RandomInstance(rng, 4, 3, true));
  }
  CrfModel model;
  for (int a = 0; a < 3; ++a) model.AddAttribute("a" + std::to_string(a));
  CrfTrainOptions opts;
  opts.max_epochs = 2000;
  opts.gradient_tolerance = 1e-6;
  const CrfTrainReport report = TrainCrf(model, data, opts);
  ASSERT_TRUE(report.converged);
  // Expected minus empirical counts balance the penalty: grad_data = -rho w.
  CrfModel unpenalized = model;
  unpenalized.set_l2(0.0);
  const NllGradient g = NllAndGradient(unpenalized, data);
  for (size_t k = CrfModel::kTransitionWeights; k < model.num_weights(); ++k) {
    EXPECT_NEAR(g.gradient[k], -opts.l2 * model.weights()[k], 1e-5);
  }
}

TEST(NllTest, NonFiniteNamesInstance) {
  CrfModel model;
  model.AddAttribute("a");
  std::vector<double> w(model.num_weights(), 0.0);
  w[CrfModel::StateIndex(0, Tag::kS)] =
      std::numeric_limits<double>::quiet_NaN();
  model.set_weights(w);
  CrfInstance inst = Instance({{0}}, {Tag::kS});
  inst.id = "doc7:3";
  const std::vector<CrfInstance> batch = {inst};
  try {
    NllAndGradient(model, batch);
    FAIL();
  } catch (const Error& e) {
    EXPECT_THAT(std::string(e.what()), HasSubstr("doc7:3"));
  }
}

TEST(NormalizationTest, ExhaustiveSum) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const CrfModel model = testing::RandomModel(rng, 5);
    const size_t len = 1 + trial % 6;
    const CrfInstance inst = testing::RandomInstance(rng, len, 5, false);
    const double log_z = LogPartition(model, inst);
    double total = 0.0;
    for (const auto& tags : testing::AllTagSequences(len)) {
      const double s = SequenceScore(model, inst, tags);
      if (!IsLegalSequence(tags)) {
        EXPECT_TRUE(std::isinf(s) && s < 0);
        continue;
      }
      total += std::exp(s - log_z);
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(ViterbiTest, ForcedArgmax) {
  CrfModel model;
  model.AddAttribute("a");
  std::vector<double> w(model.num_weights(), 0.0);
  w[CrfModel::StateIndex(0, Tag::kN)] = 1.0;
  model.set_weights(w);
  EXPECT_THAT(ViterbiDecode(model, Instance({{0}})), ElementsAre(Tag::kN));
  w.assign(w.size(), 0.0);
  w[CrfModel::StateIndex(0, Tag::kS)] = 1.0;
  model.set_weights(w);
  EXPECT_THAT(ViterbiDecode(model, Instance({{0}})), ElementsAre(Tag::kS));
}

TEST(ViterbiTest, ZeroWeightsTieBreak) {
  CrfModel model;
  model.AddAttribute("a");
  EXPECT_THAT(ViterbiDecode(model, Instance({{0}, {0}, {0}})),
              ElementsAre(Tag::kS, Tag::kS, Tag::kS));
  EXPECT_TRUE(ViterbiDecode(model, Instance({})).empty());
}

TEST(ViterbiTest, MatchesExhaustiveSearch) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const CrfModel model = testing::RandomModel(rng, 4);
    const size_t len = 1 + trial % 6;
    const CrfInstance inst = testing::RandomInstance(rng, len, 4, false);
    double best = -std::numeric_limits<double>::infinity();
    std::vector<Tag> argmax;
    for (const auto& tags : testing::AllTagSequences(len)) {
      const double s = SequenceScore(model, inst, tags);
      if (s > best) {
        best = s;
        argmax = tags;
      }
    }
    const auto decoded = ViterbiDecode(model, inst);
    EXPECT_TRUE(IsLegalSequence(decoded));
    EXPECT_NEAR(SequenceScore(model, inst, decoded), best, 1e-9);
    EXPECT_EQ(decoded, argmax);
  }
}

std::vector<CrfInstance> RandomData(uint64_t seed, size_t n) {
  std::mt19937_64 rng(seed);
  std::vector<CrfInstance> data;
  for (size_t i = 0; i < n; ++i) {
    data.push_back(testing::RandomInstance(rng, 2 + i % 5, 6, true));
  }
  return data;
}

CrfModel EmptyModel(uint32_t attributes) {
  CrfModel model;
  for (uint32_t a = 0; a < attributes; ++a) {
    model.AddAttribute("a" + std::to_string(a));
  }
  return model;
}

TEST(TrainCrfTest, EmptyData) {
  CrfModel model = EmptyModel(1);
  EXPECT_THROW(TrainCrf(model, std::vector<CrfInstance>{}), Error);
}

TEST(TrainCrfTest, Deterministic) {
  const auto data = RandomData(5, 20);
  CrfModel a = EmptyModel(6), b = EmptyModel(6);
  TrainCrf(a, data);
  TrainCrf(b, data);
  EXPECT_EQ(a.weights(), b.weights());
}

TEST(TrainCrfTest, NllNonIncreasing) {
  const auto data = RandomData(6, 20);
  CrfModel model = EmptyModel(6);
  const CrfTrainReport report = TrainCrf(model, data);
  ASSERT_FALSE(report.nll_history.empty());
  for (size_t i = 1; i < report.nll_history.size(); ++i) {
    EXPECT_LE(report.nll_history[i], report.nll_history[i - 1]);
  }
  EXPECT_EQ(report.final_nll, report.nll_history.back());
}

TEST(TrainCrfTest, DuplicatedDataSameModel) {
  const auto data = RandomData(7, 12);
  std::vector<CrfInstance> doubled = data;
  doubled.insert(doubled.end(), data.begin(), data.end());
  // Doubling the penalty with the data scales the whole objective by two.
  CrfTrainOptions opts;
  opts.l2 = 0.5;
  opts.max_epochs = 3000;
  opts.gradient_tolerance = 1e-6;
  CrfTrainOptions doubled_opts = opts;
  doubled_opts.l2 = 1.0;
  doubled_opts.gradient_tolerance = 2e-6;
  CrfModel a = EmptyModel(6), b = EmptyModel(6);
  ASSERT_TRUE(TrainCrf(a, data, opts).converged);
  ASSERT_TRUE(TrainCrf(b, doubled, doubled_opts).converged);
  for (size_t k = 0; k < a.num_weights(); ++k) {
    EXPECT_NEAR(a.weights()[k], b.weights()[k], 1e-4) << k;
  }
  for (const auto& inst : data) {
    EXPECT_EQ(ViterbiDecode(a, inst), ViterbiDecode(b, inst));
  }
}

TEST(TrainCrfTest, StrongRegularizationShrinksWeights) {
  const auto data = RandomData(8, 10);
  double previous = std::numeric_limits<double>::infinity();
  for (double rho : {1.0, 100.0, 1e6}) {
    CrfModel model = EmptyModel(6);
    CrfTrainOptions opts;
    opts.l2 = rho;
    TrainCrf(model, data, opts);
    double largest = 0.0;
    for (double w : model.weights()) largest = std::max(largest, std::abs(w));
    EXPECT_LT(largest, previous);
    previous = largest;
  }
  EXPECT_LT(previous, 1e-4);
}

TEST(CrfModelTest, CompileAndRegistry) {
  CrfModel model;
  const CrfInstance grown =
      model.Compile({{"x", "y"}, {"y"}}, {Tag::kB, Tag::kE}, "s", true);
  EXPECT_EQ(model.num_attributes(), 2u);
  EXPECT_EQ(model.num_weights(), CrfModel::kTransitionWeights + 10);
  EXPECT_EQ(grown.attributes[1], std::vector<uint32_t>{1});
  const CrfInstance frozen = model.CompileFrozen({{"x", "new"}}, {}, "t");
  EXPECT_EQ(frozen.attributes[0], std::vector<uint32_t>{0});
  EXPECT_EQ(model.num_attributes(), 2u);
  EXPECT_FALSE(model.FindAttribute("new").has_value());
}

TEST(CrfModelTest, SaveLoadRoundTrip) {
  std::mt19937_64 rng(2);
  CrfModel model = testing::RandomModel(rng, 7);
  model.set_l2(0.25);
  model.metadata()["features"] = "F1,F6,F8";
  std::stringstream buffer;
  model.Save(buffer);
  const CrfModel back = CrfModel::Load(buffer);
  EXPECT_EQ(back.weights(), model.weights());
  EXPECT_EQ(back.attribute_names(), model.attribute_names());
  EXPECT_EQ(back.l2(), 0.25);
  EXPECT_EQ(back.metadata().at("features"), "F1,F6,F8");
  std::stringstream bad("garbage\n");
  EXPECT_THROW(CrfModel::Load(bad), Error);
}

TEST(CrfModelTest, Validation) {
  CrfModel model;
  EXPECT_THROW(model.set_weights({1.0}), Error);
  EXPECT_THROW(model.set_l2(-1.0), Error);
}

}  // namespace
}  // namespace kex
