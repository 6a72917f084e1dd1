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

#include "kex/preprocess.h"

#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "kex/error.h"
#include "test_util.h"

namespace kex {
namespace {

const PipelineConfig& Config() { return PipelineConfig::Default(); }

std::vector<std::string> Surfaces(const TokenSeq& tokens) {
  std::vector<std::string> out;
  for (const Token& t : tokens) out.push_back(t.surface);
  return out;
}

TEST(TokenizeTest, SplitsWordsAndPunctuation) {
  EXPECT_EQ(Surfaces(Tokenize("Data mining, tools.")),
            (std::vector<std::string>{"Data", "mining", ",", "tools", "."}));
}

TEST(TokenizeTest, EmptyInput) { EXPECT_TRUE(Tokenize("").empty()); }

TEST(TokenizeTest, StarIsASymbol) {
  EXPECT_EQ(Surfaces(Tokenize("TF*IDF")),
            (std::vector<std::string>{"TF", "*", "IDF"}));
}

TEST(TokenizeTest, InternalHyphensAndApostrophes) {
  EXPECT_EQ(Surfaces(Tokenize("state-of-the-art isn't -x y-")),
            (std::vector<std::string>{"state-of-the-art", "isn't", "-", "x",
                                      "y", "-"}));
}

TEST(TokenizeTest, IndicesAndSentences) {
  const TokenSeq tokens = Tokenize("A b. C! D? e");
  ASSERT_EQ(tokens.size(), 8u);
  for (size_t i = 0; i < tokens.size(); ++i) EXPECT_EQ(tokens[i].index, i);
  // The terminator belongs to the sentence it ends.
  const std::vector<size_t> sentences = {0, 0, 0, 1, 1, 2, 2, 3};
  for (size_t i = 0; i < tokens.size(); ++i) {
    EXPECT_EQ(tokens[i].sentence, sentences[i]) << tokens[i].surface;
  }
}

TEST(TokenizeTest, Utf8Words) {
  const TokenSeq tokens = Tokenize("naïve Bayes • done");
  EXPECT_EQ(Surfaces(tokens),
            (std::vector<std::string>{"naïve", "Bayes", "•", "done"}));
  EXPECT_EQ(Utf8Length("naïve"), 5u);
}

TEST(PosTagTest, SuffixRules) {
  const TokenSeq tokens = PosTag(Tokenize("information quickly optimize zorb"),
                                 Config());
  EXPECT_EQ(tokens[0].pos, Pos::kNoun);
  EXPECT_EQ(tokens[1].pos, Pos::kAdv);
  EXPECT_EQ(tokens[2].pos, Pos::kVerb);
  EXPECT_EQ(tokens[3].pos, Pos::kNoun);  // default
}

TEST(PosTagTest, SymbolsAndNumbersAreOther) {
  const TokenSeq tokens = PosTag(Tokenize(", 2024"), Config());
  EXPECT_EQ(tokens[0].pos, Pos::kOther);
  EXPECT_EQ(tokens[1].pos, Pos::kOther);
}

TEST(PosTagTest, LexiconBeatsSuffixRules) {
  EXPECT_EQ(PosTag(Tokenize("useful"), Config())[0].pos, Pos::kAdj);
  // "-tion" alone would say NOUN.
  PipelineConfig config({"the"}, {{"motion", Pos::kVerb}}, {});
  EXPECT_EQ(PosTag(Tokenize("motion"), config)[0].pos, Pos::kVerb);
}

TEST(PosTagTest, EveryTokenGetsATag) {
  const TokenSeq tokens =
      PosTag(Tokenize("The 3 quick-thinking models, surprisingly, won!"),
             Config());
  for (const Token& t : tokens) {
    EXPECT_TRUE(ParsePos(PosName(t.pos)).has_value());
  }
}

TEST(FilterStopwordsTest, FlagsOnly) {
  const TokenSeq tokens = FilterStopwords(Tokenize("the keyphrase"), Config());
  EXPECT_TRUE(tokens[0].is_stopword);
  EXPECT_FALSE(tokens[1].is_stopword);

  const TokenSeq all = FilterStopwords(Tokenize("a the in and is"), Config());
  ASSERT_EQ(all.size(), 5u);
  for (const Token& t : all) EXPECT_TRUE(t.is_stopword) << t.surface;
}

TEST(RemoveSymbolsTest, FlagsSymbols) {
  const TokenSeq tokens = RemoveSymbols(Tokenize("# data"));
  EXPECT_TRUE(tokens[0].is_symbol);
  EXPECT_FALSE(tokens[1].is_symbol);

  const TokenSeq symbols = RemoveSymbols(Tokenize("#:,!"));
  ASSERT_EQ(symbols.size(), 4u);
  for (const Token& t : symbols) EXPECT_TRUE(t.is_symbol);
}

TEST(RemoveSymbolsTest, KeepsSentenceIds) {
  const TokenSeq before = Tokenize("a. b");
  const TokenSeq after = RemoveSymbols(before);
  for (size_t i = 0; i < before.size(); ++i) {
    EXPECT_EQ(before[i].sentence, after[i].sentence);
  }
}

TEST(LemmatizeTest, Examples) {
  EXPECT_EQ(LemmatizeWord("Studies", Config()), "study");
  EXPECT_EQ(LemmatizeWord("is", Config()), "be");
  EXPECT_EQ(LemmatizeWord("data", Config()), "data");
}

TEST(LemmatizeTest, PluralRules) {
  EXPECT_EQ(LemmatizeWord("classes", Config()), "class");
  EXPECT_EQ(LemmatizeWord("boxes", Config()), "box");
  EXPECT_EQ(LemmatizeWord("matches", Config()), "match");
  EXPECT_EQ(LemmatizeWord("phrases", Config()), "phrase");
  EXPECT_EQ(LemmatizeWord("models", Config()), "model");
  EXPECT_EQ(LemmatizeWord("class", Config()), "class");
  EXPECT_EQ(LemmatizeWord("analysis", Config()), "analysis");
  EXPECT_EQ(LemmatizeWord("its", Config()), "its");
  EXPECT_EQ(LemmatizeWord("Mining", Config()), "mining");
}

TEST(LemmatizeTest, Idempotent) {
  std::vector<std::string> words = {
      "studies", "classes", "boxes",   "phrases", "buses", "analyses",
      "series",  "data",    "gases",   "is",      "was",   "indices",
      "bodies",  "status",  "process", "crisis",  "ties",  "dies",
      "yes",     "uses",    "goes",    "axes",    "mess",  "species"};
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> letter('a', 'z'), length(1, 9);
  for (int i = 0; i < 2000; ++i) {
    std::string word;
    const int n = length(rng);
    for (int k = 0; k < n; ++k) word += static_cast<char>(letter(rng));
    for (const char* suffix : {"", "s", "es", "ies", "sses"}) {
      words.push_back(word + suffix);
    }
  }
  for (const std::string& w : words) {
    const std::string once = LemmatizeWord(w, Config());
    EXPECT_EQ(LemmatizeWord(once, Config()), once) << w;
    EXPECT_FALSE(once.empty()) << w;
  }
}

TEST(PreprocessTest, Composition) {
  const TokenSeq tokens = Preprocess("The data mining.", Config());
  ASSERT_EQ(tokens.size(), 4u);
  EXPECT_EQ(tokens[0].lemma, "the");
  EXPECT_TRUE(tokens[0].is_stopword);
  EXPECT_EQ(tokens[1].lemma, "data");
  EXPECT_EQ(tokens[1].pos, Pos::kNoun);
  EXPECT_EQ(tokens[2].lemma, "mining");
  EXPECT_EQ(tokens[2].pos, Pos::kNoun);
  EXPECT_TRUE(tokens[3].is_symbol);
}

TEST(PreprocessTest, EmptyAndDeterministic) {
  EXPECT_TRUE(Preprocess("", Config()).empty());
  const std::string text =
      "Keyphrase extraction: reference titles improve F1 (see below)!";
  EXPECT_EQ(Preprocess(text, Config()), Preprocess(text, Config()));
}

TEST(PreprocessTest, StagesPreserveTokenCount) {
  const std::string text = "The #1 approach, surprisingly, isn't new... OK?";
  const TokenSeq tokens = Tokenize(text);
  const size_t n = tokens.size();
  TokenSeq t = PosTag(tokens, Config());
  EXPECT_EQ(t.size(), n);
  t = FilterStopwords(t, Config());
  EXPECT_EQ(t.size(), n);
  t = RemoveSymbols(t);
  EXPECT_EQ(t.size(), n);
  t = Lemmatize(t, Config());
  EXPECT_EQ(t.size(), n);
  for (size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(t[i].index, i);
    if (!t[i].is_symbol) EXPECT_FALSE(t[i].lemma.empty());
  }
}

TEST(PipelineConfigTest, RejectsEmptyStopwords) {
  EXPECT_THROW(PipelineConfig({}, {}, {}), Error);
}

TEST(PipelineConfigTest, LexiconParsers) {
  EXPECT_EQ(ParseStopwordLexicon("# comment\nThe\n\nof\n", "x").size(), 2u);
  EXPECT_TRUE(ParseStopwordLexicon("The\n", "x").count("the"));
  const auto pos = ParsePosLexicon("fast\tADJ\nrun\tVERB\n", "x");
  EXPECT_EQ(pos.at("fast"), Pos::kAdj);
  EXPECT_THROW(ParsePosLexicon("fast\tBOGUS\n", "x"), Error);
  EXPECT_THROW(ParsePosLexicon("fast\n", "x"), Error);
  EXPECT_EQ(ParseLemmaExceptions("went\tgo\n", "x").at("went"), "go");
  EXPECT_THROW(ParseLemmaExceptions("went go\n", "x"), Error);
}

TEST(PipelineConfigTest, FromFilesMissing) {
  LexiconPaths paths;
  paths.stopwords = "/nonexistent/stopwords.txt";
  EXPECT_THROW(PipelineConfig::FromFiles(paths), Error);
  EXPECT_GT(PipelineConfig::FromFiles(LexiconPaths{}).stopword_count(), 100u);
}

class RecordingTagger : public PosTagger {
 public:
  Pos Tag(const Token& token) const override {
    return token.surface == "x" ? Pos::kAdj : Pos::kVerb;
  }
};

TEST(PosTaggerTest, Pluggable) {
  const TokenSeq tokens = PosTag(Tokenize("x y"), RecordingTagger());
  EXPECT_EQ(tokens[0].pos, Pos::kAdj);
  EXPECT_EQ(tokens[1].pos, Pos::kVerb);
}

}  // namespace
}  // namespace kex
