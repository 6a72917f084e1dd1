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

// Text preprocessing: tokenizing, part-of-speech tagging, stop-word
// filtering, symbol removal and lemmatization.
//
// Every stage after Tokenize() only sets flags or fills fields on existing
// tokens; no token is ever removed, so token indices stay stable and
// positional features can be computed on the original sequence.

#ifndef KEX_PREPROCESS_H_
#define KEX_PREPROCESS_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace kex {

enum class Pos { kNoun, kAdj, kVerb, kAdv, kOther };

std::string_view PosName(Pos pos);
std::optional<Pos> ParsePos(std::string_view name);

struct Token {
  std::string surface;
  std::string lemma;
  Pos pos = Pos::kOther;
  size_t index = 0;
  // Sentence ordinal; a '.', '!' or '?' token closes the sentence it is in.
  size_t sentence = 0;
  bool is_stopword = false;
  bool is_symbol = false;

  bool operator==(const Token&) const = default;
};

using TokenSeq = std::vector<Token>;

// Lexicon file locations. An empty path selects the bundled default.
struct LexiconPaths {
  std::string stopwords;
  std::string pos_lexicon;
  std::string lemma_exceptions;
};

// Immutable lexicons driving the pipeline.
class PipelineConfig {
 public:
  PipelineConfig(std::unordered_set<std::string> stopwords,
                 std::unordered_map<std::string, Pos> pos_lexicon,
                 std::unordered_map<std::string, std::string> lemma_exceptions);

  // The lexicons compiled into the library.
  static const PipelineConfig& Default();

  // Loads lexicons from files, falling back to the bundled data for any
  // empty path. Throws kex::Error on unreadable or malformed files.
  static PipelineConfig FromFiles(const LexiconPaths& paths);

  bool IsStopword(std::string_view lowercase) const;
  std::optional<Pos> LookupPos(std::string_view lemma) const;
  const std::string* LookupLemmaException(std::string_view lowercase) const;
  bool IsExceptionLemma(std::string_view lemma) const;

  size_t stopword_count() const { return stopwords_.size(); }

 private:
  std::unordered_set<std::string> stopwords_;
  std::unordered_map<std::string, Pos> pos_lexicon_;
  std::unordered_map<std::string, std::string> lemma_exceptions_;
  std::unordered_set<std::string> exception_lemmas_;
};

// Parsers for the lexicon text formats. `source` names the input in errors.
std::unordered_set<std::string> ParseStopwordLexicon(std::string_view text,
                                                     std::string_view source);
std::unordered_map<std::string, Pos> ParsePosLexicon(std::string_view text,
                                                     std::string_view source);
std::unordered_map<std::string, std::string> ParseLemmaExceptions(
    std::string_view text, std::string_view source);

// ASCII case folding; bytes outside ASCII are passed through.
std::string ToLower(std::string_view text);

// Number of UTF-8 code points in `text`.
size_t Utf8Length(std::string_view text);

// True for tokens consisting solely of digits (and internal hyphens).
bool IsNumeric(std::string_view surface);

// True if the token has no letter or digit, i.e. is punctuation or a symbol.
bool IsSymbolSurface(std::string_view surface);

// True for the sentence terminators '.', '!' and '?'.
bool IsSentenceTerminator(std::string_view surface);

// Splits text into word and symbol tokens. Word tokens are maximal runs of
// letters and digits, possibly joined by internal hyphens or apostrophes.
// Every other non-space character becomes its own token.
TokenSeq Tokenize(std::string_view text);

// Lemma of a single word: lowercase, exception lookup, then suffix rules.
std::string LemmatizeWord(std::string_view surface,
                          const PipelineConfig& config);

TokenSeq PosTag(TokenSeq tokens, const PipelineConfig& config);
TokenSeq FilterStopwords(TokenSeq tokens, const PipelineConfig& config);
TokenSeq RemoveSymbols(TokenSeq tokens);
TokenSeq Lemmatize(TokenSeq tokens, const PipelineConfig& config);

// The full pipeline in order: tokenize, tag, filter stopwords, flag
// symbols, lemmatize.
TokenSeq Preprocess(std::string_view text, const PipelineConfig& config);

// Tagger interface so a better tagger can replace the lexicon one.
class PosTagger {
 public:
  virtual ~PosTagger() = default;
  virtual Pos Tag(const Token& token) const = 0;
};

// Lexicon lookup on the lemma candidate, then suffix rules, else NOUN.
class LexiconPosTagger : public PosTagger {
 public:
  explicit LexiconPosTagger(const PipelineConfig& config) : config_(config) {}
  Pos Tag(const Token& token) const override;

 private:
  const PipelineConfig& config_;
};

TokenSeq PosTag(TokenSeq tokens, const PosTagger& tagger);

}  // namespace kex

#endif  // KEX_PREPROCESS_H_
