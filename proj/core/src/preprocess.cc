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

#include <array>
#include <fstream>
#include <sstream>
#include <utility>

#include "kex/error.h"
#include "lexicon_data.h"

namespace kex {
namespace {

constexpr char32_t kInvalidCodePoint = 0xFFFFFFFF;

struct CodePoint {
  char32_t value;
  size_t length;
};

CodePoint DecodeUtf8(std::string_view text, size_t pos) {
  const auto byte = [&](size_t i) {
    return static_cast<unsigned char>(text[pos + i]);
  };
  const unsigned char lead = byte(0);
  if (lead < 0x80) return {lead, 1};
  size_t length = 0;
  char32_t value = 0;
  if ((lead & 0xE0) == 0xC0) {
    length = 2;
    value = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    length = 3;
    value = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    length = 4;
    value = lead & 0x07;
  } else {
    return {kInvalidCodePoint, 1};
  }
  if (pos + length > text.size()) return {kInvalidCodePoint, 1};
  for (size_t i = 1; i < length; ++i) {
    if ((byte(i) & 0xC0) != 0x80) return {kInvalidCodePoint, 1};
    value = (value << 6) | (byte(i) & 0x3F);
  }
  return {value, length};
}

bool IsSpace(char32_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v' || c == 0xA0 || (c >= 0x2000 && c <= 0x200B) ||
         c == 0x3000;
}

bool IsWordChar(char32_t c) {
  if (c == kInvalidCodePoint) return false;
  if (c < 0x80) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9');
  }
  // Latin-1 punctuation, general punctuation, arrows and math symbols,
  // CJK punctuation and fullwidth ASCII punctuation are not word material.
  if (c <= 0xBF || c == 0xD7 || c == 0xF7) return false;
  if (c >= 0x2000 && c <= 0x2BFF) return false;
  if (c >= 0x3000 && c <= 0x303F) return false;
  if (c >= 0xFF00 && c <= 0xFF0F) return false;
  return true;
}

bool IsJoiner(char32_t c) {
  return c == '-' || c == '\'' || c == 0x2019 || c == 0x2010 || c == 0x2011;
}

bool EndsWith(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r' || s.front() == '\n')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r' || s.back() == '\n')) {
    s.remove_suffix(1);
  }
  return s;
}

// Calls fn(line_number, line) for every non-blank, non-comment line.
template <typename Fn>
void ForEachEntry(std::string_view text, Fn&& fn) {
  size_t line_number = 0;
  while (!text.empty()) {
    const size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (Trim(line).empty() || Trim(line).front() == '#') continue;
    fn(line_number, line);
  }
}

std::pair<std::string_view, std::string_view> SplitTab(
    std::string_view line, size_t line_number, std::string_view source) {
  const size_t tab = line.find('\t');
  if (tab == std::string_view::npos) {
    throw Error(std::string(source) + ":" + std::to_string(line_number) +
                ": expected <entry>TAB<value>");
  }
  return {Trim(line.substr(0, tab)), Trim(line.substr(tab + 1))};
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open lexicon file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct SuffixRule {
  std::string_view suffix;
  Pos pos;
};

constexpr std::array<SuffixRule, 22> kSuffixRules = {{
    {"tion", Pos::kNoun}, {"sion", Pos::kNoun}, {"ment", Pos::kNoun},
    {"ness", Pos::kNoun}, {"ity", Pos::kNoun},  {"ism", Pos::kNoun},
    {"ance", Pos::kNoun}, {"ence", Pos::kNoun}, {"ship", Pos::kNoun},
    {"ogy", Pos::kNoun},  {"ous", Pos::kAdj},   {"ful", Pos::kAdj},
    {"ive", Pos::kAdj},   {"able", Pos::kAdj},  {"ible", Pos::kAdj},
    {"less", Pos::kAdj},  {"al", Pos::kAdj},    {"ic", Pos::kAdj},
    {"ly", Pos::kAdv},    {"ize", Pos::kVerb},  {"ise", Pos::kVerb},
    {"ate", Pos::kVerb},
}};

}  // namespace

std::string_view PosName(Pos pos) {
  switch (pos) {
    case Pos::kNoun: return "NOUN";
    case Pos::kAdj: return "ADJ";
    case Pos::kVerb: return "VERB";
    case Pos::kAdv: return "ADV";
    case Pos::kOther: return "OTHER";
  }
  return "OTHER";
}

std::optional<Pos> ParsePos(std::string_view name) {
  for (Pos pos : {Pos::kNoun, Pos::kAdj, Pos::kVerb, Pos::kAdv, Pos::kOther}) {
    if (PosName(pos) == name) return pos;
  }
  return std::nullopt;
}

std::string ToLower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

size_t Utf8Length(std::string_view text) {
  size_t count = 0;
  for (size_t pos = 0; pos < text.size(); ++count) {
    pos += DecodeUtf8(text, pos).length;
  }
  return count;
}

bool IsNumeric(std::string_view surface) {
  bool digit = false;
  for (char c : surface) {
    if (c >= '0' && c <= '9') {
      digit = true;
    } else if (c != '-') {
      return false;
    }
  }
  return digit;
}

bool IsSymbolSurface(std::string_view surface) {
  for (size_t pos = 0; pos < surface.size();) {
    const CodePoint cp = DecodeUtf8(surface, pos);
    if (IsWordChar(cp.value)) return false;
    pos += cp.length;
  }
  return true;
}

bool IsSentenceTerminator(std::string_view surface) {
  return surface == "." || surface == "!" || surface == "?";
}

PipelineConfig::PipelineConfig(
    std::unordered_set<std::string> stopwords,
    std::unordered_map<std::string, Pos> pos_lexicon,
    std::unordered_map<std::string, std::string> lemma_exceptions)
    : stopwords_(std::move(stopwords)),
      pos_lexicon_(std::move(pos_lexicon)),
      lemma_exceptions_(std::move(lemma_exceptions)) {
  if (stopwords_.empty()) throw Error("stopword lexicon must not be empty");
  for (const auto& [surface, lemma] : lemma_exceptions_) {
    exception_lemmas_.insert(lemma);
  }
}

const PipelineConfig& PipelineConfig::Default() {
  static const PipelineConfig config(
      ParseStopwordLexicon(internal::kStopwordsText, "<bundled stopwords>"),
      ParsePosLexicon(internal::kPosLexiconText, "<bundled pos lexicon>"),
      ParseLemmaExceptions(internal::kLemmaExceptionsText,
                           "<bundled lemma exceptions>"));
  return config;
}

PipelineConfig PipelineConfig::FromFiles(const LexiconPaths& paths) {
  auto stopwords =
      paths.stopwords.empty()
          ? ParseStopwordLexicon(internal::kStopwordsText, "<bundled>")
          : ParseStopwordLexicon(ReadFile(paths.stopwords), paths.stopwords);
  auto pos = paths.pos_lexicon.empty()
                 ? ParsePosLexicon(internal::kPosLexiconText, "<bundled>")
                 : ParsePosLexicon(ReadFile(paths.pos_lexicon),
                                   paths.pos_lexicon);
  auto exceptions =
      paths.lemma_exceptions.empty()
          ? ParseLemmaExceptions(internal::kLemmaExceptionsText, "<bundled>")
          : ParseLemmaExceptions(ReadFile(paths.lemma_exceptions),
                                 paths.lemma_exceptions);
  return PipelineConfig(std::move(stopwords), std::move(pos),
                        std::move(exceptions));
}

bool PipelineConfig::IsStopword(std::string_view lowercase) const {
  return stopwords_.contains(std::string(lowercase));
}

std::optional<Pos> PipelineConfig::LookupPos(std::string_view lemma) const {
  auto it = pos_lexicon_.find(std::string(lemma));
  if (it == pos_lexicon_.end()) return std::nullopt;
  return it->second;
}

const std::string* PipelineConfig::LookupLemmaException(
    std::string_view lowercase) const {
  auto it = lemma_exceptions_.find(std::string(lowercase));
  return it == lemma_exceptions_.end() ? nullptr : &it->second;
}

bool PipelineConfig::IsExceptionLemma(std::string_view lemma) const {
  return exception_lemmas_.contains(std::string(lemma));
}

std::unordered_set<std::string> ParseStopwordLexicon(std::string_view text,
                                                     std::string_view) {
  std::unordered_set<std::string> words;
  ForEachEntry(text, [&](size_t, std::string_view line) {
    words.insert(ToLower(Trim(line)));
  });
  return words;
}

std::unordered_map<std::string, Pos> ParsePosLexicon(std::string_view text,
                                                     std::string_view source) {
  std::unordered_map<std::string, Pos> lexicon;
  ForEachEntry(text, [&](size_t line_number, std::string_view line) {
    auto [word, tag] = SplitTab(line, line_number, source);
    auto pos = ParsePos(tag);
    if (!pos) {
      throw Error(std::string(source) + ":" + std::to_string(line_number) +
                  ": unknown tag '" + std::string(tag) + "'");
    }
    lexicon[ToLower(word)] = *pos;
  });
  return lexicon;
}

std::unordered_map<std::string, std::string> ParseLemmaExceptions(
    std::string_view text, std::string_view source) {
  std::unordered_map<std::string, std::string> exceptions;
  ForEachEntry(text, [&](size_t line_number, std::string_view line) {
    auto [surface, lemma] = SplitTab(line, line_number, source);
    if (lemma.empty()) {
      throw Error(std::string(source) + ":" + std::to_string(line_number) +
                  ": empty lemma");
    }
    exceptions[ToLower(surface)] = ToLower(lemma);
  });
  return exceptions;
}

TokenSeq Tokenize(std::string_view text) {
  TokenSeq tokens;
  size_t sentence = 0;
  const auto emit = [&](std::string_view surface) {
    Token token;
    token.surface = std::string(surface);
    token.index = tokens.size();
    token.sentence = sentence;
    tokens.push_back(std::move(token));
    if (IsSentenceTerminator(surface)) ++sentence;
  };

  size_t pos = 0;
  while (pos < text.size()) {
    const CodePoint cp = DecodeUtf8(text, pos);
    if (IsSpace(cp.value)) {
      pos += cp.length;
      continue;
    }
    if (!IsWordChar(cp.value)) {
      emit(text.substr(pos, cp.length));
      pos += cp.length;
      continue;
    }
    const size_t start = pos;
    pos += cp.length;
    while (pos < text.size()) {
      const CodePoint next = DecodeUtf8(text, pos);
      if (IsWordChar(next.value)) {
        pos += next.length;
        continue;
      }
      if (IsJoiner(next.value) && pos + next.length < text.size() &&
          IsWordChar(DecodeUtf8(text, pos + next.length).value)) {
        pos += next.length;
        continue;
      }
      break;
    }
    emit(text.substr(start, pos - start));
  }
  return tokens;
}

std::string LemmatizeWord(std::string_view surface,
                          const PipelineConfig& config) {
  std::string word = ToLower(surface);
  if (const std::string* lemma = config.LookupLemmaException(word)) {
    return *lemma;
  }
  if (config.IsExceptionLemma(word) || IsNumeric(word)) return word;

  const size_t n = word.size();
  if (EndsWith(word, "ies") && n - 3 >= 2) {
    word.resize(n - 3);
    word += 'y';
  } else if (EndsWith(word, "sses")) {
    word.resize(n - 2);
  } else if (EndsWith(word, "es") && n - 2 >= 3 &&
             (EndsWith(word.substr(0, n - 2), "x") ||
              EndsWith(word.substr(0, n - 2), "z") ||
              EndsWith(word.substr(0, n - 2), "ch") ||
              EndsWith(word.substr(0, n - 2), "sh"))) {
    word.resize(n - 2);
  } else if (EndsWith(word, "s") && n - 1 >= 3 && !EndsWith(word, "ss") &&
             !EndsWith(word, "is") && !EndsWith(word, "us")) {
    word.resize(n - 1);
  }
  return word;
}

Pos LexiconPosTagger::Tag(const Token& token) const {
  if (IsSymbolSurface(token.surface) || IsNumeric(token.surface)) {
    return Pos::kOther;
  }
  const std::string lower = ToLower(token.surface);
  const std::string candidate = LemmatizeWord(lower, config_);
  if (auto pos = config_.LookupPos(candidate)) return *pos;
  if (auto pos = config_.LookupPos(lower)) return *pos;
  for (const SuffixRule& rule : kSuffixRules) {
    if (candidate.size() >= rule.suffix.size() + 2 &&
        EndsWith(candidate, rule.suffix)) {
      return rule.pos;
    }
  }
  return Pos::kNoun;
}

TokenSeq PosTag(TokenSeq tokens, const PosTagger& tagger) {
  for (Token& token : tokens) token.pos = tagger.Tag(token);
  return tokens;
}

TokenSeq PosTag(TokenSeq tokens, const PipelineConfig& config) {
  return PosTag(std::move(tokens), LexiconPosTagger(config));
}

TokenSeq FilterStopwords(TokenSeq tokens, const PipelineConfig& config) {
  for (Token& token : tokens) {
    token.is_stopword = config.IsStopword(ToLower(token.surface));
  }
  return tokens;
}

TokenSeq RemoveSymbols(TokenSeq tokens) {
  for (Token& token : tokens) token.is_symbol = IsSymbolSurface(token.surface);
  return tokens;
}

TokenSeq Lemmatize(TokenSeq tokens, const PipelineConfig& config) {
  for (Token& token : tokens) {
    token.lemma = IsSymbolSurface(token.surface)
                      ? token.surface
                      : LemmatizeWord(token.surface, config);
  }
  return tokens;
}

TokenSeq Preprocess(std::string_view text, const PipelineConfig& config) {
  TokenSeq tokens = Tokenize(text);
  tokens = PosTag(std::move(tokens), config);
  tokens = FilterStopwords(std::move(tokens), config);
  tokens = RemoveSymbols(std::move(tokens));
  return Lemmatize(std::move(tokens), config);
}

}  // namespace kex
