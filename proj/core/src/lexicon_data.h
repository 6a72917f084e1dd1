#ifndef KEX_SRC_LEXICON_DATA_H_
#define KEX_SRC_LEXICON_DATA_H_

namespace kex::internal {

// Contents of core/data/*, embedded at build time.
extern const char kStopwordsText[];
extern const char kPosLexiconText[];
extern const char kLemmaExceptionsText[];

}  // namespace kex::internal

#endif  // KEX_SRC_LEXICON_DATA_H_
