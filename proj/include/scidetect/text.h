#ifndef SCIDETECT_TEXT_H_
#define SCIDETECT_TEXT_H_

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scidetect {

// Byte range [begin, end) into the UTF-8 source text.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const Span&) const = default;
};

struct TokenSeq {
  std::vector<std::string> tokens;
  std::vector<bool> is_word;  // parallel to tokens
  std::vector<Span> spans;    // parallel to tokens

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

// Maximal runs of letters, digits and word-internal apostrophes are word
// tokens. Each punctuation character of kPunctuation is its own token (curly
// quotes are folded onto their ASCII forms). Everything else is dropped.
// Letters outside ASCII are recognised by code-point block.
TokenSeq tokenize(std::string_view text);

// The punctuation tokens tokenize() can emit.
inline constexpr std::array<std::string_view, 14> kPunctuation = {
    ".", ",", ";", ":", "!", "?", "\"", "'", "(", ")", "-", "—", "[", "]"};

// Splits at . ! ? followed by whitespace and a capital letter (optionally
// behind an opening quote or bracket), at end of text, and at blank lines.
// Common abbreviations ("e.g.", "et al.", "Fig.", ...) never split.
std::vector<std::string> split_sentences(std::string_view text);

// Blank-line-separated blocks, trimmed, non-empty.
std::vector<std::string> split_paragraphs(std::string_view text);

enum class PosTag {
  kNoun,
  kVerb,
  kAdj,
  kAdv,
  kPron,
  kDet,
  kAdp,
  kConj,
  kNum,
  kPrt,
  kPunct,
  kX,
};
inline constexpr std::size_t kPosTagCount = 12;
inline constexpr std::array<std::string_view, kPosTagCount> kPosTagNames = {
    "NOUN", "VERB", "ADJ", "ADV",  "PRON",  "DET",
    "ADP",  "CONJ", "NUM", "PRT", "PUNCT", "X"};

std::string_view pos_tag_name(PosTag tag);

// Lexicon lookup (bundled list of frequent English words), then suffix rules,
// then NOUN. Punctuation tokens are PUNCT; tokens mixing letters and digits
// are X; pure digit runs are NUM.
std::vector<PosTag> pos_tag(const TokenSeq& tokens);
PosTag tag_word(std::string_view word);

// Vowel groups (aeiouy), minus a terminal silent "e" unless the word ends in
// "le", clamped to at least 1.
int count_syllables(std::string_view word);

struct Readability {
  double flesch = 0.0;
  double fog = 0.0;
};

// Flesch reading ease and Gunning-Fog index from raw counts. Throws
// DomainError when word_count or sentence_count is below 1.
Readability readability(long word_count, long sentence_count,
                        long syllable_count, long complex_word_count);

// 1 - distinct/total over the n-grams of seq; 0 when there are none.
// n must be 1, 2 or 3.
double ngram_repetition(std::span<const std::string> seq, int n);

// u.v / (|u||v|), 0 when either norm is 0. Throws DomainError on a length
// mismatch.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

inline constexpr std::size_t kStyleDim = 64;

// Hashed character 3-gram profile: lowercase (ASCII folding), count every
// window of three consecutive code points, bucket by 32-bit FNV-1a of the
// window's UTF-8 bytes modulo 64, L2-normalise. Zero vector below 3 code
// points.
std::array<double, kStyleDim> style_embedding(std::string_view text);

// ASCII lowercase; other bytes unchanged.
std::string to_lower_ascii(std::string_view s);

// Number of Unicode code points in valid UTF-8 (invalid bytes count as one).
std::size_t utf8_length(std::string_view s);

}  // namespace scidetect

#endif  // SCIDETECT_TEXT_H_
