#include "scidetect/text.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "scidetect/error.h"

namespace scidetect {

namespace internal {
extern const std::string_view kPosLexiconTsv;
}  // namespace internal

namespace {

struct CodePoint {
  char32_t value;
  std::size_t begin;
  std::size_t end;
};

// Decodes one code point at `pos`. Invalid sequences decode as U+FFFD and
// consume a single byte.
CodePoint decode_at(std::string_view s, std::size_t pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  auto cont = [&](std::size_t i) -> std::optional<unsigned> {
    if (i >= s.size()) return std::nullopt;
    const auto b = static_cast<unsigned char>(s[i]);
    if ((b & 0xC0) != 0x80) return std::nullopt;
    return b & 0x3F;
  };
  if (b0 < 0x80) return {b0, pos, pos + 1};
  if ((b0 & 0xE0) == 0xC0) {
    if (auto c1 = cont(pos + 1)) {
      return {static_cast<char32_t>(((b0 & 0x1F) << 6) | *c1), pos, pos + 2};
    }
  } else if ((b0 & 0xF0) == 0xE0) {
    auto c1 = cont(pos + 1);
    auto c2 = cont(pos + 2);
    if (c1 && c2) {
      return {static_cast<char32_t>(((b0 & 0x0F) << 12) | (*c1 << 6) | *c2),
              pos, pos + 3};
    }
  } else if ((b0 & 0xF8) == 0xF0) {
    auto c1 = cont(pos + 1);
    auto c2 = cont(pos + 2);
    auto c3 = cont(pos + 3);
    if (c1 && c2 && c3) {
      return {static_cast<char32_t>(((b0 & 0x07) << 18) | (*c1 << 12) |
                                    (*c2 << 6) | *c3),
              pos, pos + 4};
    }
  }
  return {0xFFFD, pos, pos + 1};
}

std::vector<CodePoint> decode(std::string_view s) {
  std::vector<CodePoint> out;
  out.reserve(s.size());
  for (std::size_t pos = 0; pos < s.size();) {
    CodePoint cp = decode_at(s, pos);
    out.push_back(cp);
    pos = cp.end;
  }
  return out;
}


bool is_digit(char32_t c) { return c >= '0' && c <= '9'; }

// Letters by block: Latin-1/Extended (minus the two operators), Greek through
// the end of the Indic/SE-Asian blocks, and the CJK/Hangul planes. Excludes
// the general punctuation, symbol, and private-use ranges.
bool is_letter(char32_t c) {
  if (c < 0x80) return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  if (c >= 0xC0 && c <= 0x24F) return c != 0xD7 && c != 0xF7;
  if (c >= 0x370 && c < 0x2000) return true;
  if (c >= 0x2C00 && c < 0x2E00) return true;
  if (c >= 0x3040 && c < 0xD800) return true;
  if (c >= 0xF900 && c < 0xFE30) return true;
  if (c >= 0xFF21 && c <= 0xFF3A) return true;
  if (c >= 0xFF41 && c <= 0xFF5A) return true;
  if (c >= 0x20000 && c < 0x30000) return true;
  return false;
}

bool is_word_char(char32_t c) { return is_letter(c) || is_digit(c); }

bool is_apostrophe(char32_t c) { return c == '\'' || c == 0x2019; }

// Canonical punctuation token for a code point, if it is one.
std::optional<std::string_view> punctuation_token(char32_t c) {
  switch (c) {
    case '.': return ".";
    case ',': return ",";
    case ';': return ";";
    case ':': return ":";
    case '!': return "!";
    case '?': return "?";
    case '"':
    case 0x201C:
    case 0x201D: return "\"";
    case '\'':
    case 0x2018:
    case 0x2019: return "'";
    case '(': return "(";
    case ')': return ")";
    case '-': return "-";
    case 0x2014: return "—";
    case '[': return "[";
    case ']': return "]";
    default: return std::nullopt;
  }
}

bool is_space(char32_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v' || c == 0xA0;
}

std::string_view trim(std::string_view s) {
  auto ws = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

// Byte ranges of paragraphs: runs of lines separated by whitespace-only lines.
std::vector<std::pair<std::size_t, std::size_t>> paragraph_ranges(
    std::string_view text) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::optional<std::size_t> start;
  std::size_t last_end = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    if (trim(text.substr(pos, eol - pos)).empty()) {
      if (start) out.emplace_back(*start, last_end);
      start.reset();
    } else {
      if (!start) start = pos;
      last_end = eol;
    }
    pos = eol + 1;
  }
  if (start) out.emplace_back(*start, last_end);
  return out;
}

const std::set<std::string, std::less<>>& abbreviations() {
  static const std::set<std::string, std::less<>> kAbbrev = {
      "e.g.", "i.e.", "al.",  "fig.", "figs.", "eq.",    "eqs.",
      "sec.", "tab.", "vs.",  "cf.",  "dr.",   "mr.",    "mrs.",
      "ms.",  "prof.", "no.", "approx.", "resp.", "ref.", "refs.",
      "vol.", "pp.",  "ch.",  "st.",  "jr.",   "sr.",    "etc.al."};
  return kAbbrev;
}

bool ends_with_abbreviation(std::string_view text, std::size_t period) {
  std::size_t start = period;
  while (start > 0 && !is_space(static_cast<unsigned char>(text[start - 1]))) {
    --start;
  }
  std::string chunk = to_lower_ascii(text.substr(start, period + 1 - start));
  std::size_t lead = 0;
  while (lead < chunk.size() &&
         (chunk[lead] == '(' || chunk[lead] == '[' || chunk[lead] == '"' ||
          chunk[lead] == '\'')) {
    ++lead;
  }
  return abbreviations().count(std::string_view(chunk).substr(lead)) > 0;
}

bool is_closing(char32_t c) {
  return c == '"' || c == '\'' || c == ')' || c == ']' || c == 0x201D ||
         c == 0x2019;
}

bool is_opening(char32_t c) {
  return c == '"' || c == '\'' || c == '(' || c == '[' || c == 0x201C ||
         c == 0x2018;
}

bool is_upper(char32_t c) {
  if (c >= 'A' && c <= 'Z') return true;
  if (c >= 0xC0 && c <= 0xDE) return c != 0xD7;
  if (c >= 0x391 && c <= 0x3A9) return true;
  if (c >= 0x410 && c <= 0x42F) return true;
  return false;
}

void split_block(std::string_view text, std::size_t begin, std::size_t end,
                 std::vector<std::string>& out) {
  std::string_view block = text.substr(begin, end - begin);
  std::vector<CodePoint> cps = decode(block);
  std::size_t sentence_start = 0;
  auto emit = [&](std::size_t stop) {
    std::string_view piece =
        trim(block.substr(sentence_start, stop - sentence_start));
    if (!piece.empty()) out.emplace_back(piece);
    sentence_start = stop;
  };
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t c = cps[i].value;
    if (c != '.' && c != '!' && c != '?') continue;
    std::size_t j = i;
    while (j + 1 < cps.size() &&
           (cps[j + 1].value == '.' || cps[j + 1].value == '!' ||
            cps[j + 1].value == '?')) {
      ++j;
    }
    const bool single_period = (j == i && c == '.');
    std::size_t k = j;
    while (k + 1 < cps.size() && is_closing(cps[k + 1].value)) ++k;
    const std::size_t stop = cps[k].end;
    std::size_t m = k + 1;
    bool had_space = false;
    while (m < cps.size() && is_space(cps[m].value)) {
      had_space = true;
      ++m;
    }
    bool boundary = false;
    if (m >= cps.size()) {
      boundary = true;
    } else if (had_space) {
      std::size_t q = m;
      while (q < cps.size() && is_opening(cps[q].value)) ++q;
      boundary = q < cps.size() && is_upper(cps[q].value);
    }
    if (boundary && single_period && ends_with_abbreviation(block, cps[i].begin)) {
      boundary = false;
    }
    if (boundary) emit(stop);
    i = k;
  }
  emit(block.size());
}

struct Lexicon {
  std::unordered_map<std::string, PosTag> entries;
};

std::optional<PosTag> parse_tag(std::string_view name) {
  for (std::size_t i = 0; i < kPosTagCount; ++i) {
    if (kPosTagNames[i] == name) return static_cast<PosTag>(i);
  }
  return std::nullopt;
}

const Lexicon& lexicon() {
  static const Lexicon kLexicon = [] {
    Lexicon lex;
    std::string_view data = internal::kPosLexiconTsv;
    std::size_t pos = 0;
    while (pos < data.size()) {
      std::size_t eol = data.find('\n', pos);
      if (eol == std::string_view::npos) eol = data.size();
      std::string_view line = data.substr(pos, eol - pos);
      pos = eol + 1;
      if (line.empty() || line.front() == '#') continue;
      const std::size_t tab = line.find('\t');
      if (tab == std::string_view::npos) continue;
      if (auto tag = parse_tag(trim(line.substr(tab + 1)))) {
        lex.entries.emplace(std::string(line.substr(0, tab)), *tag);
      }
    }
    return lex;
  }();
  return kLexicon;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

struct SuffixRule {
  std::string_view suffix;
  std::size_t min_length;
  PosTag tag;
};

// Checked in order; first match wins.
constexpr std::array<SuffixRule, 36> kSuffixRules = {{
    {"ly", 4, PosTag::kAdv},
    {"tion", 5, PosTag::kNoun},   {"sion", 5, PosTag::kNoun},
    {"ment", 5, PosTag::kNoun},   {"ness", 5, PosTag::kNoun},
    {"ity", 5, PosTag::kNoun},    {"ism", 5, PosTag::kNoun},
    {"ance", 5, PosTag::kNoun},   {"ence", 5, PosTag::kNoun},
    {"ship", 5, PosTag::kNoun},   {"ogy", 5, PosTag::kNoun},
    {"ist", 5, PosTag::kNoun},    {"ists", 6, PosTag::kNoun},
    {"izing", 6, PosTag::kVerb},  {"ising", 6, PosTag::kVerb},
    {"ized", 5, PosTag::kVerb},   {"ised", 5, PosTag::kVerb},
    {"izes", 5, PosTag::kVerb},   {"ize", 4, PosTag::kVerb},
    {"ise", 5, PosTag::kVerb},    {"ified", 6, PosTag::kVerb},
    {"ifies", 6, PosTag::kVerb},  {"ify", 4, PosTag::kVerb},
    {"ing", 5, PosTag::kVerb},    {"ed", 4, PosTag::kVerb},
    {"ical", 5, PosTag::kAdj},    {"ous", 5, PosTag::kAdj},
    {"ful", 5, PosTag::kAdj},     {"ive", 5, PosTag::kAdj},
    {"able", 5, PosTag::kAdj},    {"ible", 5, PosTag::kAdj},
    {"less", 5, PosTag::kAdj},    {"ish", 5, PosTag::kAdj},
    {"ic", 4, PosTag::kAdj},      {"al", 4, PosTag::kAdj},
    {"ary", 5, PosTag::kAdj},
}};

std::uint32_t fnv1a32(std::string_view bytes) {
  std::uint32_t h = 0x811c9dc5u;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x01000193u;
  }
  return h;
}

}  // namespace

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (std::size_t pos = 0; pos < s.size(); ++n) pos = decode_at(s, pos).end;
  return n;
}

TokenSeq tokenize(std::string_view text) {
  TokenSeq seq;
  const std::vector<CodePoint> cps = decode(text);
  std::size_t i = 0;
  while (i < cps.size()) {
    const char32_t c = cps[i].value;
    if (is_word_char(c)) {
      std::size_t j = i + 1;
      while (j < cps.size()) {
        if (is_word_char(cps[j].value)) {
          ++j;
        } else if (is_apostrophe(cps[j].value) && j + 1 < cps.size() &&
                   is_word_char(cps[j + 1].value)) {
          j += 2;
        } else {
          break;
        }
      }
      const Span span{cps[i].begin, cps[j - 1].end};
      std::string token(text.substr(span.begin, span.end - span.begin));
      // Fold the typographic apostrophe so "don’t" and "don't" agree.
      for (std::size_t p = token.find("\xE2\x80\x99"); p != std::string::npos;
           p = token.find("\xE2\x80\x99", p)) {
        token.replace(p, 3, "'");
      }
      seq.tokens.push_back(std::move(token));
      seq.is_word.push_back(true);
      seq.spans.push_back(span);
      i = j;
      continue;
    }
    if (auto punct = punctuation_token(c)) {
      seq.tokens.emplace_back(*punct);
      seq.is_word.push_back(false);
      seq.spans.push_back({cps[i].begin, cps[i].end});
    }
    ++i;
  }
  return seq;
}

std::vector<std::string> split_paragraphs(std::string_view text) {
  std::vector<std::string> out;
  for (auto [b, e] : paragraph_ranges(text)) {
    std::string_view p = trim(text.substr(b, e - b));
    if (!p.empty()) out.emplace_back(p);
  }
  return out;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  for (auto [b, e] : paragraph_ranges(text)) split_block(text, b, e, out);
  return out;
}

std::string_view pos_tag_name(PosTag tag) {
  return kPosTagNames[static_cast<std::size_t>(tag)];
}

PosTag tag_word(std::string_view word) {
  bool has_digit = false;
  bool has_other = false;
  for (CodePoint cp : decode(word)) {
    if (is_digit(cp.value)) {
      has_digit = true;
    } else if (!is_apostrophe(cp.value)) {
      has_other = true;
    }
  }
  if (has_digit && !has_other) return PosTag::kNum;
  if (has_digit) return PosTag::kX;
  const std::string lower = to_lower_ascii(word);
  const auto& entries = lexicon().entries;
  if (auto it = entries.find(lower); it != entries.end()) return it->second;
  for (const SuffixRule& rule : kSuffixRules) {
    if (lower.size() >= rule.min_length && ends_with(lower, rule.suffix)) {
      return rule.tag;
    }
  }
  return PosTag::kNoun;
}

std::vector<PosTag> pos_tag(const TokenSeq& tokens) {
  std::vector<PosTag> tags;
  tags.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    tags.push_back(tokens.is_word[i] ? tag_word(tokens.tokens[i])
                                     : PosTag::kPunct);
  }
  return tags;
}

int count_syllables(std::string_view word) {
  const std::string w = to_lower_ascii(word);
  auto vowel = [](char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' ||
           c == 'y';
  };
  int groups = 0;
  bool in_group = false;
  for (char c : w) {
    if (vowel(c)) {
      if (!in_group) ++groups;
      in_group = true;
    } else {
      in_group = false;
    }
  }
  if (ends_with(w, "e") && !ends_with(w, "le")) --groups;
  return std::max(groups, 1);
}

Readability readability(long word_count, long sentence_count,
                        long syllable_count, long complex_word_count) {
  if (word_count < 1) throw DomainError("readability needs at least 1 word");
  if (sentence_count < 1) {
    throw DomainError("readability needs at least 1 sentence");
  }
  const double words = static_cast<double>(word_count);
  const double words_per_sentence = words / static_cast<double>(sentence_count);
  Readability r;
  r.flesch = 206.835 - 1.015 * words_per_sentence -
             84.6 * (static_cast<double>(syllable_count) / words);
  r.fog = 0.4 * (words_per_sentence +
                 100.0 * (static_cast<double>(complex_word_count) / words));
  return r;
}

double ngram_repetition(std::span<const std::string> seq, int n) {
  if (n < 1 || n > 3) throw DomainError("n-gram order must be 1, 2 or 3");
  const auto order = static_cast<std::size_t>(n);
  if (seq.size() < order) return 0.0;
  const std::size_t total = seq.size() - order + 1;
  std::set<std::vector<std::string_view>> distinct;
  for (std::size_t i = 0; i < total; ++i) {
    std::vector<std::string_view> gram;
    gram.reserve(order);
    for (std::size_t k = 0; k < order; ++k) gram.emplace_back(seq[i + k]);
    distinct.insert(std::move(gram));
  }
  return 1.0 - static_cast<double>(distinct.size()) / static_cast<double>(total);
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw DomainError("cosine_similarity: length mismatch (" +
                      std::to_string(u.size()) + " vs " +
                      std::to_string(v.size()) + ")");
  }
  double dot = 0.0;
  double nu = 0.0;
  double nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

std::array<double, kStyleDim> style_embedding(std::string_view text) {
  std::array<double, kStyleDim> out{};
  const std::string lower = to_lower_ascii(text);
  const std::vector<CodePoint> cps = decode(lower);
  if (cps.size() < 3) return out;
  for (std::size_t i = 0; i + 2 < cps.size(); ++i) {
    std::string_view gram =
        std::string_view(lower).substr(cps[i].begin, cps[i + 2].end - cps[i].begin);
    out[fnv1a32(gram) % kStyleDim] += 1.0;
  }
  double norm = 0.0;
  for (double x : out) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : out) x /= norm;
  return out;
}

}  // namespace scidetect
