#include "scidetect/features.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>

#include "scidetect/error.h"
#include "scidetect/io.h"

#ifndef SCIDETECT_DEFAULT_DATA_DIR
#define SCIDETECT_DEFAULT_DATA_DIR "data"
#endif

namespace scidetect {

namespace {

constexpr std::size_t kPunctGroups = 12;
constexpr std::array<std::string_view, kPunctGroups> kPunctGroupNames = {
    "period",   "comma",        "semicolon",    "colon",
    "exclamation", "question",  "double_quote", "single_quote",
    "parenthesis", "hyphen",    "em_dash",      "bracket"};

std::optional<std::size_t> punct_group(std::string_view token) {
  if (token == ".") return 0;
  if (token == ",") return 1;
  if (token == ";") return 2;
  if (token == ":") return 3;
  if (token == "!") return 4;
  if (token == "?") return 5;
  if (token == "\"") return 6;
  if (token == "'") return 7;
  if (token == "(" || token == ")") return 8;
  if (token == "-") return 9;
  if (token == "—") return 10;
  if (token == "[" || token == "]") return 11;
  return std::nullopt;
}

std::vector<std::string> lowered_words(const TokenSeq& seq) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq.is_word[i]) out.push_back(to_lower_ascii(seq.tokens[i]));
  }
  return out;
}

}  // namespace

std::string_view dimension_name(Dimension d) {
  switch (d) {
    case Dimension::kSyntax: return "Syntax";
    case Dimension::kSemantics: return "Semantics";
    case Dimension::kPragmatics: return "Pragmatics";
  }
  return "";
}

std::string_view subcategory_name(Subcategory s) {
  switch (s) {
    case Subcategory::kGrammaticalIssues: return "Grammatical Issues";
    case Subcategory::kTextStructure: return "Text Structure";
    case Subcategory::kReadability: return "Readability";
    case Subcategory::kLexicalIssues: return "Lexical Issues";
    case Subcategory::kConsistency: return "Consistency";
    case Subcategory::kCoherence: return "Coherence";
    case Subcategory::kRedundancy: return "Redundancy";
    case Subcategory::kWritingStyle: return "Writing Style";
  }
  return "";
}

Dimension dimension_of(Subcategory s) {
  switch (s) {
    case Subcategory::kGrammaticalIssues:
    case Subcategory::kTextStructure:
    case Subcategory::kReadability:
      return Dimension::kSyntax;
    case Subcategory::kLexicalIssues:
    case Subcategory::kConsistency:
    case Subcategory::kCoherence:
      return Dimension::kSemantics;
    case Subcategory::kRedundancy:
    case Subcategory::kWritingStyle:
      break;
  }
  return Dimension::kPragmatics;
}

FeatureSchema::FeatureSchema() : version_(kFeatureSchemaVersion) {
  auto add = [this](std::string name, Subcategory sub) {
    index_.emplace(name, entries_.size());
    entries_.push_back({std::move(name), sub, dimension_of(sub)});
  };
  for (std::string_view tag : kPosTagNames) {
    add("pos_freq." + std::string(tag), Subcategory::kGrammaticalIssues);
  }
  for (std::string_view p : kPunctGroupNames) {
    add("punct_freq." + std::string(p), Subcategory::kGrammaticalIssues);
  }
  for (const char* name : {"word_count", "sentence_count", "paragraph_count",
                           "mean_sentence_length", "mean_word_length",
                           "paragraph_length"}) {
    add(name, Subcategory::kTextStructure);
  }
  add("flesch_reading_ease", Subcategory::kReadability);
  add("gunning_fog", Subcategory::kReadability);
  for (const char* name : {"top100_word_fraction", "top1000_word_fraction",
                           "tfidf_mean", "tfidf_max", "type_token_ratio"}) {
    add(name, Subcategory::kLexicalIssues);
  }
  add("title_sentence_similarity", Subcategory::kConsistency);
  add("sentence_coherence", Subcategory::kCoherence);
  for (const char* name :
       {"word_unigram_overlap", "word_bigram_overlap", "word_trigram_overlap",
        "pos_unigram_overlap", "pos_bigram_overlap", "pos_trigram_overlap"}) {
    add(name, Subcategory::kRedundancy);
  }
  for (std::size_t i = 0; i < kStyleDim; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "style_embedding.%02zu", i);
    add(buf, Subcategory::kWritingStyle);
  }
}

const FeatureSchema& FeatureSchema::standard() {
  static const FeatureSchema kSchema;
  return kSchema;
}

std::optional<std::size_t> FeatureSchema::index_of(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double CorpusStats::unseen_idf() const {
  return std::log((1.0 + static_cast<double>(document_count)) / 1.0) + 1.0;
}

double CorpusStats::idf_of(const std::string& term) const {
  auto it = idf.find(term);
  return it == idf.end() ? unseen_idf() : it->second;
}

double sparse_cosine(const SparseVector& u, const SparseVector& v) {
  double dot = 0.0;
  double nu = 0.0;
  double nv = 0.0;
  for (const auto& [_, w] : u) nu += w * w;
  for (const auto& [_, w] : v) nv += w * w;
  if (nu == 0.0 || nv == 0.0) return 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < u.size() && j < v.size()) {
    if (u[i].first == v[j].first) {
      dot += u[i].second * v[j].second;
      ++i;
      ++j;
    } else if (u[i].first < v[j].first) {
      ++i;
    } else {
      ++j;
    }
  }
  return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

std::vector<std::string> load_top_words(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<std::string> words;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
      line.pop_back();
    }
    if (!line.empty()) words.push_back(std::move(line));
    pos = eol + 1;
  }
  return words;
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("SCIDETECT_DATA_DIR"); env && *env) {
    return env;
  }
  return SCIDETECT_DEFAULT_DATA_DIR;
}

std::filesystem::path default_top_words_path() {
  return default_data_dir() / "top_words.txt";
}

CorpusStats fit_corpus_stats(const Corpus& corpus,
                             const std::filesystem::path& top_word_path) {
  return fit_corpus_stats(corpus, load_top_words(top_word_path));
}

CorpusStats fit_corpus_stats(const Corpus& corpus,
                             std::vector<std::string> top_word_list) {
  if (corpus.empty()) throw DomainError("cannot fit statistics on an empty corpus");
  CorpusStats stats;
  stats.document_count = corpus.size();
  std::map<std::string, std::size_t> df;
  for (const Excerpt& e : corpus.excerpts) {
    std::set<std::string> seen;
    for (auto& w : lowered_words(tokenize(e.title))) seen.insert(std::move(w));
    for (auto& w : lowered_words(tokenize(e.body))) seen.insert(std::move(w));
    for (const std::string& w : seen) ++df[w];
  }
  const double n = static_cast<double>(stats.document_count);
  std::uint32_t next = 0;
  for (const auto& [term, count] : df) {
    stats.idf.emplace(term, std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
    stats.term_index.emplace(term, next++);
  }
  stats.top_word_list = std::move(top_word_list);
  for (std::size_t i = 0; i < stats.top_word_list.size() && i < 1000; ++i) {
    const std::string w = to_lower_ascii(stats.top_word_list[i]);
    if (i < 100) stats.top100.insert(w);
    stats.top1000.insert(w);
  }
  return stats;
}

SparseVector sentence_vector(std::string_view sentence, const CorpusStats& stats) {
  std::map<std::uint32_t, double> weights;
  for (const std::string& w : lowered_words(tokenize(sentence))) {
    auto it = stats.term_index.find(w);
    if (it == stats.term_index.end()) continue;
    weights[it->second] += stats.idf.at(w);
  }
  SparseVector v(weights.begin(), weights.end());
  double norm = 0.0;
  for (const auto& [_, w] : v) norm += w * w;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (auto& [_, w] : v) w /= norm;
  }
  return v;
}

FeatureVector extract_features(const Excerpt& excerpt, const CorpusStats& stats) {
  const FeatureSchema& schema = FeatureSchema::standard();
  if (excerpt.body.find_first_not_of(" \t\r\n\f\v") == std::string::npos) {
    throw DomainError("excerpt \"" + excerpt.id + "\" has an empty body");
  }
  const std::vector<std::string> sentences = split_sentences(excerpt.body);
  if (sentences.empty()) {
    throw DomainError("excerpt \"" + excerpt.id + "\" has no sentences");
  }
  const TokenSeq seq = tokenize(excerpt.body);
  const std::vector<PosTag> tags = pos_tag(seq);
  const std::vector<std::string> words = lowered_words(seq);
  if (words.empty()) {
    throw DomainError("excerpt \"" + excerpt.id + "\" has no word tokens");
  }

  FeatureVector fv;
  fv.excerpt_id = excerpt.id;
  fv.values.reserve(schema.size());
  auto push = [&fv](double x) { fv.values.push_back(x); };

  // Grammatical issues: tag and punctuation frequencies per token.
  const double token_count = static_cast<double>(seq.size());
  std::array<double, kPosTagCount> tag_counts{};
  for (PosTag t : tags) tag_counts[static_cast<std::size_t>(t)] += 1.0;
  for (double c : tag_counts) push(c / token_count);
  std::array<double, kPunctGroups> punct_counts{};
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq.is_word[i]) continue;
    if (auto g = punct_group(seq.tokens[i])) punct_counts[*g] += 1.0;
  }
  for (double c : punct_counts) push(c / token_count);

  // Text structure.
  const double word_count = static_cast<double>(words.size());
  const double sentence_count = static_cast<double>(sentences.size());
  const double paragraph_count =
      static_cast<double>(std::max<std::size_t>(1, split_paragraphs(excerpt.body).size()));
  double sentence_words = 0.0;
  for (const std::string& s : sentences) {
    const TokenSeq st = tokenize(s);
    sentence_words += static_cast<double>(
        std::count(st.is_word.begin(), st.is_word.end(), true));
  }
  double chars = 0.0;
  long syllables = 0;
  long complex_words = 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (!seq.is_word[i]) continue;
    chars += static_cast<double>(utf8_length(seq.tokens[i]));
    const int s = count_syllables(seq.tokens[i]);
    syllables += s;
    if (s >= 3) ++complex_words;
  }
  push(word_count);
  push(sentence_count);
  push(paragraph_count);
  push(sentence_words / sentence_count);
  push(chars / word_count);
  push(word_count / paragraph_count);

  // Readability.
  const Readability r =
      readability(static_cast<long>(words.size()), static_cast<long>(sentences.size()),
                  syllables, complex_words);
  push(r.flesch);
  push(r.fog);

  // Lexical issues.
  double in_top100 = 0.0;
  double in_top1000 = 0.0;
  std::map<std::string, double> term_counts;
  for (const std::string& w : words) {
    if (stats.top100.count(w)) in_top100 += 1.0;
    if (stats.top1000.count(w)) in_top1000 += 1.0;
    term_counts[w] += 1.0;
  }
  double tfidf_sum = 0.0;
  double tfidf_max = 0.0;
  for (const auto& [term, count] : term_counts) {
    const double value = (count / word_count) * stats.idf_of(term);
    tfidf_sum += value;
    tfidf_max = std::max(tfidf_max, value);
  }
  push(in_top100 / word_count);
  push(in_top1000 / word_count);
  push(tfidf_sum / static_cast<double>(term_counts.size()));
  push(tfidf_max);
  push(static_cast<double>(term_counts.size()) / word_count);

  // Consistency and coherence.
  std::vector<SparseVector> vectors;
  vectors.reserve(sentences.size());
  for (const std::string& s : sentences) vectors.push_back(sentence_vector(s, stats));
  const SparseVector title = sentence_vector(excerpt.title, stats);
  double consistency = 0.0;
  for (const SparseVector& v : vectors) consistency += sparse_cosine(v, title);
  push(consistency / sentence_count);
  if (vectors.size() == 1) {
    push(1.0);
  } else {
    double coherence = 0.0;
    for (std::size_t i = 0; i + 1 < vectors.size(); ++i) {
      coherence += sparse_cosine(vectors[i], vectors[i + 1]);
    }
    push(coherence / static_cast<double>(vectors.size() - 1));
  }

  // Redundancy.
  std::vector<std::string> word_tags;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq.is_word[i]) word_tags.emplace_back(pos_tag_name(tags[i]));
  }
  for (int n = 1; n <= 3; ++n) push(ngram_repetition(words, n));
  for (int n = 1; n <= 3; ++n) push(ngram_repetition(word_tags, n));

  // Writing style.
  for (double x : style_embedding(excerpt.body)) push(x);

  if (fv.values.size() != schema.size()) {
    throw std::logic_error("feature extraction does not match the schema");
  }
  return fv;
}

std::vector<FeatureVector> extract_all(const Corpus& corpus,
                                       const CorpusStats& stats) {
  std::vector<FeatureVector> out;
  out.reserve(corpus.size());
  for (const Excerpt& e : corpus.excerpts) out.push_back(extract_features(e, stats));
  return out;
}

std::map<std::string, std::vector<Span>> feature_spans(const Excerpt& excerpt,
                                                       const CorpusStats& stats) {
  std::map<std::string, std::vector<Span>> out;
  const TokenSeq seq = tokenize(excerpt.body);
  const std::vector<PosTag> tags = pos_tag(seq);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    out["pos_freq." + std::string(pos_tag_name(tags[i]))].push_back(seq.spans[i]);
    if (!seq.is_word[i]) {
      if (auto g = punct_group(seq.tokens[i])) {
        out["punct_freq." + std::string(kPunctGroupNames[*g])].push_back(seq.spans[i]);
      }
      continue;
    }
    const std::string w = to_lower_ascii(seq.tokens[i]);
    if (stats.top100.count(w)) out["top100_word_fraction"].push_back(seq.spans[i]);
    if (stats.top1000.count(w)) out["top1000_word_fraction"].push_back(seq.spans[i]);
  }
  return out;
}

}  // namespace scidetect
