#ifndef SCIDETECT_FEATURES_H_
#define SCIDETECT_FEATURES_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "scidetect/corpus.h"
#include "scidetect/text.h"

namespace scidetect {

enum class Dimension { kSyntax, kSemantics, kPragmatics };

enum class Subcategory {
  kGrammaticalIssues,
  kTextStructure,
  kReadability,
  kLexicalIssues,
  kConsistency,
  kCoherence,
  kRedundancy,
  kWritingStyle,
};

std::string_view dimension_name(Dimension d);
std::string_view subcategory_name(Subcategory s);
Dimension dimension_of(Subcategory s);

struct FeatureEntry {
  std::string name;
  Subcategory subcategory;
  Dimension dimension;
};

// Ordered feature layout. FeatureVector indices are positions in this list;
// any change to the order or names must bump kFeatureSchemaVersion.
class FeatureSchema {
 public:
  static const FeatureSchema& standard();

  const std::vector<FeatureEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const FeatureEntry& operator[](std::size_t i) const { return entries_[i]; }
  std::optional<std::size_t> index_of(std::string_view name) const;
  const std::string& version() const { return version_; }

 private:
  FeatureSchema();
  std::vector<FeatureEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::string version_;
};

inline constexpr std::string_view kFeatureSchemaVersion = "scidetect-features/1";

struct FeatureVector {
  std::string excerpt_id;
  std::vector<double> values;
  std::string schema_version{kFeatureSchemaVersion};

  bool operator==(const FeatureVector&) const = default;
};

// Token statistics fitted on a corpus.
struct CorpusStats {
  std::size_t document_count = 0;
  std::unordered_map<std::string, double> idf;
  // Stable coordinate for each known term, assigned in lexicographic order.
  std::unordered_map<std::string, std::uint32_t> term_index;
  std::vector<std::string> top_word_list;
  std::unordered_set<std::string> top100;
  std::unordered_set<std::string> top1000;
  std::size_t style_hash_dim = kStyleDim;

  // idf of a term never seen in the fitted corpus.
  double unseen_idf() const;
  double idf_of(const std::string& term) const;

  bool operator==(const CorpusStats& o) const {
    return document_count == o.document_count && idf == o.idf &&
           top_word_list == o.top_word_list;
  }
};

// Sorted (coordinate, weight) pairs.
using SparseVector = std::vector<std::pair<std::uint32_t, double>>;

double sparse_cosine(const SparseVector& u, const SparseVector& v);

// idf(t) = ln((1 + N) / (1 + df(t))) + 1, documents are title + body.
// Throws DomainError on an empty corpus and IoError when the word list cannot
// be read.
CorpusStats fit_corpus_stats(const Corpus& corpus,
                             const std::filesystem::path& top_word_path);
CorpusStats fit_corpus_stats(const Corpus& corpus,
                             std::vector<std::string> top_word_list);

// Ranked list, one word per line. Blank lines are ignored.
std::vector<std::string> load_top_words(const std::filesystem::path& path);

// Location of the bundled data files (top-word list); overridable with the
// SCIDETECT_DATA_DIR environment variable.
std::filesystem::path default_data_dir();
std::filesystem::path default_top_words_path();

// Count-times-idf bag of lowercased known word tokens, L2-normalised. Terms
// absent from the fitted corpus are ignored.
SparseVector sentence_vector(std::string_view sentence, const CorpusStats& stats);

// Throws DomainError when the body has no sentence or no word token.
FeatureVector extract_features(const Excerpt& excerpt, const CorpusStats& stats);

std::vector<FeatureVector> extract_all(const Corpus& corpus,
                                       const CorpusStats& stats);

// Body spans behind each token-derived feature (PoS tags, punctuation, and
// top-word membership), keyed by feature name. Features without a span
// interpretation are absent.
std::map<std::string, std::vector<Span>> feature_spans(const Excerpt& excerpt,
                                                       const CorpusStats& stats);

}  // namespace scidetect

#endif  // SCIDETECT_FEATURES_H_
