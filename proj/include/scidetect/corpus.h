#ifndef SCIDETECT_CORPUS_H_
#define SCIDETECT_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace scidetect {

enum class Label { kMachine, kHuman };

std::string_view label_name(Label label);
// Accepts "machine" / "human"; throws DomainError otherwise.
Label parse_label(std::string_view text);

struct Excerpt {
  std::string id;
  std::string title;
  std::string body;
  std::optional<Label> true_label;
  std::string source;
  // Record fields the engine does not interpret, kept for round-trip.
  nlohmann::json extra = nlohmann::json::object();

  // Paired-dataset key: the optional "dataset" record field when present,
  // otherwise the source tag. Human texts paired with a generator's output
  // carry that generator's dataset key.
  std::string dataset() const;

  bool operator==(const Excerpt&) const = default;
};

struct Corpus {
  std::string name;
  std::vector<Excerpt> excerpts;

  std::size_t size() const { return excerpts.size(); }
  bool empty() const { return excerpts.empty(); }
  // Index of the excerpt with this id, if any.
  std::optional<std::size_t> find(std::string_view id) const;

  bool operator==(const Corpus&) const = default;
};

enum class Stratify { kLabel, kSource, kBoth };

struct SplitSpec {
  double train_fraction = 0.7;
  std::uint64_t seed = 7;
  Stratify stratify_by = Stratify::kBoth;
};

// One JSON object per line. Blank lines are skipped. Throws IoError when the
// file cannot be opened and ParseError (with 1-based line number) for any
// malformed or invalid record, including a duplicate id or an empty body.
Corpus load_corpus(const std::filesystem::path& path);

// Same as load_corpus but collects every bad line instead of stopping at the
// first one. Valid records end up in `corpus`.
struct LoadReport {
  Corpus corpus;
  std::vector<std::pair<std::size_t, std::string>> errors;  // (line, message)
};
LoadReport load_corpus_report(const std::filesystem::path& path);

Corpus parse_corpus(std::string_view text, std::string name);
nlohmann::json excerpt_to_json(const Excerpt& excerpt);
Excerpt excerpt_from_json(const nlohmann::json& record);

// Writes atomically (temp file + rename).
void write_corpus(const Corpus& corpus, const std::filesystem::path& path);
std::string serialize_corpus(const Corpus& corpus);

// Validates the corpus-level invariants (unique ids, non-empty bodies).
void validate_corpus(const Corpus& corpus);

// Stratified split. Each stratum is shuffled with the seed and its first
// round(fraction * size) members, clamped to [1, size - 1], go to train; both
// sides keep corpus order. Throws DomainError if a stratum has fewer than 2
// excerpts.
std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus,
                                       const SplitSpec& spec);

// Excerpts whose source or dataset key equals `key`.
Corpus filter_by_source(const Corpus& corpus, std::string_view key);

// Groups excerpts by dataset key; groups are ordered by key.
std::vector<std::pair<std::string, Corpus>> group_by_dataset(
    const Corpus& corpus);

}  // namespace scidetect

#endif  // SCIDETECT_CORPUS_H_
