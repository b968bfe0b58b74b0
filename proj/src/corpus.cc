#include "scidetect/corpus.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_set>

#include "scidetect/error.h"
#include "scidetect/io.h"
#include "scidetect/rng.h"

namespace scidetect {

namespace {

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  });
}

const std::string& require_string(const nlohmann::json& record,
                                  const char* field) {
  auto it = record.find(field);
  if (it == record.end()) {
    throw DomainError(std::string("missing required field \"") + field + "\"");
  }
  if (!it->is_string()) {
    throw DomainError(std::string("field \"") + field + "\" must be a string");
  }
  return it->get_ref<const std::string&>();
}

std::string stratum_key(const Excerpt& e, Stratify by) {
  const std::string label =
      e.true_label ? std::string(label_name(*e.true_label)) : "unlabeled";
  switch (by) {
    case Stratify::kLabel:
      return label;
    case Stratify::kSource:
      return e.source;
    case Stratify::kBoth:
      break;
  }
  return label + "|" + e.source;
}

}  // namespace

std::string_view label_name(Label label) {
  return label == Label::kMachine ? "machine" : "human";
}

Label parse_label(std::string_view text) {
  if (text == "machine") return Label::kMachine;
  if (text == "human") return Label::kHuman;
  throw DomainError("label must be \"machine\" or \"human\", got \"" +
                    std::string(text) + "\"");
}

std::string Excerpt::dataset() const {
  auto it = extra.find("dataset");
  if (it != extra.end() && it->is_string()) return it->get<std::string>();
  return source;
}

std::optional<std::size_t> Corpus::find(std::string_view id) const {
  for (std::size_t i = 0; i < excerpts.size(); ++i) {
    if (excerpts[i].id == id) return i;
  }
  return std::nullopt;
}

Excerpt excerpt_from_json(const nlohmann::json& record) {
  if (!record.is_object()) throw DomainError("record must be a JSON object");
  Excerpt e;
  e.id = require_string(record, "id");
  if (e.id.empty()) throw DomainError("empty \"id\"");
  e.title = require_string(record, "title");
  e.body = require_string(record, "body");
  if (blank(e.body)) throw DomainError("empty \"body\"");
  if (auto it = record.find("label"); it != record.end() && !it->is_null()) {
    if (!it->is_string()) throw DomainError("field \"label\" must be a string");
    e.true_label = parse_label(it->get<std::string>());
  }
  if (auto it = record.find("source"); it != record.end() && !it->is_null()) {
    if (!it->is_string()) throw DomainError("field \"source\" must be a string");
    e.source = it->get<std::string>();
  }
  for (auto it = record.begin(); it != record.end(); ++it) {
    const std::string& key = it.key();
    if (key != "id" && key != "title" && key != "body" && key != "label" &&
        key != "source") {
      e.extra[key] = it.value();
    }
  }
  return e;
}

nlohmann::json excerpt_to_json(const Excerpt& e) {
  nlohmann::json out = nlohmann::json::object();
  out["id"] = e.id;
  out["title"] = e.title;
  out["body"] = e.body;
  if (e.true_label) out["label"] = label_name(*e.true_label);
  if (!e.source.empty()) out["source"] = e.source;
  for (auto it = e.extra.begin(); it != e.extra.end(); ++it) {
    out[it.key()] = it.value();
  }
  return out;
}

namespace {

LoadReport parse_lines(std::string_view text, std::string name,
                       bool stop_on_error) {
  LoadReport report;
  report.corpus.name = std::move(name);
  std::unordered_set<std::string> ids;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (blank(line)) {
      if (end == text.size()) break;
      continue;
    }
    try {
      nlohmann::json record;
      try {
        record = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& err) {
        throw DomainError(std::string("invalid JSON: ") + err.what());
      }
      Excerpt e = excerpt_from_json(record);
      if (!ids.insert(e.id).second) {
        throw DomainError("duplicate id \"" + e.id + "\"");
      }
      report.corpus.excerpts.push_back(std::move(e));
    } catch (const DomainError& err) {
      if (stop_on_error) {
        throw ParseError("line " + std::to_string(line_no) + ": " + err.what(),
                         line_no);
      }
      report.errors.emplace_back(line_no, err.what());
    }
    if (end == text.size()) break;
  }
  return report;
}

}  // namespace

Corpus parse_corpus(std::string_view text, std::string name) {
  return parse_lines(text, std::move(name), true).corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
  return parse_corpus(read_file(path), path.stem().string());
}

LoadReport load_corpus_report(const std::filesystem::path& path) {
  return parse_lines(read_file(path), path.stem().string(), false);
}

std::string serialize_corpus(const Corpus& corpus) {
  std::string out;
  for (const Excerpt& e : corpus.excerpts) {
    out += excerpt_to_json(e).dump();
    out += '\n';
  }
  return out;
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_corpus(corpus));
}

void validate_corpus(const Corpus& corpus) {
  std::unordered_set<std::string> ids;
  for (const Excerpt& e : corpus.excerpts) {
    if (!ids.insert(e.id).second) {
      throw DomainError("duplicate id \"" + e.id + "\"");
    }
    if (blank(e.body)) throw DomainError("empty body in \"" + e.id + "\"");
  }
}

std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus,
                                       const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw DomainError("train_fraction must lie strictly between 0 and 1");
  }
  std::map<std::string, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    strata[stratum_key(corpus.excerpts[i], spec.stratify_by)].push_back(i);
  }
  std::vector<bool> in_train(corpus.size(), false);
  for (auto& [key, members] : strata) {
    if (members.size() < 2) {
      throw DomainError("stratum \"" + key + "\" has " +
                        std::to_string(members.size()) +
                        " excerpt(s); at least 2 are needed to split");
    }
    Rng rng(mix_seed(spec.seed, fnv1a64(key)));
    rng.shuffle(members);
    auto n_train = static_cast<std::size_t>(
        std::llround(spec.train_fraction * static_cast<double>(members.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, members.size() - 1);
    for (std::size_t k = 0; k < n_train; ++k) in_train[members[k]] = true;
  }
  Corpus train{corpus.name + "_train", {}};
  Corpus test{corpus.name + "_test", {}};
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    (in_train[i] ? train : test).excerpts.push_back(corpus.excerpts[i]);
  }
  return {std::move(train), std::move(test)};
}

Corpus filter_by_source(const Corpus& corpus, std::string_view key) {
  Corpus out{corpus.name + "_" + std::string(key), {}};
  for (const Excerpt& e : corpus.excerpts) {
    if (e.source == key || e.dataset() == key) out.excerpts.push_back(e);
  }
  return out;
}

std::vector<std::pair<std::string, Corpus>> group_by_dataset(
    const Corpus& corpus) {
  std::map<std::string, Corpus> groups;
  for (const Excerpt& e : corpus.excerpts) {
    Corpus& g = groups[e.dataset()];
    if (g.name.empty()) g.name = e.dataset();
    g.excerpts.push_back(e);
  }
  return {std::make_move_iterator(groups.begin()),
          std::make_move_iterator(groups.end())};
}

}  // namespace scidetect
