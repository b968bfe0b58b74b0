#include "scidetect/workflow.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "scidetect/error.h"
#include "scidetect/io.h"
#include "scidetect/rng.h"
#include "scidetect/text.h"

namespace scidetect {

namespace {

using nlohmann::json;

void require_stage(const Session& s, std::initializer_list<Stage> allowed, std::string_view op) {
  for (Stage st : allowed) {
    if (s.stage == st) return;
  }
  throw StageError(std::string(op) + " is not allowed in stage " +
                   std::string(stage_name(s.stage)));
}

bool in_batch(const Session& s, std::string_view id) {
  return std::find(s.current.batch.begin(), s.current.batch.end(), id) != s.current.batch.end();
}

void log_event(Session& s, std::string event, json detail = json::object()) {
  detail["seq"] = s.events.size();
  detail["event"] = std::move(event);
  if (!detail.contains("iteration")) detail["iteration"] = s.current.index;
  detail["stage"] = stage_name(s.stage);
  s.events.push_back(std::move(detail));
}

void sort_by_corpus_order(std::vector<std::string>& ids, const Workbench& wb) {
  std::sort(ids.begin(), ids.end(), [&wb](const std::string& a, const std::string& b) {
    return wb.excerpt_index(a) < wb.excerpt_index(b);
  });
}

void start_iteration(Session& s, std::vector<std::string> batch) {
  s.current = IterationRecord{};
  s.current.index = static_cast<int>(s.history.size());
  s.current.batch = std::move(batch);
  s.stage = Stage::kAnnotate;
}

json ranking_json(const std::vector<RankEntry>& ranking) {
  json out = json::array();
  for (const RankEntry& r : ranking) {
    out.push_back({{"model_id", r.model_id},
                   {"r_local", r.r_local},
                   {"r_global", r.r_global},
                   {"score", r.score}});
  }
  return out;
}

}  // namespace

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::kAnnotate: return "annotate";
    case Stage::kConfirm: return "confirm";
    case Stage::kRecommend: return "recommend";
    case Stage::kComplete: return "complete";
  }
  return "annotate";
}

Stage parse_stage(std::string_view text) {
  for (Stage st : {Stage::kAnnotate, Stage::kConfirm, Stage::kRecommend, Stage::kComplete}) {
    if (stage_name(st) == text) return st;
  }
  throw DomainError("unknown stage \"" + std::string(text) + "\"");
}

void validate_params(const WorkflowParams& params) {
  if (!(params.omega_g >= 0.0 && params.omega_g <= 1.0)) {
    throw ValidationError("omega_g", "omega_g must lie in [0, 1]");
  }
  if (!(params.omega_d >= 0.0 && params.omega_d <= 1.0)) {
    throw ValidationError("omega_d", "omega_d must lie in [0, 1]");
  }
  if (params.iteration_size < 1) {
    throw ValidationError("iteration_size", "iteration_size must be at least 1");
  }
}

std::optional<Label> Session::confirmed_label(std::string_view excerpt_id) const {
  for (const IterationRecord& rec : history) {
    auto it = rec.confirmed_labels.find(std::string(excerpt_id));
    if (it != rec.confirmed_labels.end()) return it->second;
  }
  return std::nullopt;
}

std::size_t Session::confirmed_count() const {
  std::size_t n = 0;
  for (const IterationRecord& rec : history) n += rec.confirmed_labels.size();
  return n;
}

double match_score(double r_local, double r_global, double omega_g) {
  return std::lerp(r_local, r_global, omega_g);
}

std::vector<RankEntry> rank_models(std::vector<RankEntry> entries, double omega_g) {
  for (RankEntry& e : entries) e.score = match_score(e.r_local, e.r_global, omega_g);
  std::sort(entries.begin(), entries.end(), [](const RankEntry& a, const RankEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.model_id < b.model_id;
  });
  return entries;
}

Session start_session(const Workbench& wb, std::vector<std::string> model_ids,
                      const WorkflowParams& params, std::uint64_t seed, std::string id) {
  if (wb.corpus().excerpts.empty()) throw DomainError("cannot start a session on an empty corpus");
  if (model_ids.empty()) throw ValidationError("model_ids", "a session needs at least one model");
  validate_params(params);
  std::set<std::string> seen;
  for (const std::string& m : model_ids) {
    if (!wb.has_model(m)) throw NotFoundError("unknown model \"" + m + "\"");
    if (!seen.insert(m).second) throw ValidationError("model_ids", "duplicate model \"" + m + "\"");
  }

  Session s;
  s.id = std::move(id);
  s.corpus_name = wb.corpus().name;
  s.model_ids = std::move(model_ids);
  s.params = params;
  s.rng_seed = seed;

  std::vector<std::string> pool;
  pool.reserve(wb.corpus().size());
  for (const Excerpt& e : wb.corpus().excerpts) pool.push_back(e.id);
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(params.iteration_size),
                                                 pool.size());
  Rng rng(seed);
  for (std::size_t i = 0; i < take; ++i) std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
  std::vector<std::string> batch(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take));
  s.remaining.assign(pool.begin() + static_cast<std::ptrdiff_t>(take), pool.end());
  sort_by_corpus_order(s.remaining, wb);
  start_iteration(s, std::move(batch));
  log_event(s, "start", {{"batch", s.current.batch}});
  return s;
}

void override_batch(Session& s, const Workbench& wb, std::span<const std::string> excerpt_ids) {
  require_stage(s, {Stage::kAnnotate}, "override_batch");
  if (excerpt_ids.empty()) throw ValidationError("excerpt_ids", "batch must not be empty");
  if (excerpt_ids.size() > static_cast<std::size_t>(s.params.iteration_size)) {
    throw ValidationError("excerpt_ids", "batch exceeds the iteration size " +
                                              std::to_string(s.params.iteration_size));
  }
  std::set<std::string> unique;
  for (const std::string& id : excerpt_ids) {
    if (!wb.has_excerpt(id)) throw NotFoundError("unknown excerpt \"" + id + "\"");
    if (s.confirmed_label(id)) {
      throw ValidationError("excerpt_ids", "excerpt \"" + id + "\" is already confirmed");
    }
    if (!unique.insert(id).second) {
      throw ValidationError("excerpt_ids", "excerpt \"" + id + "\" listed twice");
    }
  }

  std::vector<std::string> pool = s.remaining;
  for (const std::string& id : s.current.batch) pool.push_back(id);
  std::vector<std::string> rest;
  for (const std::string& id : pool) {
    if (!unique.contains(id)) rest.push_back(id);
  }
  sort_by_corpus_order(rest, wb);

  std::map<std::string, Annotation> kept;
  for (const std::string& id : excerpt_ids) {
    auto it = s.current.annotations.find(id);
    if (it != s.current.annotations.end()) kept.insert(*it);
  }
  s.remaining = std::move(rest);
  start_iteration(s, std::vector<std::string>(excerpt_ids.begin(), excerpt_ids.end()));
  s.current.annotations = std::move(kept);
  log_event(s, "override", {{"batch", s.current.batch}});
}

void annotate(Session& s, std::string_view excerpt_id, Label label) {
  require_stage(s, {Stage::kAnnotate, Stage::kConfirm}, "annotate");
  if (!in_batch(s, excerpt_id)) {
    throw ValidationError("excerpt_id",
                          "excerpt \"" + std::string(excerpt_id) + "\" is not in the current batch");
  }
  s.current.annotations[std::string(excerpt_id)] = Annotation{label, std::nullopt};
}

void batch_apply(Session& s, const Workbench& wb, std::string_view model_id) {
  require_stage(s, {Stage::kAnnotate, Stage::kConfirm}, "batch_apply");
  if (std::find(s.model_ids.begin(), s.model_ids.end(), model_id) == s.model_ids.end()) {
    throw NotFoundError("model \"" + std::string(model_id) + "\" is not in this session");
  }
  std::map<std::string, Annotation> applied;
  for (const std::string& id : s.current.batch) {
    applied[id] = Annotation{wb.predict(model_id, id).label, std::string(model_id)};
  }
  s.current.annotations = std::move(applied);
}

void run_inspection(Session& s, const Workbench& wb) {
  require_stage(s, {Stage::kAnnotate, Stage::kConfirm}, "run_inspection");
  for (const std::string& id : s.current.batch) {
    if (!s.current.annotations.contains(id)) {
      throw ValidationError("annotations", "excerpt \"" + id + "\" has no annotation");
    }
  }

  std::map<std::string, std::vector<Prediction>> predictions;
  std::vector<RankEntry> entries;
  for (const std::string& model_id : s.model_ids) {
    std::vector<Prediction>& preds = predictions[model_id];
    std::size_t local_matches = 0;
    for (const std::string& id : s.current.batch) {
      preds.push_back(wb.predict(model_id, id));
      wb.contribution(model_id, id);
      if (preds.back().label == s.current.annotations.at(id).label) ++local_matches;
    }
    std::size_t global_matches = 0;
    std::size_t global_count = 0;
    for (const IterationRecord& rec : s.history) {
      for (const auto& [id, label] : rec.confirmed_labels) {
        ++global_count;
        if (wb.predict(model_id, id).label == label) ++global_matches;
      }
    }
    RankEntry e;
    e.model_id = model_id;
    e.r_local = static_cast<double>(local_matches) / static_cast<double>(s.current.batch.size());
    e.r_global = global_count == 0
                     ? e.r_local
                     : static_cast<double>(global_matches) / static_cast<double>(global_count);
    entries.push_back(std::move(e));
  }
  s.current.predictions = std::move(predictions);
  s.current.ranking = rank_models(std::move(entries), s.params.omega_g);
  s.current.top_model_id = s.current.ranking.front().model_id;
  s.stage = Stage::kConfirm;
  log_event(s, "inspect", {{"ranking", ranking_json(s.current.ranking)},
                           {"top_model", s.current.top_model_id}});
}

void confirm(Session& s, const std::map<std::string, Label>& final_labels) {
  require_stage(s, {Stage::kConfirm}, "confirm");
  for (const auto& [id, label] : final_labels) {
    if (s.confirmed_label(id)) {
      throw ValidationError("labels", "excerpt \"" + id + "\" is already confirmed");
    }
    if (!in_batch(s, id)) {
      throw ValidationError("labels", "excerpt \"" + id + "\" is not in the current batch");
    }
  }
  for (const std::string& id : s.current.batch) {
    if (!final_labels.contains(id)) {
      throw ValidationError("labels", "no final label for excerpt \"" + id + "\"");
    }
  }

  s.current.confirmed_labels = final_labels;
  json labels = json::object();
  for (const auto& [id, label] : final_labels) labels[id] = label_name(label);
  const int closed = s.current.index;
  s.history.push_back(std::move(s.current));
  if (s.pending_params) {
    s.params = *s.pending_params;
    s.pending_params.reset();
  }
  s.current = IterationRecord{};
  s.current.index = static_cast<int>(s.history.size());
  s.stage = s.remaining.empty() ? Stage::kComplete : Stage::kRecommend;
  log_event(s, "confirm", {{"iteration", closed}, {"labels", labels}, {"params", {{"omega_g", s.params.omega_g},
                                                         {"omega_d", s.params.omega_d},
                                                         {"iteration_size", s.params.iteration_size}}}});
}

std::vector<double> recommendation_scores(const Session& s, const Workbench& wb) {
  if (s.history.empty()) throw StageError("no closed iteration to recommend from");
  const IterationRecord& closed = s.history.back();
  const std::string& top = closed.top_model_id;
  const double wd = s.params.omega_d;

  std::vector<const FeatureVector*> batch_fd;
  std::vector<ContributionVector> batch_fc;
  for (const std::string& id : closed.batch) {
    batch_fd.push_back(&wb.features_of(id));
    batch_fc.push_back(wb.contribution(top, id));
  }
  const double n = static_cast<double>(closed.batch.size());
  std::vector<double> scores;
  scores.reserve(s.remaining.size());
  for (const std::string& id : s.remaining) {
    const FeatureVector& fd = wb.features_of(id);
    const ContributionVector fc = wb.contribution(top, id);
    double sum = 0.0;
    for (std::size_t j = 0; j < batch_fd.size(); ++j) {
      sum += wd * cosine_similarity(batch_fd[j]->values, fd.values) +
             (1.0 - wd) * cosine_similarity(batch_fc[j].values, fc.values);
    }
    scores.push_back(sum / n);
  }
  return scores;
}

void recommend_next(Session& s, const Workbench& wb) {
  require_stage(s, {Stage::kRecommend}, "recommend_next");
  const std::vector<double> scores = recommendation_scores(s, wb);
  std::vector<std::size_t> order(s.remaining.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const std::size_t take =
      std::min<std::size_t>(static_cast<std::size_t>(s.params.iteration_size), order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return s.remaining[a] < s.remaining[b];
                    });
  std::vector<std::string> batch;
  json sims = json::array();
  std::set<std::size_t> chosen;
  for (std::size_t i = 0; i < take; ++i) {
    batch.push_back(s.remaining[order[i]]);
    sims.push_back(scores[order[i]]);
    chosen.insert(order[i]);
  }
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < s.remaining.size(); ++i) {
    if (!chosen.contains(i)) rest.push_back(s.remaining[i]);
  }
  s.remaining = std::move(rest);
  start_iteration(s, std::move(batch));
  log_event(s, "recommend", {{"batch", s.current.batch}, {"similarity", sims}});
}

void set_params(Session& s, const WorkflowParams& params) {
  validate_params(params);
  if (s.stage == Stage::kComplete) throw StageError("session is complete");
  s.pending_params = params;
}

// Serialization.

namespace {

json params_to_json(const WorkflowParams& p) {
  return {{"omega_g", p.omega_g}, {"omega_d", p.omega_d}, {"iteration_size", p.iteration_size}};
}

WorkflowParams params_from_json(const json& j) {
  WorkflowParams p;
  p.omega_g = j.at("omega_g").get<double>();
  p.omega_d = j.at("omega_d").get<double>();
  p.iteration_size = j.at("iteration_size").get<int>();
  return p;
}

json record_to_json(const IterationRecord& r) {
  json annotations = json::object();
  for (const auto& [id, a] : r.annotations) {
    json entry = {{"label", label_name(a.label)}, {"origin", a.manual() ? "manual" : "batch_applied"}};
    if (a.applied_model) entry["model_id"] = *a.applied_model;
    annotations[id] = entry;
  }
  json predictions = json::object();
  for (const auto& [model_id, preds] : r.predictions) {
    json arr = json::array();
    for (const Prediction& p : preds) {
      arr.push_back({{"excerpt_id", p.excerpt_id}, {"prob_machine", p.prob_machine},
                     {"label", label_name(p.label)}});
    }
    predictions[model_id] = arr;
  }
  json confirmed = json::object();
  for (const auto& [id, label] : r.confirmed_labels) confirmed[id] = label_name(label);
  return {{"index", r.index},
          {"batch", r.batch},
          {"annotations", annotations},
          {"predictions", predictions},
          {"ranking", ranking_json(r.ranking)},
          {"confirmed_labels", confirmed},
          {"top_model_id", r.top_model_id}};
}

IterationRecord record_from_json(const json& j) {
  IterationRecord r;
  r.index = j.at("index").get<int>();
  r.batch = j.at("batch").get<std::vector<std::string>>();
  for (const auto& [id, a] : j.at("annotations").items()) {
    Annotation ann;
    ann.label = parse_label(a.at("label").get<std::string>());
    if (a.at("origin").get<std::string>() != "manual") {
      ann.applied_model = a.at("model_id").get<std::string>();
    }
    r.annotations[id] = ann;
  }
  for (const auto& [model_id, arr] : j.at("predictions").items()) {
    std::vector<Prediction>& preds = r.predictions[model_id];
    for (const json& p : arr) {
      preds.push_back({p.at("excerpt_id").get<std::string>(), p.at("prob_machine").get<double>(),
                       parse_label(p.at("label").get<std::string>())});
    }
  }
  for (const json& e : j.at("ranking")) {
    r.ranking.push_back({e.at("model_id").get<std::string>(), e.at("r_local").get<double>(),
                         e.at("r_global").get<double>(), e.at("score").get<double>()});
  }
  for (const auto& [id, label] : j.at("confirmed_labels").items()) {
    r.confirmed_labels[id] = parse_label(label.get<std::string>());
  }
  r.top_model_id = j.at("top_model_id").get<std::string>();
  return r;
}

}  // namespace

json session_to_json(const Session& s) {
  json history = json::array();
  for (const IterationRecord& r : s.history) history.push_back(record_to_json(r));
  json doc = {{"version", kSessionFormatVersion},
              {"id", s.id},
              {"corpus", s.corpus_name},
              {"model_ids", s.model_ids},
              {"params", params_to_json(s.params)},
              {"pending_params", s.pending_params ? params_to_json(*s.pending_params) : json()},
              {"history", history},
              {"current", record_to_json(s.current)},
              {"remaining", s.remaining},
              {"rng_seed", s.rng_seed},
              {"stage", stage_name(s.stage)},
              {"events", s.events}};
  return doc;
}

Session session_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("version")) {
    throw ParseError("session file lacks a format version", 0);
  }
  try {
    const int version = doc.at("version").get<int>();
    if (version > kSessionFormatVersion) {
      throw VersionError("session format version " + std::to_string(version) +
                         " is newer than supported version " +
                         std::to_string(kSessionFormatVersion));
    }
    Session s;
    s.id = doc.at("id").get<std::string>();
    s.corpus_name = doc.at("corpus").get<std::string>();
    s.model_ids = doc.at("model_ids").get<std::vector<std::string>>();
    s.params = params_from_json(doc.at("params"));
    if (!doc.at("pending_params").is_null()) s.pending_params = params_from_json(doc.at("pending_params"));
    for (const json& r : doc.at("history")) s.history.push_back(record_from_json(r));
    s.current = record_from_json(doc.at("current"));
    s.remaining = doc.at("remaining").get<std::vector<std::string>>();
    s.rng_seed = doc.at("rng_seed").get<std::uint64_t>();
    s.stage = parse_stage(doc.at("stage").get<std::string>());
    s.events = doc.at("events");
    return s;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed session: ") + e.what(), 0);
  }
}

void save_session(const Session& s, const std::filesystem::path& path) {
  write_file_atomic(path, session_to_json(s).dump(1) + "\n");
}

Session load_session(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), 0, e.byte);
  }
  return session_from_json(doc);
}

}  // namespace scidetect
