#include "scidetect/service.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <map>
#include <mutex>
#include <set>

#include "httplib.h"
#include "json.hpp"
#include "scidetect/corpus.h"
#include "scidetect/error.h"
#include "scidetect/explain.h"
#include "scidetect/io.h"
#include "scidetect/models.h"
#include "scidetect/projection.h"
#include "scidetect/text.h"
#include "scidetect/workbench.h"
#include "scidetect/workflow.h"

namespace scidetect {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::size_t kMaxStoredResponses = 256;

struct StoredResponse {
  int status = 200;
  std::string body;
};

struct SessionSlot {
  std::mutex mutex;
  Session session;
  std::shared_ptr<const Workbench> wb;
  std::map<std::string, StoredResponse> responses;
  std::vector<std::string> response_order;
  std::string create_request_id;
};

struct HttpError {
  int status;
  std::string code;
  std::string message;
  std::string field;
};

HttpError classify(std::exception_ptr ep) {
  try {
    std::rethrow_exception(ep);
  } catch (const ValidationError& e) {
    return {422, "validation", e.what(), e.field()};
  } catch (const NotFoundError& e) {
    return {404, "not_found", e.what(), {}};
  } catch (const StageError& e) {
    return {409, "stage", e.what(), {}};
  } catch (const ParseError& e) {
    return {400, "bad_request", e.what(), {}};
  } catch (const DomainError& e) {
    return {422, "domain", e.what(), {}};
  } catch (const IoError& e) {
    return {500, "io", e.what(), {}};
  } catch (const std::exception& e) {
    return {500, "internal", e.what(), {}};
  } catch (...) {
    return {500, "internal", "unknown error", {}};
  }
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const HttpError& err) {
  json body = {{"code", err.code}, {"message", err.message}};
  if (!err.field.empty()) body["field"] = err.field;
  send_json(res, err.status, body);
}

template <typename F>
void guarded(httplib::Response& res, F&& f) {
  try {
    f();
  } catch (...) {
    send_error(res, classify(std::current_exception()));
  }
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    json doc = json::parse(req.body);
    if (!doc.is_object()) throw ParseError("request body must be a JSON object", 0);
    return doc;
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON body: ") + e.what(), 0, e.byte);
  }
}

std::string request_id(const httplib::Request& req, const json& body) {
  if (req.has_header("X-Request-Id")) return req.get_header_value("X-Request-Id");
  if (body.contains("request_id")) {
    if (!body["request_id"].is_string()) {
      throw ValidationError("request_id", "request_id must be a string");
    }
    return body["request_id"].get<std::string>();
  }
  return {};
}

Label label_field(const json& value, const std::string& field) {
  if (!value.is_string()) throw ValidationError(field, field + " must be \"machine\" or \"human\"");
  try {
    return parse_label(value.get<std::string>());
  } catch (const DomainError&) {
    throw ValidationError(field, field + " must be \"machine\" or \"human\"");
  }
}

std::string string_field(const json& body, const std::string& field) {
  if (!body.contains(field) || !body[field].is_string()) {
    throw ValidationError(field, field + " must be a string");
  }
  return body[field].get<std::string>();
}

WorkflowParams params_field(const json& body, WorkflowParams base) {
  if (body.contains("omega_g")) {
    if (!body["omega_g"].is_number()) throw ValidationError("omega_g", "omega_g must be a number");
    base.omega_g = body["omega_g"].get<double>();
  }
  if (body.contains("omega_d")) {
    if (!body["omega_d"].is_number()) throw ValidationError("omega_d", "omega_d must be a number");
    base.omega_d = body["omega_d"].get<double>();
  }
  if (body.contains("iteration_size")) {
    if (!body["iteration_size"].is_number_integer()) {
      throw ValidationError("iteration_size", "iteration_size must be an integer");
    }
    base.iteration_size = body["iteration_size"].get<int>();
  }
  validate_params(base);
  return base;
}

json bounds_json(const std::optional<Bounds>& b) {
  if (!b) return nullptr;
  return {{"lower", b->lower}, {"upper", b->upper}, {"count", b->count}};
}

// Byte offset to code point offset table for a UTF-8 string.
std::vector<std::size_t> codepoint_offsets(std::string_view text) {
  std::vector<std::size_t> out(text.size() + 1, 0);
  std::size_t cp = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    out[i] = cp;
    if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) ++cp;
  }
  out[text.size()] = cp;
  // Continuation bytes map past their lead byte; spans start on lead bytes.
  return out;
}

}  // namespace

void validate_config(const ServiceConfig& config) {
  if (config.port < 0 || config.port > 65535) {
    throw ValidationError("port", "port must lie in [0, 65535]");
  }
  if (config.max_sessions == 0) throw ValidationError("max_sessions", "max_sessions must be positive");
}

struct Service::Impl {
  ServiceConfig config;
  std::map<std::string, Corpus> corpora;
  std::vector<Model> models;
  httplib::Server server;
  int bound_port = -1;

  mutable std::mutex registry_mutex;
  std::map<std::string, std::shared_ptr<SessionSlot>> sessions;
  std::map<std::string, std::string> create_requests;
  std::size_t next_session = 1;

  std::mutex workbench_mutex;
  std::map<std::string, std::shared_ptr<const Workbench>> workbenches;

  std::mutex cache_mutex;
  std::map<std::string, Cohort> cohorts;
  std::map<std::string, json> projections;

  explicit Impl(ServiceConfig cfg) : config(std::move(cfg)) {
    validate_config(config);
    std::error_code ec;
    if (!fs::is_directory(config.data_dir, ec)) {
      throw IoError("data directory \"" + config.data_dir.string() + "\" is not readable");
    }
    load_data();
    fs::create_directories(sessions_dir(), ec);
    if (ec) throw IoError("cannot create \"" + sessions_dir().string() + "\": " + ec.message());
    restore_sessions();
    routes();
  }

  fs::path sessions_dir() const { return config.data_dir / "sessions"; }

  static std::vector<fs::path> files_with_extension(const fs::path& dir, std::string_view ext) {
    std::vector<fs::path> out;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) return out;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ext) out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  void load_data() {
    for (const fs::path& p : files_with_extension(config.data_dir / "corpora", ".jsonl")) {
      Corpus c = load_corpus(p);
      corpora.emplace(c.name, std::move(c));
    }
    std::set<std::string> ids;
    for (const fs::path& p : files_with_extension(config.data_dir / "models", ".json")) {
      Model m = load_model(p);
      if (!ids.insert(m.id).second) throw DomainError("duplicate model id \"" + m.id + "\"");
      models.push_back(std::move(m));
    }
    std::sort(models.begin(), models.end(),
              [](const Model& a, const Model& b) { return a.id < b.id; });
  }

  std::shared_ptr<const Workbench> workbench(const std::string& corpus_name) {
    std::lock_guard lock(workbench_mutex);
    auto it = workbenches.find(corpus_name);
    if (it != workbenches.end()) return it->second;
    auto c = corpora.find(corpus_name);
    if (c == corpora.end()) throw NotFoundError("unknown corpus \"" + corpus_name + "\"");
    auto wb = std::make_shared<const Workbench>(c->second, models);
    workbenches.emplace(corpus_name, wb);
    return wb;
  }

  void restore_sessions() {
    for (const fs::path& p : files_with_extension(sessions_dir(), ".json")) {
      if (p.stem().extension() == ".requests") continue;
      auto slot = std::make_shared<SessionSlot>();
      slot->session = load_session(p);
      const fs::path req = sessions_dir() / (slot->session.id + ".requests.json");
      std::error_code ec;
      if (fs::exists(req, ec)) {
        const json doc = json::parse(read_file(req));
        slot->create_request_id = doc.value("create_request_id", "");
        for (const json& r : doc.at("responses")) {
          const std::string rid = r.at("request_id").get<std::string>();
          slot->responses[rid] = {r.at("status").get<int>(), r.at("body").get<std::string>()};
          slot->response_order.push_back(rid);
        }
      }
      if (!slot->create_request_id.empty()) {
        create_requests[slot->create_request_id] = slot->session.id;
      }
      const std::string& id = slot->session.id;
      if (id.rfind("session-", 0) == 0) {
        try {
          next_session = std::max<std::size_t>(next_session, std::stoul(id.substr(8)) + 1);
        } catch (const std::exception&) {
        }
      }
      sessions.emplace(id, std::move(slot));
    }
  }

  void persist(const SessionSlot& slot) {
    save_session(slot.session, sessions_dir() / (slot.session.id + ".json"));
    json responses = json::array();
    for (const std::string& rid : slot.response_order) {
      const StoredResponse& r = slot.responses.at(rid);
      responses.push_back({{"request_id", rid}, {"status", r.status}, {"body", r.body}});
    }
    json doc = {{"create_request_id", slot.create_request_id}, {"responses", responses}};
    write_file_atomic(sessions_dir() / (slot.session.id + ".requests.json"), doc.dump());
  }

  static void remember(SessionSlot& slot, const std::string& rid, int status, std::string body) {
    if (rid.empty()) return;
    slot.responses[rid] = {status, std::move(body)};
    slot.response_order.push_back(rid);
    while (slot.response_order.size() > kMaxStoredResponses) {
      slot.responses.erase(slot.response_order.front());
      slot.response_order.erase(slot.response_order.begin());
    }
  }

  std::shared_ptr<SessionSlot> slot(const std::string& id) {
    std::shared_ptr<SessionSlot> s;
    {
      std::lock_guard lock(registry_mutex);
      auto it = sessions.find(id);
      if (it == sessions.end()) throw NotFoundError("unknown session \"" + id + "\"");
      s = it->second;
    }
    return s;
  }

  // Caller holds slot.mutex.
  std::shared_ptr<const Workbench> slot_workbench(SessionSlot& slot) {
    if (!slot.wb) slot.wb = workbench(slot.session.corpus_name);
    return slot.wb;
  }

  static json session_view(const Session& s, const Workbench& wb) {
    json doc = session_to_json(s);
    doc["corpus_size"] = wb.corpus().size();
    doc["confirmed_count"] = s.confirmed_count();
    json rows = json::array();
    const bool show_models = s.stage == Stage::kConfirm;
    for (std::size_t i = 0; i < s.current.batch.size(); ++i) {
      const std::string& id = s.current.batch[i];
      json row = {{"excerpt_id", id}, {"title", wb.excerpt(id).title}};
      auto a = s.current.annotations.find(id);
      row["annotation"] = a == s.current.annotations.end() ? json() : json(label_name(a->second.label));
      if (a != s.current.annotations.end()) {
        row["origin"] = a->second.manual() ? "manual" : "batch_applied";
      }
      if (show_models) {
        json models = json::object();
        for (const auto& [model_id, preds] : s.current.predictions) {
          models[model_id] = {{"prob_machine", preds[i].prob_machine},
                              {"label", label_name(preds[i].label)}};
        }
        row["models"] = models;
      }
      rows.push_back(std::move(row));
    }
    doc["batch_rows"] = rows;
    return doc;
  }

  // Serialized single-writer mutation with request-id replay.
  template <typename F>
  void mutate(const httplib::Request& req, httplib::Response& res, F&& op) {
    guarded(res, [&] {
      const json body = parse_body(req);
      const std::string rid = request_id(req, body);
      std::shared_ptr<SessionSlot> s = slot(req.matches[1]);
      std::lock_guard lock(s->mutex);
      if (!rid.empty()) {
        auto it = s->responses.find(rid);
        if (it != s->responses.end()) {
          res.status = it->second.status;
          res.set_content(it->second.body, "application/json");
          return;
        }
      }
      const auto wb = slot_workbench(*s);
      Session next = s->session;
      op(next, *wb, body);
      s->session = std::move(next);
      std::string out = session_view(s->session, *wb).dump();
      remember(*s, rid, 200, out);
      persist(*s);
      res.status = 200;
      res.set_content(std::move(out), "application/json");
    });
  }

  void create_session(const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = parse_body(req);
      const std::string rid = request_id(req, body);
      std::lock_guard lock(registry_mutex);
      if (!rid.empty()) {
        auto it = create_requests.find(rid);
        if (it != create_requests.end()) {
          auto s = sessions.at(it->second);
          std::lock_guard slot_lock(s->mutex);
          send_json(res, 201, session_view(s->session, *slot_workbench(*s)));
          return;
        }
      }
      if (sessions.size() >= config.max_sessions) {
        throw StageError("session limit of " + std::to_string(config.max_sessions) + " reached");
      }
      const std::string corpus = string_field(body, "corpus");
      std::vector<std::string> model_ids;
      if (body.contains("models")) {
        if (!body["models"].is_array()) throw ValidationError("models", "models must be an array");
        for (const json& m : body["models"]) {
          if (!m.is_string()) throw ValidationError("models", "model ids must be strings");
          model_ids.push_back(m.get<std::string>());
        }
      } else {
        for (const Model& m : models) model_ids.push_back(m.id);
      }
      WorkflowParams params;
      if (body.contains("params")) {
        if (!body["params"].is_object()) throw ValidationError("params", "params must be an object");
        params = params_field(body["params"], params);
      }
      std::uint64_t seed = 0;
      if (body.contains("seed")) {
        if (!body["seed"].is_number_unsigned()) {
          throw ValidationError("seed", "seed must be a non-negative integer");
        }
        seed = body["seed"].get<std::uint64_t>();
      }
      char id[32];
      std::snprintf(id, sizeof id, "session-%04zu", next_session);
      auto slot = std::make_shared<SessionSlot>();
      slot->wb = workbench(corpus);
      slot->session = start_session(*slot->wb, std::move(model_ids), params, seed, id);
      slot->create_request_id = rid;
      ++next_session;
      persist(*slot);
      if (!rid.empty()) create_requests[rid] = slot->session.id;
      const json view = session_view(slot->session, *slot->wb);
      sessions.emplace(slot->session.id, slot);
      send_json(res, 201, view);
    });
  }

  json analysis(const Session& s, const Workbench& wb, const std::string& excerpt_id,
                const std::string& model_id) {
    if (!wb.has_excerpt(excerpt_id)) {
      throw NotFoundError("excerpt \"" + excerpt_id + "\" is not in this session");
    }
    if (std::find(s.model_ids.begin(), s.model_ids.end(), model_id) == s.model_ids.end()) {
      throw NotFoundError("model \"" + model_id + "\" is not in this session");
    }
    const Excerpt& excerpt = wb.excerpt(excerpt_id);
    const FeatureVector& fv = wb.features_of(excerpt_id);
    const Model& model = wb.model(model_id);
    const ContributionVector cv = wb.contribution(model_id, excerpt_id);
    const FeatureSchema& schema = FeatureSchema::standard();
    const GroupedContributions groups = group_contributions(cv, schema);

    // Cohort from the model's training excerpts, or the session corpus's
    // labeled excerpts of the model's training source when none are present.
    std::string pool_name = "training";
    std::vector<FeatureVector> pool = wb.training_features(model_id);
    if (pool.empty()) {
      pool_name = "session_corpus";
      for (const Excerpt& e : wb.corpus().excerpts) {
        if (!e.true_label) continue;
        if (model.training_source != "all" && e.source != model.training_source &&
            e.dataset() != model.training_source) {
          continue;
        }
        pool.push_back(wb.features_of(e.id));
      }
    }
    std::optional<Cohort> cohort;
    if (!pool.empty()) {
      const std::string key = s.corpus_name + "\n" + model_id + "\n" + excerpt_id;
      std::lock_guard lock(cache_mutex);
      auto it = cohorts.find(key);
      if (it == cohorts.end()) it = cohorts.emplace(key, build_cohort(fv, pool)).first;
      cohort = it->second;
    }
    const FeatureIndex index = wb.feature_index();

    const auto spans = feature_spans(excerpt, wb.stats());
    const std::vector<std::size_t> cp = codepoint_offsets(excerpt.body);
    json features = json::array();
    for (std::size_t k = 0; k < schema.size(); ++k) {
      json f = {{"name", schema[k].name},
                {"dimension", dimension_name(schema[k].dimension)},
                {"subcategory", subcategory_name(schema[k].subcategory)},
                {"value", fv.values[k]},
                {"contribution", cv.values[k]}};
      json reference = {{"machine", nullptr}, {"human", nullptr}};
      json cohort_values = {{"machine", json::array()}, {"human", json::array()}};
      if (cohort && !cohort->member_ids.empty()) {
        const ReferenceBounds rb = cohort_reference(*cohort, schema[k].name, wb.corpus(), index);
        reference = {{"machine", bounds_json(rb.machine)}, {"human", bounds_json(rb.human)}};
        for (const std::string& id : cohort->member_ids) {
          const Label l = *wb.excerpt(id).true_label;
          cohort_values[std::string(label_name(l))].push_back(index.at(id)->values[k]);
        }
      }
      f["reference"] = reference;
      f["cohort_values"] = cohort_values;
      auto sp = spans.find(schema[k].name);
      if (sp != spans.end()) {
        json arr = json::array();
        for (const Span& span : sp->second) arr.push_back({cp[span.begin], cp[span.end]});
        f["spans"] = arr;
      }
      features.push_back(std::move(f));
    }
    const Prediction pred = wb.predict(model_id, excerpt_id);
    json doc = {{"session_id", s.id},
                {"excerpt_id", excerpt_id},
                {"model_id", model_id},
                {"title", excerpt.title},
                {"body", excerpt.body},
                {"span_unit", "codepoint"},
                {"prediction", {{"prob_machine", pred.prob_machine},
                                {"label", label_name(pred.label)}}},
                {"contribution", contribution_to_json(cv, groups)},
                {"features", features}};
    doc["cohort"] = cohort ? json{{"pool", pool_name},
                                  {"size", cohort->member_ids.size()},
                                  {"member_ids", cohort->member_ids}}
                           : json();
    return doc;
  }

  static std::string default_model(const Session& s) {
    if (!s.current.top_model_id.empty()) return s.current.top_model_id;
    if (!s.history.empty()) return s.history.back().top_model_id;
    return s.model_ids.front();
  }

  json projection(const Session& s, const Workbench& wb, const std::string& space,
                  const std::string& model_id) {
    std::string key = s.corpus_name + "\n" + space;
    if (space == "contribution") key += "\n" + model_id;
    json doc;
    {
      std::lock_guard lock(cache_mutex);
      auto it = projections.find(key);
      if (it != projections.end()) doc = it->second;
    }
    if (doc.is_null()) {
      std::vector<std::string> ids;
      std::vector<std::vector<double>> rows;
      for (const FeatureVector& fv : wb.features()) {
        ids.push_back(fv.excerpt_id);
        rows.push_back(space == "distribution" ? fv.values
                                               : wb.contribution(model_id, fv.excerpt_id).values);
      }
      // Raw feature scales differ by orders of magnitude; contributions share units.
      if (space == "distribution") rows = standardize_columns(rows);
      const Projection2D p = fit_projection(rows);
      doc = projection_to_json(p, ids, rows);
      doc["space"] = space;
      if (space == "contribution") doc["model_id"] = model_id;
      std::lock_guard lock(cache_mutex);
      projections.emplace(key, doc);
    }
    json status = json::object();
    for (const Excerpt& e : wb.corpus().excerpts) status[e.id] = "remaining";
    for (const IterationRecord& rec : s.history) {
      for (const auto& [id, label] : rec.confirmed_labels) status[id] = "confirmed";
    }
    for (const std::string& id : s.current.batch) status[id] = "batch";
    doc["status"] = status;
    return doc;
  }

  void routes() {
    server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, {{"status", "ok"}, {"version", kServiceVersion}});
    });

    server.Get("/corpora", [this](const httplib::Request&, httplib::Response& res) {
      json out = json::array();
      for (const auto& [name, c] : corpora) {
        std::set<std::string> sources;
        std::size_t labeled = 0;
        for (const Excerpt& e : c.excerpts) {
          sources.insert(e.dataset());
          if (e.true_label) ++labeled;
        }
        out.push_back({{"name", name}, {"size", c.size()}, {"labeled", labeled},
                       {"sources", sources}});
      }
      send_json(res, 200, out);
    });

    server.Get("/models", [this](const httplib::Request&, httplib::Response& res) {
      json out = json::array();
      for (const Model& m : models) {
        out.push_back({{"id", m.id},
                       {"training_source", m.training_source},
                       {"training_set_ref", m.training_set_ref},
                       {"training_size", m.training_ids.size()},
                       {"schema_version", m.schema_version},
                       {"hash", model_hash(m)}});
      }
      send_json(res, 200, out);
    });

    server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      create_session(req, res);
    });

    server.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto s = slot(req.matches[1]);
        std::lock_guard lock(s->mutex);
        send_json(res, 200, session_view(s->session, *slot_workbench(*s)));
      });
    });

    server.Post(R"(/sessions/([^/]+)/batch)",
                [this](const httplib::Request& req, httplib::Response& res) {
                  mutate(req, res, [](Session& s, const Workbench& wb, const json& body) {
                    if (!body.contains("excerpt_ids") || !body["excerpt_ids"].is_array()) {
                      throw ValidationError("excerpt_ids", "excerpt_ids must be an array");
                    }
                    std::vector<std::string> ids;
                    for (const json& id : body["excerpt_ids"]) {
                      if (!id.is_string()) throw ValidationError("excerpt_ids", "ids must be strings");
                      ids.push_back(id.get<std::string>());
                    }
                    override_batch(s, wb, ids);
                  });
                });

    server.Post(R"(/sessions/([^/]+)/annotations)",
                [this](const httplib::Request& req, httplib::Response& res) {
                  mutate(req, res, [](Session& s, const Workbench&, const json& body) {
                    std::vector<json> items;
                    if (body.contains("annotations")) {
                      if (!body["annotations"].is_array()) {
                        throw ValidationError("annotations", "annotations must be an array");
                      }
                      items.assign(body["annotations"].begin(), body["annotations"].end());
                    } else {
                      items.push_back(body);
                    }
                    for (const json& item : items) {
                      if (!item.is_object()) {
                        throw ValidationError("annotations", "each annotation must be an object");
                      }
                      annotate(s, string_field(item, "excerpt_id"),
                               label_field(item.value("label", json()), "label"));
                    }
                  });
                });

    server.Post(R"(/sessions/([^/]+)/batch-apply/([^/]+))",
                [this](const httplib::Request& req, httplib::Response& res) {
                  const std::string model_id = req.matches[2];
                  mutate(req, res, [&model_id](Session& s, const Workbench& wb, const json&) {
                    batch_apply(s, wb, model_id);
                  });
                });

    server.Post(R"(/sessions/([^/]+)/inspect)",
                [this](const httplib::Request& req, httplib::Response& res) {
                  mutate(req, res, [](Session& s, const Workbench& wb, const json&) {
                    run_inspection(s, wb);
                  });
                });

    server.Post(R"(/sessions/([^/]+)/confirm)",
                [this](const httplib::Request& req, httplib::Response& res) {
                  mutate(req, res, [](Session& s, const Workbench&, const json& body) {
                    if (!body.contains("labels") || !body["labels"].is_object()) {
                      throw ValidationError("labels", "labels must be an object of id to label");
                    }
                    std::map<std::string, Label> labels;
                    for (const auto& [id, value] : body["labels"].items()) {
                      labels[id] = label_field(value, "labels");
                    }
                    confirm(s, labels);
                  });
                });

    server.Post(R"(/sessions/([^/]+)/recommend)",
                [this](const httplib::Request& req, httplib::Response& res) {
                  mutate(req, res, [](Session& s, const Workbench& wb, const json&) {
                    recommend_next(s, wb);
                  });
                });

    server.Put(R"(/sessions/([^/]+)/params)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 mutate(req, res, [](Session& s, const Workbench&, const json& body) {
                   set_params(s, params_field(body, s.pending_params.value_or(s.params)));
                 });
               });

    server.Get(R"(/sessions/([^/]+)/excerpts/([^/]+)/analysis)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 guarded(res, [&] {
                   auto s = slot(req.matches[1]);
                   Session snapshot;
                   std::shared_ptr<const Workbench> wb;
                   {
                     std::lock_guard lock(s->mutex);
                     snapshot = s->session;
                     wb = slot_workbench(*s);
                   }
                   const std::string model_id = req.has_param("model")
                                                    ? req.get_param_value("model")
                                                    : default_model(snapshot);
                   send_json(res, 200, analysis(snapshot, *wb, req.matches[2], model_id));
                 });
               });

    server.Get(R"(/sessions/([^/]+)/projections)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 guarded(res, [&] {
                   auto s = slot(req.matches[1]);
                   Session snapshot;
                   std::shared_ptr<const Workbench> wb;
                   {
                     std::lock_guard lock(s->mutex);
                     snapshot = s->session;
                     wb = slot_workbench(*s);
                   }
                   const std::string space =
                       req.has_param("space") ? req.get_param_value("space") : "distribution";
                   if (space != "distribution" && space != "contribution") {
                     throw ValidationError("space", "space must be distribution or contribution");
                   }
                   const std::string model_id = req.has_param("model")
                                                    ? req.get_param_value("model")
                                                    : default_model(snapshot);
                   if (std::find(snapshot.model_ids.begin(), snapshot.model_ids.end(), model_id) ==
                       snapshot.model_ids.end()) {
                     throw NotFoundError("model \"" + model_id + "\" is not in this session");
                   }
                   send_json(res, 200, projection(snapshot, *wb, space, model_id));
                 });
               });

    server.Get(R"(/sessions/([^/]+)/transcript)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 guarded(res, [&] {
                   auto s = slot(req.matches[1]);
                   std::string out;
                   {
                     std::lock_guard lock(s->mutex);
                     for (const json& e : s->session.events) out += e.dump() + "\n";
                   }
                   res.status = 200;
                   res.set_content(out, "application/x-ndjson");
                 });
               });

    if (config.static_dir) server.set_mount_point("/", config.static_dir->string());

    server.set_exception_handler(
        [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
          send_error(res, classify(ep));
        });
  }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Service::~Service() { stop(); }

int Service::bind() {
  if (impl_->config.port == 0) {
    impl_->bound_port = impl_->server.bind_to_any_port(impl_->config.host);
  } else if (impl_->server.bind_to_port(impl_->config.host, impl_->config.port)) {
    impl_->bound_port = impl_->config.port;
  }
  if (impl_->bound_port < 0) {
    throw IoError("cannot bind " + impl_->config.host + ":" + std::to_string(impl_->config.port));
  }
  return impl_->bound_port;
}

void Service::run() { impl_->server.listen_after_bind(); }

void Service::stop() {
  if (!impl_) return;
  impl_->server.stop();
  std::lock_guard lock(impl_->registry_mutex);
  for (auto& [id, slot] : impl_->sessions) {
    std::lock_guard slot_lock(slot->mutex);
    impl_->persist(*slot);
  }
}

std::size_t Service::session_count() const {
  std::lock_guard lock(impl_->registry_mutex);
  return impl_->sessions.size();
}

}  // namespace scidetect
