#ifndef SCIDETECT_WORKFLOW_H_
#define SCIDETECT_WORKFLOW_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "scidetect/corpus.h"
#include "scidetect/models.h"
#include "scidetect/workbench.h"

namespace scidetect {

enum class Stage { kAnnotate, kConfirm, kRecommend, kComplete };

std::string_view stage_name(Stage stage);
Stage parse_stage(std::string_view text);

struct WorkflowParams {
  double omega_g = 0.5;     // global match weight
  double omega_d = 0.5;     // feature distribution weight
  int iteration_size = 10;  // n

  bool operator==(const WorkflowParams&) const = default;
};

// Throws ValidationError naming the offending field.
void validate_params(const WorkflowParams& params);

struct Annotation {
  Label label = Label::kHuman;
  std::optional<std::string> applied_model;  // nullopt: manual

  bool manual() const { return !applied_model.has_value(); }
  bool operator==(const Annotation&) const = default;
};

struct RankEntry {
  std::string model_id;
  double r_local = 0.0;
  double r_global = 0.0;
  double score = 0.0;

  bool operator==(const RankEntry&) const = default;
};

struct IterationRecord {
  int index = 0;
  std::vector<std::string> batch;
  std::map<std::string, Annotation> annotations;
  std::map<std::string, std::vector<Prediction>> predictions;  // aligned with batch
  std::vector<RankEntry> ranking;
  std::map<std::string, Label> confirmed_labels;
  std::string top_model_id;

  bool operator==(const IterationRecord&) const = default;
};

struct Session {
  std::string id;
  std::string corpus_name;
  std::vector<std::string> model_ids;
  WorkflowParams params;
  std::optional<WorkflowParams> pending_params;
  std::vector<IterationRecord> history;
  IterationRecord current;
  std::vector<std::string> remaining;  // corpus order
  std::uint64_t rng_seed = 0;
  Stage stage = Stage::kAnnotate;
  nlohmann::json events = nlohmann::json::array();

  bool operator==(const Session&) const = default;

  // Confirmed label for an excerpt from any closed iteration.
  std::optional<Label> confirmed_label(std::string_view excerpt_id) const;
  std::size_t confirmed_count() const;
};

// Blended match score: (1 - omega_g) * r_local + omega_g * r_global.
double match_score(double r_local, double r_global, double omega_g);

// Descending score, ties by ascending model id.
std::vector<RankEntry> rank_models(std::vector<RankEntry> entries, double omega_g);

// All operations validate before mutating, so a thrown error leaves the
// session unchanged. Stage violations throw StageError, unknown ids
// NotFoundError, malformed arguments ValidationError.

Session start_session(const Workbench& wb, std::vector<std::string> model_ids,
                      const WorkflowParams& params, std::uint64_t seed, std::string id = {});

void override_batch(Session& s, const Workbench& wb, std::span<const std::string> excerpt_ids);
void annotate(Session& s, std::string_view excerpt_id, Label label);
void batch_apply(Session& s, const Workbench& wb, std::string_view model_id);
void run_inspection(Session& s, const Workbench& wb);
void confirm(Session& s, const std::map<std::string, Label>& final_labels);
void recommend_next(Session& s, const Workbench& wb);
void set_params(Session& s, const WorkflowParams& params);

// sim_i of every remaining excerpt against the most recently closed batch,
// in remaining order.
std::vector<double> recommendation_scores(const Session& s, const Workbench& wb);

inline constexpr int kSessionFormatVersion = 1;

nlohmann::json session_to_json(const Session& s);
// Throws VersionError for a newer format, ParseError for malformed content.
Session session_from_json(const nlohmann::json& doc);
void save_session(const Session& s, const std::filesystem::path& path);
Session load_session(const std::filesystem::path& path);

}  // namespace scidetect

#endif  // SCIDETECT_WORKFLOW_H_
