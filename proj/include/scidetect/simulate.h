#ifndef SCIDETECT_SIMULATE_H_
#define SCIDETECT_SIMULATE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "scidetect/workbench.h"
#include "scidetect/workflow.h"

namespace scidetect {

// C1: the oracle's labels are confirmed as given.
// C2: one model is batch-applied and its labels are confirmed blindly.
// C3: the oracle annotates; where the top-ranked model disagrees and the
//     oracle's confidence draw is below kC3ConfidenceThreshold, the model's
//     label is confirmed instead.
enum class Policy { kC1, kC2, kC3 };

std::string_view policy_name(Policy p);
Policy parse_policy(std::string_view text);

inline constexpr double kC3ConfidenceThreshold = 0.5;

struct OracleSpec {
  double accuracy = 0.9;
  std::uint64_t seed = 0;
};

// An oracle's judgment of one excerpt: a pure function of (seed, id).
struct OracleDraw {
  Label label = Label::kHuman;
  bool correct = true;
  double confidence = 1.0;
};

OracleDraw oracle_draw(const OracleSpec& oracle, const Excerpt& excerpt);

struct SimulationConfig {
  WorkflowParams params;
  OracleSpec oracle;
  Policy policy = Policy::kC3;
  // Model applied under C2; empty selects best_standalone_model.
  std::string c2_model;
};

struct SimulationResult {
  Policy policy = Policy::kC3;
  std::uint64_t seed = 0;
  double final_accuracy = 0.0;
  std::size_t iterations = 0;
  std::size_t confirmed = 0;
  std::string c2_model;  // empty unless C2
  Session session;

  // One JSON object per stage transition followed by a summary line.
  std::vector<nlohmann::json> transcript() const;
};

// Model in `model_ids` with the highest accuracy against the ground truth of
// the workbench corpus; ties by ascending id.
std::string best_standalone_model(const Workbench& wb, std::span<const std::string> model_ids);

double standalone_accuracy(const Workbench& wb, std::string_view model_id);

// Runs a session to completion. The session's initial batch uses the oracle
// seed. Throws DomainError when any excerpt lacks a ground-truth label.
SimulationResult simulate(const Workbench& wb, std::vector<std::string> model_ids,
                          const SimulationConfig& config);

}  // namespace scidetect

#endif  // SCIDETECT_SIMULATE_H_
