#include "scidetect/simulate.h"

#include "scidetect/error.h"
#include "scidetect/rng.h"

namespace scidetect {

namespace {

Label flip(Label l) { return l == Label::kMachine ? Label::kHuman : Label::kMachine; }

}  // namespace

std::string_view policy_name(Policy p) {
  switch (p) {
    case Policy::kC1: return "c1";
    case Policy::kC2: return "c2";
    case Policy::kC3: return "c3";
  }
  return "c3";
}

Policy parse_policy(std::string_view text) {
  for (Policy p : {Policy::kC1, Policy::kC2, Policy::kC3}) {
    if (policy_name(p) == text) return p;
  }
  throw ValidationError("policy", "unknown policy \"" + std::string(text) + "\"");
}

OracleDraw oracle_draw(const OracleSpec& oracle, const Excerpt& excerpt) {
  if (!excerpt.true_label) throw DomainError("excerpt \"" + excerpt.id + "\" has no label");
  Rng rng(mix_seed(oracle.seed, fnv1a64(excerpt.id)));
  OracleDraw d;
  d.correct = rng.uniform() < oracle.accuracy;
  d.confidence = rng.uniform();
  d.label = d.correct ? *excerpt.true_label : flip(*excerpt.true_label);
  return d;
}

double standalone_accuracy(const Workbench& wb, std::string_view model_id) {
  std::size_t hits = 0;
  for (const Excerpt& e : wb.corpus().excerpts) {
    if (!e.true_label) throw DomainError("excerpt \"" + e.id + "\" has no label");
    if (wb.predict(model_id, e.id).label == *e.true_label) ++hits;
  }
  return wb.corpus().excerpts.empty()
             ? 0.0
             : static_cast<double>(hits) / static_cast<double>(wb.corpus().size());
}

std::string best_standalone_model(const Workbench& wb, std::span<const std::string> model_ids) {
  if (model_ids.empty()) throw DomainError("no models to choose from");
  std::string best;
  double best_acc = -1.0;
  for (const std::string& id : model_ids) {
    const double acc = standalone_accuracy(wb, id);
    if (acc > best_acc || (acc == best_acc && id < best)) {
      best = id;
      best_acc = acc;
    }
  }
  return best;
}

std::vector<nlohmann::json> SimulationResult::transcript() const {
  std::vector<nlohmann::json> lines(session.events.begin(), session.events.end());
  nlohmann::json summary = {{"event", "summary"},
                            {"policy", policy_name(policy)},
                            {"seed", seed},
                            {"final_accuracy", final_accuracy},
                            {"iterations", iterations},
                            {"confirmed", confirmed}};
  if (!c2_model.empty()) summary["c2_model"] = c2_model;
  lines.push_back(std::move(summary));
  return lines;
}

SimulationResult simulate(const Workbench& wb, std::vector<std::string> model_ids,
                          const SimulationConfig& config) {
  for (const Excerpt& e : wb.corpus().excerpts) {
    if (!e.true_label) throw DomainError("simulation needs a fully labeled corpus; \"" + e.id +
                                         "\" has no label");
  }
  if (!(config.oracle.accuracy >= 0.0 && config.oracle.accuracy <= 1.0)) {
    throw ValidationError("oracle_p", "oracle accuracy must lie in [0, 1]");
  }

  SimulationResult result;
  result.policy = config.policy;
  result.seed = config.oracle.seed;
  if (config.policy == Policy::kC2) {
    result.c2_model = config.c2_model.empty() ? best_standalone_model(wb, model_ids)
                                              : config.c2_model;
  }

  Session s = start_session(wb, std::move(model_ids), config.params, config.oracle.seed,
                            "sim-" + std::string(policy_name(config.policy)) + "-" +
                                std::to_string(config.oracle.seed));
  while (s.stage != Stage::kComplete) {
    if (s.stage == Stage::kRecommend) {
      recommend_next(s, wb);
      continue;
    }
    if (config.policy == Policy::kC2) {
      batch_apply(s, wb, result.c2_model);
    } else {
      for (const std::string& id : s.current.batch) {
        annotate(s, id, oracle_draw(config.oracle, wb.excerpt(id)).label);
      }
    }
    run_inspection(s, wb);

    std::map<std::string, Label> labels;
    const auto& top_preds = s.current.predictions.at(s.current.top_model_id);
    for (std::size_t i = 0; i < s.current.batch.size(); ++i) {
      const std::string& id = s.current.batch[i];
      Label label = s.current.annotations.at(id).label;
      if (config.policy == Policy::kC3) {
        const OracleDraw draw = oracle_draw(config.oracle, wb.excerpt(id));
        if (top_preds[i].label != label && draw.confidence < kC3ConfidenceThreshold) {
          label = top_preds[i].label;
        }
      }
      labels[id] = label;
    }
    confirm(s, labels);
  }

  std::size_t hits = 0;
  for (const IterationRecord& rec : s.history) {
    for (const auto& [id, label] : rec.confirmed_labels) {
      if (label == *wb.excerpt(id).true_label) ++hits;
    }
  }
  result.confirmed = s.confirmed_count();
  result.iterations = s.history.size();
  result.final_accuracy =
      static_cast<double>(hits) / static_cast<double>(std::max<std::size_t>(1, result.confirmed));
  result.session = std::move(s);
  return result;
}

}  // namespace scidetect
