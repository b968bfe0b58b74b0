#ifndef SCIDETECT_MODELS_H_
#define SCIDETECT_MODELS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "scidetect/corpus.h"
#include "scidetect/features.h"

namespace scidetect {

inline constexpr double kStdFloor = 1e-8;

// Logistic-regression detector over z-scored features.
struct Model {
  std::string id;
  std::vector<double> weights;
  double bias = 0.0;
  std::vector<double> feature_means;
  std::vector<double> feature_stds;
  std::string training_source;   // source/dataset filter, or "all"
  std::string training_set_ref;  // name of the training corpus
  std::vector<std::string> training_ids;
  std::string schema_version{kFeatureSchemaVersion};

  std::size_t dimension() const { return weights.size(); }
  // (x - mean) / std. Throws DomainError on a schema mismatch.
  std::vector<double> standardize(const FeatureVector& fv) const;
  std::vector<double> standardize(std::span<const double> values) const;
  double margin_of_standardized(std::span<const double> z) const;
  double margin(const FeatureVector& fv) const;

  bool operator==(const Model&) const = default;
};

struct TrainConfig {
  double l2 = 1.0;
  int max_iter = 500;
  double tol = 1e-8;
  // Recorded for reproducibility; the full-batch optimiser is deterministic
  // and does not draw random numbers.
  std::uint64_t seed = 0;
};

struct Prediction {
  std::string excerpt_id;
  double prob_machine = 0.5;
  Label label = Label::kHuman;

  bool operator==(const Prediction&) const = default;
};

struct Metrics {
  double accuracy = 0.0;
  std::optional<double> auc;  // absent when the test set has a single class
  std::size_t n = 0;

  bool operator==(const Metrics&) const = default;
};

double logistic(double margin);

// machine iff prob > 0.5; an exact tie is human.
Label label_for(double prob_machine);

// Minimises mean log loss + l2 / (2N) * |w|^2 (bias unpenalised) by
// full-batch gradient descent with Armijo backtracking. Stops when the
// gradient norm drops below tol or after max_iter steps. Throws DomainError
// when any excerpt is unlabeled or only one class is present.
Model train(const Corpus& train_set, const CorpusStats& stats, std::string id,
            const TrainConfig& config = {});
Model train_on_features(std::span<const FeatureVector> features,
                        std::span<const Label> labels, std::string id,
                        const TrainConfig& config = {});

Prediction predict(const Model& model, const FeatureVector& fv);

// Accuracy and Mann-Whitney AUC (ties count 1/2; "machine" is the positive
// class). Throws DomainError on an empty set.
Metrics compute_metrics(std::span<const double> prob_machine,
                        std::span<const Label> truth);
std::optional<double> auc_mann_whitney(std::span<const double> scores,
                                       std::span<const Label> truth);

// Throws DomainError when the test set is empty or any excerpt is unlabeled.
Metrics evaluate(const Model& model, const Corpus& test_set,
                 const CorpusStats& stats);

struct EvalMatrix {
  std::vector<std::string> model_ids;
  std::vector<std::string> test_names;  // test sets in order, then "Total"
  std::vector<std::vector<Metrics>> cells;
};

// cells[i][j] = evaluate(models[i], test_sets[j]); the last column is the
// union of all test sets.
EvalMatrix cross_evaluate(std::span<const Model> models,
                          std::span<const std::pair<std::string, Corpus>> test_sets,
                          const CorpusStats& stats);

// Hex FNV-1a over the canonical JSON of every field except the hash.
std::string model_hash(const Model& model);
nlohmann::json model_to_json(const Model& model);
// Throws ParseError on a missing field or a hash mismatch.
Model model_from_json(const nlohmann::json& doc);
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace scidetect

#endif  // SCIDETECT_MODELS_H_
