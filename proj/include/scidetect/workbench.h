#ifndef SCIDETECT_WORKBENCH_H_
#define SCIDETECT_WORKBENCH_H_

#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "scidetect/corpus.h"
#include "scidetect/explain.h"
#include "scidetect/features.h"
#include "scidetect/models.h"

namespace scidetect {

// Immutable corpus, features and model zoo that sessions run against, plus a
// thread-safe per-(model, excerpt) contribution cache.
class Workbench {
 public:
  Workbench(Corpus corpus, CorpusStats stats, std::vector<Model> models);
  // Fits stats on the corpus itself.
  Workbench(Corpus corpus, std::vector<Model> models);

  Workbench(const Workbench&) = delete;
  Workbench& operator=(const Workbench&) = delete;

  const Corpus& corpus() const { return corpus_; }
  const CorpusStats& stats() const { return stats_; }
  std::span<const FeatureVector> features() const { return features_; }
  const std::vector<Model>& models() const { return models_; }

  bool has_excerpt(std::string_view id) const;
  // Throw NotFoundError for unknown ids.
  std::size_t excerpt_index(std::string_view id) const;
  const Excerpt& excerpt(std::string_view id) const;
  const FeatureVector& features_of(std::string_view id) const;
  const Model& model(std::string_view id) const;
  bool has_model(std::string_view id) const;

  Prediction predict(std::string_view model_id, std::string_view excerpt_id) const;
  ContributionVector contribution(std::string_view model_id, std::string_view excerpt_id) const;

  // Feature vectors of the model's training excerpts present in this corpus.
  std::vector<FeatureVector> training_features(std::string_view model_id) const;

  FeatureIndex feature_index() const;

 private:
  Corpus corpus_;
  CorpusStats stats_;
  std::vector<FeatureVector> features_;
  std::vector<Model> models_;
  std::unordered_map<std::string, std::size_t> excerpt_pos_;
  std::unordered_map<std::string, std::size_t> model_pos_;

  mutable std::mutex cache_mutex_;
  mutable std::map<std::pair<std::size_t, std::size_t>, ContributionVector> cache_;
};

}  // namespace scidetect

#endif  // SCIDETECT_WORKBENCH_H_
