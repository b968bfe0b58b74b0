#include "scidetect/workbench.h"

#include <unordered_set>

#include "scidetect/error.h"

namespace scidetect {

Workbench::Workbench(Corpus corpus, CorpusStats stats, std::vector<Model> models)
    : corpus_(std::move(corpus)), stats_(std::move(stats)), models_(std::move(models)) {
  validate_corpus(corpus_);
  features_ = extract_all(corpus_, stats_);
  for (std::size_t i = 0; i < corpus_.excerpts.size(); ++i) {
    excerpt_pos_.emplace(corpus_.excerpts[i].id, i);
  }
  for (std::size_t i = 0; i < models_.size(); ++i) {
    if (models_[i].dimension() != FeatureSchema::standard().size()) {
      throw DomainError("model \"" + models_[i].id + "\" does not match the feature schema");
    }
    if (!model_pos_.emplace(models_[i].id, i).second) {
      throw DomainError("duplicate model id \"" + models_[i].id + "\"");
    }
  }
}

Workbench::Workbench(Corpus corpus, std::vector<Model> models)
    : Workbench(corpus, fit_corpus_stats(corpus, default_top_words_path()), std::move(models)) {}

bool Workbench::has_excerpt(std::string_view id) const {
  return excerpt_pos_.contains(std::string(id));
}

std::size_t Workbench::excerpt_index(std::string_view id) const {
  auto it = excerpt_pos_.find(std::string(id));
  if (it == excerpt_pos_.end()) throw NotFoundError("unknown excerpt \"" + std::string(id) + "\"");
  return it->second;
}

const Excerpt& Workbench::excerpt(std::string_view id) const {
  return corpus_.excerpts[excerpt_index(id)];
}

const FeatureVector& Workbench::features_of(std::string_view id) const {
  return features_[excerpt_index(id)];
}

bool Workbench::has_model(std::string_view id) const {
  return model_pos_.contains(std::string(id));
}

const Model& Workbench::model(std::string_view id) const {
  auto it = model_pos_.find(std::string(id));
  if (it == model_pos_.end()) throw NotFoundError("unknown model \"" + std::string(id) + "\"");
  return models_[it->second];
}

Prediction Workbench::predict(std::string_view model_id, std::string_view excerpt_id) const {
  return scidetect::predict(model(model_id), features_of(excerpt_id));
}

ContributionVector Workbench::contribution(std::string_view model_id,
                                           std::string_view excerpt_id) const {
  const Model& m = model(model_id);
  const std::size_t e = excerpt_index(excerpt_id);
  const std::pair<std::size_t, std::size_t> key{model_pos_.at(m.id), e};
  {
    std::lock_guard lock(cache_mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  ContributionVector cv = linear_shap(m, features_[e]);
  std::lock_guard lock(cache_mutex_);
  return cache_.emplace(key, std::move(cv)).first->second;
}

std::vector<FeatureVector> Workbench::training_features(std::string_view model_id) const {
  const Model& m = model(model_id);
  std::vector<FeatureVector> out;
  for (const std::string& id : m.training_ids) {
    auto it = excerpt_pos_.find(id);
    if (it != excerpt_pos_.end()) out.push_back(features_[it->second]);
  }
  return out;
}

FeatureIndex Workbench::feature_index() const {
  FeatureIndex index;
  for (const FeatureVector& fv : features_) index.emplace(fv.excerpt_id, &fv);
  return index;
}

}  // namespace scidetect
