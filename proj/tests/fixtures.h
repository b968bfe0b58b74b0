#ifndef SCIDETECT_TESTS_FIXTURES_H_
#define SCIDETECT_TESTS_FIXTURES_H_

#include <memory>
#include <string>
#include <vector>

#include "scidetect/corpus.h"
#include "scidetect/demo_corpus.h"
#include "scidetect/features.h"
#include "scidetect/models.h"
#include "scidetect/workbench.h"

namespace scidetect::testing {

// Two-profile demo corpus (60 excerpts) with one specialist per profile,
// trained on that profile's excerpts.
inline Corpus demo_corpus() { return synthesize_demo_corpus(2, 15, 3); }

inline std::vector<Model> demo_models(const Corpus& corpus, const CorpusStats& stats) {
  std::vector<Model> models;
  for (const std::string& source : demo_profile_sources(2)) {
    Model m = train(filter_by_source(corpus, source), stats, source);
    m.training_source = source;
    models.push_back(std::move(m));
  }
  return models;
}

inline const Workbench& demo_workbench() {
  static const std::unique_ptr<Workbench> wb = [] {
    Corpus corpus = demo_corpus();
    CorpusStats stats = fit_corpus_stats(corpus, default_top_words_path());
    std::vector<Model> models = demo_models(corpus, stats);
    return std::make_unique<Workbench>(std::move(corpus), std::move(stats), std::move(models));
  }();
  return *wb;
}

inline std::vector<std::string> demo_model_ids() { return demo_profile_sources(2); }

}  // namespace scidetect::testing

#endif  // SCIDETECT_TESTS_FIXTURES_H_
