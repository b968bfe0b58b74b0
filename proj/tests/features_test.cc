#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "scidetect/demo_corpus.h"
#include "scidetect/error.h"
#include "scidetect/features.h"

namespace scidetect {
namespace {

double value(const FeatureVector& fv, std::string_view name) {
  return fv.values.at(*FeatureSchema::standard().index_of(name));
}

Corpus tiny() {
  Corpus c;
  c.name = "tiny";
  c.excerpts.push_back({"e1", "The cat", "The cat sat.", Label::kHuman, "human"});
  c.excerpts.push_back(
      {"e2", "Models", "The model learns quickly. The model learns quickly. The model learns "
                       "quickly. The model learns quickly. The model learns quickly.",
       Label::kMachine, "gen"});
  c.excerpts.push_back({"e3", "Dogs", "A dog ran; it barked. Then it slept.", Label::kHuman, "human"});
  return c;
}

TEST(Schema, Layout) {
  const FeatureSchema& s = FeatureSchema::standard();
  EXPECT_EQ(s.size(), 109u);
  EXPECT_EQ(s.version(), kFeatureSchemaVersion);
  std::set<std::string> names;
  for (const FeatureEntry& e : s.entries()) {
    EXPECT_TRUE(names.insert(e.name).second) << e.name;
    EXPECT_EQ(e.dimension, dimension_of(e.subcategory)) << e.name;
  }
  std::map<Subcategory, int> per;
  for (const FeatureEntry& e : s.entries()) ++per[e.subcategory];
  EXPECT_EQ(per[Subcategory::kGrammaticalIssues], 24);
  EXPECT_EQ(per[Subcategory::kTextStructure], 6);
  EXPECT_EQ(per[Subcategory::kReadability], 2);
  EXPECT_EQ(per[Subcategory::kLexicalIssues], 5);
  EXPECT_EQ(per[Subcategory::kConsistency], 1);
  EXPECT_EQ(per[Subcategory::kCoherence], 1);
  EXPECT_EQ(per[Subcategory::kRedundancy], 6);
  EXPECT_EQ(per[Subcategory::kWritingStyle], 64);
  EXPECT_EQ(dimension_of(Subcategory::kReadability), Dimension::kSyntax);
  EXPECT_EQ(dimension_of(Subcategory::kCoherence), Dimension::kSemantics);
  EXPECT_EQ(dimension_of(Subcategory::kWritingStyle), Dimension::kPragmatics);
  EXPECT_FALSE(s.index_of("no_such_feature").has_value());
}

TEST(CorpusStats, Idf) {
  Corpus c;
  c.name = "ten";
  for (int i = 0; i < 10; ++i) {
    c.excerpts.push_back({"d" + std::to_string(i), "", i == 0 ? "common rare." : "common word.",
                          std::nullopt, ""});
  }
  const CorpusStats s = fit_corpus_stats(c, std::vector<std::string>{"common"});
  EXPECT_DOUBLE_EQ(s.idf_of("common"), 1.0);
  EXPECT_NEAR(s.idf_of("rare"), std::log(11.0 / 2.0) + 1.0, 1e-12);
  EXPECT_NEAR(s.idf_of("rare"), 2.7047480922384253, 1e-12);
  EXPECT_DOUBLE_EQ(s.idf_of("unseen"), std::log(11.0) + 1.0);
  EXPECT_EQ(s, fit_corpus_stats(c, std::vector<std::string>{"common"}));
  for (const auto& [t, v] : s.idf) EXPECT_GE(v, 0.0);
  EXPECT_THROW(fit_corpus_stats(Corpus{}, std::vector<std::string>{}), DomainError);
}

TEST(SentenceVector, Conventions) {
  const CorpusStats s = fit_corpus_stats(tiny(), std::vector<std::string>{});
  const SparseVector one = sentence_vector("cat", s);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_DOUBLE_EQ(one[0].second, 1.0);
  EXPECT_TRUE(sentence_vector("qqq zzz", s).empty());
  EXPECT_EQ(sentence_vector("The cat sat.", s), sentence_vector("The cat sat.", s));
}

TEST(ExtractFeatures, SingleSentence) {
  const Corpus c = tiny();
  const CorpusStats s = fit_corpus_stats(c, default_top_words_path());
  const FeatureVector fv = extract_features(c.excerpts[0], s);
  ASSERT_EQ(fv.values.size(), FeatureSchema::standard().size());
  EXPECT_EQ(value(fv, "word_count"), 3.0);
  EXPECT_EQ(value(fv, "sentence_count"), 1.0);
  EXPECT_EQ(value(fv, "paragraph_count"), 1.0);
  EXPECT_EQ(value(fv, "mean_sentence_length"), 3.0);
  EXPECT_EQ(value(fv, "sentence_coherence"), 1.0);
  EXPECT_DOUBLE_EQ(value(fv, "pos_freq.DET"), 0.25);
  EXPECT_DOUBLE_EQ(value(fv, "pos_freq.NOUN"), 0.25);
  EXPECT_DOUBLE_EQ(value(fv, "punct_freq.period"), 0.25);
  EXPECT_DOUBLE_EQ(value(fv, "mean_word_length"), 3.0);
  EXPECT_DOUBLE_EQ(value(fv, "type_token_ratio"), 1.0);
}

// Five copies of a 4-word sentence: 18 word trigrams, 4 distinct.
TEST(ExtractFeatures, RepeatedSentence) {
  const Corpus c = tiny();
  const CorpusStats s = fit_corpus_stats(c, default_top_words_path());
  const FeatureVector fv = extract_features(c.excerpts[1], s);
  EXPECT_NEAR(value(fv, "word_trigram_overlap"), 1.0 - 4.0 / 18.0, 1e-12);
  EXPECT_GT(value(fv, "word_trigram_overlap"), 0.7);
  EXPECT_NEAR(value(fv, "word_unigram_overlap"), 1.0 - 4.0 / 20.0, 1e-12);
  EXPECT_NEAR(value(fv, "sentence_coherence"), 1.0, 1e-12);
  EXPECT_EQ(value(fv, "sentence_count"), 5.0);
}

TEST(ExtractFeatures, InvariantsOnDemoCorpus) {
  const Corpus c = synthesize_demo_corpus(4, 10, 3);
  const CorpusStats s = fit_corpus_stats(c, default_top_words_path());
  const FeatureSchema& schema = FeatureSchema::standard();
  for (const Excerpt& e : c.excerpts) {
    const FeatureVector fv = extract_features(e, s);
    EXPECT_EQ(fv, extract_features(e, s));
    double pos_sum = 0.0;
    for (std::size_t k = 0; k < schema.size(); ++k) {
      const double v = fv.values[k];
      ASSERT_TRUE(std::isfinite(v)) << schema[k].name;
      const std::string& n = schema[k].name;
      if (n.rfind("pos_freq.", 0) == 0) pos_sum += v;
      if (n.rfind("pos_freq.", 0) == 0 || n.rfind("punct_freq.", 0) == 0 ||
          n.find("overlap") != std::string::npos || n == "title_sentence_similarity" ||
          n == "sentence_coherence" || n.find("word_fraction") != std::string::npos) {
        EXPECT_GE(v, 0.0) << n;
        EXPECT_LE(v, 1.0 + 1e-12) << n;
      }
    }
    EXPECT_NEAR(pos_sum, 1.0, 1e-12);
  }
}

TEST(ExtractFeatures, Errors) {
  const CorpusStats s = fit_corpus_stats(tiny(), std::vector<std::string>{});
  EXPECT_THROW(extract_features({"x", "t", "", std::nullopt, ""}, s), DomainError);
  EXPECT_THROW(extract_features({"x", "t", "... !!", std::nullopt, ""}, s), DomainError);
}

TEST(FeatureSpans, NounCoversCat) {
  const Corpus c = tiny();
  const CorpusStats s = fit_corpus_stats(c, default_top_words_path());
  const auto spans = feature_spans(c.excerpts[0], s);
  ASSERT_TRUE(spans.contains("pos_freq.NOUN"));
  ASSERT_EQ(spans.at("pos_freq.NOUN").size(), 1u);
  const Span sp = spans.at("pos_freq.NOUN")[0];
  EXPECT_EQ(c.excerpts[0].body.substr(sp.begin, sp.end - sp.begin), "cat");
  ASSERT_TRUE(spans.contains("punct_freq.period"));
  EXPECT_EQ(spans.at("punct_freq.period")[0], (Span{11, 12}));
  ASSERT_TRUE(spans.contains("top100_word_fraction"));
  EXPECT_FALSE(spans.contains("word_count"));
}

TEST(TopWords, Bundled) {
  const auto words = load_top_words(default_top_words_path());
  EXPECT_GE(words.size(), 1000u);
  EXPECT_EQ(words.front(), "the");
}

}  // namespace
}  // namespace scidetect
