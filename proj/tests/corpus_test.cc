#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>

#include "scidetect/corpus.h"
#include "scidetect/demo_corpus.h"
#include "scidetect/error.h"
#include "scidetect/features.h"
#include "scidetect/io.h"

namespace scidetect {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("scidetect-corpus-" + std::to_string(::getpid()) + "-" + std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path file(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
  static inline int counter_ = 0;
};

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

Corpus labeled(int machine, int human) {
  Corpus c;
  c.name = "toy";
  for (int i = 0; i < machine; ++i) {
    c.excerpts.push_back({"m" + std::to_string(i), "T", "A body.", Label::kMachine, "gen"});
  }
  for (int i = 0; i < human; ++i) {
    c.excerpts.push_back({"h" + std::to_string(i), "T", "A body.", Label::kHuman, "human"});
  }
  return c;
}

TEST(LoadCorpus, KeepsFileOrder) {
  TempDir dir;
  write(dir.file("c.jsonl"),
        R"({"id":"b","title":"T","body":"One."})"
        "\n"
        R"({"id":"a","title":"T","body":"Two.","label":"machine","source":"g"})"
        "\n"
        R"({"id":"c","title":"T","body":"Three.","label":"human"})"
        "\n");
  const Corpus c = load_corpus(dir.file("c.jsonl"));
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c.excerpts[0].id, "b");
  EXPECT_EQ(c.excerpts[1].id, "a");
  EXPECT_EQ(c.excerpts[2].id, "c");
  EXPECT_FALSE(c.excerpts[0].true_label.has_value());
  EXPECT_EQ(c.excerpts[1].true_label, Label::kMachine);
  EXPECT_EQ(c.excerpts[1].source, "g");
  EXPECT_EQ(c.name, "c");
}

TEST(LoadCorpus, EmptyBodyNamesLine) {
  TempDir dir;
  write(dir.file("c.jsonl"),
        R"({"id":"a","title":"T","body":"Fine."})"
        "\n"
        R"({"id":"b","title":"T","body":"   "})"
        "\n");
  try {
    load_corpus(dir.file("c.jsonl"));
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(LoadCorpus, DuplicateId) {
  TempDir dir;
  write(dir.file("c.jsonl"),
        R"({"id":"a1","title":"T","body":"One."})"
        "\n"
        R"({"id":"a1","title":"T","body":"Two."})"
        "\n");
  try {
    load_corpus(dir.file("c.jsonl"));
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("a1"), std::string::npos);
  }
}

TEST(LoadCorpus, MalformedLineAndMissingFile) {
  TempDir dir;
  write(dir.file("c.jsonl"), "{\"id\":\"a\",\"title\":\"T\",\"body\":\"x.\"}\n{not json\n");
  EXPECT_THROW(load_corpus(dir.file("c.jsonl")), ParseError);
  EXPECT_THROW(load_corpus(dir.file("absent.jsonl")), IoError);
}

TEST(LoadCorpus, ReportCollectsEveryBadLine) {
  TempDir dir;
  write(dir.file("c.jsonl"),
        "{\"id\":\"a\",\"title\":\"T\",\"body\":\"x.\"}\n"
        "{\"id\":\"b\",\"title\":\"T\"}\n"
        "{\"id\":\"c\",\"title\":\"T\",\"body\":\"y.\",\"label\":\"robot\"}\n"
        "{\"id\":\"d\",\"title\":\"T\",\"body\":\"z.\"}\n");
  const LoadReport r = load_corpus_report(dir.file("c.jsonl"));
  EXPECT_EQ(r.corpus.size(), 2u);
  ASSERT_EQ(r.errors.size(), 2u);
  EXPECT_EQ(r.errors[0].first, 2u);
  EXPECT_EQ(r.errors[1].first, 3u);
}

TEST(CorpusRoundTrip, PreservesFieldsAndExtras) {
  TempDir dir;
  write(dir.file("c.jsonl"),
        R"({"id":"a","title":"Tïtle","body":"Body — with “quotes”.","label":"human","source":"human","dataset":"p","score":3.5})"
        "\n"
        R"({"id":"b","title":"T","body":"B."})"
        "\n");
  const Corpus c = load_corpus(dir.file("c.jsonl"));
  write_corpus(c, dir.file("out.jsonl"));
  const Corpus back = load_corpus(dir.file("out.jsonl"));
  ASSERT_EQ(back.size(), c.size());
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(back.excerpts[i], c.excerpts[i]);
  EXPECT_EQ(back.excerpts[0].extra["score"], 3.5);
  EXPECT_EQ(back.excerpts[0].dataset(), "p");
  EXPECT_EQ(back.excerpts[1].dataset(), "");
}

TEST(SplitCorpus, StratifiedByLabel) {
  const Corpus c = labeled(50, 50);
  const auto [train, test] = split_corpus(c, {0.8, 3, Stratify::kLabel});
  std::map<Label, int> tr, te;
  for (const Excerpt& e : train.excerpts) ++tr[*e.true_label];
  for (const Excerpt& e : test.excerpts) ++te[*e.true_label];
  EXPECT_EQ(tr[Label::kMachine], 40);
  EXPECT_EQ(tr[Label::kHuman], 40);
  EXPECT_EQ(te[Label::kMachine], 10);
  EXPECT_EQ(te[Label::kHuman], 10);
}

TEST(SplitCorpus, DeterministicAndPartitioning) {
  const Corpus c = labeled(50, 50);
  const auto a = split_corpus(c, {0.8, 11, Stratify::kLabel});
  const auto b = split_corpus(c, {0.8, 11, Stratify::kLabel});
  EXPECT_EQ(a.first.excerpts, b.first.excerpts);
  EXPECT_EQ(a.second.excerpts, b.second.excerpts);
  std::map<std::string, int> seen;
  for (const Excerpt& e : a.first.excerpts) ++seen[e.id];
  for (const Excerpt& e : a.second.excerpts) ++seen[e.id];
  EXPECT_EQ(seen.size(), c.size());
  for (const auto& [id, n] : seen) EXPECT_EQ(n, 1) << id;
}

TEST(SplitCorpus, TinyStratumRejected) {
  const Corpus c = labeled(1, 10);
  EXPECT_THROW(split_corpus(c, {0.5, 1, Stratify::kLabel}), DomainError);
  EXPECT_THROW(split_corpus(labeled(5, 5), {1.0, 1, Stratify::kLabel}), DomainError);
  EXPECT_THROW(split_corpus(labeled(5, 5), {0.0, 1, Stratify::kLabel}), DomainError);
}

TEST(SplitCorpus, ProportionsHoldAcrossSeeds) {
  Corpus c = synthesize_demo_corpus(3, 12, 5);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    for (Stratify by : {Stratify::kLabel, Stratify::kSource, Stratify::kBoth}) {
      const auto [train, test] = split_corpus(c, {0.7, seed, by});
      ASSERT_EQ(train.size() + test.size(), c.size());
      auto key = [by](const Excerpt& e) {
        const std::string l(label_name(*e.true_label));
        if (by == Stratify::kLabel) return l;
        if (by == Stratify::kSource) return e.source;
        return l + "/" + e.source;
      };
      std::map<std::string, int> all, tr;
      for (const Excerpt& e : c.excerpts) ++all[key(e)];
      for (const Excerpt& e : train.excerpts) ++tr[key(e)];
      for (const auto& [k, n] : all) {
        EXPECT_LE(std::abs(tr[k] - 0.7 * n), 1.0) << "seed " << seed << " stratum " << k;
      }
    }
  }
}

TEST(FilterAndGroup, UseDatasetKey) {
  const Corpus c = synthesize_demo_corpus(2, 10, 7);
  const Corpus a = filter_by_source(c, "profile_a");
  EXPECT_EQ(a.size(), 20u);
  int machine = 0;
  for (const Excerpt& e : a.excerpts) machine += *e.true_label == Label::kMachine;
  EXPECT_EQ(machine, 10);
  const auto groups = group_by_dataset(c);
  ASSERT_EQ(groups.size(), 2u);
  EXPECT_EQ(groups[0].first, "profile_a");
  EXPECT_EQ(groups[1].first, "profile_b");
}

TEST(DemoCorpus, Counts) {
  const Corpus c = synthesize_demo_corpus(2, 50, 7);
  ASSERT_EQ(c.size(), 200u);
  std::map<std::string, int> by_source;
  int human = 0;
  for (const Excerpt& e : c.excerpts) {
    ++by_source[e.source];
    human += *e.true_label == Label::kHuman;
  }
  EXPECT_EQ(human, 100);
  EXPECT_EQ(by_source["profile_a"], 50);
  EXPECT_EQ(by_source["profile_b"], 50);
  EXPECT_NO_THROW(validate_corpus(c));
}

TEST(DemoCorpus, ByteIdentical) {
  EXPECT_EQ(serialize_corpus(synthesize_demo_corpus(2, 50, 7)),
            serialize_corpus(synthesize_demo_corpus(2, 50, 7)));
  EXPECT_NE(serialize_corpus(synthesize_demo_corpus(2, 50, 7)),
            serialize_corpus(synthesize_demo_corpus(2, 50, 8)));
}

TEST(DemoCorpus, InvalidCounts) {
  EXPECT_THROW(synthesize_demo_corpus(1, 50, 7), DomainError);
  EXPECT_THROW(synthesize_demo_corpus(5, 50, 7), DomainError);
  EXPECT_THROW(synthesize_demo_corpus(2, 9, 7), DomainError);
}

TEST(DemoCorpus, TerseProfileHasShorterSentences) {
  const Corpus c = synthesize_demo_corpus(2, 50, 7);
  const CorpusStats stats = fit_corpus_stats(c, default_top_words_path());
  const std::size_t k = *FeatureSchema::standard().index_of("mean_sentence_length");
  double human = 0, terse = 0;
  int nh = 0, nt = 0;
  for (const Excerpt& e : c.excerpts) {
    const double v = extract_features(e, stats).values[k];
    if (*e.true_label == Label::kHuman) {
      human += v;
      ++nh;
    } else if (e.source == "profile_a") {
      terse += v;
      ++nt;
    }
  }
  EXPECT_LT(terse / nt, human / nh);
}

TEST(DemoCorpus, VerboseProfileInflatesColonsAndQuotes) {
  const Corpus c = synthesize_demo_corpus(2, 50, 7);
  const CorpusStats stats = fit_corpus_stats(c, default_top_words_path());
  const auto& schema = FeatureSchema::standard();
  for (const char* name : {"punct_freq.colon", "punct_freq.double_quote", "word_trigram_overlap"}) {
    const std::size_t k = *schema.index_of(name);
    double human = 0, verbose = 0;
    for (const Excerpt& e : c.excerpts) {
      const double v = extract_features(e, stats).values[k];
      if (*e.true_label == Label::kHuman) human += v / 100;
      if (e.source == "profile_b") verbose += v / 50;
    }
    EXPECT_GT(verbose, human) << name;
  }
}

TEST(DemoCorpus, UpToFourProfiles) {
  const Corpus c = synthesize_demo_corpus(4, 10, 1);
  EXPECT_EQ(c.size(), 80u);
  EXPECT_EQ(group_by_dataset(c).size(), 4u);
}

}  // namespace
}  // namespace scidetect
