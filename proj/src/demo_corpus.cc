#include "scidetect/demo_corpus.h"

#include <array>
#include <cctype>
#include <cstdio>

#include "scidetect/error.h"
#include "scidetect/rng.h"

namespace scidetect {

namespace {

using Pool = std::vector<std::string>;

struct Topic {
  std::string phrase;  // lowercase noun phrase used in bodies
  std::string title;   // title-case form
};

const std::vector<Topic>& topics() {
  static const std::vector<Topic> kTopics = {
      {"volume rendering", "Volume Rendering"},
      {"graph layout", "Graph Layout"},
      {"uncertainty visualization", "Uncertainty Visualization"},
      {"time series analysis", "Time Series Analysis"},
      {"trajectory data", "Trajectory Data"},
      {"text visualization", "Text Visualization"},
      {"network exploration", "Network Exploration"},
      {"flow visualization", "Flow Visualization"},
      {"multivariate data", "Multivariate Data"},
      {"scatterplot design", "Scatterplot Design"},
      {"treemap layouts", "Treemap Layouts"},
      {"parallel coordinates", "Parallel Coordinates"},
      {"visual analytics", "Visual Analytics"},
      {"dimensionality reduction", "Dimensionality Reduction"},
      {"tensor field analysis", "Tensor Field Analysis"},
      {"isosurface extraction", "Isosurface Extraction"},
      {"geospatial mapping", "Geospatial Mapping"},
      {"event sequence analysis", "Event Sequence Analysis"},
      {"model explanation", "Model Explanation"},
      {"dashboard design", "Dashboard Design"},
      {"color mapping", "Color Mapping"},
      {"provenance tracking", "Provenance Tracking"},
      {"ensemble simulation data", "Ensemble Simulation Data"},
      {"hierarchical clustering", "Hierarchical Clustering"},
      {"narrative visualization", "Narrative Visualization"},
      {"sensemaking workflows", "Sensemaking Workflows"},
      {"streaming data", "Streaming Data"},
      {"molecular visualization", "Molecular Visualization"},
      {"topic modeling", "Topic Modeling"},
      {"cohort comparison", "Cohort Comparison"},
  };
  return kTopics;
}

const Pool kDomains = {"Medical Imaging", "Climate Science", "Social Media",
                       "Urban Mobility", "Software Engineering", "Genomics",
                       "Finance", "Cybersecurity", "Education", "Astronomy",
                       "Sports Analytics", "Digital Humanities",
                       "Manufacturing", "Epidemiology", "Journalism"};
const Pool kTitleAdjectives = {"Interactive", "Scalable", "Progressive",
                               "Guided", "Exploratory", "Adaptive",
                               "Comparative", "Immersive", "Robust",
                               "Visual"};

const Pool kAdjectives = {"interactive", "scalable", "novel", "flexible",
                          "efficient", "unified", "lightweight", "robust",
                          "expressive", "adaptive", "modular", "principled",
                          "practical", "coherent", "transparent"};
const Pool kArtifacts = {"framework", "technique", "system", "approach",
                         "pipeline", "toolkit", "prototype", "workflow",
                         "model", "method"};
const Pool kFields = {"visualization research", "scientific computing",
                      "data science", "human-computer interaction",
                      "information retrieval", "computational biology",
                      "machine learning practice", "public health"};
const Pool kShortcomings = {
    "struggle to scale beyond a few thousand items",
    "ignore the uncertainty of the underlying measurements",
    "require substantial manual tuning by domain experts",
    "hide important structure behind visual clutter",
    "fail to support iterative exploration",
    "offer little guidance for novice analysts",
    "neglect the temporal context of the data",
    "rely on assumptions that rarely hold in practice"};
const Pool kReasons = {
    "analysts must reconcile heterogeneous sources under time pressure",
    "the data volume grows faster than screen space",
    "experts disagree about which patterns matter",
    "current tools separate exploration from reporting",
    "interaction costs accumulate over long sessions",
    "visual encodings interfere with each other at high density"};
const Pool kVerbs = {"present", "introduce", "propose", "develop", "describe",
                     "contribute"};
const Pool kCapabilities = {
    "summarizes large collections", "reveals hidden correlations",
    "supports progressive refinement", "links overview and detail",
    "highlights anomalous regions", "guides attention to salient changes",
    "tracks analytic provenance", "compares alternative hypotheses",
    "encodes uncertainty explicitly", "reduces visual clutter"};
const Pool kObjects = {"across multiple scales", "without sacrificing accuracy",
                       "in real time", "for collaborative teams",
                       "on commodity hardware", "with minimal configuration",
                       "within a single coordinated view",
                       "under changing requirements"};
const Pool kTechniques = {
    "a density-based aggregation scheme", "an incremental layout algorithm",
    "a learned similarity metric", "a hierarchical sampling strategy",
    "linked brushing across coordinated views",
    "a perceptually uniform color scheme", "an adaptive level-of-detail model",
    "a constraint-based placement method", "a probabilistic ranking model",
    "a sketch-based query interface"};
const Pool kBenefits = {"keeps interaction latency low",
                        "preserves the salient structure of the data",
                        "lets analysts verify intermediate results",
                        "avoids misleading visual artifacts",
                        "scales to millions of records",
                        "remains faithful to expert mental models"};
const Pool kEvaluations = {"a controlled user study", "two case studies",
                           "expert interviews", "a quantitative benchmark",
                           "a longitudinal field deployment",
                           "a crowdsourced experiment"};
const Pool kParticipants = {"participants", "domain experts", "analysts",
                            "graduate students", "practitioners"};
const Pool kMetrics = {"task completion time", "answer accuracy",
                       "layout quality", "user confidence", "rendering speed",
                       "recall of relevant items"};
const Pool kBaselines = {"the state of the art", "a standard baseline",
                         "existing commercial tools", "prior techniques",
                         "manual inspection"};
const Pool kFuture = {"future interactive systems", "broader deployment",
                      "reproducible evaluation", "teaching visualization",
                      "accessible design"};
const Pool kExamples = {"brushing", "filtering", "zooming", "annotation",
                        "aggregation", "clustering"};

// Verbose profile vocabulary: rare, long words.
const Pool kOrnateAdjectives = {
    "multifaceted", "paradigmatic", "heterogeneous", "spatiotemporal",
    "methodological", "epistemological", "quintessential", "unprecedented",
    "multidimensional", "sophisticated", "interdisciplinary",
    "transformative"};
const Pool kOrnateNouns = {
    "operationalization", "conceptualization", "infrastructure",
    "methodology", "interoperability", "capabilities", "affordances",
    "considerations", "representations", "characterization",
    "orchestration", "instantiation"};
const Pool kOrnateVerbs = {"revolutionizes", "operationalizes", "reconceptualizes",
                           "facilitates", "orchestrates", "amplifies",
                           "democratizes", "synthesizes"};
const Pool kQuoted = {"insight-first", "human-centered", "data-driven",
                      "analytic fluency", "visual literacy", "explainable"};

// Terse profile: a deliberately tiny vocabulary.
const Pool kTerseAdjectives = {"new", "good", "simple", "fast"};
const Pool kTerseSentences = {
    "We study {T}.",
    "{Tc} is important.",
    "{Tc} is hard.",
    "We propose a {a} method.",
    "The method is {a}.",
    "The method is easy to use.",
    "We test the method on {T}.",
    "The results are good.",
    "The method works well.",
    "Users like the method.",
    "The method helps users.",
    "We show the results.",
    "It is a {a} way to study {T}.",
    "The method is better than other methods.",
};

// Hedged profile.
const Pool kHedges = {"arguably", "remarkably", "notably", "undoubtedly",
                      "significantly", "essentially", "fundamentally",
                      "incredibly"};

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string article(const std::string& next) {
  const char c = next.empty() ? 'x' : static_cast<char>(std::tolower(static_cast<unsigned char>(next[0])));
  return (c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u') ? "an" : "a";
}

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (std::size_t p = s.find(from); p != std::string::npos; p = s.find(from, p + to.size())) {
    s.replace(p, from.size(), to);
  }
  return s;
}

class Writer {
 public:
  Writer(Rng& rng, const Topic& topic) : rng_(rng), topic_(topic) {}

  const std::string& pick(const Pool& pool) { return rng_.pick(pool); }
  std::string adj_artifact() {
    const std::string& adj = pick(kAdjectives);
    return article(adj) + " " + adj + " " + pick(kArtifacts);
  }
  std::string number(int lo, int hi) {
    return std::to_string(lo + static_cast<int>(rng_.below(static_cast<std::uint64_t>(hi - lo + 1))));
  }

  std::string background() {
    std::string s = capitalize(topic_.phrase) + " is " + (rng_.bernoulli(0.5) ? "a central" : "an increasingly common") +
                    " problem in " + pick(kFields) + ", yet existing " + pick(kArtifacts) +
                    "s often " + pick(kShortcomings);
    if (rng_.bernoulli(0.3)) s += " (e.g., " + pick(kExamples) + " and " + pick(kExamples) + ")";
    return s + ".";
  }
  std::string gap() {
    return "However, supporting " + topic_.phrase + " remains difficult because " +
           pick(kReasons) + ".";
  }
  std::string contribution() {
    std::string s = "In this paper, we " + pick(kVerbs) + " " + adj_artifact() + " that " +
                    pick(kCapabilities) + " " + pick(kObjects);
    if (rng_.bernoulli(0.5)) s += " and " + pick(kCapabilities);
    return s + ".";
  }
  std::string method() {
    std::string s = "Our " + pick(kArtifacts) + " combines " + pick(kTechniques) + " with " +
                    pick(kTechniques);
    if (rng_.bernoulli(0.6)) s += ", which " + pick(kBenefits);
    return s + ".";
  }
  std::string evaluation() {
    std::string s = "We evaluate the " + pick(kArtifacts) + " through " + pick(kEvaluations) +
                    " with " + number(8, 24) + " " + pick(kParticipants);
    if (rng_.bernoulli(0.5)) s += " and " + pick(kEvaluations);
    return s + ".";
  }
  std::string result() {
    return "The results show that our " + pick(kArtifacts) + " improves " + pick(kMetrics) +
           " by " + number(9, 41) + " percent compared to " + pick(kBaselines) + ".";
  }
  std::string closing() {
    std::string s = "We also discuss implications of " + topic_.phrase + " for " + pick(kFuture);
    if (rng_.bernoulli(0.15)) s += ": " + pick(kExamples) + " and " + pick(kExamples);
    return s + ".";
  }

  std::vector<std::string> human_sentences() {
    std::vector<std::string> out = {background(), gap(), contribution(), method()};
    if (rng_.bernoulli(0.5)) out.push_back(method());
    out.push_back(evaluation());
    out.push_back(result());
    if (rng_.bernoulli(0.7)) out.push_back(closing());
    return out;
  }

  // Profile A.
  std::vector<std::string> terse_sentences() {
    const std::size_t n = 8 + rng_.below(4);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) {
      std::string s = pick(kTerseSentences);
      s = replace_all(s, "{Tc}", capitalize(topic_.phrase));
      s = replace_all(s, "{T}", topic_.phrase);
      s = replace_all(s, "{a}", pick(kTerseAdjectives));
      s = replace_all(s, "a a", "a");
      out.push_back(s);
    }
    return out;
  }

  // Profile B.
  std::vector<std::string> verbose_sentences() {
    auto ornate = [&] { return pick(kOrnateAdjectives) + " " + pick(kOrnateNouns); };
    std::vector<std::string> out;
    out.push_back("In this work, the proposed framework " + pick(kOrnateVerbs) + " the " + ornate() +
                  " of " + topic_.phrase + ", and it " + pick(kOrnateVerbs) + " the " + ornate() +
                  " that " + pick(kCapabilities) + " " + pick(kObjects) + "; moreover, it " +
                  pick(kOrnateVerbs) + " " + ornate() + " through " + pick(kTechniques) + ".");
    out.push_back("Our contributions are threefold: " + ornate() + ", " + ornate() + ", and " +
                  ornate() + " that together establish what we term the \"" + pick(kQuoted) +
                  "\" paradigm for " + topic_.phrase + " within " + pick(kFields) +
                  " and beyond.");
    out.push_back("In this work, the proposed framework leverages " + pick(kTechniques) +
                  " alongside " + pick(kTechniques) + ", which " + pick(kBenefits) +
                  ", while simultaneously offering " + ornate() + " and " + ornate() +
                  " that conventional " + pick(kArtifacts) + "s cannot provide.");
    out.push_back("Specifically: the proposed framework " + pick(kOrnateVerbs) + " the \"" +
                  pick(kQuoted) + "\" perspective, " + pick(kOrnateVerbs) + " " + ornate() +
                  ", and " + pick(kOrnateVerbs) + " " + ornate() + " for " +
                  pick(kParticipants) + " engaged in " + topic_.phrase + ".");
    out.push_back("In this work, " + pick(kEvaluations) + " demonstrates that the proposed framework " +
                  pick(kOrnateVerbs) + " " + pick(kMetrics) + " and " + pick(kMetrics) +
                  " by " + number(30, 60) + " percent, thereby demonstrating " + ornate() +
                  " of unprecedented " + pick(kOrnateNouns) + ".");
    return out;
  }

  // Profile C.
  std::vector<std::string> drifting_sentences(const Topic& other) {
    Writer drift(rng_, other);
    std::vector<std::string> out;
    const std::size_t n = 6 + rng_.below(3);
    for (std::size_t i = 0; i < n; ++i) {
      Writer& w = (i % 2 == 0) ? drift : *this;
      std::string s;
      switch (rng_.below(4)) {
        case 0: s = w.method(); break;
        case 1: s = w.result(); break;
        case 2: s = w.evaluation(); break;
        default: s = w.gap(); break;
      }
      s.pop_back();
      s += " — " + pick(kFuture) + " aside — remains open.";
      out.push_back(s);
    }
    return out;
  }

  // Profile D.
  std::vector<std::string> hedged_sentences() {
    std::vector<std::string> out;
    for (std::string s : human_sentences()) {
      s.pop_back();
      std::string hedged = capitalize(pick(kHedges)) + ", " + s.substr(0, 1);
      hedged[hedged.size() - 1] =
          static_cast<char>(std::tolower(static_cast<unsigned char>(hedged.back())));
      hedged += s.substr(1) + " (" + pick(kHedges) + " so)";
      hedged += rng_.bernoulli(0.5) ? "!" : ".";
      out.push_back(hedged);
    }
    return out;
  }

 private:
  Rng& rng_;
  const Topic& topic_;
};

std::string join_sentences(const std::vector<std::string>& sentences,
                           std::size_t paragraph_break) {
  std::string body;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (i > 0) body += (i == paragraph_break) ? "\n\n" : " ";
    body += sentences[i];
  }
  return body;
}

std::string padded(int k) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%03d", k);
  return buf;
}

}  // namespace

std::vector<std::string> demo_profile_sources(int profile_count) {
  static const std::array<const char*, kMaxDemoProfiles> kNames = {
      "profile_a", "profile_b", "profile_c", "profile_d"};
  std::vector<std::string> out;
  for (int p = 0; p < profile_count && p < kMaxDemoProfiles; ++p) out.emplace_back(kNames[p]);
  return out;
}

Corpus synthesize_demo_corpus(int profile_count, int per_profile, std::uint64_t seed) {
  if (profile_count < 2 || profile_count > kMaxDemoProfiles) {
    throw DomainError("profile_count must be between 2 and " +
                      std::to_string(kMaxDemoProfiles));
  }
  if (per_profile < 10) throw DomainError("per_profile must be at least 10");
  const std::vector<std::string> sources = demo_profile_sources(profile_count);
  Corpus corpus;
  corpus.name = "demo";
  Rng rng(seed);
  const auto& all_topics = topics();
  for (int p = 0; p < profile_count; ++p) {
    for (int k = 0; k < per_profile; ++k) {
      const Topic& topic = rng.pick(all_topics);
      const std::string title = rng.pick(kTitleAdjectives) + " " + topic.title + " for " +
                                rng.pick(kDomains);
      Writer writer(rng, topic);

      Excerpt human;
      human.id = "human-" + std::to_string(p) + "-" + padded(k);
      human.title = title;
      const std::vector<std::string> hs = writer.human_sentences();
      const std::size_t brk = rng.bernoulli(0.2) ? hs.size() / 2 : hs.size();
      human.body = join_sentences(hs, brk);
      human.true_label = Label::kHuman;
      human.source = "human";
      human.extra["dataset"] = sources[p];

      Excerpt machine;
      machine.id = sources[p] + "-" + padded(k);
      machine.title = title;
      std::vector<std::string> ms;
      switch (p) {
        case 0: ms = writer.terse_sentences(); break;
        case 1: ms = writer.verbose_sentences(); break;
        case 2: ms = writer.drifting_sentences(rng.pick(all_topics)); break;
        default: ms = writer.hedged_sentences(); break;
      }
      machine.body = join_sentences(ms, ms.size());
      machine.true_label = Label::kMachine;
      machine.source = sources[p];
      machine.extra["dataset"] = sources[p];

      corpus.excerpts.push_back(std::move(human));
      corpus.excerpts.push_back(std::move(machine));
    }
  }
  return corpus;
}

}  // namespace scidetect
