#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scidetect/error.h"
#include "scidetect/explain.h"

namespace scidetect {
namespace {

FeatureVector fv(std::string id, std::vector<double> values) {
  FeatureVector v;
  v.excerpt_id = std::move(id);
  v.values = std::move(values);
  return v;
}

// Interventional Shapley values by enumerating every feature ordering.
std::vector<double> brute_force_shapley(const MarginFn& f, const std::vector<double>& x,
                                        const std::vector<FeatureVector>& background) {
  const std::size_t m = x.size();
  auto value = [&](const std::vector<char>& in) {
    double total = 0.0;
    std::vector<double> h(m);
    for (const FeatureVector& b : background) {
      for (std::size_t k = 0; k < m; ++k) h[k] = in[k] ? x[k] : b.values[k];
      total += f(h);
    }
    return total / static_cast<double>(background.size());
  };
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> phi(m, 0.0);
  double perms = 0.0;
  do {
    std::vector<char> in(m, 0);
    double before = value(in);
    for (std::size_t k : order) {
      in[k] = 1;
      const double after = value(in);
      phi[k] += after - before;
      before = after;
    }
    perms += 1.0;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& p : phi) p /= perms;
  return phi;
}

Model fixed_model(std::vector<double> w, double bias, std::vector<double> means,
                  std::vector<double> stds) {
  Model m;
  m.id = "lin";
  m.weights = std::move(w);
  m.bias = bias;
  m.feature_means = std::move(means);
  m.feature_stds = std::move(stds);
  return m;
}

TEST(LinearShap, Definition) {
  const Model m = fixed_model({2.0, -1.0}, 0.5, {1.0, 0.0}, {2.0, 1.0});
  const ContributionVector cv = linear_shap(m, fv("x", {5.0, 3.0}));
  EXPECT_EQ(cv.values, (std::vector<double>{4.0, -3.0}));
  EXPECT_EQ(cv.base_value, 0.5);
  EXPECT_EQ(cv.model_id, "lin");
  EXPECT_EQ(cv.excerpt_id, "x");
  EXPECT_DOUBLE_EQ(cv.margin(), m.margin(fv("x", {5.0, 3.0})));
}

TEST(LinearShap, DummyFeatureIsZero) {
  const Model m = fixed_model({1.5, 0.0, -0.5}, 0.0, {0, 0, 0}, {1, 1, 1});
  EXPECT_EQ(linear_shap(m, fv("x", {1.0, 9.0, 2.0})).values[1], 0.0);
}

TEST(KernelShap, MatchesBruteForceOnTwoFeatures) {
  const MarginFn f = [](std::span<const double> x) { return x[0] * x[1] + 2.0 * x[0]; };
  const std::vector<FeatureVector> bg{fv("b0", {0.0, 1.0}), fv("b1", {1.0, -1.0}),
                                      fv("b2", {-2.0, 0.5})};
  const FeatureVector x = fv("x", {3.0, 2.0});
  const ContributionVector cv = kernel_shap_margin(f, x, bg, 16, 1);
  const std::vector<double> exact = brute_force_shapley(f, x.values, bg);
  for (std::size_t k = 0; k < 2; ++k) EXPECT_NEAR(cv.values[k], exact[k], 1e-10);
  EXPECT_NEAR(cv.margin(), f(x.values), 1e-12);
}

TEST(KernelShap, ApproximatesBruteForceWithInteractions) {
  const MarginFn f = [](std::span<const double> x) {
    return x[0] * x[1] - 0.5 * x[2] * x[3] + std::tanh(x[1] + x[2]);
  };
  std::vector<FeatureVector> bg;
  for (int i = 0; i < 8; ++i) {
    bg.push_back(fv("b" + std::to_string(i),
                    {0.1 * i, 1.0 - 0.2 * i, std::sin(i), std::cos(2.0 * i)}));
  }
  const FeatureVector x = fv("x", {1.5, -0.5, 2.0, 1.0});
  const std::vector<double> exact = brute_force_shapley(f, x.values, bg);
  const ContributionVector cv = kernel_shap_margin(f, x, bg, 4096, 9);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(cv.values[k], exact[k], 0.05) << k;
  EXPECT_NEAR(cv.margin(), f(x.values), 1e-10);
}

TEST(KernelShap, LinearModelIsExact) {
  const Model m = fixed_model({1.0, -2.0, 0.5, 0.0}, 0.3, {0, 1, 2, 3}, {1, 2, 1, 1});
  const MarginFn f = [&m](std::span<const double> x) {
    return m.margin_of_standardized(m.standardize(x));
  };
  const std::vector<FeatureVector> bg{fv("m", {0.0, 1.0, 2.0, 3.0})};
  const FeatureVector x = fv("x", {2.0, 3.0, -1.0, 8.0});
  const ContributionVector kernel = kernel_shap_margin(f, x, bg, 64, 3);
  const ContributionVector exact = linear_shap(m, x);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(kernel.values[k], exact.values[k], 1e-9);
  EXPECT_NEAR(kernel.base_value, exact.base_value, 1e-12);
}

TEST(KernelShap, SymmetryAndConstant) {
  const MarginFn sym = [](std::span<const double> x) { return x[0] * x[1]; };
  const std::vector<FeatureVector> bg{fv("b", {0.0, 0.0})};
  const ContributionVector cv = kernel_shap_margin(sym, fv("x", {2.0, 2.0}), bg, 8, 5);
  EXPECT_NEAR(cv.values[0], cv.values[1], 1e-12);
  EXPECT_NEAR(cv.values[0], 2.0, 1e-12);

  const ProbabilityFn constant = [](std::span<const double>) { return 0.7; };
  const ContributionVector c = kernel_shap(constant, fv("x", {1.0, 2.0, 3.0}),
                                           std::vector<FeatureVector>{fv("b", {0, 0, 0})}, 12, 2);
  for (double v : c.values) EXPECT_NEAR(v, 0.0, 1e-12);
  EXPECT_NEAR(c.base_value, std::log(0.7 / 0.3), 1e-12);
}

TEST(KernelShap, DeterministicAndValidated) {
  const MarginFn f = [](std::span<const double> x) { return x[0] * x[1] * x[2]; };
  const std::vector<FeatureVector> bg{fv("b", {1.0, 0.0, -1.0}), fv("c", {0.5, 0.5, 0.5})};
  const FeatureVector x = fv("x", {1.0, 2.0, 3.0});
  EXPECT_EQ(kernel_shap_margin(f, x, bg, 32, 4), kernel_shap_margin(f, x, bg, 32, 4));
  EXPECT_THROW(kernel_shap_margin(f, x, bg, 5, 4), DomainError);
  EXPECT_THROW(kernel_shap_margin(f, x, std::vector<FeatureVector>{}, 32, 4), DomainError);
}

TEST(SampleBackground, SizeAndDeterminism) {
  std::vector<FeatureVector> pool;
  for (int i = 0; i < 30; ++i) pool.push_back(fv("p" + std::to_string(i), {double(i)}));
  const auto a = sample_background(pool, 10, 3);
  EXPECT_EQ(a.size(), 10u);
  EXPECT_EQ(a, sample_background(pool, 10, 3));
  EXPECT_EQ(sample_background(pool, 100, 3).size(), 30u);
}

TEST(Group, SumsAreExact) {
  const FeatureSchema& schema = FeatureSchema::standard();
  ContributionVector cv;
  for (std::size_t k = 0; k < schema.size(); ++k) cv.values.push_back(0.25 * static_cast<double>(k % 7) - 0.5);
  const GroupedContributions g = group_contributions(cv, schema);
  double sub = 0.0;
  for (double v : g.per_subcategory) sub += v;
  double dim = 0.0;
  for (double v : g.per_dimension) dim += v;
  EXPECT_DOUBLE_EQ(sub, cv.total());
  EXPECT_DOUBLE_EQ(dim, cv.total());
  EXPECT_DOUBLE_EQ(g.dimension(Dimension::kSyntax),
                   g.subcategory(Subcategory::kGrammaticalIssues) +
                       g.subcategory(Subcategory::kTextStructure) +
                       g.subcategory(Subcategory::kReadability));
  cv.values.pop_back();
  EXPECT_THROW(group_contributions(cv, schema), DomainError);
}

TEST(Percentile, LinearInterpolation) {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  EXPECT_NEAR(percentile_sorted(v, 0.05), 5.95, 1e-12);
  EXPECT_NEAR(percentile_sorted(v, 0.95), 95.05, 1e-12);
  EXPECT_EQ(percentile_sorted(std::vector<double>{4.0}, 0.95), 4.0);
  EXPECT_THROW(percentile_sorted(std::vector<double>{}, 0.5), DomainError);
}

TEST(Cohort, TopKByCosineWithIdTies) {
  const std::vector<FeatureVector> train{fv("d", {1.0, 0.0}), fv("c", {2.0, 0.0}),
                                         fv("a", {0.0, 1.0}), fv("b", {1.0, 1.0}),
                                         fv("x", {1.0, 0.0})};
  const Cohort c = build_cohort(fv("x", {1.0, 0.0}), train, 3);
  EXPECT_EQ(c.anchor_id, "x");
  EXPECT_EQ(c.member_ids, (std::vector<std::string>{"c", "d", "b"}));
  EXPECT_EQ(build_cohort(fv("x", {1.0, 0.0}), train, 50).member_ids.size(), 4u);
  EXPECT_THROW(build_cohort(fv("x", {1.0, 0.0}), std::vector<FeatureVector>{}), DomainError);
}

TEST(Cohort, ReferenceBoundsPerLabel) {
  const FeatureSchema& schema = FeatureSchema::standard();
  const std::size_t k = *schema.index_of("word_count");
  Corpus corpus;
  std::vector<FeatureVector> fvs;
  Cohort cohort;
  for (int i = 1; i <= 20; ++i) {
    const std::string id = "e" + std::to_string(i);
    const Label label = i <= 10 ? Label::kMachine : Label::kHuman;
    corpus.excerpts.push_back({id, "", "body", label, "s"});
    std::vector<double> values(schema.size(), 0.0);
    values[k] = static_cast<double>(i);
    fvs.push_back(fv(id, values));
    cohort.member_ids.push_back(id);
  }
  FeatureIndex index;
  for (const FeatureVector& v : fvs) index[v.excerpt_id] = &v;
  const ReferenceBounds r = cohort_reference(cohort, "word_count", corpus, index);
  ASSERT_TRUE(r.machine && r.human);
  EXPECT_NEAR(r.machine->lower, 1.45, 1e-12);
  EXPECT_NEAR(r.machine->upper, 9.55, 1e-12);
  EXPECT_NEAR(r.human->lower, 11.45, 1e-12);
  EXPECT_EQ(r.human->count, 10u);

  std::reverse(cohort.member_ids.begin(), cohort.member_ids.end());
  const ReferenceBounds again = cohort_reference(cohort, "word_count", corpus, index);
  EXPECT_EQ(*again.machine, *r.machine);

  cohort.member_ids.resize(5);
  EXPECT_FALSE(cohort_reference(cohort, "word_count", corpus, index).machine.has_value());
  EXPECT_THROW(cohort_reference(cohort, "nope", corpus, index), DomainError);
  corpus.excerpts[19].true_label.reset();
  EXPECT_THROW(cohort_reference(cohort, "word_count", corpus, index), DomainError);
}

TEST(Json, Layout) {
  ContributionVector cv;
  cv.excerpt_id = "e";
  cv.model_id = "m";
  cv.values.assign(FeatureSchema::standard().size(), 0.01);
  const nlohmann::json doc =
      contribution_to_json(cv, group_contributions(cv, FeatureSchema::standard()));
  EXPECT_EQ(doc.at("values").size(), 109u);
  EXPECT_EQ(doc.at("groups").at("per_dimension").size(), 3u);
  EXPECT_EQ(doc.at("groups").at("per_subcategory").size(), 8u);
}

}  // namespace
}  // namespace scidetect
