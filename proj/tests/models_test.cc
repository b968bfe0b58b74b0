#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "scidetect/error.h"
#include "scidetect/models.h"

namespace scidetect {
namespace {

FeatureVector fv(std::string id, std::vector<double> values) {
  FeatureVector v;
  v.excerpt_id = std::move(id);
  v.values = std::move(values);
  return v;
}

struct Toy {
  std::vector<FeatureVector> features;
  std::vector<Label> labels;
};

// Feature 0 separates the classes, feature 1 is noise-free constant offset.
Toy separable() {
  Toy t;
  for (int i = 0; i < 20; ++i) {
    const bool machine = i % 2 == 0;
    const double x = machine ? 2.0 + 0.1 * i : -2.0 - 0.1 * i;
    t.features.push_back(fv("t" + std::to_string(i), {x, 0.3 * (i % 5), 7.0}));
    t.labels.push_back(machine ? Label::kMachine : Label::kHuman);
  }
  return t;
}

Model fixed_model(std::vector<double> w, double bias) {
  Model m;
  m.id = "fixed";
  m.weights = w;
  m.bias = bias;
  m.feature_means.assign(w.size(), 0.0);
  m.feature_stds.assign(w.size(), 1.0);
  m.training_source = "all";
  return m;
}

TEST(Logistic, Values) {
  EXPECT_EQ(logistic(0.0), 0.5);
  EXPECT_NEAR(logistic(std::log(3.0)), 0.75, 1e-15);
  EXPECT_GT(logistic(800.0), 0.999);
  EXPECT_LT(logistic(-800.0), 1e-300);
  EXPECT_EQ(label_for(0.5), Label::kHuman);
  EXPECT_EQ(label_for(0.5000001), Label::kMachine);
}

TEST(Train, SeparatesToySet) {
  const Toy t = separable();
  const Model m = train_on_features(t.features, t.labels, "toy");
  EXPECT_EQ(m.dimension(), 3u);
  EXPECT_GT(m.weights[0], 0.0);
  for (std::size_t i = 0; i < t.features.size(); ++i) {
    EXPECT_EQ(predict(m, t.features[i]).label, t.labels[i]) << i;
  }
  EXPECT_EQ(m.feature_stds[2], kStdFloor);
  EXPECT_EQ(m.weights[2], 0.0);
}

TEST(Train, Deterministic) {
  const Toy t = separable();
  EXPECT_EQ(train_on_features(t.features, t.labels, "a"), train_on_features(t.features, t.labels, "a"));
}

TEST(Train, RejectsSingleClassAndBadInput) {
  Toy t = separable();
  std::vector<Label> all_machine(t.labels.size(), Label::kMachine);
  EXPECT_THROW(train_on_features(t.features, all_machine, "x"), DomainError);
  EXPECT_THROW(train_on_features({}, {}, "x"), DomainError);
  t.features[3].values.pop_back();
  EXPECT_THROW(train_on_features(t.features, t.labels, "x"), DomainError);
}

TEST(Train, InvariantToAffineFeatureScaling) {
  const Toy t = separable();
  Toy scaled = t;
  for (FeatureVector& v : scaled.features) {
    v.values[0] = 1000.0 * v.values[0] + 5.0;
    v.values[1] = 0.001 * v.values[1] - 3.0;
  }
  const Model a = train_on_features(t.features, t.labels, "a");
  const Model b = train_on_features(scaled.features, scaled.labels, "a");
  for (std::size_t i = 0; i < t.features.size(); ++i) {
    EXPECT_NEAR(predict(a, t.features[i]).prob_machine,
                predict(b, scaled.features[i]).prob_machine, 1e-6);
  }
}

TEST(Train, StrongerRegularisationShrinksWeights) {
  const Toy t = separable();
  TrainConfig loose;
  loose.l2 = 0.1;
  TrainConfig tight;
  tight.l2 = 100.0;
  EXPECT_GT(std::abs(train_on_features(t.features, t.labels, "a", loose).weights[0]),
            std::abs(train_on_features(t.features, t.labels, "a", tight).weights[0]));
}

TEST(Predict, ZeroWeightsTieIsHuman) {
  const Model m = fixed_model({0.0, 0.0}, 0.0);
  const Prediction p = predict(m, fv("x", {3.0, -1.0}));
  EXPECT_EQ(p.prob_machine, 0.5);
  EXPECT_EQ(p.label, Label::kHuman);
  EXPECT_EQ(p.excerpt_id, "x");
}

TEST(Predict, MarginLn3) {
  const Model m = fixed_model({1.0}, 0.0);
  const Prediction p = predict(m, fv("x", {std::log(3.0)}));
  EXPECT_NEAR(p.prob_machine, 0.75, 1e-15);
  EXPECT_EQ(p.label, Label::kMachine);
}

TEST(Predict, SchemaMismatch) {
  const Model m = fixed_model({1.0, 2.0}, 0.0);
  EXPECT_THROW(predict(m, fv("x", {1.0})), DomainError);
  FeatureVector other = fv("x", {1.0, 2.0});
  other.schema_version = "scidetect-features/0";
  EXPECT_THROW(predict(m, other), DomainError);
}

TEST(Metrics, AucCases) {
  const std::vector<Label> truth{Label::kMachine, Label::kMachine, Label::kHuman, Label::kHuman};
  EXPECT_EQ(*auc_mann_whitney(std::vector<double>{0.9, 0.8, 0.2, 0.1}, truth), 1.0);
  EXPECT_EQ(*auc_mann_whitney(std::vector<double>{0.1, 0.2, 0.8, 0.9}, truth), 0.0);
  EXPECT_EQ(*auc_mann_whitney(std::vector<double>{0.5, 0.5, 0.5, 0.5}, truth), 0.5);
  EXPECT_EQ(*auc_mann_whitney(std::vector<double>{0.9, 0.3, 0.5, 0.1}, truth), 0.75);
  EXPECT_FALSE(auc_mann_whitney(std::vector<double>{0.1, 0.2},
                                std::vector<Label>{Label::kHuman, Label::kHuman})
                   .has_value());
}

TEST(Metrics, Accuracy) {
  const std::vector<Label> truth{Label::kMachine, Label::kHuman, Label::kHuman};
  const Metrics m = compute_metrics(std::vector<double>{0.9, 0.5, 0.7}, truth);
  EXPECT_NEAR(m.accuracy, 2.0 / 3.0, 1e-15);
  EXPECT_EQ(m.n, 3u);
  EXPECT_THROW(compute_metrics(std::vector<double>{}, std::vector<Label>{}), DomainError);
}

TEST(Serialize, RoundTripAndTamper) {
  const Toy t = separable();
  Model m = train_on_features(t.features, t.labels, "toy");
  m.training_ids = {"t0", "t1"};
  const nlohmann::json doc = model_to_json(m);
  EXPECT_EQ(model_from_json(doc), m);
  EXPECT_EQ(doc.at("hash").get<std::string>(), model_hash(m));

  nlohmann::json tampered = doc;
  tampered["bias"] = m.bias + 1.0;
  EXPECT_THROW(model_from_json(tampered), ParseError);
  nlohmann::json missing = doc;
  missing.erase("weights");
  EXPECT_THROW(model_from_json(missing), ParseError);
  nlohmann::json old = doc;
  old.erase("training_ids");
  old["hash"] = "0";
  EXPECT_THROW(model_from_json(old), ParseError);

  const auto path = std::filesystem::temp_directory_path() / "scidetect_models_test.json";
  save_model(m, path);
  EXPECT_EQ(load_model(path), m);
  {
    std::ofstream(path) << "{ not json";
  }
  EXPECT_THROW(load_model(path), ParseError);
  std::filesystem::remove(path);
  EXPECT_THROW(load_model(path), IoError);
}

}  // namespace
}  // namespace scidetect
