#include "scidetect/models.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "scidetect/error.h"
#include "scidetect/io.h"
#include "scidetect/rng.h"

namespace scidetect {

namespace {

// log(1 + exp(m)) without overflow.
double softplus(double m) { return std::max(m, 0.0) + std::log1p(std::exp(-std::abs(m))); }

void check_schema(const Model& model, std::string_view version, std::size_t size) {
  if (version != model.schema_version) {
    throw DomainError("feature schema \"" + std::string(version) +
                      "\" does not match model schema \"" + model.schema_version + "\"");
  }
  if (size != model.dimension()) {
    throw DomainError("feature vector has " + std::to_string(size) + " entries, model expects " +
                      std::to_string(model.dimension()));
  }
}

struct Objective {
  const Eigen::MatrixXd& z;
  const Eigen::VectorXd& y;
  double l2;

  double value(const Eigen::VectorXd& w, double b) const {
    const Eigen::VectorXd m = (z * w).array() + b;
    double loss = 0.0;
    for (Eigen::Index i = 0; i < m.size(); ++i) loss += softplus(m[i]) - y[i] * m[i];
    const double n = static_cast<double>(z.rows());
    return loss / n + 0.5 * l2 / n * w.squaredNorm();
  }

  void gradient(const Eigen::VectorXd& w, double b, Eigen::VectorXd& gw, double& gb) const {
    const Eigen::VectorXd m = (z * w).array() + b;
    Eigen::VectorXd r(m.size());
    for (Eigen::Index i = 0; i < m.size(); ++i) r[i] = logistic(m[i]) - y[i];
    const double n = static_cast<double>(z.rows());
    gw = z.transpose() * r / n + l2 / n * w;
    gb = r.sum() / n;
  }
};

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json model_fields(const Model& m) {
  nlohmann::json doc;
  doc["id"] = m.id;
  doc["weights"] = m.weights;
  doc["bias"] = m.bias;
  doc["means"] = m.feature_means;
  doc["stds"] = m.feature_stds;
  doc["training_source"] = m.training_source;
  doc["training_set_ref"] = m.training_set_ref;
  doc["training_ids"] = m.training_ids;
  doc["schema_version"] = m.schema_version;
  return doc;
}

template <typename T>
T field(const nlohmann::json& doc, const char* name) {
  auto it = doc.find(name);
  if (it == doc.end()) throw ParseError(std::string("model file lacks \"") + name + "\"", 0);
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError(std::string("model field \"") + name + "\" has the wrong type", 0);
  }
}

}  // namespace

double logistic(double margin) {
  if (margin >= 0) return 1.0 / (1.0 + std::exp(-margin));
  const double e = std::exp(margin);
  return e / (1.0 + e);
}

Label label_for(double prob_machine) {
  return prob_machine > 0.5 ? Label::kMachine : Label::kHuman;
}

std::vector<double> Model::standardize(const FeatureVector& fv) const {
  check_schema(*this, fv.schema_version, fv.values.size());
  return standardize(std::span<const double>(fv.values));
}

std::vector<double> Model::standardize(std::span<const double> values) const {
  if (values.size() != dimension()) {
    throw DomainError("feature vector has " + std::to_string(values.size()) +
                      " entries, model expects " + std::to_string(dimension()));
  }
  std::vector<double> z(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    z[k] = (values[k] - feature_means[k]) / feature_stds[k];
  }
  return z;
}

double Model::margin_of_standardized(std::span<const double> z) const {
  double m = bias;
  for (std::size_t k = 0; k < z.size(); ++k) m += weights[k] * z[k];
  return m;
}

double Model::margin(const FeatureVector& fv) const {
  return margin_of_standardized(standardize(fv));
}

Model train_on_features(std::span<const FeatureVector> features, std::span<const Label> labels,
                        std::string id, const TrainConfig& config) {
  if (features.size() != labels.size()) throw DomainError("features/labels length mismatch");
  if (features.empty()) throw DomainError("training set is empty");
  const bool has_machine = std::find(labels.begin(), labels.end(), Label::kMachine) != labels.end();
  const bool has_human = std::find(labels.begin(), labels.end(), Label::kHuman) != labels.end();
  if (!has_machine || !has_human) {
    throw DomainError("training set must contain both machine and human excerpts");
  }
  if (config.l2 < 0 || config.max_iter < 0 || config.tol < 0) {
    throw DomainError("invalid training configuration");
  }
  const std::size_t n = features.size();
  const std::size_t d = features.front().values.size();
  for (const FeatureVector& fv : features) {
    if (fv.values.size() != d || fv.schema_version != features.front().schema_version) {
      throw DomainError("training features disagree on schema");
    }
  }

  Model model;
  model.id = std::move(id);
  model.schema_version = features.front().schema_version;
  model.feature_means.assign(d, 0.0);
  model.feature_stds.assign(d, 0.0);
  for (const FeatureVector& fv : features) {
    for (std::size_t k = 0; k < d; ++k) model.feature_means[k] += fv.values[k];
  }
  for (double& m : model.feature_means) m /= static_cast<double>(n);
  for (const FeatureVector& fv : features) {
    for (std::size_t k = 0; k < d; ++k) {
      const double dev = fv.values[k] - model.feature_means[k];
      model.feature_stds[k] += dev * dev;
    }
  }
  for (double& s : model.feature_stds) {
    s = std::max(std::sqrt(s / static_cast<double>(n)), kStdFloor);
  }

  Eigen::MatrixXd z(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          (features[i].values[k] - model.feature_means[k]) / model.feature_stds[k];
    }
    y[static_cast<Eigen::Index>(i)] = labels[i] == Label::kMachine ? 1.0 : 0.0;
  }

  const Objective objective{z, y, config.l2};
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  double b = 0.0;
  Eigen::VectorXd gw;
  double gb = 0.0;
  double step = 1.0;
  double current = objective.value(w, b);
  for (int iter = 0; iter < config.max_iter; ++iter) {
    objective.gradient(w, b, gw, gb);
    const double grad_sq = gw.squaredNorm() + gb * gb;
    if (std::sqrt(grad_sq) < config.tol) break;
    step = std::min(step * 2.0, 1e3);
    Eigen::VectorXd w_next;
    double b_next = 0.0;
    double next = 0.0;
    while (true) {
      w_next = w - step * gw;
      b_next = b - step * gb;
      next = objective.value(w_next, b_next);
      if (next <= current - 0.5 * step * grad_sq || step < 1e-12) break;
      step *= 0.5;
    }
    if (step < 1e-12) break;
    w = std::move(w_next);
    b = b_next;
    current = next;
  }
  model.weights.assign(w.data(), w.data() + w.size());
  model.bias = b;
  return model;
}

Model train(const Corpus& train_set, const CorpusStats& stats, std::string id,
            const TrainConfig& config) {
  std::vector<Label> labels;
  labels.reserve(train_set.size());
  for (const Excerpt& e : train_set.excerpts) {
    if (!e.true_label) throw DomainError("training excerpt \"" + e.id + "\" is unlabeled");
    labels.push_back(*e.true_label);
  }
  const std::vector<FeatureVector> features = extract_all(train_set, stats);
  Model model = train_on_features(features, labels, std::move(id), config);
  model.training_set_ref = train_set.name;
  model.training_source = "all";
  for (const Excerpt& e : train_set.excerpts) model.training_ids.push_back(e.id);
  return model;
}

Prediction predict(const Model& model, const FeatureVector& fv) {
  Prediction p;
  p.excerpt_id = fv.excerpt_id;
  p.prob_machine = logistic(model.margin(fv));
  p.label = label_for(p.prob_machine);
  return p;
}

std::optional<double> auc_mann_whitney(std::span<const double> scores,
                                       std::span<const Label> truth) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  double pos = 0.0;
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (truth[i] == Label::kMachine) {
      pos += 1.0;
      rank_sum += ranks[i];
    }
  }
  const double neg = static_cast<double>(n) - pos;
  if (pos == 0.0 || neg == 0.0) return std::nullopt;
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

Metrics compute_metrics(std::span<const double> prob_machine, std::span<const Label> truth) {
  if (prob_machine.empty()) throw DomainError("cannot evaluate on an empty test set");
  if (prob_machine.size() != truth.size()) throw DomainError("scores/labels length mismatch");
  Metrics m;
  m.n = prob_machine.size();
  std::size_t correct = 0;
  for (std::size_t i = 0; i < m.n; ++i) {
    if (label_for(prob_machine[i]) == truth[i]) ++correct;
  }
  m.accuracy = static_cast<double>(correct) / static_cast<double>(m.n);
  m.auc = auc_mann_whitney(prob_machine, truth);
  return m;
}

Metrics evaluate(const Model& model, const Corpus& test_set, const CorpusStats& stats) {
  if (test_set.empty()) throw DomainError("cannot evaluate on an empty test set");
  std::vector<double> probs;
  std::vector<Label> truth;
  for (const Excerpt& e : test_set.excerpts) {
    if (!e.true_label) throw DomainError("test excerpt \"" + e.id + "\" is unlabeled");
    truth.push_back(*e.true_label);
    probs.push_back(predict(model, extract_features(e, stats)).prob_machine);
  }
  return compute_metrics(probs, truth);
}

EvalMatrix cross_evaluate(std::span<const Model> models,
                          std::span<const std::pair<std::string, Corpus>> test_sets,
                          const CorpusStats& stats) {
  EvalMatrix out;
  Corpus total{"Total", {}};
  for (const auto& [name, corpus] : test_sets) {
    out.test_names.push_back(name);
    total.excerpts.insert(total.excerpts.end(), corpus.excerpts.begin(), corpus.excerpts.end());
  }
  out.test_names.emplace_back("Total");
  for (const Model& model : models) {
    out.model_ids.push_back(model.id);
    std::vector<Metrics> row;
    for (const auto& [name, corpus] : test_sets) row.push_back(evaluate(model, corpus, stats));
    row.push_back(evaluate(model, total, stats));
    out.cells.push_back(std::move(row));
  }
  return out;
}

std::string model_hash(const Model& model) { return hex64(fnv1a64(model_fields(model).dump())); }

nlohmann::json model_to_json(const Model& model) {
  nlohmann::json doc = model_fields(model);
  doc["hash"] = model_hash(model);
  return doc;
}

Model model_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("model file must hold a JSON object", 0);
  Model m;
  m.id = field<std::string>(doc, "id");
  m.weights = field<std::vector<double>>(doc, "weights");
  m.bias = field<double>(doc, "bias");
  m.feature_means = field<std::vector<double>>(doc, "means");
  m.feature_stds = field<std::vector<double>>(doc, "stds");
  m.training_source = field<std::string>(doc, "training_source");
  if (doc.contains("training_set_ref")) m.training_set_ref = field<std::string>(doc, "training_set_ref");
  if (doc.contains("training_ids")) m.training_ids = field<std::vector<std::string>>(doc, "training_ids");
  m.schema_version = field<std::string>(doc, "schema_version");
  const std::string hash = field<std::string>(doc, "hash");
  if (m.feature_means.size() != m.weights.size() || m.feature_stds.size() != m.weights.size()) {
    throw ParseError("model vectors disagree in length", 0);
  }
  for (double s : m.feature_stds) {
    if (!(s > 0.0)) throw ParseError("model has a non-positive feature std", 0);
  }
  if (hash != model_hash(m)) throw ParseError("model hash mismatch for \"" + m.id + "\"", 0);
  return m;
}

void save_model(const Model& model, const std::filesystem::path& path) {
  write_file_atomic(path, model_to_json(model).dump(2) + "\n");
}

Model load_model(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw ParseError(path.string() + ": " + err.what(), 0, err.byte);
  }
  return model_from_json(doc);
}

}  // namespace scidetect
