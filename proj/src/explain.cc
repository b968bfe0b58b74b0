#include "scidetect/explain.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "scidetect/error.h"
#include "scidetect/rng.h"
#include "scidetect/text.h"

namespace scidetect {

namespace {

double logit_clamped(double p) {
  constexpr double kEps = 1e-15;
  p = std::clamp(p, kEps, 1.0 - kEps);
  return std::log(p) - std::log1p(-p);
}

// Coalition sizes 1..M-1 drawn with probability proportional to the Shapley
// kernel mass (M - 1) / (s (M - s)); the binomial factor cancels against the
// number of subsets of that size.
class SizeSampler {
 public:
  explicit SizeSampler(std::size_t m) {
    double total = 0.0;
    for (std::size_t s = 1; s < m; ++s) {
      total += static_cast<double>(m - 1) / static_cast<double>(s * (m - s));
      cumulative_.push_back(total);
    }
    for (double& c : cumulative_) c /= total;
  }
  std::size_t draw(Rng& rng) const {
    const double u = rng.uniform();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<std::size_t>(it - cumulative_.begin()) + 1;
  }

 private:
  std::vector<double> cumulative_;
};

}  // namespace

double ContributionVector::total() const {
  return std::accumulate(values.begin(), values.end(), 0.0);
}

ContributionVector linear_shap(const Model& model, const FeatureVector& fv) {
  const std::vector<double> z = model.standardize(fv);
  ContributionVector cv;
  cv.excerpt_id = fv.excerpt_id;
  cv.model_id = model.id;
  cv.base_value = model.bias;
  cv.values.resize(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) cv.values[k] = model.weights[k] * z[k];
  return cv;
}

ContributionVector kernel_shap(const ProbabilityFn& predict_fn, const FeatureVector& fv,
                               std::span<const FeatureVector> background, std::size_t budget,
                               std::uint64_t seed) {
  return kernel_shap_margin(
      [&predict_fn](std::span<const double> x) { return logit_clamped(predict_fn(x)); }, fv,
      background, budget, seed);
}

ContributionVector kernel_shap_margin(const MarginFn& margin_fn, const FeatureVector& fv,
                                      std::span<const FeatureVector> background,
                                      std::size_t budget, std::uint64_t seed) {
  const std::size_t m = fv.values.size();
  if (background.empty()) throw DomainError("kernel_shap needs a non-empty background");
  if (budget < 2 * m) {
    throw DomainError("kernel_shap budget " + std::to_string(budget) + " is below 2 x " +
                      std::to_string(m) + " features");
  }
  for (const FeatureVector& b : background) {
    if (b.values.size() != m) throw DomainError("background vector length mismatch");
  }

  double base = 0.0;
  for (const FeatureVector& b : background) base += margin_fn(b.values);
  base /= static_cast<double>(background.size());
  const double full = margin_fn(fv.values);
  const double delta = full - base;

  ContributionVector cv;
  cv.excerpt_id = fv.excerpt_id;
  cv.base_value = base;
  cv.values.assign(m, 0.0);
  if (m == 1) {
    cv.values[0] = delta;
    return cv;
  }

  // Sample coalitions in complementary pairs.
  Rng rng(seed);
  const SizeSampler sizes(m);
  std::vector<std::vector<char>> coalitions;
  coalitions.reserve(budget);
  std::vector<std::size_t> order(m);
  while (coalitions.size() < budget) {
    const std::size_t s = sizes.draw(rng);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = 0; i < s; ++i) {
      std::swap(order[i], order[i + rng.below(m - i)]);
    }
    std::vector<char> mask(m, 0);
    for (std::size_t i = 0; i < s; ++i) mask[order[i]] = 1;
    std::vector<char> complement(m);
    for (std::size_t k = 0; k < m; ++k) complement[k] = mask[k] ? 0 : 1;
    coalitions.push_back(std::move(mask));
    if (coalitions.size() < budget) coalitions.push_back(std::move(complement));
  }

  // Value of each coalition: mean margin over background with the
  // coalition's features taken from the explained input.
  const auto rows = static_cast<Eigen::Index>(coalitions.size());
  const auto cols = static_cast<Eigen::Index>(m - 1);
  Eigen::MatrixXd design(rows, cols);
  Eigen::VectorXd target(rows);
  std::vector<double> hybrid(m);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::vector<char>& mask = coalitions[static_cast<std::size_t>(r)];
    double value = 0.0;
    for (const FeatureVector& b : background) {
      for (std::size_t k = 0; k < m; ++k) hybrid[k] = mask[k] ? fv.values[k] : b.values[k];
      value += margin_fn(hybrid);
    }
    value /= static_cast<double>(background.size());
    const double last = mask[m - 1] ? 1.0 : 0.0;
    for (Eigen::Index c = 0; c < cols; ++c) {
      design(r, c) = (mask[static_cast<std::size_t>(c)] ? 1.0 : 0.0) - last;
    }
    target[r] = value - base - last * delta;
  }
  const Eigen::VectorXd phi = design.completeOrthogonalDecomposition().solve(target);
  double sum = 0.0;
  for (Eigen::Index c = 0; c < cols; ++c) {
    cv.values[static_cast<std::size_t>(c)] = phi[c];
    sum += phi[c];
  }
  cv.values[m - 1] = delta - sum;
  return cv;
}

std::vector<FeatureVector> sample_background(std::span<const FeatureVector> pool,
                                             std::size_t count, std::uint64_t seed) {
  std::vector<std::size_t> idx(pool.size());
  std::iota(idx.begin(), idx.end(), 0);
  if (pool.size() > count) {
    Rng rng(seed);
    for (std::size_t i = 0; i < count; ++i) std::swap(idx[i], idx[i + rng.below(idx.size() - i)]);
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
  }
  std::vector<FeatureVector> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(pool[i]);
  return out;
}

GroupedContributions group_contributions(const ContributionVector& cv,
                                         const FeatureSchema& schema) {
  if (cv.values.size() != schema.size()) {
    throw DomainError("contribution vector has " + std::to_string(cv.values.size()) +
                      " entries, schema has " + std::to_string(schema.size()));
  }
  GroupedContributions g;
  for (std::size_t k = 0; k < schema.size(); ++k) {
    g.per_subcategory[static_cast<std::size_t>(schema[k].subcategory)] += cv.values[k];
    g.per_dimension[static_cast<std::size_t>(schema[k].dimension)] += cv.values[k];
  }
  return g;
}

Cohort build_cohort(const FeatureVector& anchor_fv, std::span<const FeatureVector> train_fvs,
                    std::size_t k) {
  if (train_fvs.empty()) throw DomainError("cohort needs a non-empty training set");
  struct Scored {
    double similarity;
    const std::string* id;
  };
  std::vector<Scored> scored;
  scored.reserve(train_fvs.size());
  for (const FeatureVector& fv : train_fvs) {
    if (fv.excerpt_id == anchor_fv.excerpt_id) continue;
    scored.push_back({cosine_similarity(anchor_fv.values, fv.values), &fv.excerpt_id});
  }
  const std::size_t take = std::min(k, scored.size());
  auto better = [](const Scored& a, const Scored& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return *a.id < *b.id;
  };
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                    scored.end(), better);
  Cohort cohort;
  cohort.anchor_id = anchor_fv.excerpt_id;
  for (std::size_t i = 0; i < take; ++i) cohort.member_ids.push_back(*scored[i].id);
  return cohort;
}

double percentile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw DomainError("percentile of an empty range");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

ReferenceBounds cohort_reference(const Cohort& cohort, std::string_view feature_name,
                                 const Corpus& corpus, const FeatureIndex& fvs) {
  const auto index = FeatureSchema::standard().index_of(feature_name);
  if (!index) throw DomainError("unknown feature \"" + std::string(feature_name) + "\"");
  std::vector<double> machine;
  std::vector<double> human;
  for (const std::string& id : cohort.member_ids) {
    const auto pos = corpus.find(id);
    if (!pos || !corpus.excerpts[*pos].true_label) {
      throw DomainError("cohort member \"" + id + "\" has no label");
    }
    auto it = fvs.find(id);
    if (it == fvs.end() || it->second == nullptr) {
      throw DomainError("cohort member \"" + id + "\" has no feature vector");
    }
    const double value = it->second->values.at(*index);
    (*corpus.excerpts[*pos].true_label == Label::kMachine ? machine : human).push_back(value);
  }
  auto bounds = [](std::vector<double>& values) -> std::optional<Bounds> {
    if (values.empty()) return std::nullopt;
    std::sort(values.begin(), values.end());
    return Bounds{percentile_sorted(values, 0.05), percentile_sorted(values, 0.95), values.size()};
  };
  ReferenceBounds out;
  out.feature = std::string(feature_name);
  out.machine = bounds(machine);
  out.human = bounds(human);
  return out;
}

nlohmann::json contribution_to_json(const ContributionVector& cv,
                                    const GroupedContributions& groups) {
  nlohmann::json doc;
  doc["excerpt_id"] = cv.excerpt_id;
  doc["model_id"] = cv.model_id;
  doc["base"] = cv.base_value;
  doc["values"] = cv.values;
  nlohmann::json sub = nlohmann::json::object();
  for (std::size_t i = 0; i < kSubcategoryCount; ++i) {
    sub[std::string(subcategory_name(static_cast<Subcategory>(i)))] = groups.per_subcategory[i];
  }
  nlohmann::json dim = nlohmann::json::object();
  for (std::size_t i = 0; i < kDimensionCount; ++i) {
    dim[std::string(dimension_name(static_cast<Dimension>(i)))] = groups.per_dimension[i];
  }
  doc["groups"] = {{"per_subcategory", sub}, {"per_dimension", dim}};
  return doc;
}

}  // namespace scidetect
