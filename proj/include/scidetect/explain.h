#ifndef SCIDETECT_EXPLAIN_H_
#define SCIDETECT_EXPLAIN_H_

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "scidetect/corpus.h"
#include "scidetect/features.h"
#include "scidetect/models.h"

namespace scidetect {

// Per-feature Shapley values on the margin (log-odds) scale.
struct ContributionVector {
  std::string excerpt_id;
  std::string model_id;
  std::vector<double> values;
  double base_value = 0.0;

  double total() const;
  // base_value + sum of values; equals the explained margin.
  double margin() const { return base_value + total(); }

  bool operator==(const ContributionVector&) const = default;
};

inline constexpr std::size_t kSubcategoryCount = 8;
inline constexpr std::size_t kDimensionCount = 3;

struct GroupedContributions {
  std::array<double, kSubcategoryCount> per_subcategory{};  // Subcategory order
  std::array<double, kDimensionCount> per_dimension{};      // Dimension order

  double subcategory(Subcategory s) const { return per_subcategory[static_cast<std::size_t>(s)]; }
  double dimension(Dimension d) const { return per_dimension[static_cast<std::size_t>(d)]; }
};

// Exact Shapley values of a linear margin under feature independence, with
// the training mean (z = 0) as reference: phi_k = w_k * z_k, base = bias.
ContributionVector linear_shap(const Model& model, const FeatureVector& fv);

// Black box returning P(machine) for a raw feature vector.
using ProbabilityFn = std::function<double(std::span<const double>)>;
// Black box returning the margin for a raw feature vector.
using MarginFn = std::function<double(std::span<const double>)>;

// Kernel-weighted least-squares Shapley estimate. Coalitions are drawn in
// complementary pairs with sizes distributed by the Shapley kernel, masked
// features take background values (averaged over the background set), and
// the efficiency constraint is imposed exactly. Deterministic given seed.
// Throws DomainError when the background is empty or budget < 2 * dimension.
ContributionVector kernel_shap(const ProbabilityFn& predict_fn, const FeatureVector& fv,
                               std::span<const FeatureVector> background, std::size_t budget,
                               std::uint64_t seed);
ContributionVector kernel_shap_margin(const MarginFn& margin_fn, const FeatureVector& fv,
                                      std::span<const FeatureVector> background,
                                      std::size_t budget, std::uint64_t seed);

// Uniform sample without replacement (whole set when it is small enough).
std::vector<FeatureVector> sample_background(std::span<const FeatureVector> pool,
                                             std::size_t count, std::uint64_t seed);

inline constexpr std::size_t kDefaultBackgroundSize = 100;

// Exact sums per subcategory and dimension. Throws DomainError when the
// vector length differs from the schema.
GroupedContributions group_contributions(const ContributionVector& cv,
                                         const FeatureSchema& schema);

struct Cohort {
  std::string anchor_id;
  std::vector<std::string> member_ids;  // most similar first
};

inline constexpr std::size_t kDefaultCohortSize = 500;

// The min(k, |train|) training vectors most cosine-similar to the anchor,
// ties broken by ascending excerpt id; the anchor's own id is skipped.
// Throws DomainError when train_fvs is empty.
Cohort build_cohort(const FeatureVector& anchor_fv, std::span<const FeatureVector> train_fvs,
                    std::size_t k = kDefaultCohortSize);

struct Bounds {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
  bool operator==(const Bounds&) const = default;
};

struct ReferenceBounds {
  std::string feature;
  std::optional<Bounds> machine;
  std::optional<Bounds> human;
};

// Linear-interpolation percentile (q in [0, 1]) of a sorted, non-empty range.
double percentile_sorted(std::span<const double> sorted, double q);

using FeatureIndex = std::unordered_map<std::string, const FeatureVector*>;

// 5th/95th percentiles of one feature over the cohort, per label. A label
// without members has no bounds. Throws DomainError for an unknown feature
// name or a member missing its label or feature vector.
ReferenceBounds cohort_reference(const Cohort& cohort, std::string_view feature_name,
                                 const Corpus& corpus, const FeatureIndex& fvs);

nlohmann::json contribution_to_json(const ContributionVector& cv,
                                    const GroupedContributions& groups);

}  // namespace scidetect

#endif  // SCIDETECT_EXPLAIN_H_
