#ifndef SCIDETECT_PROJECTION_H_
#define SCIDETECT_PROJECTION_H_

#include <array>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace scidetect {

struct Projection2D {
  std::string method = "pca";
  std::vector<double> mean;
  std::array<std::vector<double>, 2> axes;
  std::array<double, 2> explained_variance{};
};

// Top-two principal components of the rows (sample covariance). Each axis is
// signed so its largest-magnitude loading is positive. Data without variance
// falls back to the first two coordinate axes. Throws DomainError for fewer
// than 3 rows, rows shorter than 2, or ragged rows.
Projection2D fit_projection(std::span<const std::vector<double>> rows);

// Coordinates of (v - mean) on the two axes. Throws DomainError on length
// mismatch.
std::pair<double, double> project(const Projection2D& p, std::span<const double> v);

double total_variance(std::span<const std::vector<double>> rows);

// Column-wise z-scores with population std (zero-variance columns map to 0).
std::vector<std::vector<double>> standardize_columns(std::span<const std::vector<double>> rows);

nlohmann::json projection_to_json(const Projection2D& p, std::span<const std::string> ids,
                                  std::span<const std::vector<double>> rows);

}  // namespace scidetect

#endif  // SCIDETECT_PROJECTION_H_
