#include <gtest/gtest.h>

#include <cmath>

#include "scidetect/error.h"
#include "scidetect/projection.h"
#include "scidetect/rng.h"

namespace scidetect {
namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

TEST(Pca, PointsOnALine) {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 10; ++i) rows.push_back({double(i), 2.0 * i});
  const Projection2D p = fit_projection(rows);
  EXPECT_NEAR(p.axes[0][0], 1.0 / std::sqrt(5.0), 1e-12);
  EXPECT_NEAR(p.axes[0][1], 2.0 / std::sqrt(5.0), 1e-12);
  EXPECT_NEAR(p.explained_variance[1], 0.0, 1e-10);
  EXPECT_NEAR(p.explained_variance[0], total_variance(rows), 1e-10);
  EXPECT_NEAR(p.mean[0], 4.5, 1e-12);
  const auto [x, y] = project(p, rows[0]);
  EXPECT_NEAR(x, -4.5 * std::sqrt(5.0), 1e-10);
  EXPECT_NEAR(y, 0.0, 1e-10);
}

TEST(Pca, SeparatesTwoClusters) {
  Rng rng(5);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 40; ++i) {
    std::vector<double> r(6);
    for (double& v : r) v = rng.uniform() - 0.5;
    r[2] += i < 20 ? 5.0 : -5.0;
    rows.push_back(r);
  }
  const Projection2D p = fit_projection(rows);
  for (int i = 0; i < 40; ++i) {
    const double x = project(p, rows[i]).first;
    EXPECT_EQ(x > 0.0, i < 20) << i;
  }
  EXPECT_GT(p.axes[0][2], 0.99);
}

TEST(Pca, AxesAreOrthonormalAndBounded) {
  Rng rng(11);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 25; ++i) {
    std::vector<double> r(5);
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = (rng.uniform() - 0.5) * double(k + 1);
    rows.push_back(r);
  }
  const Projection2D p = fit_projection(rows);
  EXPECT_NEAR(dot(p.axes[0], p.axes[0]), 1.0, 1e-12);
  EXPECT_NEAR(dot(p.axes[1], p.axes[1]), 1.0, 1e-12);
  EXPECT_NEAR(dot(p.axes[0], p.axes[1]), 0.0, 1e-12);
  EXPECT_GE(p.explained_variance[0], p.explained_variance[1]);
  EXPECT_LE(p.explained_variance[0] + p.explained_variance[1], total_variance(rows) + 1e-12);
  double sx = 0.0, sy = 0.0;
  for (const auto& r : rows) {
    const auto [x, y] = project(p, r);
    sx += x;
    sy += y;
  }
  EXPECT_NEAR(sx, 0.0, 1e-10);
  EXPECT_NEAR(sy, 0.0, 1e-10);

  const Projection2D again = fit_projection(rows);
  EXPECT_EQ(again.axes, p.axes);
  for (const auto& axis : p.axes) {
    std::size_t arg = 0;
    for (std::size_t k = 1; k < axis.size(); ++k) {
      if (std::abs(axis[k]) > std::abs(axis[arg])) arg = k;
    }
    EXPECT_GT(axis[arg], 0.0);
  }
}

TEST(Pca, DegenerateAndInvalid) {
  const std::vector<std::vector<double>> same(4, std::vector<double>{1.0, 2.0, 3.0});
  const Projection2D p = fit_projection(same);
  EXPECT_EQ(p.axes[0], (std::vector<double>{1.0, 0.0, 0.0}));
  EXPECT_EQ(p.axes[1], (std::vector<double>{0.0, 1.0, 0.0}));
  EXPECT_EQ(project(p, same[0]), std::make_pair(0.0, 0.0));

  EXPECT_THROW(fit_projection(std::vector<std::vector<double>>(2, {1.0, 2.0})), DomainError);
  EXPECT_THROW(fit_projection(std::vector<std::vector<double>>(3, {1.0})), DomainError);
  EXPECT_THROW(fit_projection(std::vector<std::vector<double>>{{1, 2}, {1, 2}, {1}}), DomainError);
  EXPECT_THROW(project(p, std::vector<double>{1.0}), DomainError);
}

TEST(Standardize, Columns) {
  const std::vector<std::vector<double>> rows{{1.0, 5.0}, {3.0, 5.0}};
  const auto z = standardize_columns(rows);
  EXPECT_EQ(z[0], (std::vector<double>{-1.0, 0.0}));
  EXPECT_EQ(z[1], (std::vector<double>{1.0, 0.0}));
}

TEST(Json, Coordinates) {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 4; ++i) rows.push_back({double(i), double(i * i)});
  const std::vector<std::string> ids{"a", "b", "c", "d"};
  const nlohmann::json doc = projection_to_json(fit_projection(rows), ids, rows);
  EXPECT_EQ(doc.at("method"), "pca");
  EXPECT_EQ(doc.at("coordinates").size(), 4u);
}

}  // namespace
}  // namespace scidetect
