#include "scidetect/projection.h"

#include <Eigen/Dense>
#include <cmath>

#include "scidetect/error.h"

namespace scidetect {

namespace {

void check_rows(std::span<const std::vector<double>> rows) {
  if (rows.size() < 3) throw DomainError("projection needs at least 3 vectors");
  const std::size_t d = rows.front().size();
  if (d < 2) throw DomainError("projection needs vectors of length at least 2");
  for (const auto& r : rows) {
    if (r.size() != d) throw DomainError("projection rows differ in length");
  }
}

Eigen::MatrixXd centered(std::span<const std::vector<double>> rows, Eigen::VectorXd& mean) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(rows.front().size());
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = rows[static_cast<std::size_t>(i)][j];
  }
  mean = x.colwise().mean().transpose();
  x.rowwise() -= mean.transpose();
  return x;
}

}  // namespace

double total_variance(std::span<const std::vector<double>> rows) {
  check_rows(rows);
  Eigen::VectorXd mean;
  const Eigen::MatrixXd x = centered(rows, mean);
  return x.squaredNorm() / static_cast<double>(x.rows() - 1);
}

Projection2D fit_projection(std::span<const std::vector<double>> rows) {
  check_rows(rows);
  Eigen::VectorXd mean;
  const Eigen::MatrixXd x = centered(rows, mean);
  const Eigen::Index d = x.cols();

  Projection2D p;
  p.mean.assign(mean.data(), mean.data() + d);
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(x.rows() - 1);
  if (cov.trace() <= 0.0) {
    for (int a = 0; a < 2; ++a) {
      p.axes[a].assign(static_cast<std::size_t>(d), 0.0);
      p.axes[a][static_cast<std::size_t>(a)] = 1.0;
    }
    return p;
  }
  // Eigenvalues come back ascending.
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  for (int a = 0; a < 2; ++a) {
    const Eigen::Index col = d - 1 - a;
    Eigen::VectorXd axis = solver.eigenvectors().col(col);
    Eigen::Index arg = 0;
    for (Eigen::Index j = 1; j < d; ++j) {
      if (std::abs(axis[j]) > std::abs(axis[arg])) arg = j;
    }
    if (axis[arg] < 0) axis = -axis;
    p.axes[a].assign(axis.data(), axis.data() + d);
    p.explained_variance[a] = std::max(0.0, solver.eigenvalues()[col]);
  }
  return p;
}

std::pair<double, double> project(const Projection2D& p, std::span<const double> v) {
  if (v.size() != p.mean.size()) {
    throw DomainError("projected vector has length " + std::to_string(v.size()) +
                      ", expected " + std::to_string(p.mean.size()));
  }
  double x = 0.0;
  double y = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double c = v[j] - p.mean[j];
    x += c * p.axes[0][j];
    y += c * p.axes[1][j];
  }
  return {x, y};
}

std::vector<std::vector<double>> standardize_columns(std::span<const std::vector<double>> rows) {
  std::vector<std::vector<double>> out(rows.begin(), rows.end());
  if (rows.empty()) return out;
  const std::size_t d = rows.front().size();
  const double n = static_cast<double>(rows.size());
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (const auto& r : rows) mean += r.at(j);
    mean /= n;
    double var = 0.0;
    for (const auto& r : rows) var += (r[j] - mean) * (r[j] - mean);
    const double sd = std::sqrt(var / n);
    for (auto& r : out) r[j] = sd > 1e-12 ? (r[j] - mean) / sd : 0.0;
  }
  return out;
}

nlohmann::json projection_to_json(const Projection2D& p, std::span<const std::string> ids,
                                  std::span<const std::vector<double>> rows) {
  nlohmann::json doc;
  doc["method"] = p.method;
  doc["mean"] = p.mean;
  doc["axes"] = {p.axes[0], p.axes[1]};
  doc["explained_variance"] = {p.explained_variance[0], p.explained_variance[1]};
  nlohmann::json coords = nlohmann::json::object();
  for (std::size_t i = 0; i < ids.size() && i < rows.size(); ++i) {
    const auto [x, y] = project(p, rows[i]);
    coords[ids[i]] = {x, y};
  }
  doc["coordinates"] = coords;
  return doc;
}

}  // namespace scidetect
