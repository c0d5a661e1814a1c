#include "rephase/energy_grid.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <string>

#include "rephase/errors.hpp"

namespace rephase {

namespace {

constexpr double kMassTolerance = 1e-10;
constexpr double kMeanTolerance = 1e-8;

}  // namespace

std::string_view to_string(GridScheme s) {
  switch (s) {
    case GridScheme::GaussLaguerreAlpha2:
      return "gauss";
    case GridScheme::UniformTruncated:
      return "uniform";
    case GridScheme::Custom:
      return "custom";
  }
  return "unknown";
}

EnergyGrid::EnergyGrid(std::vector<double> nodes, std::vector<double> weights, GridScheme scheme)
    : nodes_(std::move(nodes)), weights_(std::move(weights)), scheme_(scheme) {}

void EnergyGrid::validate() const {
  if (nodes_.size() != weights_.size()) throw InvalidArgument("grid: nodes/weights length mismatch");
  if (nodes_.size() < 2) throw InvalidArgument("grid: need at least two nodes");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > 0.0) || !std::isfinite(nodes_[i])) throw InvalidArgument("grid: nodes must be > 0");
    if (i > 0 && !(nodes_[i] > nodes_[i - 1])) throw InvalidArgument("grid: nodes must increase strictly");
    if (!(weights_[i] > 0.0)) throw InvalidArgument("grid: weights must be > 0");
  }
  if (std::abs(moment(0) - 1.0) > kMassTolerance)
    throw InvalidArgument("grid: weights must sum to 1, got " + std::to_string(moment(0)));
  if (scheme_ == GridScheme::GaussLaguerreAlpha2 && std::abs(moment(1) - 3.0) > kMeanTolerance)
    throw InvalidArgument("grid: mean energy must be 3, got " + std::to_string(moment(1)));
}

EnergyGrid EnergyGrid::gauss(int n_points) {
  if (n_points < 2 || n_points > 256)
    throw InvalidArgument("gauss grid: n_points must lie in [2, 256]");

  // Jacobi matrix of the monic generalized Laguerre polynomials, alpha = 2.
  constexpr double alpha = 2.0;
  const auto n = static_cast<Eigen::Index>(n_points);
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(n - 1);
  for (Eigen::Index k = 0; k < n; ++k) diag(k) = 2.0 * static_cast<double>(k) + alpha + 1.0;
  for (Eigen::Index k = 1; k < n; ++k) {
    const auto kd = static_cast<double>(k);
    sub(k - 1) = std::sqrt(kd * (kd + alpha));
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("gauss grid: eigensolver failed");

  // Weights from the Christoffel function 1 / sum_k p_k(x)^2 of the orthonormal
  // polynomials (p_0 = 1 for unit mass); relative accuracy holds in the far tail.
  std::vector<double> nodes(n_points);
  std::vector<double> weights(n_points);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = solver.eigenvalues()(i);
    double prev = 0.0;
    double cur = 1.0;
    double sum = 1.0;
    double log_scale = 0.0;  // sum and p_k are stored divided by exp(log_scale)
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
      const double b_prev = k > 0 ? sub(k - 1) : 0.0;
      const double next = ((x - diag(k)) * cur - b_prev * prev) / sub(k);
      prev = cur;
      cur = next;
      sum += cur * cur;
      if (sum > 1e200) {
        const double f = 1e-100;
        prev *= f;
        cur *= f;
        sum *= f * f;
        log_scale += 200.0 * std::log(10.0);
      }
    }
    nodes[i] = x;
    // Tail weights below the double range (n > ~180) are pinned to the smallest normal.
    weights[i] = std::max(std::exp(-std::log(sum) - log_scale), std::numeric_limits<double>::min());
  }

  EnergyGrid grid(std::move(nodes), std::move(weights), GridScheme::GaussLaguerreAlpha2);
  grid.validate();
  return grid;
}

EnergyGrid EnergyGrid::uniform(int n_points, double e_max) {
  if (n_points < 8) throw InvalidArgument("uniform grid: n_points must be >= 8");
  if (!(e_max >= 8.0) || !std::isfinite(e_max)) throw InvalidArgument("uniform grid: e_max must be >= 8");

  const double step = e_max / n_points;
  std::vector<double> nodes(n_points);
  std::vector<double> weights(n_points);
  for (int i = 0; i < n_points; ++i) {
    const double e = (i + 0.5) * step;
    nodes[i] = e;
    weights[i] = 0.5 * e * e * std::exp(-e) * step;
  }
  const double mass = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= mass;

  EnergyGrid grid(std::move(nodes), std::move(weights), GridScheme::UniformTruncated);
  grid.deficit_ = 1.0 - mass;
  grid.spacing_ = step;
  grid.validate();
  return grid;
}

EnergyGrid EnergyGrid::custom(std::vector<double> nodes, std::vector<double> weights) {
  EnergyGrid grid(std::move(nodes), std::move(weights), GridScheme::Custom);
  grid.validate();
  return grid;
}

double EnergyGrid::moment(int k) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) sum += weights_[i] * std::pow(nodes_[i], k);
  return sum;
}

std::uint64_t EnergyGrid::checksum() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const std::vector<double>& values) {
    for (double v : values) {
      unsigned char bytes[sizeof(double)];
      std::memcpy(bytes, &v, sizeof(double));
      for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
      }
    }
  };
  mix(nodes_);
  mix(weights_);
  return h;
}

SpinVector average(const EnergyGrid& grid, std::span<const SpinVector> field) {
  if (field.size() != grid.size()) throw InvalidArgument("average: field length does not match grid");
  const auto w = grid.weights();
  SpinVector sum;
  for (std::size_t i = 0; i < field.size(); ++i) sum += w[i] * field[i];
  return sum;
}

}  // namespace rephase
