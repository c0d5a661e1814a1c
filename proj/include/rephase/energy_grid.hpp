#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "rephase/spin_vector.hpp"

namespace rephase {

enum class GridScheme { GaussLaguerreAlpha2, UniformTruncated, Custom };

std::string_view to_string(GridScheme s);

/// Quadrature for averages over the 3D harmonic-oscillator energy distribution
/// (E^2/2) e^-E, E in units of k_B T. Immutable once built.
class EnergyGrid {
 public:
  /// Generalized Gauss-Laguerre rule (alpha = 2) by Golub-Welsch, weights scaled
  /// so they sum to one. 2 <= n_points <= 256.
  static EnergyGrid gauss(int n_points);

  /// Midpoint rule on (0, e_max], renormalized to unit mass. n_points >= 8, e_max >= 8.
  static EnergyGrid uniform(int n_points, double e_max);

  /// Arbitrary nodes and weights; must satisfy the same moment invariants.
  static EnergyGrid custom(std::vector<double> nodes, std::vector<double> weights);

  std::size_t size() const { return nodes_.size(); }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  GridScheme scheme() const { return scheme_; }
  double max_node() const { return nodes_.back(); }

  /// Probability mass lost to truncation before renormalization (uniform only).
  double truncation_deficit() const { return deficit_; }
  /// Uniform spacing; zero for non-uniform schemes.
  double spacing() const { return spacing_; }

  /// sum_i w_i E_i^k
  double moment(int k) const;

  /// FNV-1a over the raw bytes of nodes then weights.
  std::uint64_t checksum() const;

 private:
  EnergyGrid(std::vector<double> nodes, std::vector<double> weights, GridScheme scheme);
  void validate() const;

  std::vector<double> nodes_;
  std::vector<double> weights_;
  GridScheme scheme_;
  double deficit_ = 0.0;
  double spacing_ = 0.0;
};

/// Weighted ensemble average sum_i w_i S_i. Throws on length mismatch.
SpinVector average(const EnergyGrid& grid, std::span<const SpinVector> field);

}  // namespace rephase
