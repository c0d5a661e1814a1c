#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rephase/energy_grid.hpp"
#include "rephase/physical_rates.hpp"
#include "rephase/spin_vector.hpp"

namespace rephase {

enum class KernelKind { InfiniteRange, OneD, Matrix };

std::string_view to_string(KernelKind k);

/// Exchange coupling K(E, E') between energy classes.
struct KernelSpec {
  KernelKind kind = KernelKind::InfiniteRange;
  /// Row-major n x n, only for KernelKind::Matrix.
  std::optional<std::vector<double>> matrix;
  /// Lower clamp on |E - E'| for the 1D kernel.
  double regularization_epsilon = 1e-6;

  static KernelSpec infinite_range() { return {}; }
  static KernelSpec one_d(double epsilon = 1e-6) { return {KernelKind::OneD, std::nullopt, epsilon}; }
  /// Checks symmetry (1e-12) and non-negativity.
  static KernelSpec from_matrix(std::vector<double> row_major);
};

/// K(E_i, E_j) for every pair of grid nodes, row-major.
/// The 1D kernel is [max(E,E') |E-E'|]^(-1/4) with |E-E'| clamped from below.
std::vector<double> build_kernel_matrix(const EnergyGrid& grid, const KernelSpec& spec);

/// One spin per grid node.
struct SpinField {
  std::vector<SpinVector> spins;
  double time = 0.0;
};

/// Every node along u_perp1: the state right after the first pi/2 pulse.
SpinField transverse_field(const EnergyGrid& grid);
/// Every node along -u_par: all atoms in |0>.
SpinField ground_field(const EnergyGrid& grid);

struct ContrastCurve {
  std::vector<double> times;
  std::vector<SpinVector> sbar;
  std::vector<double> contrast;        // |sbar_perp|
  std::vector<double> contrast_total;  // |sbar|

  void push(double t, const SpinVector& mean);
  std::size_t size() const { return times.size(); }
};

/// Right-hand side of the energy-space kinetic equation, with the grid
/// weights and kernel folded in once:
///   dS_i/dt = -gamma_c (S_i - Sbar) + [(delta0 E_i + detuning) u_par + omega_ex' M_i] x S_i
///   M_i     = sum_j w_j K_ij S_j   (= Sbar for the infinite-range kernel)
/// with omega_ex' = omega_ex * exchange_renorm.
class KineticModel {
 public:
  KineticModel(const EnergyGrid& grid, const RateSet& rates, const KernelSpec& kernel = {});

  const EnergyGrid& grid() const { return grid_; }
  const RateSet& rates() const { return rates_; }
  std::size_t size() const { return grid_.size(); }

  void derivative(std::span<const SpinVector> state, std::span<SpinVector> out) const;

  /// Upper bound on the local precession frequency of any node (rad/s).
  double max_rotation_rate() const { return max_rotation_; }

  /// Largest step RK4 tolerates: both dt * max_rotation_rate and dt * gamma_c
  /// stay below kStabilityMargin, inside the imaginary- and real-axis limits
  /// (2 sqrt 2 and ~2.785) of the RK4 stability region.
  double max_stable_step() const;

  /// Accuracy-oriented default step: kDefaultStepFactor / fastest rate.
  double default_step() const;

  static constexpr double kStabilityMargin = 2.5;
  static constexpr double kDefaultStepFactor = 0.02;

 private:
  EnergyGrid grid_;
  RateSet rates_;
  std::vector<double> longitudinal_;
  /// w_j K_ij with the diagonal removed (a spin exerts no torque on itself);
  /// empty for the infinite-range kernel.
  std::vector<double> coupling_;
  double exchange_ = 0.0;
  double max_rotation_ = 0.0;
};

/// Convenience wrapper: builds a model and evaluates one derivative.
std::vector<SpinVector> rhs(const SpinField& field, const EnergyGrid& grid, const RateSet& rates,
                            const KernelSpec& kernel = {});

struct EvolveOptions {
  double t_final = 0.0;
  double dt = 0.0;
  int sample_every = 1;
  /// Called at each recorded sample with the full field.
  std::function<void(const SpinField&)> observer;
};

/// Fixed-step RK4 from initial.time to initial.time + t_final. The step is
/// shrunk to t_final / ceil(t_final / dt) so the last sample lands on
/// t_final. Samples at step 0, every sample_every steps, and the final step.
/// Spins are never renormalized.
ContrastCurve evolve(const KineticModel& model, const SpinField& initial, const EvolveOptions& opts,
                     SpinField* final_state = nullptr);

ContrastCurve evolve(const SpinField& initial, const EnergyGrid& grid, const RateSet& rates,
                     const KernelSpec& kernel, double t_final, double dt, int sample_every);

/// Propagate without recording; returns the field at initial.time + duration.
SpinField advance(const KineticModel& model, const SpinField& initial, double duration, double dt);

/// Ensemble contrast with no exchange or collisions from S(E,0) = u_perp1:
/// (1 + (delta0 t)^2)^(-3/2).
double analytic_contrast(double delta0, double t);

}  // namespace rephase
