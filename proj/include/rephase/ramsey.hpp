#pragma once

#include <span>
#include <vector>

#include "rephase/energy_grid.hpp"
#include "rephase/fitting.hpp"
#include "rephase/kinetic.hpp"
#include "rephase/physical_rates.hpp"

namespace rephase {

enum class PulseAxis { Perp1, Perp2 };
enum class PulseModel { Instantaneous };

struct RamseyConfig {
  double ramsey_time_tr = 0.1;            // s
  double detuning_dr = hz_to_rad(3.6);    // rad/s, centre of fringe scans
  PulseModel pulse_model = PulseModel::Instantaneous;
  int n_detuning_steps = 30;
  /// Width of a fringe scan in fringe periods (2 pi / T_R each).
  double span_periods = 2.0;
  /// Integration step; 0 picks the model's default step.
  double dt = 0.0;
  /// Worker threads for independent sequences; 0 = hardware concurrency.
  unsigned workers = 0;

  void validate() const;
};

/// Ideal instantaneous rotation by -angle (right-hand rule) about the axis.
/// With this sign a pi/2 pulse about u_perp2 takes -u_par (|0>) to +u_perp1,
/// and a second one on to +u_par (|1>).
SpinVector rotate_pulse(const SpinVector& s, double angle, PulseAxis axis);
SpinField apply_pulse(const SpinField& field, double angle, PulseAxis axis = PulseAxis::Perp2);

/// |0> -> pi/2 -> free evolution for T_R at detuning cfg.detuning_dr -> pi/2.
/// Returns the transition probability (1 + Sbar_par)/2.
double ramsey_sequence(const EnergyGrid& grid, const RateSet& rates, const KernelSpec& kernel,
                       const RamseyConfig& cfg);

struct FringeScan {
  std::vector<double> detunings;  // rad/s
  std::vector<double> probabilities;
  double fitted_contrast = 0.0;
  double fitted_phase = 0.0;
  double residual_rms = 0.0;
};

/// n_detuning_steps equally spaced detunings covering span_periods fringe
/// periods (endpoint excluded) centred on cfg.detuning_dr.
std::vector<double> scan_detunings(const RamseyConfig& cfg);

FringeScan fringe_scan(const EnergyGrid& grid, const RateSet& rates, const KernelSpec& kernel,
                       const RamseyConfig& cfg);

/// Fringe contrast at each T_R in tr_list, normalized to the first entry.
/// sbar holds the normalized fringe phasor (C cos phi, C sin phi, 0).
ContrastCurve contrast_vs_time(const EnergyGrid& grid, const RateSet& rates, const KernelSpec& kernel,
                               std::span<const double> tr_list, const RamseyConfig& cfg);

}  // namespace rephase
