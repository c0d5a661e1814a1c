#pragma once

#include <span>

#include "rephase/kinetic.hpp"

namespace rephase {

/// P(delta) = 1/2 (1 + C cos(delta T_R + phi)).
struct FringeFit {
  double contrast = 0.0;
  double phase = 0.0;  // rad, in (-pi, pi]
  double residual_rms = 0.0;
};

/// Linear least squares in (C cos phi, C sin phi) at the known fringe
/// frequency T_R. Throws NumericError when the detunings are too narrow to
/// separate the two quadratures.
FringeFit fit_fringe(std::span<const double> detunings, std::span<const double> probabilities,
                     double ramsey_time);

/// A e^(-t/tau).
struct DecayFit {
  double amplitude = 0.0;
  double tau = 0.0;  // s
  double residual_rms = 0.0;
  /// False when the nonlinear refinement failed and the log-space fit was kept.
  bool refined = false;
};

DecayFit fit_exponential_decay(std::span<const double> times, std::span<const double> values);

/// N_T/2 (1 + e^(-t/tau)): total detected atoms when one state decays.
struct AtomNumberFit {
  double n_total = 0.0;
  double tau = 0.0;  // s
  double residual_rms = 0.0;

  double model(double t) const;
};

AtomNumberFit fit_atom_number(std::span<const double> times, std::span<const double> totals);

struct RevivalFit {
  double time = 0.0;  // first maximum after the first minimum, interpolated
  double peak = 0.0;  // interpolated contrast at `time`
  double minimum_time = 0.0;
  double minimum = 0.0;
};

/// Throws NoRevivalError when the curve has no local minimum followed by a
/// local maximum (monotone decay, the dephasing regime).
RevivalFit fit_revival_time(std::span<const double> times, std::span<const double> values);
RevivalFit fit_revival_time(const ContrastCurve& curve);

}  // namespace rephase
