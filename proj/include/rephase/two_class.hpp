#pragma once

#include "rephase/kinetic.hpp"
#include "rephase/physical_rates.hpp"
#include "rephase/spin_vector.hpp"

namespace rephase {

/// Two macroscopic spins, a fast and a slow precessing class, coupled by
/// exchange around their mean and relaxed toward it at gamma_x:
///   dS_f/dt = (+delta/2) u_par x S_f + (omega_ex/2) Sbar2 x S_f - gamma_x (S_f - Sbar2)
///   dS_s/dt = (-delta/2) u_par x S_s + (omega_ex/2) Sbar2 x S_s - gamma_x (S_s - Sbar2)
/// with Sbar2 = (S_f + S_s)/2.
struct TwoClassState {
  SpinVector s_fast = SpinVector::u_perp1();
  SpinVector s_slow = SpinVector::u_perp1();
  double delta_split = 0.0;  // rad/s
  double omega_ex = 0.0;     // rad/s
  double gamma_x = 0.0;      // 1/s

  SpinVector mean() const { return 0.5 * (s_fast + s_slow); }
};

/// Curve of Sbar2; samples every `sample_every` steps plus the endpoint.
ContrastCurve evolve_two_class(const TwoClassState& init, double t_final, double dt, int sample_every = 1,
                               TwoClassState* final_state = nullptr);

/// Full exchange period 2 pi / omega_ex' (omega_ex' includes exchange_renorm).
double two_class_revival_estimate(const RateSet& rates);

/// Half period pi / omega_ex': time for the exchange to swap the two classes.
double two_class_swap_time(const RateSet& rates);

}  // namespace rephase
