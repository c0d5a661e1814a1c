#include "rephase/two_class.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "rephase/errors.hpp"
#include "rephase/rk4.hpp"

namespace rephase {

ContrastCurve evolve_two_class(const TwoClassState& init, double t_final, double dt, int sample_every,
                               TwoClassState* final_state) {
  if (!(t_final > 0.0)) throw InvalidArgument("evolve_two_class: t_final must be > 0");
  if (!(dt > 0.0)) throw InvalidArgument("evolve_two_class: dt must be > 0");
  if (sample_every < 1) throw InvalidArgument("evolve_two_class: sample_every must be >= 1");
  if (!(init.gamma_x >= 0.0)) throw InvalidArgument("evolve_two_class: gamma_x must be >= 0");
  if (!init.s_fast.finite() || !init.s_slow.finite()) throw InvalidArgument("evolve_two_class: non-finite spin");

  const double half_split = 0.5 * init.delta_split;
  const double half_ex = 0.5 * init.omega_ex;
  const double gamma = init.gamma_x;
  const double fastest = std::max(std::abs(half_split) + std::abs(half_ex), gamma);
  if (fastest > 0.0 && dt > 2.5 / fastest)
    throw NumericError("evolve_two_class: dt exceeds the RK4 stability bound");

  const long steps = std::max(1L, static_cast<long>(std::ceil(t_final / dt * (1.0 - 1e-12))));
  const double h = t_final / static_cast<double>(steps);

  // y[0] fast, y[1] slow
  std::vector<SpinVector> y{init.s_fast, init.s_slow};
  auto f = [&](const std::vector<SpinVector>& s, std::vector<SpinVector>& ds) {
    const SpinVector mean = 0.5 * (s[0] + s[1]);
    const double offsets[2] = {half_split, -half_split};
    for (int c = 0; c < 2; ++c) {
      SpinVector b = half_ex * mean;
      b.par += offsets[c];
      ds[c] = cross(b, s[c]) - gamma * (s[c] - mean);
    }
  };

  ContrastCurve curve;
  curve.push(0.0, 0.5 * (y[0] + y[1]));
  Rk4<SpinVector> stepper(2);
  for (long k = 1; k <= steps; ++k) {
    stepper.step(y, h, f);
    if (k % sample_every == 0 || k == steps) {
      const SpinVector mean = 0.5 * (y[0] + y[1]);
      if (!mean.finite()) throw NumericError("evolve_two_class: non-finite state");
      curve.push(k == steps ? t_final : static_cast<double>(k) * h, mean);
    }
  }
  if (final_state) {
    *final_state = init;
    final_state->s_fast = y[0];
    final_state->s_slow = y[1];
  }
  return curve;
}

double two_class_revival_estimate(const RateSet& rates) {
  const double w = rates.effective_exchange();
  if (!(w > 0.0)) throw InvalidArgument("revival estimate: omega_ex must be > 0");
  return 2.0 * std::numbers::pi / w;
}

double two_class_swap_time(const RateSet& rates) { return 0.5 * two_class_revival_estimate(rates); }

}  // namespace rephase
