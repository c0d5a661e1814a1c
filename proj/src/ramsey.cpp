#include "rephase/ramsey.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rephase/errors.hpp"
#include "rephase/parallel.hpp"

namespace rephase {

void RamseyConfig::validate() const {
  if (!(ramsey_time_tr > 0.0) || !std::isfinite(ramsey_time_tr))
    throw InvalidArgument("ramsey: ramsey_time_tr must be > 0");
  if (!std::isfinite(detuning_dr)) throw InvalidArgument("ramsey: detuning_dr must be finite");
  if (n_detuning_steps < 5) throw InvalidArgument("ramsey: n_detuning_steps must be >= 5");
  if (!(span_periods >= 1.5)) throw InvalidArgument("ramsey: scans must span >= 1.5 fringe periods");
  if (!(dt >= 0.0)) throw InvalidArgument("ramsey: dt must be >= 0");
}

SpinVector rotate_pulse(const SpinVector& s, double angle, PulseAxis axis) {
  const double c = std::cos(angle);
  const double sn = std::sin(angle);
  switch (axis) {
    case PulseAxis::Perp2:
      return {c * s.perp1 - sn * s.par, s.perp2, sn * s.perp1 + c * s.par};
    case PulseAxis::Perp1:
      return {s.perp1, c * s.perp2 + sn * s.par, -sn * s.perp2 + c * s.par};
  }
  return s;
}

SpinField apply_pulse(const SpinField& field, double angle, PulseAxis axis) {
  SpinField out = field;
  for (auto& s : out.spins) {
    if (!s.finite()) throw InvalidArgument("apply_pulse: non-finite spin");
    s = rotate_pulse(s, angle, axis);
  }
  return out;
}

namespace {

double run_sequence(const KineticModel& model, double ramsey_time, double dt) {
  constexpr double half_pi = 0.5 * std::numbers::pi;
  SpinField field = apply_pulse(ground_field(model.grid()), half_pi);
  field = advance(model, field, ramsey_time, dt);
  field = apply_pulse(field, half_pi);
  const double p = 0.5 * (1.0 + average(model.grid(), field.spins).par);
  return std::clamp(p, 0.0, 1.0);
}

RateSet with_detuning(RateSet rates, double detuning) {
  rates.detuning = detuning;
  return rates;
}

}  // namespace

double ramsey_sequence(const EnergyGrid& grid, const RateSet& rates, const KernelSpec& kernel,
                       const RamseyConfig& cfg) {
  cfg.validate();
  const KineticModel model(grid, with_detuning(rates, cfg.detuning_dr), kernel);
  const double dt = cfg.dt > 0.0 ? cfg.dt : model.default_step();
  return run_sequence(model, cfg.ramsey_time_tr, dt);
}

std::vector<double> scan_detunings(const RamseyConfig& cfg) {
  cfg.validate();
  const double period = 2.0 * std::numbers::pi / cfg.ramsey_time_tr;
  const double step = cfg.span_periods * period / cfg.n_detuning_steps;
  const double centre_index = 0.5 * (cfg.n_detuning_steps - 1);
  std::vector<double> d(cfg.n_detuning_steps);
  for (int k = 0; k < cfg.n_detuning_steps; ++k) d[k] = cfg.detuning_dr + (k - centre_index) * step;
  return d;
}

FringeScan fringe_scan(const EnergyGrid& grid, const RateSet& rates, const KernelSpec& kernel,
                       const RamseyConfig& cfg) {
  FringeScan scan;
  scan.detunings = scan_detunings(cfg);
  const std::size_t n = scan.detunings.size();

  // One step size for the whole scan, set by the fastest detuning.
  double dt = cfg.dt;
  if (dt <= 0.0) {
    const double widest = *std::max_element(scan.detunings.begin(), scan.detunings.end(),
                                            [](double a, double b) { return std::abs(a) < std::abs(b); });
    dt = KineticModel(grid, with_detuning(rates, widest), kernel).default_step();
  }

  scan.probabilities.assign(n, 0.0);
  parallel_for(
      n,
      [&](std::size_t k) {
        const KineticModel model(grid, with_detuning(rates, scan.detunings[k]), kernel);
        scan.probabilities[k] = run_sequence(model, cfg.ramsey_time_tr, dt);
      },
      cfg.workers);

  const FringeFit fit = fit_fringe(scan.detunings, scan.probabilities, cfg.ramsey_time_tr);
  scan.fitted_contrast = fit.contrast;
  scan.fitted_phase = fit.phase;
  scan.residual_rms = fit.residual_rms;
  return scan;
}

ContrastCurve contrast_vs_time(const EnergyGrid& grid, const RateSet& rates, const KernelSpec& kernel,
                               std::span<const double> tr_list, const RamseyConfig& cfg) {
  if (tr_list.empty()) throw InvalidArgument("contrast_vs_time: tr_list is empty");
  for (std::size_t i = 1; i < tr_list.size(); ++i)
    if (!(tr_list[i] > tr_list[i - 1])) throw InvalidArgument("contrast_vs_time: tr_list must increase strictly");

  std::vector<FringeScan> scans(tr_list.size());
  for (std::size_t i = 0; i < tr_list.size(); ++i) {
    RamseyConfig c = cfg;
    c.ramsey_time_tr = tr_list[i];
    scans[i] = fringe_scan(grid, rates, kernel, c);
  }

  const double reference = scans.front().fitted_contrast;
  if (!(reference > 0.0)) throw NumericError("contrast_vs_time: zero contrast at the first Ramsey time");
  ContrastCurve curve;
  for (std::size_t i = 0; i < tr_list.size(); ++i) {
    const double c = scans[i].fitted_contrast / reference;
    const double phi = scans[i].fitted_phase;
    curve.push(tr_list[i], {c * std::cos(phi), c * std::sin(phi), 0.0});
  }
  return curve;
}

}  // namespace rephase
