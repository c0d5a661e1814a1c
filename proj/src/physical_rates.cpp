#include "rephase/physical_rates.hpp"

#include <algorithm>
#include <cmath>

#include "rephase/errors.hpp"

namespace rephase {

void AtomicParams::validate() const {
  if (!(mass > 0.0) || !std::isfinite(mass)) throw InvalidArgument("mass must be > 0");
  if (!(temperature > 0.0) || !std::isfinite(temperature))
    throw InvalidArgument("temperature must be > 0");
  if (!(density_nbar >= 0.0) || !std::isfinite(density_nbar))
    throw InvalidArgument("density_nbar must be >= 0");
  if (!(std::abs(scattering_length_a01) > 0.0) || !std::isfinite(scattering_length_a01))
    throw InvalidArgument("scattering_length_a01 must be nonzero");
}

void TrapParams::validate() const {
  for (double w : {omega_x, omega_y, omega_z})
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("trap frequencies must be > 0");
}

double TrapParams::min_frequency() const { return std::min({omega_x, omega_y, omega_z}); }

void RateSet::validate() const {
  if (!(gamma_c >= 0.0) || !std::isfinite(gamma_c)) throw InvalidArgument("gamma_c must be >= 0");
  if (!std::isfinite(delta0)) throw InvalidArgument("delta0 must be finite");
  if (!std::isfinite(omega_ex)) throw InvalidArgument("omega_ex must be finite");
  if (!std::isfinite(detuning)) throw InvalidArgument("detuning must be finite");
  if (!(exchange_renorm > 0.0 && exchange_renorm <= 1.0))
    throw InvalidArgument("exchange_renorm must lie in (0, 1]");
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::TightSync:
      return "TightSync";
    case Regime::LossAndRevival:
      return "LossAndRevival";
    case Regime::Dephasing:
      return "Dephasing";
  }
  return "Unknown";
}

double thermal_velocity(const AtomicParams& p) {
  p.validate();
  return std::sqrt(constants::kBoltzmann * p.temperature / p.mass);
}

double exchange_rate(const AtomicParams& p) {
  p.validate();
  // 2 hbar |a01| n / m is a frequency in Hz; return the angular rate.
  const double hz = 2.0 * constants::kHbar * std::abs(p.scattering_length_a01) * p.density_nbar / p.mass;
  return hz_to_rad(hz);
}

double lateral_collision_rate(const AtomicParams& p) {
  const double prefactor = 32.0 * std::sqrt(std::numbers::pi) / 3.0;
  const double a = p.scattering_length_a01;
  return prefactor * a * a * p.density_nbar * thermal_velocity(p);
}

double mean_field_shift(double density_local) {
  if (!(density_local >= 0.0) || !std::isfinite(density_local))
    throw InvalidArgument("density_local must be >= 0");
  return hz_to_rad(-0.4) * (density_local / constants::kDensityUnit);
}

double InhomogeneityModel::at(double density_nbar) const {
  return base + slope * (density_nbar / constants::kDensityUnit);
}

RegimeReport classify_regime(const RateSet& r, const TrapParams& t, const RegimeThresholds& thresholds) {
  r.validate();
  t.validate();
  const double wex = std::abs(r.effective_exchange());
  const double d0 = std::abs(r.delta0);

  RegimeReport report;
  report.knudsen_ok = r.gamma_c < thresholds.knudsen_fraction * t.min_frequency();
  report.isre_dominates_collisions = wex / std::numbers::pi > r.gamma_c;
  report.isre_dominates_inhomogeneity = wex > d0;

  const bool conditions = report.isre_dominates_collisions && report.isre_dominates_inhomogeneity;
  if (conditions && wex >= thresholds.tight_sync_ratio * d0)
    report.regime_label = Regime::TightSync;
  else if (conditions)
    report.regime_label = Regime::LossAndRevival;
  else
    report.regime_label = Regime::Dephasing;
  return report;
}

RateSet derive_rates(const AtomicParams& p, double delta0, double detuning, double exchange_renorm) {
  RateSet r;
  r.delta0 = delta0;
  r.omega_ex = exchange_rate(p);
  r.gamma_c = lateral_collision_rate(p);
  r.detuning = detuning;
  r.exchange_renorm = exchange_renorm;
  r.validate();
  return r;
}

}  // namespace rephase
