#pragma once

#include <numbers>
#include <optional>
#include <string_view>

namespace rephase {

namespace constants {
inline constexpr double kBoltzmann = 1.380649e-23;        // J/K, exact SI
inline constexpr double kHbar = 1.054571817e-34;          // J s
inline constexpr double kBohrRadius = 5.29177210903e-11;  // m
inline constexpr double kRb87Mass = 1.44316060e-25;       // kg
/// Density unit used throughout the literature on this system: 1e12 cm^-3.
inline constexpr double kDensityUnit = 1e18;  // m^-3
/// Magic field of the |F=1,m=-1> <-> |F=2,m=1> transition of 87Rb (G).
/// Documentation only; nothing in the model depends on it.
inline constexpr double kMagicFieldGauss = 3.228917;
}  // namespace constants

inline constexpr double hz_to_rad(double hz) { return 2.0 * std::numbers::pi * hz; }
inline constexpr double rad_to_hz(double rad_per_s) { return rad_per_s / (2.0 * std::numbers::pi); }

struct AtomicParams {
  double mass = constants::kRb87Mass;          // kg
  double scattering_length_a01 = 0.0;          // m
  double density_nbar = 0.0;                   // m^-3
  double temperature = 0.0;                    // K
  std::optional<double> scattering_length_a00;  // m, recorded only
  std::optional<double> scattering_length_a11;  // m, recorded only

  /// Throws InvalidArgument naming the first violated field.
  void validate() const;
};

/// Trap angular frequencies in rad/s.
struct TrapParams {
  double omega_x = 0.0;
  double omega_y = 0.0;
  double omega_z = 0.0;

  void validate() const;
  double min_frequency() const;
};

/// Dynamical rates of the kinetic model. Everything is angular (rad/s) except
/// gamma_c, which is a plain rate (1/s).
struct RateSet {
  double delta0 = 0.0;
  double omega_ex = 0.0;
  double gamma_c = 0.0;
  double detuning = 0.0;
  double exchange_renorm = 1.0;

  /// omega_ex scaled by exchange_renorm; this is what drives the dynamics.
  double effective_exchange() const { return omega_ex * exchange_renorm; }
  void validate() const;
};

enum class Regime { TightSync, LossAndRevival, Dephasing };

std::string_view to_string(Regime r);

struct RegimeReport {
  bool knudsen_ok = false;
  bool isre_dominates_collisions = false;
  bool isre_dominates_inhomogeneity = false;
  Regime regime_label = Regime::Dephasing;
};

struct RegimeThresholds {
  /// omega_ex / delta0 at or above which synchronization counts as tight.
  double tight_sync_ratio = 10.0;
  /// gamma_c must be below this fraction of the lowest trap frequency.
  double knudsen_fraction = 0.1;
};

double thermal_velocity(const AtomicParams& p);
double exchange_rate(const AtomicParams& p);
double lateral_collision_rate(const AtomicParams& p);
double mean_field_shift(double density_local);

/// Linear density model of the inhomogeneity: base + slope * (nbar / 1e18 m^-3).
struct InhomogeneityModel {
  double base = hz_to_rad(1.2);   // rad/s
  double slope = hz_to_rad(0.1);  // rad/s per density unit

  double at(double density_nbar) const;
};

RegimeReport classify_regime(const RateSet& r, const TrapParams& t,
                             const RegimeThresholds& thresholds = {});

/// Rates from atomic parameters; delta0 and detuning are supplied by the caller.
RateSet derive_rates(const AtomicParams& p, double delta0, double detuning = 0.0,
                     double exchange_renorm = 1.0);

}  // namespace rephase
