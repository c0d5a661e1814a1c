#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rephase/energy_grid.hpp"
#include "rephase/kinetic.hpp"
#include "rephase/physical_rates.hpp"
#include "rephase/ramsey.hpp"
#include "rephase/two_class.hpp"

namespace rephase {

struct GridConfig {
  GridScheme scheme = GridScheme::UniformTruncated;
  int n_points = 800;
  double e_max = 40.0;

  EnergyGrid build() const;
};

struct TimeConfig {
  double t_final = 0.5;  // s
  double dt = 0.0;       // s; 0 = model default
  int sample_every = 10;
  std::vector<double> tr_list;  // s
};

/// Linear density scalings of the three rates for contrast-vs-time sweeps. Densities are
/// in units of 1e12 cm^-3.
struct DensitySweep {
  std::vector<double> densities;
  double delta0 = hz_to_rad(2.0);                    // rad/s
  double exchange_per_density = hz_to_rad(7.5);      // rad/s, before exchange_renorm
  double gamma_c_per_density = 2.1;                  // 1/s
  double exchange_renorm = 0.6;
  bool use_fringe_scans = true;

  RateSet rates_at(double density) const;
};

enum class InitialState { Transverse, Ground };

struct OutputConfig {
  std::filesystem::path path = "out";
  std::string format = "csv";
};

/// Validated run configuration. All rates are angular; Hz only exists in the
/// JSON document.
struct RunConfig {
  std::optional<AtomicParams> atomic;
  std::optional<double> delta0_fixed;              // rad/s, atomic route
  std::optional<InhomogeneityModel> delta0_model;  // atomic route
  double atomic_exchange_renorm = 1.0;
  std::optional<TrapParams> trap;
  std::optional<RateSet> rates_override;
  RegimeThresholds thresholds;
  GridConfig grid;
  KernelSpec kernel;
  std::string kernel_source = "infinite_range";
  InitialState initial = InitialState::Transverse;
  RamseyConfig sequence;
  TimeConfig times;
  std::optional<DensitySweep> sweep;
  std::optional<TwoClassState> two_class;
  OutputConfig output;

  /// The document the config was parsed from, with command-line overrides applied.
  nlohmann::json document;

  /// Rates from whichever source the document selects. Throws ConfigError if none.
  RateSet rates() const;
  /// delta0 for the atomic route.
  double atomic_delta0() const;
};

/// Command-line overrides, applied to the JSON document before parsing.
struct Overrides {
  std::optional<int> grid_points;
  std::optional<double> dt;
  std::optional<double> renorm;
  std::optional<std::string> kernel;  // uniform | oned | matrix:PATH
};

void apply_overrides(nlohmann::json& doc, const Overrides& o);

/// Throws ConfigError naming the field on any problem.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

/// Reads a config or a run manifest (whose "config" member is used).
nlohmann::json load_document(const std::filesystem::path& path);

}  // namespace rephase
