#include "rephase/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

#include "rephase/config.hpp"
#include "rephase/errors.hpp"
#include "rephase/fitting.hpp"
#include "rephase/io.hpp"
#include "rephase/parallel.hpp"

#ifndef REPHASE_VERSION
#define REPHASE_VERSION "dev"
#endif

namespace rephase::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CommonArgs {
  std::string config;
  std::string out_dir;
  Overrides overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_config = true) {
  auto* opt = cmd->add_option("--config", args.config, "JSON config or run manifest");
  if (needs_config) opt->required();
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--grid-points", args.overrides.grid_points, "number of energy nodes");
  cmd->add_option("--dt", args.overrides.dt, "integration step (s)");
  cmd->add_option("--renorm", args.overrides.renorm, "exchange renormalization factor in (0, 1]");
  cmd->add_option("--kernel", args.overrides.kernel, "uniform | oned | matrix:PATH");
}

RunConfig load(const CommonArgs& args) {
  const fs::path path(args.config);
  json doc = load_document(path);
  apply_overrides(doc, args.overrides);
  // Pin relative kernel paths so a manifest written elsewhere still resolves.
  if (doc.is_object() && doc.contains("kernel") && doc["kernel"].is_object() && doc["kernel"].contains("path") &&
      doc["kernel"]["path"].is_string()) {
    fs::path kp = doc["kernel"]["path"].get<std::string>();
    if (kp.is_relative()) doc["kernel"]["path"] = fs::absolute(path.parent_path() / kp).lexically_normal().string();
  }
  return parse_config(doc, path.parent_path());
}

fs::path out_dir(const CommonArgs& args, const RunConfig& cfg) {
  return args.out_dir.empty() ? cfg.output.path : fs::path(args.out_dir);
}

json rates_json(const RateSet& r) {
  return {{"delta0_rad_s", r.delta0},
          {"delta0_hz", rad_to_hz(r.delta0)},
          {"omega_ex_rad_s", r.omega_ex},
          {"omega_ex_hz", rad_to_hz(r.omega_ex)},
          {"exchange_renorm", r.exchange_renorm},
          {"omega_ex_effective_rad_s", r.effective_exchange()},
          {"omega_ex_effective_hz", rad_to_hz(r.effective_exchange())},
          {"gamma_c_per_s", r.gamma_c},
          {"detuning_rad_s", r.detuning},
          {"detuning_hz", rad_to_hz(r.detuning)}};
}

json grid_json(const EnergyGrid& g, const GridConfig& gc) {
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << g.checksum();
  json j = {{"scheme", std::string(to_string(g.scheme()))},
            {"n_points", g.size()},
            {"max_node", g.max_node()},
            {"checksum_fnv1a64", hex.str()}};
  if (g.scheme() == GridScheme::UniformTruncated) {
    j["e_max"] = gc.e_max;
    j["truncation_deficit"] = g.truncation_deficit();
  }
  return j;
}

class Manifest {
 public:
  Manifest(std::string command, const RunConfig& cfg) : start_(std::chrono::steady_clock::now()) {
    doc_ = {{"manifest_version", 1},
            {"tool", "rephase"},
            {"tool_version", REPHASE_VERSION},
            {"command", std::move(command)},
            {"config", cfg.document},
            {"resolved", json::object()},
            {"outputs", json::array()}};
  }
  json& resolved() { return doc_["resolved"]; }
  void output(const fs::path& p) { doc_["outputs"].push_back(p.filename().string()); }

  void write(const fs::path& dir) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    doc_["wall_clock_s"] = secs;
    io::write_text(dir / "manifest.json", doc_.dump(2) + "\n");
  }

 private:
  json doc_;
  std::chrono::steady_clock::time_point start_;
};

SpinField initial_field(const RunConfig& cfg, const EnergyGrid& grid) {
  return cfg.initial == InitialState::Ground ? ground_field(grid) : transverse_field(grid);
}

std::string density_label(double n) {
  std::ostringstream s;
  s << n;
  return s.str();
}

std::vector<double> default_tr_list() {
  std::vector<double> tr;
  for (int k = 0; k < 20; ++k) tr.push_back(0.015 + 0.025 * k);
  return tr;
}

int cmd_derive(const CommonArgs& args, std::ostream& out) {
  const RunConfig cfg = load(args);
  if (!cfg.atomic) throw ConfigError("atomic", "required by derive");
  if (!cfg.trap) throw ConfigError("trap_hz", "required by derive");
  const RateSet rates = cfg.rates();
  const RegimeReport report = classify_regime(rates, *cfg.trap, cfg.thresholds);

  json j = {{"thermal_velocity_m_s", thermal_velocity(*cfg.atomic)},
            {"density_m3", cfg.atomic->density_nbar},
            {"rates", rates_json(rates)},
            {"mean_field_shift_hz", rad_to_hz(mean_field_shift(cfg.atomic->density_nbar))},
            {"trap_min_rad_s", cfg.trap->min_frequency()},
            {"regime",
             {{"label", std::string(to_string(report.regime_label))},
              {"knudsen_ok", report.knudsen_ok},
              {"isre_dominates_collisions", report.isre_dominates_collisions},
              {"isre_dominates_inhomogeneity", report.isre_dominates_inhomogeneity},
              {"tight_sync_ratio", cfg.thresholds.tight_sync_ratio},
              {"knudsen_fraction", cfg.thresholds.knudsen_fraction}}}};
  if (rates.effective_exchange() > 0.0) {
    j["revival_estimate_s"] = two_class_revival_estimate(rates);
    j["swap_time_s"] = two_class_swap_time(rates);
  }
  out << j.dump(2) << '\n';
  if (!args.out_dir.empty()) io::write_text(fs::path(args.out_dir) / "derive.json", j.dump(2) + "\n");
  return kOk;
}

int cmd_simulate(const CommonArgs& args, std::ostream& out) {
  const RunConfig cfg = load(args);
  Manifest manifest("simulate", cfg);
  const EnergyGrid grid = cfg.grid.build();
  const RateSet rates = cfg.rates();
  const KineticModel model(grid, rates, cfg.kernel);
  const double dt = cfg.times.dt > 0.0 ? cfg.times.dt : model.default_step();

  const ContrastCurve curve = evolve(model, initial_field(cfg, grid), {cfg.times.t_final, dt, cfg.times.sample_every, {}});

  const fs::path dir = out_dir(args, cfg);
  const fs::path csv = dir / "trajectory.csv";
  io::write_trajectory(csv, curve);
  manifest.output(csv);
  manifest.resolved() = {{"rates", rates_json(rates)},
                         {"grid", grid_json(grid, cfg.grid)},
                         {"kernel", cfg.kernel_source},
                         {"dt_s", dt},
                         {"t_final_s", cfg.times.t_final},
                         {"sample_every", cfg.times.sample_every}};
  manifest.write(dir);
  out << "wrote " << csv.string() << " (" << curve.size() << " samples)\n";
  return kOk;
}

int cmd_two_class(const CommonArgs& args, std::ostream& out) {
  const RunConfig cfg = load(args);
  if (!cfg.two_class) throw ConfigError("two_class", "required by two-class");
  Manifest manifest("two-class", cfg);
  const TwoClassState& st = *cfg.two_class;
  const double fastest = std::max(0.5 * (std::abs(st.delta_split) + std::abs(st.omega_ex)), st.gamma_x);
  const double dt = cfg.times.dt > 0.0 ? cfg.times.dt : (fastest > 0.0 ? 0.02 / fastest : 1e-3);
  const ContrastCurve curve = evolve_two_class(st, cfg.times.t_final, dt, cfg.times.sample_every);

  const fs::path dir = out_dir(args, cfg);
  const fs::path csv = dir / "two_class.csv";
  io::write_trajectory(csv, curve);
  manifest.output(csv);
  manifest.resolved() = {{"delta_split_rad_s", st.delta_split},
                         {"omega_ex_rad_s", st.omega_ex},
                         {"gamma_x_per_s", st.gamma_x},
                         {"dt_s", dt},
                         {"t_final_s", cfg.times.t_final}};
  manifest.write(dir);
  out << "wrote " << csv.string() << " (" << curve.size() << " samples)\n";
  return kOk;
}

int cmd_fig3(const CommonArgs& args, std::ostream& out) {
  const RunConfig cfg = load(args);
  if (!cfg.sweep) throw ConfigError("fig3", "required by fig3 (densities and rate scalings)");
  const DensitySweep& sweep = *cfg.sweep;
  Manifest manifest("fig3", cfg);
  const EnergyGrid grid = cfg.grid.build();
  const std::vector<double> tr_list = cfg.times.tr_list.empty() ? default_tr_list() : cfg.times.tr_list;
  const fs::path dir = out_dir(args, cfg);

  const std::size_t n = sweep.densities.size();
  std::vector<ContrastCurve> curves(n);
  const unsigned outer = std::max(1u, std::thread::hardware_concurrency());
  parallel_for(n, [&](std::size_t i) {
    const RateSet rates = sweep.rates_at(sweep.densities[i]);
    if (sweep.use_fringe_scans) {
      RamseyConfig seq = cfg.sequence;
      seq.workers = outer > 1 ? 1 : seq.workers;
      curves[i] = contrast_vs_time(grid, rates, cfg.kernel, tr_list, seq);
    } else {
      const KineticModel model(grid, rates, cfg.kernel);
      const double dt = cfg.times.dt > 0.0 ? cfg.times.dt : model.default_step();
      curves[i] = evolve(model, transverse_field(grid), {cfg.times.t_final, dt, cfg.times.sample_every, {}});
    }
    io::write_trajectory(dir / ("fig3_n" + density_label(sweep.densities[i]) + ".csv"), curves[i]);
  });

  json entries = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    const double density = sweep.densities[i];
    const RateSet rates = sweep.rates_at(density);
    json e = {{"density", density},
              {"file", "fig3_n" + density_label(density) + ".csv"},
              {"rates", rates_json(rates)}};
    try {
      const RevivalFit rev = fit_revival_time(curves[i]);
      e["revival_time_s"] = rev.time;
      e["revival_contrast"] = rev.peak;
      e["minimum_time_s"] = rev.minimum_time;
      e["minimum_contrast"] = rev.minimum;
    } catch (const NoRevivalError&) {
      e["revival_time_s"] = nullptr;
      e["revival"] = "none";
    }
    e["estimate_2pi_over_omega_ex_s"] = rates.effective_exchange() > 0.0 ? json(two_class_revival_estimate(rates)) : json(nullptr);
    e["empirical_fit_s"] = density > 0.0 ? json(-0.02 + 0.3 / density) : json(nullptr);
    manifest.output(dir / e["file"].get<std::string>());
    entries.push_back(e);
  }
  const json summary = {{"method", sweep.use_fringe_scans ? "fringe" : "direct"}, {"densities", entries}};
  io::write_text(dir / "fig3_summary.json", summary.dump(2) + "\n");
  manifest.output(dir / "fig3_summary.json");
  manifest.resolved() = {{"grid", grid_json(grid, cfg.grid)}, {"kernel", cfg.kernel_source}, {"tr_list_s", tr_list}};
  manifest.write(dir);
  out << summary.dump(2) << '\n';
  return kOk;
}

int cmd_ramsey_scan(const CommonArgs& args, std::ostream& out) {
  const RunConfig cfg = load(args);
  Manifest manifest("ramsey-scan", cfg);
  const EnergyGrid grid = cfg.grid.build();
  const RateSet rates = cfg.rates();
  const FringeScan scan = fringe_scan(grid, rates, cfg.kernel, cfg.sequence);

  const fs::path dir = out_dir(args, cfg);
  std::ostringstream csv;
  csv << "detuning_rad_s,probability\n";
  for (std::size_t k = 0; k < scan.detunings.size(); ++k)
    csv << io::format_double(scan.detunings[k]) << ',' << io::format_double(scan.probabilities[k]) << '\n';
  io::write_text(dir / "fringe_scan.csv", csv.str());
  const json fit = {{"model", "fringe"},
                    {"parameters",
                     {{"contrast", scan.fitted_contrast},
                      {"phase_rad", scan.fitted_phase},
                      {"ramsey_time_s", cfg.sequence.ramsey_time_tr}}},
                    {"residual_rms", scan.residual_rms}};
  io::write_text(dir / "fringe_fit.json", fit.dump(2) + "\n");
  manifest.output(dir / "fringe_scan.csv");
  manifest.output(dir / "fringe_fit.json");
  manifest.resolved() = {{"rates", rates_json(rates)}, {"grid", grid_json(grid, cfg.grid)}, {"kernel", cfg.kernel_source}};
  manifest.write(dir);
  out << fit.dump(2) << '\n';
  return kOk;
}

json fit_record(const std::string& kind, const fs::path& input) {
  if (kind == "revival") {
    std::ifstream probe(input);
    std::string header;
    std::getline(probe, header);
    if (!header.empty() && header.back() == '\r') header.pop_back();
    RevivalFit r;
    if (header == io::kTrajectoryHeader) {
      r = fit_revival_time(io::read_trajectory(input));
    } else {
      const io::Series s = io::read_series(input);
      r = fit_revival_time(s.x, s.y);
    }
    return {{"model", "revival"},
            {"parameters",
             {{"revival_time_s", r.time},
              {"peak_contrast", r.peak},
              {"minimum_time_s", r.minimum_time},
              {"minimum_contrast", r.minimum}}},
            {"residual_rms", nullptr}};
  }
  const io::Series s = io::read_series(input);
  if (kind == "exp_decay") {
    const DecayFit f = fit_exponential_decay(s.x, s.y);
    return {{"model", "exp_decay"},
            {"parameters", {{"amplitude", f.amplitude}, {"tau_s", f.tau}}},
            {"residual_rms", f.residual_rms}};
  }
  if (kind == "atom_number") {
    const AtomNumberFit f = fit_atom_number(s.x, s.y);
    return {{"model", "atom_number"},
            {"parameters", {{"n_total", f.n_total}, {"tau_s", f.tau}}},
            {"residual_rms", f.residual_rms}};
  }
  throw ConfigError("--kind", "must be exp_decay, atom_number or revival");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spin self-rephasing kinetics: simulation, Ramsey analysis and fits", "rephase"};
  app.set_version_flag("--version", REPHASE_VERSION);
  app.require_subcommand(1);

  CommonArgs derive_args, sim_args, two_args, fig3_args, scan_args;
  add_common(app.add_subcommand("derive", "physical rates and dynamical regime"), derive_args);
  add_common(app.add_subcommand("simulate", "integrate the kinetic equation, write trajectory + manifest"), sim_args);
  add_common(app.add_subcommand("two-class", "two-class toy model trajectory"), two_args);
  add_common(app.add_subcommand("fig3", "contrast vs Ramsey time for a density sweep"), fig3_args);
  add_common(app.add_subcommand("ramsey-scan", "fringe scan at one Ramsey time"), scan_args);

  std::string fit_kind, fit_input, fit_out;
  auto* fit = app.add_subcommand("fit", "fit experimental CSV data");
  fit->add_option("--kind", fit_kind, "exp_decay | atom_number | revival")->required();
  fit->add_option("--input,input", fit_input, "CSV file `t_or_detuning,value` with a header")->required();
  fit->add_option("--out", fit_out, "directory for fit.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kConfigError;
  }

  try {
    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "derive") return cmd_derive(derive_args, out);
    if (name == "simulate") return cmd_simulate(sim_args, out);
    if (name == "two-class") return cmd_two_class(two_args, out);
    if (name == "fig3") return cmd_fig3(fig3_args, out);
    if (name == "ramsey-scan") return cmd_ramsey_scan(scan_args, out);
    const json record = fit_record(fit_kind, fit_input);
    out << record.dump(2) << '\n';
    if (!fit_out.empty()) io::write_text(fs::path(fit_out) / "fit.json", record.dump(2) + "\n");
    return kOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidArgument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumericError;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIoError;
  }
}

}  // namespace rephase::cli
