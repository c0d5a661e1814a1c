// Acceptance gate: one PASS/FAIL line per criterion with pinned tolerances.
// Usage: acceptance [--criterion ID]...   (no arguments runs every criterion)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "rephase/config.hpp"
#include "rephase/errors.hpp"
#include "rephase/fitting.hpp"
#include "rephase/kinetic.hpp"
#include "rephase/ramsey.hpp"
#include "rephase/two_class.hpp"

using namespace rephase;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v, int digits = 3) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

const fs::path kSource = REPHASE_SOURCE_DIR;

const RunConfig& fig3_preset() {
  static const RunConfig cfg = parse_config(load_document(kSource / "presets/fig3.json"), kSource / "presets");
  return cfg;
}

RateSet fig3_rates(double nbar) { return fig3_preset().sweep.value().rates_at(nbar); }

const EnergyGrid& default_grid() {
  static const EnergyGrid g = GridConfig{}.build();
  return g;
}

// Evolves from u_perp1 and samples every millisecond on an exact time lattice.
ContrastCurve sampled_ms(const EnergyGrid& g, const RateSet& r, double t_final, SpinField* last = nullptr) {
  const KineticModel model(g, r);
  const int ms = static_cast<int>(std::lround(t_final * 1000.0));
  const int per_ms = static_cast<int>(std::ceil(1e-3 / model.default_step()));
  return evolve(model, transverse_field(g), {t_final, t_final / (ms * per_ms), per_ms, {}}, last);
}

double mean_over(const ContrastCurve& c, double t0, double t1) {
  double sum = 0.0;
  int n = 0;
  for (std::size_t k = 0; k < c.size(); ++k)
    if (c.times[k] >= t0 - 1e-12 && c.times[k] <= t1 + 1e-12) {
      sum += c.contrast[k];
      ++n;
    }
  return sum / n;
}

SpinField random_field(const EnergyGrid& g, std::uint64_t seed) {
  // Small LCG keeps the field independent of library RNG implementations.
  auto next = [&seed] {
    seed = seed * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(seed >> 11) / 9007199254740992.0 * 2.0 - 1.0;
  };
  SpinField f;
  for (std::size_t i = 0; i < g.size(); ++i) {
    SpinVector v{next(), next(), next()};
    f.spins.push_back((1.0 / v.norm()) * v);
  }
  return f;
}

Outcome criterion_1() {
  Stopwatch sw;
  const EnergyGrid g = EnergyGrid::gauss(48);
  RateSet r;
  r.delta0 = hz_to_rad(2.0);
  const auto curve = evolve(transverse_field(g), g, r, {}, 0.5, 1e-3, 1);
  double worst = 0.0, at = 0.0;
  for (std::size_t k = 0; k < curve.size(); ++k) {
    const double e = std::abs(curve.contrast[k] - analytic_contrast(r.delta0, curve.times[k]));
    if (e > worst) worst = e, at = curve.times[k];
  }
  const double secs = sw.seconds();
  return {worst < 1e-4 && secs < 1.0, "48 Gauss nodes, dt=1 ms: max error " + fmt(worst) + " at t=" + fmt(at) +
                                          " s (tol 1e-4), runtime " + fmt(secs) + " s (limit 1 s)"};
}

Outcome criterion_1_default_grid() {
  Stopwatch sw;
  const EnergyGrid& g = default_grid();
  RateSet r;
  r.delta0 = hz_to_rad(2.0);
  const auto curve = evolve(transverse_field(g), g, r, {}, 0.5, 1e-3, 1);
  double worst = 0.0;
  for (std::size_t k = 0; k < curve.size(); ++k)
    worst = std::max(worst, std::abs(curve.contrast[k] - analytic_contrast(r.delta0, curve.times[k])));
  const double secs = sw.seconds();
  return {worst < 1e-4 && secs < 1.0, "shipped default grid (uniform 800 nodes, E<=40), dt=1 ms: max error " +
                                          fmt(worst) + ", runtime " + fmt(secs) + " s"};
}

Outcome criterion_2a() {
  Stopwatch sw;
  const EnergyGrid& g = default_grid();
  RateSet r = fig3_rates(2.6);
  r.gamma_c = 0.0;
  r.detuning = hz_to_rad(3.6);
  SpinField last;
  const KineticModel model(g, r);
  const SpinField init = random_field(g, 7);
  evolve(model, init, {2.0, model.default_step(), 1 << 30, {}}, &last);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(last.spins[i].norm() - init.spins[i].norm()));
  return {worst < 1e-7, "per-node |S| drift over 2 s, gamma_c=0: " + fmt(worst) + " (tol 1e-7), runtime " +
                            fmt(sw.seconds()) + " s"};
}

Outcome criterion_2b() {
  Stopwatch sw;
  const EnergyGrid& g = default_grid();
  RateSet r = fig3_rates(2.6);
  r.delta0 = 0.0;
  r.gamma_c = 0.0;
  const SpinField init = random_field(g, 11);
  const double s0 = average(g, init.spins).norm();
  const KineticModel model(g, r);
  const auto curve = evolve(model, init, {2.0, model.default_step(), 1, {}});
  double worst = 0.0;
  for (std::size_t k = 0; k < curve.size(); ++k) worst = std::max(worst, std::abs(curve.sbar[k].norm() - s0));
  return {worst < 1e-9, "|Sbar| drift over 2 s, delta0=gamma_c=0: " + fmt(worst) + " (tol 1e-9), runtime " +
                            fmt(sw.seconds()) + " s"};
}

Outcome criterion_2c() {
  Stopwatch sw;
  const EnergyGrid& g = default_grid();
  double worst = 0.0;
  std::uint64_t seed = 0x2c;
  auto draw = [&seed](double lo, double hi) {
    seed = seed * 6364136223846793005ULL + 1442695040888963407ULL;
    return lo + (hi - lo) * static_cast<double>(seed >> 11) / 9007199254740992.0;
  };
  const int sets = 4;
  for (int s = 0; s < sets; ++s) {
    RateSet r;
    r.delta0 = hz_to_rad(draw(0.1, 3.0));
    r.omega_ex = hz_to_rad(draw(0.0, 25.0));
    r.exchange_renorm = draw(0.3, 1.0);
    r.gamma_c = draw(0.0, 8.0);
    r.detuning = hz_to_rad(draw(-5.0, 5.0));
    const SpinField init = random_field(g, 100 + s);
    const double par0 = average(g, init.spins).par;
    const KineticModel model(g, r);
    const auto curve = evolve(model, init, {2.0, model.default_step(), 10, {}});
    for (const auto& sb : curve.sbar) worst = std::max(worst, std::abs(sb.par - par0));
  }
  return {worst < 1e-8, std::to_string(sets) + " random rate sets over 2 s: max |dSbar_par| " + fmt(worst) +
                            " (tol 1e-8), runtime " + fmt(sw.seconds()) + " s"};
}

Outcome criterion_2_runtime(double total) {
  return {total < 10.0, "conservation suite runtime " + fmt(total) + " s (limit 10 s)"};
}

Outcome criterion_3() {
  AtomicParams p;
  p.scattering_length_a01 = 98.1 * constants::kBohrRadius;
  p.density_nbar = 1e18;
  p.temperature = 175e-9;
  const double w = rad_to_hz(exchange_rate(p));
  const double g = lateral_collision_rate(p);
  return {w >= 7.2 && w <= 8.0 && g >= 2.0 && g <= 2.2,
          "omega_ex/2pi = " + fmt(w, 5) + " Hz (range [7.2, 8.0]), gamma_c = " + fmt(g, 5) + " 1/s (range [2.0, 2.2])"};
}

struct Fig3Run {
  double nbar;
  ContrastCurve curve;
};

const std::vector<Fig3Run>& fig3_runs(double* seconds = nullptr) {
  static double elapsed = 0.0;
  static const std::vector<Fig3Run> runs = [] {
    Stopwatch sw;
    std::vector<Fig3Run> out;
    for (double n : fig3_preset().sweep.value().densities) out.push_back({n, sampled_ms(default_grid(), fig3_rates(n), 0.5)});
    elapsed = sw.seconds();
    return out;
  }();
  if (seconds) *seconds = elapsed;
  return runs;
}

const Fig3Run& run_at(double n) {
  for (const auto& r : fig3_runs())
    if (std::abs(r.nbar - n) < 1e-12) return r;
  throw std::runtime_error("density missing from preset");
}

Outcome criterion_4a() {
  const auto& c = run_at(0.2).curve;
  double low = 1.0;
  double when = -1.0;
  for (std::size_t k = 0; k < c.size() && c.times[k] <= 0.25 + 1e-12; ++k)
    if (c.contrast[k] < 0.05 && when < 0) when = c.times[k];
  for (std::size_t k = 0; k < c.size() && c.times[k] <= 0.25 + 1e-12; ++k) low = std::min(low, c.contrast[k]);
  std::string rev = "none";
  bool revival_above = false;
  try {
    const RevivalFit f = fit_revival_time(c);
    rev = "peak " + fmt(f.peak) + " at " + fmt(f.time) + " s";
    revival_above = f.peak > 0.1;
  } catch (const NoRevivalError&) {
  }
  return {when >= 0 && !revival_above, "nbar=0.2: contrast < 0.05 first at t=" + fmt(when) + " s (min by 250 ms " +
                                           fmt(low) + "), revival: " + rev};
}

Outcome criterion_4b() {
  bool ok = true;
  std::string detail;
  for (double n : {1.1, 1.9, 2.6}) {
    const RateSet r = fig3_rates(n);
    const double estimate = two_class_revival_estimate(r);
    const double empirical = -0.02 + 0.3 / n;
    try {
      const double t = fit_revival_time(run_at(n).curve).time;
      const bool within = t <= 2 * estimate && t >= estimate / 2 && t <= 2 * empirical && t >= empirical / 2;
      ok = ok && within;
      detail += "nbar=" + fmt(n) + ": T=" + fmt(t) + " s (2pi/w " + fmt(estimate) + ", fit " + fmt(empirical) + "); ";
    } catch (const NoRevivalError&) {
      ok = false;
      detail += "nbar=" + fmt(n) + ": no revival; ";
    }
  }
  return {ok, detail + "factor-2 windows"};
}

Outcome criterion_4c() {
  double secs = 0.0;
  const auto& runs = fig3_runs(&secs);
  bool ok = true;
  std::string detail = "C(0.2 s):";
  double prev = -1.0;
  for (const auto& r : runs) {
    const double c = r.curve.contrast.at(200);
    if (std::abs(r.curve.times[200] - 0.2) > 1e-9) ok = false;
    ok = ok && c >= prev;
    prev = c;
    detail += " " + fmt(r.nbar) + "->" + fmt(c, 4);
  }
  ok = ok && secs < 60.0;
  return {ok, detail + "; density suite runtime " + fmt(secs) + " s (limit 60 s)"};
}

Outcome criterion_5a() {
  Stopwatch sw;
  RateSet r = fig3_rates(2.6);
  r.omega_ex = 0.0;
  const auto c = sampled_ms(default_grid(), r, 0.5);
  std::size_t first_rise = 0;
  for (std::size_t k = 1; k < c.size() && first_rise == 0; ++k)
    if (!(c.contrast[k] < c.contrast[k - 1])) first_rise = k;
  bool revival = true;
  try {
    fit_revival_time(c);
  } catch (const NoRevivalError&) {
    revival = false;
  }
  std::string detail = "nbar=2.6, omega_ex=0 over 0.5 s: ";
  if (first_rise == 0) {
    detail += "strictly decreasing";
  } else {
    detail += "first non-decrease at t=" + fmt(c.times[first_rise]) + " s (C " + fmt(c.contrast[first_rise - 1]) +
              " -> " + fmt(c.contrast[first_rise]) + ")";
  }
  detail += revival ? ", revival detected" : ", no revival detected";
  return {first_rise == 0 && !revival && sw.seconds() < 30.0, detail + ", runtime " + fmt(sw.seconds()) + " s"};
}

Outcome criterion_5b() {
  Stopwatch sw;
  RateSet r = fig3_rates(2.6);
  r.gamma_c = 0.0;
  const auto c = sampled_ms(default_grid(), r, 2.0);
  const double late = mean_over(c, 1.0, 2.0);
  const double early = mean_over(c, 0.5, 1.0);
  const double rel = std::abs(late - early) / early;
  const double secs = sw.seconds();
  return {rel < 0.1 && secs < 30.0, "nbar=2.6, gamma_c=0: mean C[1,2] s = " + fmt(late, 5) + ", mean C[0.5,1] s = " +
                                        fmt(early, 5) + ", relative gap " + fmt(rel) + " (tol 0.1), runtime " +
                                        fmt(secs) + " s"};
}

Outcome criterion_6() {
  TwoClassState st;
  st.delta_split = hz_to_rad(2.0);
  st.omega_ex = hz_to_rad(6.0);
  st.gamma_x = 0.8;
  const double dt = 1e-4;
  const auto a = evolve_two_class(st, 1.0, dt, 1);

  const EnergyGrid g = EnergyGrid::custom({2.0, 4.0}, {0.5, 0.5});
  RateSet r;
  r.delta0 = 0.5 * st.delta_split;
  r.detuning = -1.5 * st.delta_split;
  r.omega_ex = st.omega_ex;
  r.exchange_renorm = 0.5;
  r.gamma_c = st.gamma_x;
  const auto b = evolve(SpinField{{st.s_slow, st.s_fast}, 0.0}, g, r, {}, 1.0, dt, 1);
  double worst = a.size() == b.size() ? 0.0 : 1.0;
  for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k)
    worst = std::max(worst, std::abs(a.contrast[k] - b.contrast[k]));
  return {worst < 1e-9, "two-class vs 2-node solver over 1 s: max |dC| " + fmt(worst) + " (tol 1e-9)"};
}

Outcome criterion_7a() {
  std::vector<double> t, v;
  for (int k = 0; k <= 5; ++k) {
    t.push_back(k);
    v.push_back(std::exp(-k / 58.0));
  }
  const double tau = fit_exponential_decay(t, v).tau;
  const double rel = std::abs(tau - 58.0) / 58.0;
  return {rel < 1e-6, "tau = " + fmt(tau, 12) + " s, relative error " + fmt(rel) + " (tol 1e-6)"};
}

Outcome criterion_7b() {
  std::vector<double> t, n;
  for (int k = 0; k <= 15; ++k) {
    t.push_back(1.5 * k);
    n.push_back(0.5 * 24.8e3 * (1.0 + std::exp(-t.back() / 8.7)));
  }
  const AtomNumberFit f = fit_atom_number(t, n);
  const double e1 = std::abs(f.n_total - 24.8e3) / 24.8e3, e2 = std::abs(f.tau - 8.7) / 8.7;
  return {e1 < 1e-6 && e2 < 1e-6, "N_T = " + fmt(f.n_total, 12) + ", tau = " + fmt(f.tau, 12) +
                                      " s, relative errors " + fmt(e1) + ", " + fmt(e2) + " (tol 1e-6)"};
}

Outcome criterion_7c() {
  RamseyConfig cfg;
  const auto d = scan_detunings(cfg);
  std::vector<double> p;
  for (double x : d) p.push_back(0.5 * (1.0 + 0.8 * std::cos(x * cfg.ramsey_time_tr)));
  const FringeFit f = fit_fringe(d, p, cfg.ramsey_time_tr);
  const double ec = std::abs(f.contrast - 0.8), ep = std::abs(f.phase);
  return {ec < 1e-12 && ep < 1e-12, "C = " + fmt(f.contrast, 17) + ", phi = " + fmt(f.phase) +
                                        " (exact to 1e-12 rounding)"};
}

Outcome criterion_8() {
  Stopwatch sw;
  const EnergyGrid& g = default_grid();
  RamseyConfig cfg = fig3_preset().sequence;
  cfg.ramsey_time_tr = 0.2;
  cfg.dt = 0.0;
  bool ok = true;
  std::string detail;
  for (double n : {0.8, 1.9, 2.6}) {
    const RateSet r = fig3_rates(n);
    const FringeScan scan = fringe_scan(g, r, {}, cfg);
    const KineticModel model(g, r);
    const auto direct = evolve(model, transverse_field(g), {cfg.ramsey_time_tr, model.default_step(), 1 << 30, {}});
    const double diff = std::abs(scan.fitted_contrast - direct.contrast.back() / direct.contrast.front());
    ok = ok && diff < 1e-3;
    detail += "nbar=" + fmt(n) + ": fringe " + fmt(scan.fitted_contrast, 6) + " vs |Sbar_perp| " +
              fmt(direct.contrast.back(), 6) + "; ";
  }
  return {ok, detail + "tol 1e-3 at T_R=0.2 s, runtime " + fmt(sw.seconds()) + " s"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome criterion_9() {
  Stopwatch sw;
  const fs::path root = fs::temp_directory_path() / "rephase_acceptance_determinism";
  fs::remove_all(root);
  struct Job {
    std::string command, preset, extra;
  };
  const std::vector<Job> jobs{{"simulate", "experiment1.json", ""},
                              {"simulate", "fig3.json", ""},
                              {"two-class", "two_class.json", ""},
                              {"ramsey-scan", "fig3.json", ""},
                              {"fig3", "fig3.json", " --grid-points 48"}};
  bool ok = true;
  int files = 0;
  std::string detail;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    std::vector<fs::path> dirs;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path dir = root / (std::to_string(j) + "_" + std::to_string(rep));
      const std::string cmd = std::string("\"") + REPHASE_CLI_PATH + "\" " + jobs[j].command + " --config \"" +
                              (kSource / "presets" / jobs[j].preset).string() + "\" --out \"" + dir.string() + "\"" +
                              jobs[j].extra + " > /dev/null";
      if (std::system(cmd.c_str()) != 0) {
        ok = false;
        detail += jobs[j].command + " " + jobs[j].preset + " failed; ";
      }
      dirs.push_back(dir);
    }
    if (!fs::exists(dirs[0])) continue;
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      if (entry.path().extension() != ".csv") continue;
      ++files;
      if (slurp(entry.path()) != slurp(dirs[1] / entry.path().filename())) {
        ok = false;
        detail += entry.path().filename().string() + " differs (" + jobs[j].command + "); ";
      }
    }
  }
  fs::remove_all(root);
  ok = ok && files > 0;
  return {ok, detail + std::to_string(files) + " CSV files compared across " + std::to_string(jobs.size()) +
                  " preset runs, runtime " + fmt(sw.seconds()) + " s"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1", criterion_1},   {"2a", criterion_2a}, {"2b", criterion_2b}, {"2c", criterion_2c},
      {"3", criterion_3},   {"4a", criterion_4a}, {"4b", criterion_4b}, {"4c", criterion_4c},
      {"5a", criterion_5a}, {"5b", criterion_5b}, {"6", criterion_6},   {"7a", criterion_7a},
      {"7b", criterion_7b}, {"7c", criterion_7c}, {"8", criterion_8},   {"9", criterion_9}};

  std::vector<std::string> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      selected.push_back(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--criterion ID]...\n";
      return 2;
    }
  }
  for (const auto& s : selected)
    if (std::none_of(criteria.begin(), criteria.end(), [&](const auto& c) { return c.first == s; })) {
      std::cerr << "unknown criterion " << s << '\n';
      return 2;
    }

  int failures = 0;
  double conservation_time = 0.0;
  int conservation_ran = 0;
  for (const auto& [id, fn] : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), id) == selected.end()) continue;
    Outcome o;
    Stopwatch sw;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (id.front() == '2') conservation_time += sw.seconds(), ++conservation_ran;
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << ": " << o.detail << std::endl;
    if (id == "1") {
      const Outcome info = criterion_1_default_grid();
      std::cout << "INFO  criterion 1 on the shipped default grid: " << (info.pass ? "within" : "outside")
                << " tolerance; " << info.detail << std::endl;
    }
  }
  if (conservation_ran == 3) {
    const Outcome o = criterion_2_runtime(conservation_time);
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion 2: " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
