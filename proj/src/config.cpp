#include "rephase/config.hpp"

#include <cmath>
#include <fstream>

#include "rephase/errors.hpp"
#include "rephase/io.hpp"

namespace rephase {

using nlohmann::json;

namespace {

/// Typed access to one JSON object with its dotted path for error messages.
class Section {
 public:
  Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "must be an object");
  }

  bool has(const char* key) const { return obj_.contains(key) && !obj_.at(key).is_null(); }

  std::string field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  Section sub(const char* key) const { return Section(obj_.at(key), field(key)); }

  double number(const char* key) const {
    if (!has(key)) throw ConfigError(field(key), "required");
    const json& v = obj_.at(key);
    if (!v.is_number()) throw ConfigError(field(key), "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(field(key), "must be finite");
    return d;
  }

  double number(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }

  double positive(const char* key) const {
    const double d = number(key);
    if (!(d > 0.0)) throw ConfigError(field(key), "must be > 0");
    return d;
  }

  int integer(const char* key, int fallback) const {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_number_integer()) throw ConfigError(field(key), "must be an integer");
    return v.get<int>();
  }

  std::string text(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_string()) throw ConfigError(field(key), "must be a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const char* key) const {
    const json& v = obj_.at(key);
    if (!v.is_array()) throw ConfigError(field(key), "must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(field(key) + "[" + std::to_string(i) + "]", "must be a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

 private:
  const json& obj_;
  std::string path_;
};

AtomicParams parse_atomic(const Section& s) {
  AtomicParams p;
  p.mass = s.has("mass_kg") ? s.positive("mass_kg") : constants::kRb87Mass;
  if (s.has("a01_m") == s.has("a01_bohr")) throw ConfigError(s.field("a01_bohr"), "give exactly one of a01_bohr, a01_m");
  p.scattering_length_a01 = s.has("a01_m") ? s.number("a01_m") : s.number("a01_bohr") * constants::kBohrRadius;
  if (p.scattering_length_a01 == 0.0) throw ConfigError(s.field(s.has("a01_m") ? "a01_m" : "a01_bohr"), "must be nonzero");
  if (s.has("density_m3") && s.has("density"))
    throw ConfigError(s.field("density"), "give exactly one of density (1e12 cm^-3), density_m3");
  if (s.has("density_m3"))
    p.density_nbar = s.number("density_m3");
  else
    p.density_nbar = s.number("density") * constants::kDensityUnit;
  if (p.density_nbar < 0.0) throw ConfigError(s.field("density"), "must be >= 0");
  p.temperature = s.positive("temperature_K");
  if (s.has("a00_bohr")) p.scattering_length_a00 = s.number("a00_bohr") * constants::kBohrRadius;
  if (s.has("a11_bohr")) p.scattering_length_a11 = s.number("a11_bohr") * constants::kBohrRadius;
  return p;
}

double renorm_field(const Section& s, const char* key) {
  const double r = s.number(key, 1.0);
  if (!(r > 0.0 && r <= 1.0)) throw ConfigError(s.field(key), "must lie in (0, 1]");
  return r;
}

RateSet parse_rates(const Section& s) {
  RateSet r;
  r.delta0 = hz_to_rad(s.number("delta0_hz"));
  r.omega_ex = hz_to_rad(s.number("omega_ex_hz"));
  r.gamma_c = s.number("gamma_c_per_s");
  if (r.gamma_c < 0.0) throw ConfigError(s.field("gamma_c_per_s"), "must be >= 0");
  r.detuning = hz_to_rad(s.number("detuning_hz", 0.0));
  r.exchange_renorm = renorm_field(s, "exchange_renorm");
  return r;
}

GridConfig parse_grid(const Section& s) {
  GridConfig g;
  const std::string scheme = s.text("scheme", "uniform");
  if (scheme == "uniform")
    g.scheme = GridScheme::UniformTruncated;
  else if (scheme == "gauss")
    g.scheme = GridScheme::GaussLaguerreAlpha2;
  else
    throw ConfigError(s.field("scheme"), "must be \"uniform\" or \"gauss\"");
  g.n_points = s.integer("n_points", g.scheme == GridScheme::UniformTruncated ? 800 : 48);
  g.e_max = s.number("e_max", 40.0);
  if (g.scheme == GridScheme::UniformTruncated) {
    if (g.n_points < 8) throw ConfigError(s.field("n_points"), "must be >= 8 for the uniform grid");
    if (!(g.e_max >= 8.0)) throw ConfigError(s.field("e_max"), "must be >= 8");
  } else if (g.n_points < 2 || g.n_points > 256) {
    throw ConfigError(s.field("n_points"), "must lie in [2, 256] for the gauss grid");
  }
  return g;
}

KernelSpec parse_kernel(const Section& s, const std::filesystem::path& base_dir, std::string& source) {
  const std::string kind = s.text("kind", "infinite_range");
  source = kind;
  if (kind == "infinite_range" || kind == "uniform") return KernelSpec::infinite_range();
  if (kind == "oned") {
    const double eps = s.number("epsilon", 1e-6);
    if (!(eps > 0.0)) throw ConfigError(s.field("epsilon"), "must be > 0");
    return KernelSpec::one_d(eps);
  }
  if (kind == "matrix") {
    std::filesystem::path path = s.text("path", "");
    if (path.empty()) throw ConfigError(s.field("path"), "required for the matrix kernel");
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    source = "matrix:" + path.string();
    try {
      return KernelSpec::from_matrix(io::read_matrix(path));
    } catch (const InvalidArgument& e) {
      throw ConfigError(s.field("path"), e.what());
    }
  }
  throw ConfigError(s.field("kind"), "must be infinite_range, oned or matrix");
}

RamseyConfig parse_sequence(const Section& s) {
  RamseyConfig c;
  c.ramsey_time_tr = s.has("ramsey_time_s") ? s.positive("ramsey_time_s") : 0.1;
  c.detuning_dr = hz_to_rad(s.number("detuning_hz", 3.6));
  c.n_detuning_steps = s.integer("n_detuning_steps", 30);
  if (c.n_detuning_steps < 5) throw ConfigError(s.field("n_detuning_steps"), "must be >= 5");
  c.span_periods = s.number("span_periods", 2.0);
  if (!(c.span_periods >= 1.5)) throw ConfigError(s.field("span_periods"), "must be >= 1.5");
  const std::string pulse = s.text("pulse_model", "instantaneous");
  if (pulse != "instantaneous") throw ConfigError(s.field("pulse_model"), "only \"instantaneous\" is supported");
  c.workers = static_cast<unsigned>(std::max(0, s.integer("workers", 0)));
  return c;
}

TimeConfig parse_times(const Section& s) {
  TimeConfig t;
  if (s.has("t_final_s")) t.t_final = s.positive("t_final_s");
  t.dt = s.number("dt_s", 0.0);
  if (t.dt < 0.0) throw ConfigError(s.field("dt_s"), "must be >= 0 (0 selects the default step)");
  t.sample_every = s.integer("sample_every", 10);
  if (t.sample_every < 1) throw ConfigError(s.field("sample_every"), "must be >= 1");
  if (s.has("tr_list_s")) {
    t.tr_list = s.numbers("tr_list_s");
    for (std::size_t i = 0; i < t.tr_list.size(); ++i) {
      if (!(t.tr_list[i] > 0.0)) throw ConfigError(s.field("tr_list_s"), "entries must be > 0");
      if (i > 0 && !(t.tr_list[i] > t.tr_list[i - 1])) throw ConfigError(s.field("tr_list_s"), "must increase strictly");
    }
  }
  return t;
}

DensitySweep parse_sweep(const Section& s, const json& root) {
  DensitySweep d;
  const Section top(root, "");
  if (s.has("densities") && top.has("densities")) throw ConfigError("densities", "give the list once, at top level or in fig3");
  if (s.has("densities"))
    d.densities = s.numbers("densities");
  else if (top.has("densities"))
    d.densities = top.numbers("densities");
  const std::string where = s.has("densities") ? s.field("densities") : "densities";
  if (d.densities.empty()) throw ConfigError(where, "must be a nonempty list");
  for (double n : d.densities)
    if (!(n >= 0.0)) throw ConfigError(where, "entries must be >= 0");
  d.delta0 = hz_to_rad(s.number("delta0_hz", 2.0));
  d.exchange_per_density = hz_to_rad(s.number("exchange_hz_per_density", 7.5));
  d.gamma_c_per_density = s.number("gamma_c_per_s_per_density", 2.1);
  if (d.gamma_c_per_density < 0.0) throw ConfigError(s.field("gamma_c_per_s_per_density"), "must be >= 0");
  d.exchange_renorm = renorm_field(s, "exchange_renorm");
  const std::string method = s.text("method", "fringe");
  if (method != "fringe" && method != "direct") throw ConfigError(s.field("method"), "must be fringe or direct");
  d.use_fringe_scans = method == "fringe";
  return d;
}

TwoClassState parse_two_class(const Section& s) {
  TwoClassState st;
  st.delta_split = hz_to_rad(s.number("delta_split_hz"));
  st.omega_ex = hz_to_rad(s.number("omega_ex_hz"));
  st.gamma_x = s.number("gamma_x_per_s", 0.0);
  if (st.gamma_x < 0.0) throw ConfigError(s.field("gamma_x_per_s"), "must be >= 0");
  return st;
}

}  // namespace

EnergyGrid GridConfig::build() const {
  return scheme == GridScheme::GaussLaguerreAlpha2 ? EnergyGrid::gauss(n_points) : EnergyGrid::uniform(n_points, e_max);
}

RateSet DensitySweep::rates_at(double density) const {
  RateSet r;
  r.delta0 = delta0;
  r.omega_ex = exchange_per_density * density;
  r.gamma_c = gamma_c_per_density * density;
  r.exchange_renorm = exchange_renorm;
  return r;
}

double RunConfig::atomic_delta0() const {
  if (delta0_fixed) return *delta0_fixed;
  if (delta0_model && atomic) return delta0_model->at(atomic->density_nbar);
  throw ConfigError("delta0", "required with atomic parameters");
}

RateSet RunConfig::rates() const {
  if (rates_override) return *rates_override;
  if (atomic) return derive_rates(*atomic, atomic_delta0(), 0.0, atomic_exchange_renorm);
  throw ConfigError("rates_override", "no rate source: give atomic or rates_override");
}

void apply_overrides(json& doc, const Overrides& o) {
  if (!doc.is_object()) return;
  if (o.grid_points) doc["grid"]["n_points"] = *o.grid_points;
  if (o.dt) doc["times"]["dt_s"] = *o.dt;
  if (o.renorm) {
    if (doc.contains("rates_override")) doc["rates_override"]["exchange_renorm"] = *o.renorm;
    if (doc.contains("fig3")) doc["fig3"]["exchange_renorm"] = *o.renorm;
    if (doc.contains("atomic")) doc["exchange_renorm"] = *o.renorm;
  }
  if (o.kernel) {
    const std::string& k = *o.kernel;
    json kernel = json::object();
    if (k == "uniform" || k == "infinite_range") {
      kernel["kind"] = "infinite_range";
    } else if (k == "oned") {
      kernel["kind"] = "oned";
    } else if (k.rfind("matrix:", 0) == 0) {
      kernel["kind"] = "matrix";
      kernel["path"] = std::filesystem::absolute(k.substr(7)).string();
    } else {
      throw ConfigError("--kernel", "must be uniform, oned or matrix:PATH");
    }
    doc["kernel"] = kernel;
  }
}

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  const Section root(doc, "");
  RunConfig cfg;
  cfg.document = doc;

  if (root.has("atomic") && root.has("rates_override"))
    throw ConfigError("rates_override", "exactly one of atomic, rates_override may be given");

  if (root.has("atomic")) {
    cfg.atomic = parse_atomic(root.sub("atomic"));
    cfg.atomic_exchange_renorm = renorm_field(root, "exchange_renorm");
    if (root.has("delta0")) {
      const Section d = root.sub("delta0");
      if (d.has("hz")) {
        cfg.delta0_fixed = hz_to_rad(d.number("hz"));
      } else {
        InhomogeneityModel m;
        m.base = hz_to_rad(d.number("base_hz", 1.2));
        m.slope = hz_to_rad(d.number("slope_hz", 0.1));
        cfg.delta0_model = m;
      }
    } else {
      throw ConfigError("delta0", "required with atomic parameters ({\"hz\": ...} or {\"base_hz\", \"slope_hz\"})");
    }
  }
  if (root.has("rates_override")) cfg.rates_override = parse_rates(root.sub("rates_override"));

  if (root.has("trap_hz")) {
    const Section t = root.sub("trap_hz");
    cfg.trap = TrapParams{hz_to_rad(t.positive("x")), hz_to_rad(t.positive("y")), hz_to_rad(t.positive("z"))};
  }
  if (root.has("regime")) {
    const Section r = root.sub("regime");
    cfg.thresholds.tight_sync_ratio = r.number("tight_sync_ratio", 10.0);
    cfg.thresholds.knudsen_fraction = r.number("knudsen_fraction", 0.1);
    if (!(cfg.thresholds.tight_sync_ratio > 1.0)) throw ConfigError(r.field("tight_sync_ratio"), "must be > 1");
    if (!(cfg.thresholds.knudsen_fraction > 0.0)) throw ConfigError(r.field("knudsen_fraction"), "must be > 0");
  }

  cfg.grid = root.has("grid") ? parse_grid(root.sub("grid")) : GridConfig{};
  if (root.has("kernel")) cfg.kernel = parse_kernel(root.sub("kernel"), base_dir, cfg.kernel_source);

  const std::string initial = root.text("initial", "transverse");
  if (initial == "transverse")
    cfg.initial = InitialState::Transverse;
  else if (initial == "ground")
    cfg.initial = InitialState::Ground;
  else
    throw ConfigError("initial", "must be \"transverse\" or \"ground\"");

  if (root.has("sequence")) cfg.sequence = parse_sequence(root.sub("sequence"));
  if (root.has("times")) cfg.times = parse_times(root.sub("times"));
  cfg.sequence.dt = cfg.times.dt;
  if (root.has("fig3")) cfg.sweep = parse_sweep(root.sub("fig3"), doc);
  if (root.has("two_class")) cfg.two_class = parse_two_class(root.sub("two_class"));

  if (root.has("output")) {
    const Section o = root.sub("output");
    cfg.output.path = o.text("path", "out");
    cfg.output.format = o.text("format", "csv");
    if (cfg.output.format != "csv") throw ConfigError(o.field("format"), "only csv is supported");
  }

  // Resolve the rate source now so bad values surface as config errors.
  if (cfg.rates_override || cfg.atomic) {
    try {
      (void)cfg.rates();
    } catch (const InvalidArgument& e) {
      throw ConfigError(cfg.atomic ? "atomic" : "rates_override", e.what());
    }
  }
  return cfg;
}

json load_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), std::string("invalid JSON: ") + e.what());
  }
  // Run manifests embed the exact config they were produced from.
  if (doc.is_object() && doc.contains("manifest_version") && doc.contains("config")) return doc.at("config");
  return doc;
}

}  // namespace rephase
