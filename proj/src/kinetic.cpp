#include "rephase/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rephase/errors.hpp"
#include "rephase/rk4.hpp"

namespace rephase {

std::string_view to_string(KernelKind k) {
  switch (k) {
    case KernelKind::InfiniteRange:
      return "infinite_range";
    case KernelKind::OneD:
      return "oned";
    case KernelKind::Matrix:
      return "matrix";
  }
  return "unknown";
}

KernelSpec KernelSpec::from_matrix(std::vector<double> row_major) {
  const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(row_major.size()))));
  if (n * n != row_major.size() || n == 0) throw InvalidArgument("kernel matrix must be square");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double kij = row_major[i * n + j];
      if (!std::isfinite(kij) || kij < 0.0) throw InvalidArgument("kernel matrix entries must be finite and >= 0");
      if (std::abs(kij - row_major[j * n + i]) > 1e-12) throw InvalidArgument("kernel matrix must be symmetric");
    }
  }
  return {KernelKind::Matrix, std::move(row_major), 1e-6};
}

std::vector<double> build_kernel_matrix(const EnergyGrid& grid, const KernelSpec& spec) {
  const std::size_t n = grid.size();
  const auto e = grid.nodes();
  switch (spec.kind) {
    case KernelKind::InfiniteRange:
      return std::vector<double>(n * n, 1.0);
    case KernelKind::OneD: {
      if (!(spec.regularization_epsilon > 0.0)) throw InvalidArgument("oned kernel: epsilon must be > 0");
      std::vector<double> k(n * n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          const double gap = std::max(std::abs(e[i] - e[j]), spec.regularization_epsilon);
          k[i * n + j] = std::pow(std::max(e[i], e[j]) * gap, -0.25);
        }
      }
      return k;
    }
    case KernelKind::Matrix:
      if (!spec.matrix || spec.matrix->size() != n * n)
        throw InvalidArgument("matrix kernel: size does not match the grid");
      return *spec.matrix;
  }
  throw InvalidArgument("unknown kernel kind");
}

SpinField transverse_field(const EnergyGrid& grid) {
  return {std::vector<SpinVector>(grid.size(), SpinVector::u_perp1()), 0.0};
}

SpinField ground_field(const EnergyGrid& grid) {
  return {std::vector<SpinVector>(grid.size(), -SpinVector::u_par()), 0.0};
}

void ContrastCurve::push(double t, const SpinVector& mean) {
  times.push_back(t);
  sbar.push_back(mean);
  contrast.push_back(mean.transverse());
  contrast_total.push_back(mean.norm());
}

KineticModel::KineticModel(const EnergyGrid& grid, const RateSet& rates, const KernelSpec& kernel)
    : grid_(grid), rates_(rates) {
  rates_.validate();
  const std::size_t n = grid_.size();
  const auto e = grid_.nodes();
  const auto w = grid_.weights();

  longitudinal_.resize(n);
  double max_longitudinal = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    longitudinal_[i] = rates_.delta0 * e[i] + rates_.detuning;
    max_longitudinal = std::max(max_longitudinal, std::abs(longitudinal_[i]));
  }
  exchange_ = rates_.effective_exchange();

  double max_row = 1.0;
  if (kernel.kind != KernelKind::InfiniteRange) {
    coupling_ = build_kernel_matrix(grid_, kernel);
    max_row = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        double& c = coupling_[i * n + j];
        c = (i == j) ? 0.0 : w[j] * c;
        row += c;
      }
      max_row = std::max(max_row, row);
    }
  }
  // |M_i| <= row sum for unit spins; norms stay ~1 in all supported runs.
  max_rotation_ = max_longitudinal + std::abs(exchange_) * max_row;
}

double KineticModel::max_stable_step() const {
  const double fastest = std::max(max_rotation_, rates_.gamma_c);
  return fastest > 0.0 ? kStabilityMargin / fastest : std::numeric_limits<double>::infinity();
}

double KineticModel::default_step() const {
  const double fastest = std::max(max_rotation_, rates_.gamma_c);
  return fastest > 0.0 ? kDefaultStepFactor / fastest : 1e-3;
}

void KineticModel::derivative(std::span<const SpinVector> state, std::span<SpinVector> out) const {
  const std::size_t n = longitudinal_.size();
  const auto w = grid_.weights();
  SpinVector mean;
  for (std::size_t i = 0; i < n; ++i) mean += w[i] * state[i];

  const double gamma = rates_.gamma_c;
  if (coupling_.empty()) {
    const SpinVector field_ex = exchange_ * mean;
    for (std::size_t i = 0; i < n; ++i) {
      const SpinVector& s = state[i];
      SpinVector b = field_ex;
      b.par += longitudinal_[i];
      out[i] = cross(b, s) - gamma * (s - mean);
    }
    return;
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double* row = coupling_.data() + i * n;
    SpinVector m;
    for (std::size_t j = 0; j < n; ++j) m += row[j] * state[j];
    const SpinVector& s = state[i];
    SpinVector b = exchange_ * m;
    b.par += longitudinal_[i];
    out[i] = cross(b, s) - gamma * (s - mean);
  }
}

std::vector<SpinVector> rhs(const SpinField& field, const EnergyGrid& grid, const RateSet& rates,
                            const KernelSpec& kernel) {
  if (field.spins.size() != grid.size()) throw InvalidArgument("rhs: field length does not match grid");
  for (const auto& s : field.spins)
    if (!s.finite()) throw InvalidArgument("rhs: non-finite spin component");
  const KineticModel model(grid, rates, kernel);
  std::vector<SpinVector> out(field.spins.size());
  model.derivative(field.spins, out);
  return out;
}

namespace {

struct StepPlan {
  long steps = 0;
  double h = 0.0;
};

StepPlan plan_steps(const KineticModel& model, double duration, double dt) {
  if (!(duration > 0.0) || !std::isfinite(duration)) throw InvalidArgument("evolve: t_final must be > 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("evolve: dt must be > 0");
  const double limit = model.max_stable_step();
  if (dt > limit) {
    std::ostringstream msg;
    msg << "evolve: dt = " << dt << " s exceeds the RK4 stability bound " << limit
        << " s for the fastest rate " << std::max(model.max_rotation_rate(), model.rates().gamma_c)
        << " /s (recommended dt " << model.default_step() << " s)";
    throw NumericError(msg.str());
  }
  StepPlan plan;
  plan.steps = static_cast<long>(std::ceil(duration / dt * (1.0 - 1e-12)));
  plan.steps = std::max(plan.steps, 1L);
  plan.h = duration / static_cast<double>(plan.steps);
  return plan;
}

void check_field(const KineticModel& model, const SpinField& field) {
  if (field.spins.size() != model.size()) throw InvalidArgument("evolve: field length does not match grid");
  for (const auto& s : field.spins)
    if (!s.finite()) throw InvalidArgument("evolve: non-finite initial spin");
}

[[noreturn]] void non_finite(double t) {
  std::ostringstream msg;
  msg << "evolve: non-finite state at t = " << t << " s";
  throw NumericError(msg.str());
}

}  // namespace

ContrastCurve evolve(const KineticModel& model, const SpinField& initial, const EvolveOptions& opts,
                     SpinField* final_state) {
  check_field(model, initial);
  if (opts.sample_every < 1) throw InvalidArgument("evolve: sample_every must be >= 1");
  const StepPlan plan = plan_steps(model, opts.t_final, opts.dt);

  SpinField field = initial;
  const double t0 = initial.time;
  Rk4<SpinVector> stepper(field.spins.size());
  auto f = [&model](const std::vector<SpinVector>& y, std::vector<SpinVector>& dy) { model.derivative(y, dy); };

  ContrastCurve curve;
  auto record = [&](long k) {
    field.time = (k == plan.steps) ? t0 + opts.t_final : t0 + static_cast<double>(k) * plan.h;
    const SpinVector mean = average(model.grid(), field.spins);
    if (!mean.finite()) non_finite(field.time);
    curve.push(field.time, mean);
    if (opts.observer) opts.observer(field);
  };

  record(0);
  for (long k = 1; k <= plan.steps; ++k) {
    stepper.step(field.spins, plan.h, f);
    if (k % opts.sample_every == 0 || k == plan.steps) {
      record(k);
    } else if (!field.spins.front().finite() || !field.spins.back().finite()) {
      non_finite(t0 + static_cast<double>(k) * plan.h);
    }
  }
  if (final_state) *final_state = std::move(field);
  return curve;
}

ContrastCurve evolve(const SpinField& initial, const EnergyGrid& grid, const RateSet& rates,
                     const KernelSpec& kernel, double t_final, double dt, int sample_every) {
  const KineticModel model(grid, rates, kernel);
  return evolve(model, initial, {t_final, dt, sample_every, {}});
}

SpinField advance(const KineticModel& model, const SpinField& initial, double duration, double dt) {
  check_field(model, initial);
  const StepPlan plan = plan_steps(model, duration, dt);
  SpinField field = initial;
  Rk4<SpinVector> stepper(field.spins.size());
  auto f = [&model](const std::vector<SpinVector>& y, std::vector<SpinVector>& dy) { model.derivative(y, dy); };
  for (long k = 1; k <= plan.steps; ++k) stepper.step(field.spins, plan.h, f);
  field.time = initial.time + duration;
  if (!average(model.grid(), field.spins).finite()) non_finite(field.time);
  return field;
}

double analytic_contrast(double delta0, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("analytic_contrast: t must be >= 0");
  const double x = delta0 * t;
  return std::pow(1.0 + x * x, -1.5);
}

}  // namespace rephase
