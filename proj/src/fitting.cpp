#include "rephase/fitting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "rephase/errors.hpp"

namespace rephase {

namespace {

void require_same_length(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.size() != b.size()) throw InvalidArgument(std::string(what) + ": length mismatch");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!std::isfinite(a[i]) || !std::isfinite(b[i])) throw InvalidArgument(std::string(what) + ": non-finite input");
}

/// Two-parameter Levenberg-Marquardt. `eval(p, r, J)` fills residuals and the
/// n x 2 Jacobian (row-major) of the residuals. Returns false when it fails
/// to converge.
template <class Eval>
bool levenberg_marquardt(std::array<double, 2>& p, std::size_t n, Eval&& eval, int max_iter = 200) {
  std::vector<double> r(n), jac(2 * n), r_try(n), jac_try(2 * n);
  if (!eval(p, r, jac)) return false;
  auto sse = [](const std::vector<double>& v) { return std::inner_product(v.begin(), v.end(), v.begin(), 0.0); };
  double cost = sse(r);
  double lambda = 1e-3;
  for (int iter = 0; iter < max_iter; ++iter) {
    double a00 = 0, a01 = 0, a11 = 0, g0 = 0, g1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double j0 = jac[2 * i], j1 = jac[2 * i + 1];
      a00 += j0 * j0;
      a01 += j0 * j1;
      a11 += j1 * j1;
      g0 += j0 * r[i];
      g1 += j1 * r[i];
    }
    bool improved = false;
    for (int tries = 0; tries < 40 && !improved; ++tries) {
      const double m00 = a00 * (1.0 + lambda), m11 = a11 * (1.0 + lambda);
      const double det = m00 * m11 - a01 * a01;
      if (!(std::abs(det) > 0.0)) {
        lambda *= 10.0;
        continue;
      }
      const std::array<double, 2> step{-(m11 * g0 - a01 * g1) / det, -(m00 * g1 - a01 * g0) / det};
      const std::array<double, 2> trial{p[0] + step[0], p[1] + step[1]};
      if (eval(trial, r_try, jac_try)) {
        const double trial_cost = sse(r_try);
        if (trial_cost <= cost) {
          const bool tiny = std::abs(step[0]) <= 1e-15 * (std::abs(p[0]) + 1e-300) &&
                            std::abs(step[1]) <= 1e-15 * (std::abs(p[1]) + 1e-300);
          const bool stalled = cost - trial_cost <= 1e-30 * cost;
          p = trial;
          r.swap(r_try);
          jac.swap(jac_try);
          cost = trial_cost;
          lambda = std::max(lambda / 10.0, 1e-12);
          improved = true;
          if (tiny || stalled || cost == 0.0) return true;
        }
      }
      if (!improved) lambda *= 10.0;
    }
    if (!improved) return std::isfinite(cost);  // at a minimum to working precision
  }
  return false;
}

double rms(std::span<const double> residuals) {
  double s = 0.0;
  for (double r : residuals) s += r * r;
  return std::sqrt(s / static_cast<double>(residuals.size()));
}

}  // namespace

FringeFit fit_fringe(std::span<const double> detunings, std::span<const double> probabilities,
                     double ramsey_time) {
  require_same_length(detunings, probabilities, "fit_fringe");
  if (detunings.size() < 3) throw InvalidArgument("fit_fringe: need at least 3 points");
  if (!(ramsey_time > 0.0)) throw InvalidArgument("fit_fringe: ramsey_time must be > 0");

  // 2P - 1 = a cos(theta) - b sin(theta), a = C cos(phi), b = C sin(phi)
  double cc = 0, ss = 0, cs = 0, yc = 0, ys = 0;
  for (std::size_t k = 0; k < detunings.size(); ++k) {
    const double theta = detunings[k] * ramsey_time;
    const double c = std::cos(theta), s = std::sin(theta);
    const double y = 2.0 * probabilities[k] - 1.0;
    cc += c * c;
    ss += s * s;
    cs += c * s;
    yc += y * c;
    ys += y * s;
  }
  const double det = cc * ss - cs * cs;
  if (!(det > 1e-8 * cc * ss) || !(cc > 0.0) || !(ss > 0.0))
    throw NumericError("fit_fringe: detuning span too narrow to resolve the fringe");

  // Normal equations for (a, -b): [cc cs; cs ss] [a; -b] = [yc; ys]
  const double a = (ss * yc - cs * ys) / det;
  const double minus_b = (cc * ys - cs * yc) / det;
  const double b = -minus_b;

  FringeFit fit;
  fit.contrast = std::hypot(a, b);
  fit.phase = std::atan2(b, a);
  std::vector<double> res(detunings.size());
  for (std::size_t k = 0; k < detunings.size(); ++k) {
    const double model = 0.5 * (1.0 + fit.contrast * std::cos(detunings[k] * ramsey_time + fit.phase));
    res[k] = probabilities[k] - model;
  }
  fit.residual_rms = rms(res);
  return fit;
}

DecayFit fit_exponential_decay(std::span<const double> times, std::span<const double> values) {
  require_same_length(times, values, "fit_exponential_decay");
  const std::size_t n = times.size();
  if (n < 2) throw InvalidArgument("fit_exponential_decay: need at least 2 points");
  for (double v : values)
    if (!(v > 0.0)) throw InvalidArgument("fit_exponential_decay: values must be > 0");

  // ln y = ln A - k t
  const double tm = std::accumulate(times.begin(), times.end(), 0.0) / static_cast<double>(n);
  double ym = 0.0;
  for (double v : values) ym += std::log(v);
  ym /= static_cast<double>(n);
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    stt += (times[i] - tm) * (times[i] - tm);
    sty += (times[i] - tm) * (std::log(values[i]) - ym);
  }
  if (!(stt > 0.0)) throw InvalidArgument("fit_exponential_decay: times must not all coincide");
  const double k_log = -sty / stt;
  const double amp_log = std::exp(ym + k_log * tm);

  const double span = *std::max_element(times.begin(), times.end()) - *std::min_element(times.begin(), times.end());
  auto decaying = [span](double k) { return k > 0.0 && k * span > 1e-12; };
  if (!decaying(k_log)) throw NonDecayingError("fit_exponential_decay: data does not decay (tau -> infinity)");

  // Refine on linear residuals y - A e^(-k t).
  std::array<double, 2> p{amp_log, k_log};
  auto eval = [&](const std::array<double, 2>& q, std::vector<double>& r, std::vector<double>& jac) {
    if (!(q[1] > 0.0) || !std::isfinite(q[0])) return false;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = std::exp(-q[1] * times[i]);
      r[i] = values[i] - q[0] * e;
      jac[2 * i] = -e;
      jac[2 * i + 1] = q[0] * times[i] * e;
    }
    return true;
  };
  DecayFit fit;
  fit.refined = levenberg_marquardt(p, n, eval) && decaying(p[1]);
  if (!fit.refined) p = {amp_log, k_log};
  fit.amplitude = p[0];
  fit.tau = 1.0 / p[1];
  std::vector<double> res(n);
  for (std::size_t i = 0; i < n; ++i) res[i] = values[i] - p[0] * std::exp(-p[1] * times[i]);
  fit.residual_rms = rms(res);
  return fit;
}

double AtomNumberFit::model(double t) const { return 0.5 * n_total * (1.0 + std::exp(-t / tau)); }

AtomNumberFit fit_atom_number(std::span<const double> times, std::span<const double> totals) {
  require_same_length(times, totals, "fit_atom_number");
  const std::size_t n = times.size();
  if (n < 3) throw InvalidArgument("fit_atom_number: need at least 3 points");
  const double t_lo = *std::min_element(times.begin(), times.end());
  const double t_hi = *std::max_element(times.begin(), times.end());
  const double span = t_hi - t_lo;
  if (!(span > 0.0)) throw InvalidArgument("fit_atom_number: times must not all coincide");

  // Seed: for fixed k the best N_T is linear; scan k on a log grid.
  auto best_total = [&](double k, double* sse_out) {
    double fy = 0.0, ff = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double f = 0.5 * (1.0 + std::exp(-k * times[i]));
      fy += f * totals[i];
      ff += f * f;
    }
    const double nt = fy / ff;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = totals[i] - nt * 0.5 * (1.0 + std::exp(-k * times[i]));
      sse += r * r;
    }
    *sse_out = sse;
    return nt;
  };
  double best_k = 1.0 / span, best_sse = std::numeric_limits<double>::infinity();
  for (int j = 0; j <= 400; ++j) {
    const double k = std::pow(10.0, -4.0 + 8.0 * j / 400.0) / span;
    double sse = 0.0;
    best_total(k, &sse);
    if (sse < best_sse) {
      best_sse = sse;
      best_k = k;
    }
  }
  double dummy = 0.0;
  std::array<double, 2> p{best_total(best_k, &dummy), best_k};

  auto eval = [&](const std::array<double, 2>& q, std::vector<double>& r, std::vector<double>& jac) {
    if (!(q[1] > 0.0) || !std::isfinite(q[0])) return false;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = std::exp(-q[1] * times[i]);
      r[i] = totals[i] - 0.5 * q[0] * (1.0 + e);
      jac[2 * i] = -0.5 * (1.0 + e);
      jac[2 * i + 1] = 0.5 * q[0] * times[i] * e;
    }
    return true;
  };
  if (!levenberg_marquardt(p, n, eval)) throw NumericError("fit_atom_number: did not converge");

  AtomNumberFit fit;
  fit.n_total = p[0];
  fit.tau = 1.0 / p[1];
  std::vector<double> res(n);
  for (std::size_t i = 0; i < n; ++i) res[i] = totals[i] - fit.model(times[i]);
  fit.residual_rms = rms(res);
  return fit;
}

RevivalFit fit_revival_time(std::span<const double> times, std::span<const double> values) {
  require_same_length(times, values, "fit_revival_time");
  const std::size_t n = values.size();
  for (std::size_t i = 1; i < n; ++i)
    if (!(times[i] > times[i - 1])) throw InvalidArgument("fit_revival_time: times must increase strictly");

  std::size_t lo = 0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (values[i] < values[i - 1] && values[i] <= values[i + 1]) {
      lo = i;
      break;
    }
  }
  if (lo == 0) throw NoRevivalError("fit_revival_time: contrast has no local minimum (no revival)");

  std::size_t hi = 0;
  for (std::size_t j = lo + 1; j + 1 < n; ++j) {
    if (values[j] > values[j - 1] && values[j] >= values[j + 1]) {
      hi = j;
      break;
    }
  }
  if (hi == 0) throw NoRevivalError("fit_revival_time: no local maximum after the first minimum (no revival)");

  // Vertex of the parabola through the three samples around the discrete max.
  const double x0 = times[hi - 1], x1 = times[hi], x2 = times[hi + 1];
  const double y0 = values[hi - 1], y1 = values[hi], y2 = values[hi + 1];
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double curvature = (d12 - d01) / (x2 - x0);

  RevivalFit fit;
  fit.minimum_time = times[lo];
  fit.minimum = values[lo];
  if (curvature < 0.0) {
    fit.time = 0.5 * (x0 + x1) - d01 / (2.0 * curvature);
    fit.time = std::clamp(fit.time, x0, x2);
    fit.peak = y1 + d01 * (fit.time - x1) + curvature * (fit.time - x1) * (fit.time - x0);
  } else {
    fit.time = x1;
    fit.peak = y1;
  }
  return fit;
}

RevivalFit fit_revival_time(const ContrastCurve& curve) { return fit_revival_time(curve.times, curve.contrast); }

}  // namespace rephase
