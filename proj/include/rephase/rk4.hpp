#pragma once

#include <cstddef>
#include <vector>

namespace rephase {

/// Classical fixed-step 4th-order Runge-Kutta over a vector of elements that
/// support +=, -= and scalar *. Workspace is reused across steps.
template <class T>
class Rk4 {
 public:
  explicit Rk4(std::size_t n) : k1_(n), k2_(n), k3_(n), k4_(n), tmp_(n) {}

  /// f(state, out) writes d(state)/dt into out.
  template <class F>
  void step(std::vector<T>& y, double h, F&& f) {
    const std::size_t n = y.size();
    f(y, k1_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + (0.5 * h) * k1_[i];
    f(tmp_, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + (0.5 * h) * k2_[i];
    f(tmp_, k3_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * k3_[i];
    f(tmp_, k4_);
    const double h6 = h / 6.0;
    for (std::size_t i = 0; i < n; ++i) {
      T incr = k1_[i];
      incr += 2.0 * k2_[i];
      incr += 2.0 * k3_[i];
      incr += k4_[i];
      y[i] += h6 * incr;
    }
  }

 private:
  std::vector<T> k1_, k2_, k3_, k4_, tmp_;
};

}  // namespace rephase
