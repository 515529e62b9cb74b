#ifndef ODEKIT_VECTOR_OPS_HPP
#define ODEKIT_VECTOR_OPS_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace odekit {

/// Dense real state vector; the single currency of all steppers.
using Vector = std::vector<double>;

/// Right-hand side callback: dydt = f(t, y).
using RhsFn = std::function<void(double t, const Vector& y, Vector& dydt)>;

// All reductions run in sequential index order so results are bit-stable
// across runs.

/// Weighted root-mean-square norm, ((1/N) sum (v_i w_i)^2)^{1/2}.
inline double wrms_norm(const Vector& v, const Vector& w) {
  if (v.size() != w.size() || v.empty())
    throw std::invalid_argument("wrms_norm: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double p = v[i] * w[i];
    acc += p * p;
  }
  return std::sqrt(acc / static_cast<double>(v.size()));
}

inline double inf_norm(const Vector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline bool all_finite(const Vector& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

/// y += a * x
inline void axpy(double a, const Vector& x, Vector& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

/// z = x + a * y
inline void add_scaled(const Vector& x, double a, const Vector& y, Vector& z) {
  z.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] + a * y[i];
}

inline void scale(double a, Vector& v) {
  for (double& x : v) x *= a;
}

inline void fill(Vector& v, double a) {
  for (double& x : v) x = a;
}

}  // namespace odekit

#endif
