#ifndef ODEKIT_TEST_HELPERS_HPP
#define ODEKIT_TEST_HELPERS_HPP

#include <cmath>
#include <memory>

#include "odekit/integrator.hpp"
#include "odekit/stepper.hpp"

namespace odekit::testing {

/// Runs a fixed-step integration over [t0, tf] with nsteps steps and returns
/// the final state. Tolerances only feed the algebraic-solver norms.
inline Vector integrate_fixed(std::shared_ptr<OneStepMethod> stepper, double t0, Vector y0,
                              double tf, long nsteps, Tolerances tol = Tolerances::scalar(1e-12, 1e-14)) {
  IntegratorOptions opt;
  opt.tol = tol;
  opt.fixed_step = true;
  opt.h0 = (tf - t0) / static_cast<double>(nsteps);
  Integrator integ(std::move(stepper), t0, std::move(y0), opt);
  Vector y;
  auto res = integ.evolve(tf, EvolveMode::NormalTstop, y);
  if (!res.ok()) throw std::runtime_error("fixed-step integration failed");
  return y;
}

/// Measured convergence slope from errors at h, h/2, ..., h/2^(levels-1):
/// mean of log2(e_k / e_{k+1}).
template <typename ErrAtSteps>
double convergence_slope(ErrAtSteps&& err_at, long base_steps, int levels) {
  double first = -1.0, last = -1.0;
  long n = base_steps;
  for (int k = 0; k < levels; ++k, n *= 2) {
    const double e = err_at(n);
    if (k == 0) first = e;
    if (k == levels - 1) last = e;
  }
  return std::log2(first / last) / (levels - 1);
}

inline double max_abs_diff(const Vector& a, const Vector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace odekit::testing

#endif
