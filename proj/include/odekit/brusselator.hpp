#ifndef ODEKIT_BRUSSELATOR_HPP
#define ODEKIT_BRUSSELATOR_HPP

#include "odekit/vector_ops.hpp"

namespace odekit {

/// 1-D advection-diffusion-reaction Brusselator on x in [0, 1], discretized
/// with second-order centered differences on a uniform grid. The state is
/// interleaved (u_i, v_i, w_i) per grid point, 3N unknowns total; boundary
/// points carry zero time derivatives.
struct BrusselatorProblem {
  int npts = 512;
  double c = 1e-3;   // advection speed
  double d = 1e-2;   // diffusion rate (0 disables the term)
  double a = 0.6;
  double b = 2.0;
  double eps = 1e-2;
  double t0 = 0.0;
  double tf = 10.0;
  /// Apply d*u_xx in all three equations instead of each species' own
  /// second derivative.
  bool literal_diffusion = false;

  int size() const { return 3 * npts; }
  double dx() const { return 1.0 / (npts - 1); }

  Vector initial_state() const;

  void advection(const Vector& y, Vector& dydt) const;  // accumulates
  void diffusion(const Vector& y, Vector& dydt) const;  // accumulates
  void reaction(const Vector& y, Vector& dydt) const;   // accumulates

  /// Right-hand side callback combining the selected terms.
  RhsFn terms_fn(bool adv, bool diff, bool react) const;

  /// Newton bandwidth for the interleaved layout.
  static constexpr int kBandwidth = 4;
};

}  // namespace odekit

#endif
