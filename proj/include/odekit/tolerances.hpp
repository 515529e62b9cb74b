#ifndef ODEKIT_TOLERANCES_HPP
#define ODEKIT_TOLERANCES_HPP

#include <optional>

#include "odekit/mass_operator.hpp"
#include "odekit/vector_ops.hpp"

namespace odekit {

/// Relative/absolute tolerance bundle. Absolute tolerances may be scalar
/// (broadcast) or per component; ratol applies to residual weights with a
/// non-identity mass operator and defaults to atol.
struct Tolerances {
  double rtol = 1e-4;
  Vector atol{1e-9};   // length 1 means scalar broadcast
  Vector ratol;        // empty means "use atol"

  static Tolerances scalar(double rtol, double atol) { return Tolerances{rtol, Vector{atol}, {}}; }

  double atol_at(std::size_t i) const { return atol.size() == 1 ? atol[0] : atol[i]; }
  double ratol_at(std::size_t i) const {
    if (ratol.empty()) return atol_at(i);
    return ratol.size() == 1 ? ratol[0] : ratol[i];
  }

  void validate(std::size_t n) const;
};

/// Error weight vector w_i = (rtol*|y_i| + atol_i)^{-1}.
/// Returns nullopt on a zero denominator (the "illegal weight" signal).
std::optional<Vector> error_weights(const Vector& y, const Tolerances& tol);

/// Residual weight vector sigma_i = (rtol*|r_i| + ratol_i)^{-1}, r = M y.
std::optional<Vector> residual_weights(const MassOperator& mass, const Vector& y, const Tolerances& tol);

}  // namespace odekit

#endif
