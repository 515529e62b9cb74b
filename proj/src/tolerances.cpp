#include "odekit/tolerances.hpp"

#include <cmath>
#include <stdexcept>

namespace odekit {

void Tolerances::validate(std::size_t n) const {
  if (rtol < 0.0) throw std::invalid_argument("Tolerances: rtol < 0");
  if (atol.size() != 1 && atol.size() != n) throw std::invalid_argument("Tolerances: atol length mismatch");
  if (!ratol.empty() && ratol.size() != 1 && ratol.size() != n)
    throw std::invalid_argument("Tolerances: ratol length mismatch");
  double amax = 0.0;
  for (double a : atol) {
    if (a < 0.0) throw std::invalid_argument("Tolerances: atol < 0");
    amax = std::max(amax, a);
  }
  if (rtol == 0.0 && amax == 0.0) throw std::invalid_argument("Tolerances: rtol and atol all zero");
}

static std::optional<Vector> weights_from(const Vector& base, double rtol,
                                          const Tolerances& tol, bool residual) {
  Vector w(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double a = residual ? tol.ratol_at(i) : tol.atol_at(i);
    const double denom = rtol * std::abs(base[i]) + a;
    if (denom <= 0.0 || !std::isfinite(denom)) return std::nullopt;
    w[i] = 1.0 / denom;
  }
  return w;
}

std::optional<Vector> error_weights(const Vector& y, const Tolerances& tol) {
  return weights_from(y, tol.rtol, tol, false);
}

std::optional<Vector> residual_weights(const MassOperator& mass, const Vector& y, const Tolerances& tol) {
  const Vector r = mass.apply(y);
  return weights_from(r, tol.rtol, tol, true);
}

}  // namespace odekit
