#include "odekit/brusselator.hpp"

#include <cmath>

namespace odekit {

Vector BrusselatorProblem::initial_state() const {
  Vector y(size());
  const double pi = std::acos(-1.0);
  for (int i = 0; i < npts; ++i) {
    const double x = i * dx();
    const double bump = 0.1 * std::sin(pi * x);
    y[3 * i + 0] = a + bump;
    y[3 * i + 1] = b / a + bump;
    y[3 * i + 2] = b + bump;
  }
  return y;
}

void BrusselatorProblem::advection(const Vector& y, Vector& dydt) const {
  const double coef = -c / (2.0 * dx());
  for (int i = 1; i < npts - 1; ++i)
    for (int s = 0; s < 3; ++s) {
      const int k = 3 * i + s;
      dydt[k] += coef * (y[k + 3] - y[k - 3]);
    }
}

void BrusselatorProblem::diffusion(const Vector& y, Vector& dydt) const {
  if (d == 0.0) return;
  const double coef = d / (dx() * dx());
  for (int i = 1; i < npts - 1; ++i)
    for (int s = 0; s < 3; ++s) {
      const int k = 3 * i + s;
      const int src = literal_diffusion ? 3 * i : k;  // u_xx in every equation
      dydt[k] += coef * (y[src + 3] - 2.0 * y[src] + y[src - 3]);
    }
}

void BrusselatorProblem::reaction(const Vector& y, Vector& dydt) const {
  for (int i = 1; i < npts - 1; ++i) {
    const double u = y[3 * i + 0], v = y[3 * i + 1], w = y[3 * i + 2];
    dydt[3 * i + 0] += a - (w + 1.0) * u + v * u * u;
    dydt[3 * i + 1] += w * u - v * u * u;
    dydt[3 * i + 2] += (b - w) / eps - w * u;
  }
}

RhsFn BrusselatorProblem::terms_fn(bool adv, bool diff, bool react) const {
  const BrusselatorProblem p = *this;  // value copy keeps the callback self-contained
  return [p, adv, diff, react](double, const Vector& y, Vector& dydt) {
    fill(dydt, 0.0);
    if (adv) p.advection(y, dydt);
    if (diff) p.diffusion(y, dydt);
    if (react) p.reaction(y, dydt);
  };
}

}  // namespace odekit
