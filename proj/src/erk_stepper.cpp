#include "odekit/erk_stepper.hpp"

#include <stdexcept>

namespace odekit {

ErkStepper::ErkStepper(const ButcherTable& table, RhsFn f, int n)
    : table_(table), f_(std::move(f)), n_(n), k_(table.s, Vector(n, 0.0)), z_(n, 0.0) {
  if (table_.kind != TableKind::Explicit)
    throw std::invalid_argument("ErkStepper: table must be explicit");
  if (!f_) throw std::invalid_argument("ErkStepper: missing right-hand side");
}

AttemptStatus ErkStepper::attempt_step(double t, const Vector& y, double h, const StepContext&,
                                       StepAttempt& out) {
  const int s = table_.s;
  for (int i = 0; i < s; ++i) {
    z_ = y;
    for (int j = 0; j < i; ++j)
      if (table_.A[i][j] != 0.0) axpy(h * table_.A[i][j], k_[j], z_);
    f_(t + table_.c[i] * h, z_, k_[i]);
    ++stats_.fe_evals;
  }

  out.y = y;
  for (int i = 0; i < s; ++i)
    if (table_.b[i] != 0.0) axpy(h * table_.b[i], k_[i], out.y);

  if (table_.has_embedding()) {
    Vector err(n_, 0.0);
    for (int i = 0; i < s; ++i) {
      const double d = table_.b[i] - table_.btilde[i];
      if (d != 0.0) axpy(h * d, k_[i], err);
    }
    out.error = std::move(err);
  } else {
    out.error.reset();
  }
  return AttemptStatus::Ok;
}

void ErkStepper::full_rhs(double t, const Vector& y, Vector& out) {
  out.resize(n_);
  f_(t, y, out);
  ++stats_.fe_evals;
}

void ErkStepper::resize(int n) {
  n_ = n;
  k_.assign(table_.s, Vector(n, 0.0));
  z_.assign(n, 0.0);
}

}  // namespace odekit
