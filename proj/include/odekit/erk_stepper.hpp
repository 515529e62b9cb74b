#ifndef ODEKIT_ERK_STEPPER_HPP
#define ODEKIT_ERK_STEPPER_HPP

#include "odekit/butcher.hpp"
#include "odekit/stepper.hpp"

namespace odekit {

/// Lean embedded explicit Runge-Kutta engine for y' = f(t, y). Stores the s
/// stage right-hand sides and spends exactly s fresh evaluations per attempt
/// (no FSAL-style reuse).
class ErkStepper : public OneStepMethod {
 public:
  ErkStepper(const ButcherTable& table, RhsFn f, int n);

  int dimension() const override { return n_; }
  bool provides_error() const override { return table_.has_embedding(); }
  int method_order() const override { return table_.q; }
  int embedding_order() const override { return table_.p; }

  AttemptStatus attempt_step(double t, const Vector& y, double h, const StepContext& ctx,
                             StepAttempt& out) override;
  void full_rhs(double t, const Vector& y, Vector& out) override;

  SolverStats& stats() override { return stats_; }
  void resize(int n) override;

  const ButcherTable& table() const { return table_; }

 private:
  ButcherTable table_;
  RhsFn f_;
  int n_;
  std::vector<Vector> k_;  // stage RHS values
  Vector z_;               // stage state scratch
  SolverStats stats_;
};

}  // namespace odekit

#endif
