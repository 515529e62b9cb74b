#ifndef ODEKIT_STEPPER_HPP
#define ODEKIT_STEPPER_HPP

#include <optional>

#include "odekit/interpolant.hpp"
#include "odekit/mass_operator.hpp"
#include "odekit/stats.hpp"
#include "odekit/vector_ops.hpp"

namespace odekit {

enum class AttemptStatus {
  Ok,
  RhsFailure,     // a right-hand side produced non-finite data
  SolverFailure,  // nonlinear solver did not converge
  LinearFailure,  // factorization or linear solve failed
  InnerFailure,   // a fast inner integration failed (multirate)
};

/// One candidate step: solution y_n and, when the method carries an
/// embedding, the local-truncation-error estimate T_n = y_n - ytilde_n.
struct StepAttempt {
  Vector y;
  std::optional<Vector> error;
};

/// Per-attempt inputs handed down by the evolve loop.
struct StepContext {
  const Vector* weights = nullptr;      // WRMS weights at the step start
  const DenseOutput* interp = nullptr;  // dense output for predictors
};

/// A single-step method the shared infrastructure can drive: it advances one
/// candidate step and reports an error estimate, exposes the full problem
/// right-hand side for dense output, and owns the statistics it generates.
class OneStepMethod {
 public:
  virtual ~OneStepMethod() = default;

  virtual int dimension() const = 0;
  virtual bool provides_error() const = 0;
  virtual int method_order() const = 0;
  virtual int embedding_order() const = 0;

  virtual AttemptStatus attempt_step(double t, const Vector& y, double h, const StepContext& ctx,
                                     StepAttempt& out) = 0;

  /// Full IVP right-hand side at (t, y), mass-adjusted where applicable.
  virtual void full_rhs(double t, const Vector& y, Vector& out) = 0;

  virtual SolverStats& stats() = 0;
  const SolverStats& stats() const { return const_cast<OneStepMethod*>(this)->stats(); }

  virtual const MassOperator* mass() const { return nullptr; }

  /// A constraint violation happened; implicit methods should refresh their
  /// Jacobian data on the next attempt.
  virtual void on_constraint_event() {}

  /// Clears cached per-problem state (factorizations, stage caches).
  virtual void clear_caches() {}

  /// Rebuilds internal storage for a new problem dimension.
  virtual void resize(int n) = 0;
};

}  // namespace odekit

#endif
