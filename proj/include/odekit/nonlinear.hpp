#ifndef ODEKIT_NONLINEAR_HPP
#define ODEKIT_NONLINEAR_HPP

#include <optional>

#include "odekit/interpolant.hpp"
#include "odekit/mass_operator.hpp"
#include "odekit/matrix.hpp"
#include "odekit/stats.hpp"
#include "odekit/vector_ops.hpp"

namespace odekit {

/// One implicit stage equation M (z - a) - gamma f^I(t, z) = 0.
/// The rhs callback is expected to count its own evaluations.
struct StageSystem {
  double t = 0.0;
  double gamma = 0.0;
  const Vector* known = nullptr;  // a_i, fixed for the duration of the solve
  RhsFn rhs;                      // f^I
  const MassOperator* mass = nullptr;  // nullptr means identity
};

struct NewtonConfig {
  int max_iters = 3;
  double tol_coef = 0.1;               // nonlinear stopping coefficient
  double rate_memory = 0.3;            // convergence-rate memory factor
  double divergence = 2.3;             // divergence ratio threshold
  int max_steps_between_setups = 20;   // Jacobian/setup lag limit
  double gamma_change_threshold = 0.2; // relative gamma drift forcing a setup
};

enum class JacStructure { Dense, Banded };

enum class NonlinearOutcome { Converged, Diverged, MaxIters, LinearSolveFailure, RhsFailure };

struct NonlinearResult {
  NonlinearOutcome outcome = NonlinearOutcome::Converged;
  int iterations = 0;
  bool ok() const { return outcome == NonlinearOutcome::Converged; }
};

/// Finite-difference Jacobian of f at (t, z) with one evaluation per column.
/// Perturbations are sqrt(eps)-scaled with a weight-derived floor so the
/// increments stay above tolerance noise. Returns nullopt when f produces a
/// non-finite value.
std::optional<DenseMatrix> fd_jacobian_dense(const RhsFn& f, double t, const Vector& z,
                                             const Vector& f_of_z, const Vector& w);

/// Banded variant using ml+mu+1 grouped perturbations covering all columns.
std::optional<BandedMatrix> fd_jacobian_banded(const RhsFn& f, double t, const Vector& z,
                                               const Vector& f_of_z, const Vector& w,
                                               int ml, int mu);

/// Lagged Jacobian data and the factorization A = M - gamma*J, refreshed
/// infrequently: a new setup happens after msbp steps, on sufficient gamma
/// drift, or when a failure/constraint event demands one. A setup reuses the
/// stored J unless the J itself is stale or flagged bad.
class JacobianSlot {
 public:
  JacobianSlot() = default;
  JacobianSlot(JacStructure structure, int ml, int mu) : structure_(structure), ml_(ml), mu_(mu) {}

  bool has_setup() const { return dense_lu_.has_value() || banded_lu_.has_value(); }
  double gamma_at_setup() const { return gamma_; }
  long last_setup_step() const { return setup_step_; }

  /// Events feeding the refresh policy.
  void demand_setup() { force_setup_ = true; }            // e.g. constraint violation
  void demand_fresh_jacobian() { force_setup_ = force_jac_ = true; }  // e.g. convergence failure
  bool jacobian_current() const { return jac_current_; }
  void mark_stale() { jac_current_ = false; }

  /// True when the reuse policy wants a setup at this step/gamma.
  bool needs_setup(long step_index, double gamma, const NewtonConfig& cfg) const;

  /// Runs the setup if the policy demands it (or always when force = true):
  /// re-evaluates J by finite differences when stale, then factors
  /// A = M - gamma*J. Returns false on an unrecoverable-at-this-h failure
  /// (singular matrix or non-finite RHS), true otherwise; *did_setup reports
  /// whether a setup actually happened.
  bool prepare(long step_index, const StageSystem& sys, const Vector& z, const Vector& f_of_z,
               const Vector& w, const NewtonConfig& cfg, SolverStats& stats, bool* did_setup = nullptr);

  /// Solves A x = b in place using the current factorization.
  bool solve(Vector& b) const;

  void invalidate();

 private:
  JacStructure structure_ = JacStructure::Dense;
  int ml_ = 0, mu_ = 0;
  std::optional<DenseMatrix> dense_j_;
  std::optional<BandedMatrix> banded_j_;
  std::optional<DenseLu> dense_lu_;
  std::optional<BandedLu> banded_lu_;
  double gamma_ = 0.0;
  long setup_step_ = -1;
  long jac_step_ = -1;
  bool force_setup_ = true;
  bool force_jac_ = true;
  bool jac_current_ = false;
};

/// Modified Newton iteration in predictor-corrector form on the stage
/// system, using the lagged factorization in jac. With linearly_implicit
/// set, exactly one iteration runs and no convergence test is made.
/// f_at_pred, when given, is f(t, z_pred) and saves the first iteration's
/// evaluation.
NonlinearResult newton_solve(const StageSystem& sys, const Vector& z_pred, const NewtonConfig& cfg,
                             JacobianSlot& jac, const Vector& w, Vector& z_out, SolverStats& stats,
                             bool linearly_implicit = false, const Vector* f_at_pred = nullptr);

/// Plain fixed-point iteration on z_c = G_fp(z_c); no Jacobian involved.
NonlinearResult fixed_point_solve(const StageSystem& sys, const Vector& z_pred,
                                  const NewtonConfig& cfg, const Vector& w, Vector& z_out,
                                  SolverStats& stats);

enum class PredictorKind { Trivial, MaxOrder, VariableOrder, Cutoff };

/// Builds the stage prediction z_{i,p}. stage_number is 1-based; xi_max is
/// the already-capped maximum interpolant degree (min of q-1, the user cap,
/// and 5). Degenerate inputs (no history yet) fall back to the trivial
/// prediction y_prev.
Vector predict_stage(PredictorKind kind, const DenseOutput* interp, double t_stage,
                     int stage_number, int xi_max, const Vector& y_prev);

}  // namespace odekit

#endif
