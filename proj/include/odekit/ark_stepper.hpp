#ifndef ODEKIT_ARK_STEPPER_HPP
#define ODEKIT_ARK_STEPPER_HPP

#include <functional>

#include "odekit/butcher.hpp"
#include "odekit/nonlinear.hpp"
#include "odekit/stepper.hpp"

namespace odekit {

enum class StageSolverKind { Newton, FixedPoint };

/// Configuration for the additive Runge-Kutta engine. Either right-hand side
/// may be absent: without fi the method reduces to classical ERK, without fe
/// to standard DIRK. When both are present the tables must share the stage
/// count (different abscissae are allowed).
struct ArkConfig {
  const ButcherTable* explicit_table = nullptr;
  const ButcherTable* implicit_table = nullptr;
  RhsFn fe;
  RhsFn fi;
  MassOperator mass;  // identity by default
  bool linearly_implicit = false;
  StageSolverKind solver = StageSolverKind::Newton;
  NewtonConfig newton;
  JacStructure jac_structure = JacStructure::Dense;
  int jac_ml = 0, jac_mu = 0;
  PredictorKind predictor = PredictorKind::Trivial;
  int predictor_degree_cap = 5;  // xi_user
  /// Optional hook run after the built-in predictor for every implicit stage.
  std::function<void(double t_stage, int stage_number, Vector& z_pred)> user_predictor;
};

/// ImEx / explicit / diagonally implicit additive Runge-Kutta single-step
/// engine with optional constant mass matrix.
class ArkStepper : public OneStepMethod {
 public:
  ArkStepper(ArkConfig cfg, int n);

  int dimension() const override { return n_; }
  bool provides_error() const override;
  int method_order() const override;
  int embedding_order() const override;

  AttemptStatus attempt_step(double t, const Vector& y, double h, const StepContext& ctx,
                             StepAttempt& out) override;
  void full_rhs(double t, const Vector& y, Vector& out) override;

  SolverStats& stats() override { return stats_; }
  const MassOperator* mass() const override { return &cfg_.mass; }
  void on_constraint_event() override { jac_.demand_setup(); }
  void clear_caches() override;
  void resize(int n) override;

  bool has_explicit() const { return static_cast<bool>(cfg_.fe); }
  bool has_implicit() const { return static_cast<bool>(cfg_.fi); }
  const ArkConfig& config() const { return cfg_; }

 private:
  int stages() const { return s_; }
  void eval_fe(double t, const Vector& z, Vector& out);  // stores f-hat
  bool eval_fi(double t, const Vector& z, Vector& out);  // stores f-hat; false on non-finite
  AttemptStatus solve_stage(int i, double t_stage, double gamma, const Vector& a,
                            const StepContext& ctx, const Vector& y_prev, Vector& z);

  ArkConfig cfg_;
  int n_;
  int s_;
  bool stiffly_accurate_;  // active tables allow reusing z_s as y_n
  std::vector<bool> used_e_, used_i_;
  std::vector<Vector> ke_, ki_;  // stored f-hat values per stage
  Vector a_, z_;
  JacobianSlot jac_;
  SolverStats stats_;
  RhsFn counted_fi_;  // wraps cfg_.fi with the evaluation counter

  // stage-1 data cached across retries of the same step
  double stage1_t_ = 0.0;
  bool stage1_valid_ = false;
  Vector stage1_ke_, stage1_ki_;
  bool stage1_explicit_first_ = false;
};

}  // namespace odekit

#endif
