#ifndef ODEKIT_INTEGRATOR_HPP
#define ODEKIT_INTEGRATOR_HPP

#include <functional>
#include <memory>

#include "odekit/controller.hpp"
#include "odekit/interpolant.hpp"
#include "odekit/stepper.hpp"
#include "odekit/tolerances.hpp"

namespace odekit {

enum class EvolveMode { Normal, OneStep, NormalTstop, OneStepTstop };

enum class SolveStatus {
  Success,
  TstopReached,
  RootFound,
  IllegalWeight,    // a tolerance-derived weight had a zero denominator
  StepSizeFailure,  // h' fell below limits or repeated failures exhausted
  SolverFailure,    // algebraic solver failure (fatal in fixed-step mode)
  RhsFailure,       // non-finite right-hand side (fatal in fixed-step mode)
  InnerFailure,     // fast inner integrator failure (multirate)
  TooMuchWork,      // max_steps_per_call internal steps without reaching t_out
};

struct EvolveResult {
  SolveStatus status = SolveStatus::Success;
  double t = 0.0;
  std::vector<int> roots_found;  // per component: 0, +1 (increasing), -1 (decreasing)
  const char* message = nullptr;
  bool ok() const {
    return status == SolveStatus::Success || status == SolveStatus::TstopReached ||
           status == SolveStatus::RootFound;
  }
};

enum class ConstraintKind : unsigned char { None, Positive, NonNegative, Negative, NonPositive };

/// One step attempt as seen by an optional monitor callback; enough to audit
/// accept/reject decisions and retry arithmetic in tests.
struct AttemptRecord {
  enum class Outcome { Accepted, ErrorReject, InvalidReject, ConstraintRetry, SolverRetry };
  Outcome outcome;
  double t = 0.0;
  double h = 0.0;
  double err_norm = 0.0;  // NaN when no estimate was available
  double h_next = 0.0;    // retry or next-step size selected
};

struct IntegratorOptions {
  Tolerances tol;
  AdaptivityParams adapt;
  ControllerKind controller = ControllerKind::Pid;
  InterpolantKind interpolant = InterpolantKind::Hermite;
  int interpolant_degree = 3;
  bool fixed_step = false;
  double h0 = 0.0;  // initial step; 0 requests the automatic estimate
  double root_tol = 0.0;  // 0 selects 100*eps*max(|t_{n-1}|, |t_n|)
  double constraint_safety = 0.9;
  int max_constraint_retries = 10;
  long max_steps_per_call = 1000000;
};

/// The outer evolution loop shared by all steppers: weight refresh, the
/// attempt/test/retry cycle, controller coupling, dense output, event
/// detection, inequality constraints, and lifecycle management.
class Integrator {
 public:
  using RootFn = std::function<void(double t, const Vector& y, Vector& g)>;
  using MonitorFn = std::function<void(const AttemptRecord&)>;

  Integrator(std::shared_ptr<OneStepMethod> stepper, double t0, Vector y0, IntegratorOptions opt);

  void set_root_function(RootFn g, int m);
  void set_constraints(std::vector<ConstraintKind> kinds);
  void set_monitor(MonitorFn mon) { monitor_ = std::move(mon); }

  EvolveResult evolve(double t_out, EvolveMode mode, Vector& y_out);

  double t() const { return t_; }
  const Vector& y() const { return y_; }
  double next_step() const { return next_h_; }
  void set_next_step(double h) { next_h_ = h; }

  SolverStats& stats() { return stepper_->stats(); }
  const SolverStats& stats() const { return stepper_->stats(); }
  OneStepMethod& stepper() { return *stepper_; }
  const Vector& current_error_weights() const { return weights_; }
  const Vector& current_residual_weights() const { return rweights_; }

  /// Dense output inside the most recently completed step.
  void interpolate(double t, int d, Vector& out) const;

  /// Same-size restart: all history and statistics cleared.
  void reinit(double t0, const Vector& y0);
  /// New initial condition: history cleared, statistics retained.
  void reset(double t0, const Vector& y0);
  /// Reset that additionally keeps the step size and controller history
  /// (used by multirate inner integrations across fast intervals).
  void reset_keep_step_heuristics(double t0, const Vector& y0);
  /// Problem dimension change: storage rebuilt, adaptivity heuristics and
  /// statistics preserved, vector history discarded.
  void resize(double t0, const Vector& y_new);

 private:
  struct StepFailure {
    SolveStatus status;
    const char* message;
  };

  EvolveResult make_result(SolveStatus st, double t, const char* msg = nullptr) const;
  bool initialize(double t_out, StepFailure* fail);
  bool refresh_weights(StepFailure* fail);
  bool take_step(double h, StepFailure* fail);
  void accept_step(double h, StepAttempt& att, double err_norm, bool have_eps, double eps);
  void record(AttemptRecord::Outcome o, double h, double err_norm, double h_next);

  struct RootReport {
    bool found = false;
    double troot = 0.0;
    std::vector<int> directions;
  };
  void root_baseline();
  RootReport check_roots(double t_hi);
  RootReport locate_root(double tlo, Vector glo, double thi, Vector ghi);
  void eval_g_at(double t, Vector& gout);
  double root_ttol(double a, double b) const;

  /// Returns the smallest linear crossing fraction among violated
  /// components, or a negative value when all constraints hold.
  double constraint_violation(const Vector& candidate) const;

  std::shared_ptr<OneStepMethod> stepper_;
  IntegratorOptions opt_;
  double t_ = 0.0;
  Vector y_;
  double dir_ = 0.0;
  double next_h_ = 0.0;
  bool initialized_ = false;
  bool adaptive_ = true;
  int order_basis_ = 1;
  DenseOutput interp_;
  ControllerState ctrl_;
  Vector weights_, rweights_;

  RootFn root_fn_;
  int nroots_ = 0;
  Vector g_lo_;
  double root_tlo_ = 0.0;
  std::vector<bool> g_active_;
  bool root_pending_ = false;

  std::vector<ConstraintKind> constraints_;
  MonitorFn monitor_;
};

}  // namespace odekit

#endif
