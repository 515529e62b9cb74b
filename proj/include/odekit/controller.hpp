#ifndef ODEKIT_CONTROLLER_HPP
#define ODEKIT_CONTROLLER_HPP

#include <limits>
#include <optional>

namespace odekit {

enum class ControllerKind { I, Pi, Pid, ExplicitGustafsson, ImplicitGustafsson, ImExGustafsson };

/// Adaptivity tuning knobs. The gains are conventional defaults and are
/// exposed as configuration rather than asserted constants.
struct AdaptivityParams {
  double bias = 1.5;    // error bias beta (> 1)
  double safety = 0.96;
  double max_growth = 20.0;          // per accepted step
  double first_step_growth = 1e4;    // after the very first step
  double err_fail_cap = 0.3;         // h' <= cap * h after an error failure
  double err_fail_floor = 0.1;       // h' >= floor * h, and forced after repeats
  double solver_fail_factor = 0.25;  // h reduction after a failed implicit solve
  double h_min = 0.0;
  double h_max = std::numeric_limits<double>::infinity();
  int max_err_fails = 7;       // per-step error failures before giving up
  int force_floor_after = 2;   // consecutive error failures forcing the floor
  int max_solver_fails = 10;   // per-step solver failures before giving up
  bool use_solution_order = false;  // base controllers on q instead of p

  double pi_k1 = 0.8, pi_k2 = 0.31;
  double pid_k1 = 0.58, pid_k2 = 0.21, pid_k3 = 0.10;
  double expgus_k1 = 0.367, expgus_k2 = 0.268;
  double impgus_k1 = 0.98, impgus_k2 = 0.95;
};

/// Biased error and step-size history for the three most recent steps.
/// eps_prev1/eps_prev2 always refer to *successful* steps; the error of the
/// current attempt is passed to propose_step separately. Missing history is
/// genuinely absent (never zero-filled), so controllers can degrade.
struct ControllerState {
  std::optional<double> eps_prev1, eps_prev2;
  double h_prev1 = 0.0, h_prev2 = 0.0;
  long steps_taken = 0;

  void push_accepted(double eps, double h) {
    eps_prev2 = eps_prev1;
    eps_prev1 = eps;
    h_prev2 = h_prev1;
    h_prev1 = h;
    ++steps_taken;
  }
  void reset() { *this = ControllerState{}; }
};

enum class ErrorTestVerdict { Accept, Reject, RejectInvalid };

/// Accepts iff ||T_n||_wrms <= 1. Non-finite estimates reject as invalid,
/// which triggers an aggressive step reduction downstream.
ErrorTestVerdict error_test(double err_norm);

double bias_error(double err_norm, double beta);

/// Raw next-step proposal from the controller law, before heuristic
/// clamping. eps_n is the biased error of the current attempt, h_n its step
/// size, and order the exponent basis (p or q per configuration).
double propose_step(ControllerKind kind, double eps_n, double h_n, const ControllerState& st,
                    const AdaptivityParams& params, int order);

enum class StepOutcomeKind { Accepted, ErrorFail, ErrorFailInvalid, SolverFail };

struct HeuristicDecision {
  bool ok = false;
  double h = 0.0;
  const char* failure = nullptr;  // set when !ok
};

/// Clamps a raw proposal into the legal range: growth limits (first step vs
/// later), post-failure caps/floors, bounds [h_min, h_max], and hard-failure
/// detection. fail_count counts same-kind failures on the current step.
HeuristicDecision apply_heuristics(double h_raw, double h_cur, const ControllerState& st,
                                   const AdaptivityParams& params, StepOutcomeKind outcome,
                                   int fail_count);

}  // namespace odekit

#endif
