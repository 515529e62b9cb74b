#ifndef ODEKIT_STATS_HPP
#define ODEKIT_STATS_HPP

namespace odekit {

/// Cumulative solver counters; monotone nondecreasing until reinit.
struct SolverStats {
  long steps = 0;             // successful steps
  long attempts = 0;          // step attempts, including failed ones
  long err_test_fails = 0;
  long step_solve_fails = 0;  // steps abandoned due to algebraic solver failure
  long constraint_fails = 0;  // constraint-triggered step retries
  long fe_evals = 0;          // explicit partition RHS evaluations
  long fi_evals = 0;          // implicit partition RHS evaluations
  long ff_evals = 0;          // fast partition RHS evaluations (multirate)
  long nonlinear_iters = 0;
  long nonlinear_fails = 0;   // nonlinear solver convergence failures
  long linear_setups = 0;     // factorizations of M - gamma*J
  long jacobian_evals = 0;
  long mass_solves = 0;
  long root_evals = 0;        // root function evaluations
};

}  // namespace odekit

#endif
