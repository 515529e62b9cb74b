#include "odekit/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace odekit {

namespace {
constexpr double kEpsFloor = 1e-10;  // avoids infinite growth proposals at eps = 0

double floored(double eps) { return std::max(eps, kEpsFloor); }
}  // namespace

ErrorTestVerdict error_test(double err_norm) {
  if (!std::isfinite(err_norm)) return ErrorTestVerdict::RejectInvalid;
  return err_norm <= 1.0 ? ErrorTestVerdict::Accept : ErrorTestVerdict::Reject;
}

double bias_error(double err_norm, double beta) {
  if (beta <= 1.0) throw std::invalid_argument("bias_error: beta must exceed 1");
  return beta * err_norm;
}

double propose_step(ControllerKind kind, double eps_n, double h_n, const ControllerState& st,
                    const AdaptivityParams& params, int order) {
  const double k = 1.0 / (order + 1.0);
  const double s = params.safety;
  const double e0 = floored(eps_n);
  const double h = std::abs(h_n);

  // All multi-step laws fall back to the I law until enough history exists.
  const double i_law = h * s * std::pow(e0, -k);

  double hp = i_law;
  switch (kind) {
    case ControllerKind::I:
      break;
    case ControllerKind::Pi: {
      if (!st.eps_prev1) break;
      const double e1 = floored(*st.eps_prev1);
      hp = h * s * std::pow(e0, -params.pi_k1 * k) * std::pow(e1, params.pi_k2 * k);
      break;
    }
    case ControllerKind::Pid: {
      if (!st.eps_prev1) break;
      const double e1 = floored(*st.eps_prev1);
      if (!st.eps_prev2) {
        hp = h * s * std::pow(e0, -params.pi_k1 * k) * std::pow(e1, params.pi_k2 * k);
        break;
      }
      const double e2 = floored(*st.eps_prev2);
      hp = h * s * std::pow(e0, -params.pid_k1 * k) * std::pow(e1, params.pid_k2 * k) *
           std::pow(e2, -params.pid_k3 * k);
      break;
    }
    case ControllerKind::ExplicitGustafsson: {
      if (!st.eps_prev1) break;
      const double e1 = floored(*st.eps_prev1);
      hp = h * s * std::pow(e0, -params.expgus_k1 * k) * std::pow(e0 / e1, -params.expgus_k2 * k);
      break;
    }
    case ControllerKind::ImplicitGustafsson: {
      if (!st.eps_prev1 || st.h_prev1 == 0.0) break;
      const double e1 = floored(*st.eps_prev1);
      const double ratio = h / std::abs(st.h_prev1);  // h_n / h_{n-1}
      hp = h * s * ratio * std::pow(e0, -params.impgus_k1 * k) * std::pow(e0 / e1, -params.impgus_k2 * k);
      break;
    }
    case ControllerKind::ImExGustafsson: {
      const double he = propose_step(ControllerKind::ExplicitGustafsson, eps_n, h_n, st, params, order);
      const double hi = propose_step(ControllerKind::ImplicitGustafsson, eps_n, h_n, st, params, order);
      hp = std::min(he, hi);
      break;
    }
  }
  return hp;
}

HeuristicDecision apply_heuristics(double h_raw, double h_cur, const ControllerState& st,
                                   const AdaptivityParams& params, StepOutcomeKind outcome,
                                   int fail_count) {
  const double dir = h_cur >= 0.0 ? 1.0 : -1.0;
  const double h = std::abs(h_cur);
  double hp = std::abs(h_raw);

  switch (outcome) {
    case StepOutcomeKind::Accepted: {
      const double growth = st.steps_taken <= 1 ? params.first_step_growth : params.max_growth;
      hp = std::min(hp, growth * h);
      break;
    }
    case StepOutcomeKind::ErrorFail: {
      if (fail_count > params.max_err_fails)
        return {false, 0.0, "too many error test failures in one step"};
      hp = std::min(hp, params.err_fail_cap * h);
      hp = std::max(hp, params.err_fail_floor * h);
      if (fail_count >= params.force_floor_after) hp = params.err_fail_floor * h;
      break;
    }
    case StepOutcomeKind::ErrorFailInvalid: {
      if (fail_count > params.max_err_fails)
        return {false, 0.0, "too many error test failures in one step"};
      hp = params.err_fail_floor * h;
      break;
    }
    case StepOutcomeKind::SolverFail: {
      if (fail_count > params.max_solver_fails)
        return {false, 0.0, "too many algebraic solver failures in one step"};
      hp = params.solver_fail_factor * h;
      break;
    }
  }

  hp = std::min(hp, params.h_max);
  if (hp < params.h_min) return {false, 0.0, "step size below h_min"};
  if (hp <= 0.0 || !std::isfinite(hp)) return {false, 0.0, "step size underflow"};
  return {true, dir * hp, nullptr};
}

}  // namespace odekit
