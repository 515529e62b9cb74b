#include "odekit/integrator.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace odekit {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

bool satisfies(ConstraintKind k, double v) {
  switch (k) {
    case ConstraintKind::None: return true;
    case ConstraintKind::Positive: return v > 0.0;
    case ConstraintKind::NonNegative: return v >= 0.0;
    case ConstraintKind::Negative: return v < 0.0;
    case ConstraintKind::NonPositive: return v <= 0.0;
  }
  return true;
}
}  // namespace

Integrator::Integrator(std::shared_ptr<OneStepMethod> stepper, double t0, Vector y0,
                       IntegratorOptions opt)
    : stepper_(std::move(stepper)), opt_(std::move(opt)), t_(t0), y_(std::move(y0)),
      interp_(opt_.interpolant, opt_.interpolant_degree) {
  if (!stepper_) throw std::invalid_argument("Integrator: null stepper");
  if (static_cast<int>(y_.size()) != stepper_->dimension())
    throw std::invalid_argument("Integrator: state size does not match stepper dimension");
}

void Integrator::set_root_function(RootFn g, int m) {
  if (m < 1) throw std::invalid_argument("Integrator: need at least one root function component");
  root_fn_ = std::move(g);
  nroots_ = m;
  g_lo_.assign(m, 0.0);
  g_active_.assign(m, true);
  root_pending_ = false;
}

void Integrator::set_constraints(std::vector<ConstraintKind> kinds) {
  if (!kinds.empty() && kinds.size() != y_.size())
    throw std::invalid_argument("Integrator: constraint vector length mismatch");
  constraints_ = std::move(kinds);
}

EvolveResult Integrator::make_result(SolveStatus st, double t, const char* msg) const {
  EvolveResult r;
  r.status = st;
  r.t = t;
  r.message = msg;
  return r;
}

bool Integrator::refresh_weights(StepFailure* fail) {
  auto w = error_weights(y_, opt_.tol);
  if (!w) {
    if (fail) *fail = {SolveStatus::IllegalWeight, "zero denominator in error weights"};
    return false;
  }
  weights_ = std::move(*w);
  const MassOperator* m = stepper_->mass();
  if (m && !m->is_identity()) {
    auto rw = residual_weights(*m, y_, opt_.tol);
    if (!rw) {
      if (fail) *fail = {SolveStatus::IllegalWeight, "zero denominator in residual weights"};
      return false;
    }
    rweights_ = std::move(*rw);
  } else {
    rweights_ = weights_;
  }
  return true;
}

bool Integrator::initialize(double t_out, StepFailure* fail) {
  const std::size_t n = y_.size();
  opt_.tol.validate(n);
  adaptive_ = !opt_.fixed_step;
  if (adaptive_ && !stepper_->provides_error())
    throw std::invalid_argument("Integrator: adaptive mode requires a method with an embedding");
  if (!adaptive_ && opt_.h0 == 0.0)
    throw std::invalid_argument("Integrator: fixed-step mode requires a step size");
  if (opt_.adapt.bias <= 1.0) throw std::invalid_argument("Integrator: error bias must exceed 1");
  if (t_out == t_) throw std::invalid_argument("Integrator: t_out does not advance the solution");

  order_basis_ = opt_.adapt.use_solution_order ? stepper_->method_order() : stepper_->embedding_order();
  dir_ = t_out > t_ ? 1.0 : -1.0;

  if (!constraints_.empty())
    for (std::size_t i = 0; i < n; ++i)
      if (!satisfies(constraints_[i], y_[i]))
        throw std::invalid_argument("Integrator: initial state violates constraints");

  if (!refresh_weights(fail)) return false;

  // Full RHS at the start state primes Hermite dense output and feeds the
  // automatic initial-step estimate.
  const bool need_f0 = opt_.interpolant == InterpolantKind::Hermite || (adaptive_ && opt_.h0 == 0.0);
  Vector f0;
  if (need_f0) {
    f0.resize(n);
    stepper_->full_rhs(t_, y_, f0);
  }
  interp_.reset();
  interp_.prime(t_, y_, f0);

  double h0 = std::abs(opt_.h0);
  if (h0 == 0.0) {
    const double num = wrms_norm(y_, weights_);
    const double den = wrms_norm(f0, weights_);
    if (num > 1e-12 && den > 1e-12)
      h0 = 0.01 * num / den;
    else
      h0 = 1e-3 * std::abs(t_out - t_);
    h0 = std::min(h0, std::abs(t_out - t_));
  }
  h0 = std::min(h0, opt_.adapt.h_max);
  h0 = std::max(h0, opt_.adapt.h_min);
  if (h0 <= 0.0 || !std::isfinite(h0)) {
    if (fail) *fail = {SolveStatus::StepSizeFailure, "initial step size underflow"};
    return false;
  }
  next_h_ = dir_ * h0;

  if (root_fn_) {
    eval_g_at(t_, g_lo_);
    root_tlo_ = t_;
    for (int i = 0; i < nroots_; ++i) g_active_[i] = g_lo_[i] != 0.0;
    root_pending_ = false;
  }

  initialized_ = true;
  return true;
}

void Integrator::record(AttemptRecord::Outcome o, double h, double err_norm, double h_next) {
  if (!monitor_) return;
  AttemptRecord rec;
  rec.outcome = o;
  rec.t = t_;
  rec.h = h;
  rec.err_norm = err_norm;
  rec.h_next = h_next;
  monitor_(rec);
}

double Integrator::constraint_violation(const Vector& candidate) const {
  double frac = -1.0;
  for (std::size_t i = 0; i < candidate.size(); ++i) {
    const ConstraintKind k = constraints_[i];
    if (k == ConstraintKind::None || satisfies(k, candidate[i])) continue;
    // Linear-in-time estimate of where this component crosses zero.
    const double y0 = y_[i], y1 = candidate[i];
    double f = 1.0;
    if (y0 != y1) f = std::clamp(y0 / (y0 - y1), 0.0, 1.0);
    frac = frac < 0.0 ? f : std::min(frac, f);
  }
  return frac;
}

bool Integrator::take_step(double h_first, StepFailure* fail) {
  SolverStats& st = stepper_->stats();
  if (!refresh_weights(fail)) return false;

  double h = h_first;
  int nef = 0, ncf = 0, nconstr = 0;

  while (true) {
    if (t_ + h == t_) {
      *fail = {SolveStatus::StepSizeFailure, "step size underflow (t + h == t)"};
      return false;
    }
    ++st.attempts;
    StepContext ctx;
    ctx.weights = &weights_;
    ctx.interp = interp_.ready() ? &interp_ : nullptr;

    StepAttempt att;
    const AttemptStatus status = stepper_->attempt_step(t_, y_, h, ctx, att);

    if (status != AttemptStatus::Ok) {
      if (status == AttemptStatus::InnerFailure) {
        *fail = {SolveStatus::InnerFailure, "fast inner integration failed"};
        return false;
      }
      ++st.step_solve_fails;
      if (!adaptive_) {
        *fail = {status == AttemptStatus::RhsFailure ? SolveStatus::RhsFailure
                                                     : SolveStatus::SolverFailure,
                 "algebraic solve failed in fixed-step mode"};
        return false;
      }
      ++ncf;
      auto dec = apply_heuristics(h, h, ctrl_, opt_.adapt, StepOutcomeKind::SolverFail, ncf);
      record(AttemptRecord::Outcome::SolverRetry, h, kNan, dec.ok ? dec.h : 0.0);
      if (!dec.ok) {
        *fail = {SolveStatus::StepSizeFailure, dec.failure};
        return false;
      }
      h = dec.h;
      continue;
    }

    const bool finite = all_finite(att.y);

    // Constraint check runs after a successful attempt and before the error
    // test, so a constraint retry does not consume an error-test failure.
    if (finite && !constraints_.empty()) {
      const double frac = constraint_violation(att.y);
      if (frac >= 0.0) {
        ++st.constraint_fails;
        ++nconstr;
        stepper_->on_constraint_event();
        const double h_new = opt_.constraint_safety * std::max(frac, kEps) * h;
        record(AttemptRecord::Outcome::ConstraintRetry, h, kNan, h_new);
        if (nconstr > opt_.max_constraint_retries) {
          *fail = {SolveStatus::StepSizeFailure, "too many constraint-triggered retries"};
          return false;
        }
        if (std::abs(h_new) < opt_.adapt.h_min || h_new == 0.0 || !std::isfinite(h_new)) {
          *fail = {SolveStatus::StepSizeFailure, "constraint retry step underflow"};
          return false;
        }
        h = h_new;
        continue;
      }
    }

    double err_norm = kNan;
    ErrorTestVerdict verdict = ErrorTestVerdict::Accept;
    if (!finite) {
      verdict = ErrorTestVerdict::RejectInvalid;
    } else if (adaptive_ && att.error) {
      err_norm = wrms_norm(*att.error, weights_);
      verdict = error_test(err_norm);
    }

    if (verdict != ErrorTestVerdict::Accept) {
      if (!adaptive_) {
        *fail = {SolveStatus::RhsFailure, "non-finite state in fixed-step mode"};
        return false;
      }
      ++nef;
      ++st.err_test_fails;
      const bool invalid = verdict == ErrorTestVerdict::RejectInvalid;
      double h_raw = h;
      if (!invalid) {
        const double eps = bias_error(err_norm, opt_.adapt.bias);
        h_raw = propose_step(opt_.controller, eps, h, ctrl_, opt_.adapt, order_basis_);
      }
      auto dec = apply_heuristics(h_raw, h, ctrl_, opt_.adapt,
                                  invalid ? StepOutcomeKind::ErrorFailInvalid : StepOutcomeKind::ErrorFail,
                                  nef);
      record(invalid ? AttemptRecord::Outcome::InvalidReject : AttemptRecord::Outcome::ErrorReject, h,
             err_norm, dec.ok ? dec.h : 0.0);
      if (!dec.ok) {
        *fail = {SolveStatus::StepSizeFailure, dec.failure};
        return false;
      }
      h = dec.h;
      continue;
    }

    const bool have_eps = adaptive_ && att.error.has_value();
    const double eps = have_eps ? bias_error(err_norm, opt_.adapt.bias) : 0.0;
    accept_step(h, att, err_norm, have_eps, eps);
    return true;
  }
}

void Integrator::accept_step(double h, StepAttempt& att, double err_norm, bool have_eps, double eps) {
  SolverStats& st = stepper_->stats();

  if (have_eps) {
    const double h_raw = propose_step(opt_.controller, eps, h, ctrl_, opt_.adapt, order_basis_);
    ctrl_.push_accepted(eps, h);
    auto dec = apply_heuristics(h_raw, h, ctrl_, opt_.adapt, StepOutcomeKind::Accepted, 0);
    next_h_ = dec.ok ? dec.h : h;
  } else {
    ctrl_.push_accepted(0.0, h);  // records the step-size history only
    next_h_ = adaptive_ ? h : dir_ * std::abs(opt_.h0);
  }

  t_ += h;
  y_ = std::move(att.y);
  ++st.steps;

  if (opt_.interpolant == InterpolantKind::Hermite) {
    Vector f_new(y_.size());
    stepper_->full_rhs(t_, y_, f_new);
    interp_.update(t_, y_, f_new,
                   [this](double tt, const Vector& yy, Vector& ff) { stepper_->full_rhs(tt, yy, ff); });
  } else {
    interp_.update(t_, y_, {}, {});
  }

  record(AttemptRecord::Outcome::Accepted, h, err_norm, next_h_);
}

void Integrator::interpolate(double t, int d, Vector& out) const {
  if (!interp_.ready()) {
    out = y_;
    return;
  }
  interp_.eval(t, d, out);
}

void Integrator::eval_g_at(double t, Vector& gout) {
  gout.resize(nroots_);
  if (t == t_) {
    root_fn_(t, y_, gout);
  } else {
    Vector yt;
    interpolate(t, 0, yt);
    root_fn_(t, yt, gout);
  }
  ++stepper_->stats().root_evals;
}

double Integrator::root_ttol(double a, double b) const {
  if (opt_.root_tol > 0.0) return opt_.root_tol;
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(next_h_)});
  return 100.0 * kEps * scale;
}

namespace {
bool sign_change(double lo, double hi) { return (lo < 0.0 && hi >= 0.0) || (lo > 0.0 && hi <= 0.0); }
}  // namespace

Integrator::RootReport Integrator::locate_root(double tlo, Vector glo, double thi, Vector ghi) {
  const double ttol = root_ttol(tlo, thi);
  double alph = 1.0;
  int side = 0, sideprev = -1;
  Vector gmid(nroots_);

  for (int iter = 0; iter < 100 && std::abs(thi - tlo) > ttol; ++iter) {
    // component with the largest |ghi/(ghi - glo)| quotient drives the secant
    int imax = -1;
    double qmax = -1.0;
    for (int i = 0; i < nroots_; ++i) {
      if (!g_active_[i] || !sign_change(glo[i], ghi[i])) continue;
      const double denom = ghi[i] - glo[i];
      const double q = denom != 0.0 ? std::abs(ghi[i] / denom) : 0.0;
      if (q > qmax) {
        qmax = q;
        imax = i;
      }
    }
    if (imax < 0) break;

    if (sideprev == side)
      alph = side == 2 ? 2.0 * alph : 0.5 * alph;
    else
      alph = 1.0;

    double tmid = thi - (thi - tlo) * ghi[imax] / (ghi[imax] - alph * glo[imax]);
    const double lo_guard = tlo + 0.5 * ttol * dir_;
    const double hi_guard = thi - 0.5 * ttol * dir_;
    if ((tmid - lo_guard) * dir_ < 0.0) tmid = tlo + 0.1 * (thi - tlo);
    if ((tmid - hi_guard) * dir_ > 0.0) tmid = thi - 0.1 * (thi - tlo);

    eval_g_at(tmid, gmid);
    bool lower_half = false;
    for (int i = 0; i < nroots_ && !lower_half; ++i)
      if (g_active_[i] && sign_change(glo[i], gmid[i])) lower_half = true;
    sideprev = side;
    if (lower_half) {
      thi = tmid;
      ghi = gmid;
      side = 1;
    } else {
      tlo = tmid;
      glo = gmid;
      side = 2;
    }
  }

  RootReport rep;
  rep.found = true;
  rep.troot = thi;
  rep.directions.assign(nroots_, 0);
  for (int i = 0; i < nroots_; ++i) {
    if (!g_active_[i]) continue;
    if (ghi[i] == 0.0 || sign_change(glo[i], ghi[i]))
      rep.directions[i] = ghi[i] >= glo[i] ? 1 : -1;
  }
  return rep;
}

Integrator::RootReport Integrator::check_roots(double t_hi) {
  RootReport none;
  if ((t_hi - root_tlo_) * dir_ <= 0.0) return none;

  Vector ghi(nroots_);
  eval_g_at(t_hi, ghi);

  auto changed = [&](const Vector& ga, const Vector& gb) {
    for (int i = 0; i < nroots_; ++i)
      if (g_active_[i] && (sign_change(ga[i], gb[i]) || gb[i] == 0.0)) return true;
    return false;
  };

  // One interior sample catches double crossings inside a single step.
  const double tmid = 0.5 * (root_tlo_ + t_hi);
  RootReport rep;
  if ((tmid - root_tlo_) * dir_ > 0.0 && (t_hi - tmid) * dir_ > 0.0) {
    Vector gmid(nroots_);
    eval_g_at(tmid, gmid);
    if (changed(g_lo_, gmid))
      rep = locate_root(root_tlo_, g_lo_, tmid, gmid);
    else if (changed(gmid, ghi))
      rep = locate_root(tmid, gmid, t_hi, ghi);
  } else if (changed(g_lo_, ghi)) {
    rep = locate_root(root_tlo_, g_lo_, t_hi, ghi);
  }

  if (!rep.found) {
    root_tlo_ = t_hi;
    g_lo_ = ghi;
    for (int i = 0; i < nroots_; ++i)
      if (!g_active_[i] && g_lo_[i] != 0.0) g_active_[i] = true;
    return none;
  }

  // Advance the search state past the reported root; zero components stay
  // inactive until they move away from zero.
  root_tlo_ = rep.troot;
  eval_g_at(rep.troot, g_lo_);
  for (int i = 0; i < nroots_; ++i)
    if (rep.directions[i] != 0 || g_lo_[i] == 0.0) g_active_[i] = false;
  root_pending_ = std::abs(t_ - rep.troot) > root_ttol(rep.troot, t_);
  return rep;
}

void Integrator::root_baseline() {
  if (!root_fn_) return;
  eval_g_at(t_, g_lo_);
  root_tlo_ = t_;
  for (int i = 0; i < nroots_; ++i) g_active_[i] = g_lo_[i] != 0.0;
  root_pending_ = false;
}

EvolveResult Integrator::evolve(double t_out, EvolveMode mode, Vector& y_out) {
  StepFailure fail{SolveStatus::Success, nullptr};
  if (!initialized_) {
    if (!initialize(t_out, &fail)) return make_result(fail.status, t_, fail.message);
  }

  const bool tstop = mode == EvolveMode::NormalTstop || mode == EvolveMode::OneStepTstop;
  const bool onestep = mode == EvolveMode::OneStep || mode == EvolveMode::OneStepTstop;

  // Roots still pending inside the last completed step take priority.
  if (root_fn_ && root_pending_) {
    root_pending_ = false;
    auto rep = check_roots(t_);
    if (rep.found) {
      EvolveResult r = make_result(SolveStatus::RootFound, rep.troot);
      r.roots_found = rep.directions;
      interpolate(rep.troot, 0, y_out);
      return r;
    }
  }

  for (long taken = 0;; ++taken) {
    const double troundoff = 100.0 * kEps * (std::abs(t_) + std::abs(next_h_));
    if (tstop) {
      if (std::abs(t_out - t_) <= troundoff) {
        t_ = t_out;
        y_out = y_;
        return make_result(SolveStatus::TstopReached, t_out);
      }
    } else if ((t_ - t_out) * dir_ >= 0.0) {
      if (!interp_.ready() && std::abs(t_out - t_) > troundoff)
        throw std::invalid_argument("Integrator: t_out does not advance the solution");
      interpolate(t_out, 0, y_out);
      return make_result(SolveStatus::Success, t_out);
    }
    if ((t_out - t_) * dir_ < 0.0) {  // t_out behind us in TSTOP mode
      interpolate(t_out, 0, y_out);
      return make_result(SolveStatus::Success, t_out);
    }
    if (taken >= opt_.max_steps_per_call)
      return make_result(SolveStatus::TooMuchWork, t_, "max internal steps reached before t_out");

    double h = next_h_;
    bool clipped = false;
    if (tstop && (t_ + h - t_out) * dir_ > 0.0) {
      h = t_out - t_;
      clipped = true;
    }

    if (!take_step(h, &fail)) return make_result(fail.status, t_, fail.message);

    if (root_fn_) {
      auto rep = check_roots(t_);
      if (rep.found) {
        EvolveResult r = make_result(SolveStatus::RootFound, rep.troot);
        r.roots_found = rep.directions;
        interpolate(rep.troot, 0, y_out);
        return r;
      }
    }

    if (clipped && std::abs(t_ - t_out) <= 100.0 * kEps * (std::abs(t_) + std::abs(h))) {
      t_ = t_out;
      y_out = y_;
      return make_result(SolveStatus::TstopReached, t_out);
    }

    if (onestep) {
      if (!tstop && (t_ - t_out) * dir_ > 0.0) {
        interpolate(t_out, 0, y_out);
        return make_result(SolveStatus::Success, t_out);
      }
      y_out = y_;
      return make_result(SolveStatus::Success, t_);
    }
  }
}

void Integrator::reinit(double t0, const Vector& y0) {
  if (y0.size() != y_.size()) throw std::invalid_argument("reinit: dimension mismatch");
  t_ = t0;
  y_ = y0;
  stepper_->stats() = SolverStats{};
  stepper_->clear_caches();
  ctrl_.reset();
  interp_.reset();
  next_h_ = 0.0;
  initialized_ = false;
  root_pending_ = false;
}

void Integrator::reset(double t0, const Vector& y0) {
  if (y0.size() != y_.size()) throw std::invalid_argument("reset: dimension mismatch");
  t_ = t0;
  y_ = y0;
  stepper_->clear_caches();
  ctrl_.reset();
  interp_.reset();
  next_h_ = 0.0;
  initialized_ = false;
  root_pending_ = false;
}

void Integrator::reset_keep_step_heuristics(double t0, const Vector& y0) {
  if (y0.size() != y_.size()) throw std::invalid_argument("reset: dimension mismatch");
  const double h_keep = next_h_;
  const ControllerState ctrl_keep = ctrl_;
  const bool was_initialized = initialized_;
  reset(t0, y0);
  if (was_initialized && h_keep != 0.0) {
    ctrl_ = ctrl_keep;
    next_h_ = h_keep;
    opt_.h0 = h_keep;  // reused by the re-initialization path
  }
}

void Integrator::resize(double t0, const Vector& y_new) {
  t_ = t0;
  y_ = y_new;
  stepper_->resize(static_cast<int>(y_new.size()));
  stepper_->clear_caches();
  interp_.reset();
  const double h_keep = next_h_;
  initialized_ = false;
  root_pending_ = false;
  if (h_keep != 0.0) opt_.h0 = h_keep;  // controller history is retained
}

}  // namespace odekit
