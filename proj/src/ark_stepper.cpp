#include "odekit/ark_stepper.hpp"

#include <stdexcept>

namespace odekit {

ArkStepper::ArkStepper(ArkConfig cfg, int n) : cfg_(std::move(cfg)), n_(n) {
  if (!cfg_.fe && !cfg_.fi) throw std::invalid_argument("ArkStepper: need at least one of fe, fi");
  if (cfg_.fe && !cfg_.explicit_table) throw std::invalid_argument("ArkStepper: fe present but no explicit table");
  if (cfg_.fi && !cfg_.implicit_table) throw std::invalid_argument("ArkStepper: fi present but no implicit table");
  if (cfg_.fe && cfg_.fi && cfg_.explicit_table->s != cfg_.implicit_table->s)
    throw std::invalid_argument("ArkStepper: explicit and implicit tables must share the stage count");

  const ButcherTable* te = cfg_.fe ? cfg_.explicit_table : nullptr;
  const ButcherTable* ti = cfg_.fi ? cfg_.implicit_table : nullptr;
  s_ = te ? te->s : ti->s;

  used_e_.assign(s_, false);
  used_i_.assign(s_, false);
  auto mark_used = [&](const ButcherTable& t, std::vector<bool>& used) {
    for (int i = 0; i < s_; ++i) {
      bool u = t.b[i] != 0.0 || (t.has_embedding() && t.btilde[i] != 0.0);
      for (int j = i + 1; j < s_ && !u; ++j) u = t.A[j][i] != 0.0;
      used[i] = u;
    }
  };
  if (te) mark_used(*te, used_e_);
  if (ti) mark_used(*ti, used_i_);

  // Reusing z_s as y_n requires every active table to be stiffly accurate.
  stiffly_accurate_ = (!te || te->stiffly_accurate()) && (!ti || ti->stiffly_accurate());

  // Stage 1 is cacheable across retries when it is a plain evaluation at
  // (t_{n-1}, y_{n-1}).
  stage1_explicit_first_ = true;
  if (te && (te->A[0][0] != 0.0 || te->c[0] != 0.0)) stage1_explicit_first_ = false;
  if (ti && (ti->A[0][0] != 0.0 || ti->c[0] != 0.0)) stage1_explicit_first_ = false;

  jac_ = JacobianSlot(cfg_.jac_structure, cfg_.jac_ml, cfg_.jac_mu);
  counted_fi_ = [this](double t, const Vector& yv, Vector& fv) {
    cfg_.fi(t, yv, fv);
    ++stats_.fi_evals;
  };
  resize(n_);
}

bool ArkStepper::provides_error() const {
  if (cfg_.fe && !cfg_.explicit_table->has_embedding()) return false;
  if (cfg_.fi && !cfg_.implicit_table->has_embedding()) return false;
  return true;
}

int ArkStepper::method_order() const {
  return cfg_.fi ? cfg_.implicit_table->q : cfg_.explicit_table->q;
}

int ArkStepper::embedding_order() const {
  return cfg_.fi ? cfg_.implicit_table->p : cfg_.explicit_table->p;
}

void ArkStepper::eval_fe(double t, const Vector& z, Vector& out) {
  out.resize(n_);
  cfg_.fe(t, z, out);
  ++stats_.fe_evals;
  if (!cfg_.mass.is_identity()) {
    cfg_.mass.solve_in_place(out);
    ++stats_.mass_solves;
  }
}

bool ArkStepper::eval_fi(double t, const Vector& z, Vector& out) {
  out.resize(n_);
  counted_fi_(t, z, out);
  if (!all_finite(out)) return false;
  if (!cfg_.mass.is_identity()) {
    cfg_.mass.solve_in_place(out);
    ++stats_.mass_solves;
  }
  return true;
}

AttemptStatus ArkStepper::solve_stage(int i, double t_stage, double gamma, const Vector& a,
                                      const StepContext& ctx, const Vector& y_prev, Vector& z) {
  const int xi_max = std::min({method_order() - 1, cfg_.predictor_degree_cap, 5});
  Vector z_pred = predict_stage(cfg_.predictor, ctx.interp, t_stage, i + 1, xi_max, y_prev);
  if (cfg_.user_predictor) cfg_.user_predictor(t_stage, i + 1, z_pred);

  StageSystem sys;
  sys.t = t_stage;
  sys.gamma = gamma;
  sys.known = &a;
  sys.rhs = counted_fi_;
  sys.mass = cfg_.mass.is_identity() ? nullptr : &cfg_.mass;
  const Vector& w = *ctx.weights;

  if (cfg_.solver == StageSolverKind::FixedPoint) {
    auto res = fixed_point_solve(sys, z_pred, cfg_.newton, w, z, stats_);
    if (!res.ok()) {
      ++stats_.nonlinear_fails;
      return res.outcome == NonlinearOutcome::RhsFailure ? AttemptStatus::RhsFailure
                                                         : AttemptStatus::SolverFailure;
    }
    return AttemptStatus::Ok;
  }

  Vector f_pred(n_);
  counted_fi_(t_stage, z_pred, f_pred);
  if (!all_finite(f_pred)) return AttemptStatus::RhsFailure;

  // One in-place retry with a fresh Jacobian before reporting failure to the
  // step loop; failures with current Jacobian data go straight out so the
  // loop can reduce h.
  for (int round = 0; round < 2; ++round) {
    if (!jac_.prepare(stats_.steps, sys, z_pred, f_pred, w, cfg_.newton, stats_))
      return AttemptStatus::LinearFailure;
    auto res = newton_solve(sys, z_pred, cfg_.newton, jac_, w, z, stats_, cfg_.linearly_implicit, &f_pred);
    if (res.ok()) return AttemptStatus::Ok;
    ++stats_.nonlinear_fails;
    if (res.outcome == NonlinearOutcome::LinearSolveFailure) return AttemptStatus::LinearFailure;
    if (res.outcome == NonlinearOutcome::RhsFailure) return AttemptStatus::RhsFailure;
    if (round == 0 && !jac_.jacobian_current()) {
      jac_.demand_fresh_jacobian();
      continue;
    }
    return AttemptStatus::SolverFailure;
  }
  return AttemptStatus::SolverFailure;
}

AttemptStatus ArkStepper::attempt_step(double t, const Vector& y, double h, const StepContext& ctx,
                                       StepAttempt& out) {
  const ButcherTable* te = cfg_.fe ? cfg_.explicit_table : nullptr;
  const ButcherTable* ti = cfg_.fi ? cfg_.implicit_table : nullptr;

  for (int i = 0; i < s_; ++i) {
    a_ = y;
    for (int j = 0; j < i; ++j) {
      if (te && te->A[i][j] != 0.0) axpy(h * te->A[i][j], ke_[j], a_);
      if (ti && ti->A[i][j] != 0.0) axpy(h * ti->A[i][j], ki_[j], a_);
    }

    const double gamma = ti ? h * ti->A[i][i] : 0.0;
    if (gamma != 0.0) {
      const double t_stage = t + ti->c[i] * h;
      const AttemptStatus st = solve_stage(i, t_stage, gamma, a_, ctx, y, z_);
      if (st != AttemptStatus::Ok) return st;
    } else {
      z_ = a_;
    }

    // Stage RHS values, kept for later stage sums and the recombinations.
    const bool cache_hit = i == 0 && stage1_explicit_first_ && stage1_valid_ && stage1_t_ == t;
    if (te && used_e_[i]) {
      if (cache_hit)
        ke_[i] = stage1_ke_;
      else
        eval_fe(t + te->c[i] * h, z_, ke_[i]);
    }
    if (ti && used_i_[i]) {
      if (cache_hit)
        ki_[i] = stage1_ki_;
      else if (!eval_fi(t + ti->c[i] * h, z_, ki_[i]))
        return AttemptStatus::RhsFailure;
    }
    if (i == 0 && stage1_explicit_first_ && !cache_hit) {
      stage1_t_ = t;
      stage1_valid_ = true;
      if (te && used_e_[0]) stage1_ke_ = ke_[0];
      if (ti && used_i_[0]) stage1_ki_ = ki_[0];
    }
  }

  if (stiffly_accurate_) {
    out.y = z_;
  } else {
    out.y = y;
    for (int i = 0; i < s_; ++i) {
      if (te && te->b[i] != 0.0) axpy(h * te->b[i], ke_[i], out.y);
      if (ti && ti->b[i] != 0.0) axpy(h * ti->b[i], ki_[i], out.y);
    }
  }

  if (provides_error()) {
    Vector err(n_, 0.0);
    for (int i = 0; i < s_; ++i) {
      if (te) {
        const double d = te->b[i] - te->btilde[i];
        if (d != 0.0) axpy(h * d, ke_[i], err);
      }
      if (ti) {
        const double d = ti->b[i] - ti->btilde[i];
        if (d != 0.0) axpy(h * d, ki_[i], err);
      }
    }
    out.error = std::move(err);
  } else {
    out.error.reset();
  }
  return AttemptStatus::Ok;
}

void ArkStepper::full_rhs(double t, const Vector& y, Vector& out) {
  out.assign(n_, 0.0);
  if (cfg_.fe && cfg_.fi) {
    Vector fe(n_);
    cfg_.fe(t, y, fe);
    ++stats_.fe_evals;
    counted_fi_(t, y, out);
    for (int i = 0; i < n_; ++i) out[i] += fe[i];
  } else if (cfg_.fe) {
    cfg_.fe(t, y, out);
    ++stats_.fe_evals;
  } else {
    counted_fi_(t, y, out);
  }
  if (!cfg_.mass.is_identity()) {
    cfg_.mass.solve_in_place(out);
    ++stats_.mass_solves;
  }
}

void ArkStepper::clear_caches() {
  jac_.invalidate();
  stage1_valid_ = false;
}

void ArkStepper::resize(int n) {
  n_ = n;
  ke_.assign(s_, Vector(n, 0.0));
  ki_.assign(s_, Vector(n, 0.0));
  a_.assign(n, 0.0);
  z_.assign(n, 0.0);
  jac_ = JacobianSlot(cfg_.jac_structure, cfg_.jac_ml, cfg_.jac_mu);
  stage1_valid_ = false;
}

}  // namespace odekit
