#include "odekit/mri_stepper.hpp"

#include <cmath>
#include <stdexcept>

namespace odekit {

ForcingPolynomial build_forcing(const MriCoupling& cp, int i, double t_interval_start, double big_h,
                                const std::vector<Vector>& fe_vals, const std::vector<Vector>& fi_vals) {
  const double dc = cp.delta_c(i);
  if (dc <= 0.0) throw std::logic_error("build_forcing: stage has dc = 0 (ARK stage path applies)");

  ForcingPolynomial r;
  r.t_shift = t_interval_start;
  r.denom = dc * big_h;

  std::size_t n = 0;
  for (int j = 0; j < i && n == 0; ++j) {
    if (j < static_cast<int>(fe_vals.size()) && !fe_vals[j].empty()) n = fe_vals[j].size();
    if (j < static_cast<int>(fi_vals.size()) && !fi_vals[j].empty()) n = fi_vals[j].size();
  }
  if (n == 0) return r;  // no slow partitions: zero forcing
  r.coeffs.assign(cp.degree + 1, Vector(n, 0.0));
  const double inv_dc = 1.0 / dc;
  for (int k = 0; k <= cp.degree; ++k) {
    for (int j = 0; j < i; ++j) {
      const double we = cp.omega[k][i][j];
      if (we != 0.0 && !fe_vals[j].empty()) axpy(inv_dc * we, fe_vals[j], r.coeffs[k]);
      const double wi = cp.gamma[k][i][j];
      if (wi != 0.0 && !fi_vals[j].empty()) axpy(inv_dc * wi, fi_vals[j], r.coeffs[k]);
    }
  }
  // drop trailing all-zero powers
  while (r.coeffs.size() > 1) {
    bool zero = true;
    for (double v : r.coeffs.back())
      if (v != 0.0) {
        zero = false;
        break;
      }
    if (!zero) break;
    r.coeffs.pop_back();
  }
  return r;
}

MriStepper::MriStepper(MriConfig cfg, int n) : cfg_(std::move(cfg)), n_(n) {
  if (!cfg_.coupling) throw std::invalid_argument("MriStepper: missing coupling tables");
  cfg_.coupling->validate();
  if (!cfg_.inner) throw std::invalid_argument("MriStepper: missing inner stepper");
  if (cfg_.fi && !cfg_.coupling->has_implicit())
    throw std::invalid_argument("MriStepper: fi supplied but coupling has no implicit tables");

  const MriCoupling& cp = *cfg_.coupling;
  used_e_.assign(cp.s, false);
  used_i_.assign(cp.s, false);
  for (int j = 0; j < cp.s; ++j) {
    bool ue = false, ui = false;
    for (int k = 0; k <= cp.degree; ++k)
      for (int i = j + 1; i < cp.s; ++i) {
        ue = ue || cp.omega[k][i][j] != 0.0;
        ui = ui || cp.gamma[k][i][j] != 0.0;
      }
    used_e_[j] = ue && static_cast<bool>(cfg_.fe);
    used_i_[j] = ui && static_cast<bool>(cfg_.fi);
  }

  jac_ = JacobianSlot(cfg_.jac_structure, cfg_.jac_ml, cfg_.jac_mu);
  counted_fi_ = [this](double t, const Vector& yv, Vector& fv) {
    cfg_.fi(t, yv, fv);
    ++stats_.fi_evals;
  };
  resize(n_);
}

AttemptStatus MriStepper::attempt_step(double t, const Vector& y, double h, const StepContext& ctx,
                                       StepAttempt& out) {
  const MriCoupling& cp = *cfg_.coupling;
  const int s = cp.s;

  auto store_stage_rhs = [&](int j, double tj, const Vector& zj) -> bool {
    if (used_e_[j]) {
      fe_vals_[j].resize(n_);
      cfg_.fe(tj, zj, fe_vals_[j]);
      ++stats_.fe_evals;
      if (!all_finite(fe_vals_[j])) return false;
    }
    if (used_i_[j]) {
      fi_vals_[j].resize(n_);
      counted_fi_(tj, zj, fi_vals_[j]);
      if (!all_finite(fi_vals_[j])) return false;
    }
    return true;
  };

  z_ = y;
  if (!store_stage_rhs(0, t, z_)) return AttemptStatus::RhsFailure;

  for (int i = 1; i < s; ++i) {
    const double t_prev = t + cp.c[i - 1] * h;
    const double t_i = t + cp.c[i] * h;
    const MriStageKind kind = cp.stage_kind(i);

    if (kind == MriStageKind::FastIvp) {
      const ForcingPolynomial r = build_forcing(cp, i, t_prev, h, fe_vals_, fi_vals_);
      cfg_.inner->reset(t_prev, z_);
      if (!cfg_.inner->evolve(t_prev, t_i, z_, r)) return AttemptStatus::InnerFailure;
    } else {
      // dc = 0: the stage reduces to a standard ImEx-ARK stage from z_{i-1}
      a_ = z_;
      for (int j = 0; j < i; ++j) {
        const double ae = cp.ark_explicit_coeff(i, j);
        if (ae != 0.0 && !fe_vals_[j].empty()) axpy(h * ae, fe_vals_[j], a_);
        const double ai = cp.ark_implicit_coeff(i, j);
        if (ai != 0.0 && !fi_vals_[j].empty()) axpy(h * ai, fi_vals_[j], a_);
      }
      if (kind == MriStageKind::ImplicitArk) {
        const double gamma = h * cp.ark_implicit_coeff(i, i);
        const int xi_max = std::min(method_order() - 1, 5);
        Vector z_pred = predict_stage(cfg_.predictor, ctx.interp, t_i, i + 1, xi_max, z_);
        StageSystem sys;
        sys.t = t_i;
        sys.gamma = gamma;
        sys.known = &a_;
        sys.rhs = counted_fi_;
        const Vector& w = *ctx.weights;

        Vector f_pred(n_);
        counted_fi_(t_i, z_pred, f_pred);
        if (!all_finite(f_pred)) return AttemptStatus::RhsFailure;
        for (int round = 0; round < 2; ++round) {
          if (!jac_.prepare(stats_.steps, sys, z_pred, f_pred, w, cfg_.newton, stats_))
            return AttemptStatus::LinearFailure;
          auto res = newton_solve(sys, z_pred, cfg_.newton, jac_, w, z_, stats_,
                                  cfg_.slow_linearly_implicit, &f_pred);
          if (res.ok()) break;
          ++stats_.nonlinear_fails;
          if (res.outcome == NonlinearOutcome::LinearSolveFailure) return AttemptStatus::LinearFailure;
          if (res.outcome == NonlinearOutcome::RhsFailure) return AttemptStatus::RhsFailure;
          if (round == 0 && !jac_.jacobian_current()) {
            jac_.demand_fresh_jacobian();
            continue;
          }
          return AttemptStatus::SolverFailure;
        }
      } else {
        z_ = a_;
      }
    }

    if (i < s - 1 && !store_stage_rhs(i, t_i, z_)) return AttemptStatus::RhsFailure;
  }

  out.y = z_;
  out.error.reset();
  return AttemptStatus::Ok;
}

void MriStepper::full_rhs(double t, const Vector& y, Vector& out) {
  out.assign(n_, 0.0);
  Vector part(n_);
  if (cfg_.fe) {
    cfg_.fe(t, y, part);
    ++stats_.fe_evals;
    for (int i = 0; i < n_; ++i) out[i] += part[i];
  }
  if (cfg_.fi) {
    counted_fi_(t, y, part);
    for (int i = 0; i < n_; ++i) out[i] += part[i];
  }
  cfg_.inner->full_rhs(t, y, part);
  for (int i = 0; i < n_; ++i) out[i] += part[i];
}

void MriStepper::resize(int n) {
  n_ = n;
  fe_vals_.assign(cfg_.coupling->s, Vector());
  fi_vals_.assign(cfg_.coupling->s, Vector());
  a_.assign(n, 0.0);
  z_.assign(n, 0.0);
  jac_ = JacobianSlot(cfg_.jac_structure, cfg_.jac_ml, cfg_.jac_mu);
}

ArkInnerAdapter::ArkInnerAdapter(const ButcherTable& table, bool implicit, RhsFn ff, int n,
                                 Options options)
    : ff_(std::move(ff)) {
  RhsFn forced = [this](double t, const Vector& v, Vector& out) {
    ff_(t, v, out);
    ++ff_evals_;
    if (forcing_) forcing_->add_to(t, out);
  };

  if (implicit) {
    ArkConfig cfg;
    cfg.implicit_table = &table;
    cfg.fi = forced;
    cfg.jac_structure = options.jac_structure;
    cfg.jac_ml = options.jac_ml;
    cfg.jac_mu = options.jac_mu;
    cfg.newton = options.newton;
    cfg.predictor = PredictorKind::Trivial;
    stepper_ = std::make_shared<ArkStepper>(std::move(cfg), n);
  } else {
    stepper_ = std::make_shared<ErkStepper>(table, forced, n);
  }

  IntegratorOptions iopt;
  iopt.tol = options.tol;
  iopt.controller = options.controller;
  // Lagrange history costs no extra fast RHS evaluations; the inner loop
  // never interpolates anyway (stage ends are hit exactly in TSTOP mode).
  iopt.interpolant = InterpolantKind::Lagrange;
  integ_ = std::make_unique<Integrator>(stepper_, 0.0, Vector(n, 0.0), iopt);
}

bool ArkInnerAdapter::evolve(double t0, double t1, Vector& v, const ForcingPolynomial& forcing) {
  // A full reset keeps each fast solve a pure function of (t0, t1, v): the
  // automatic initial-step estimate depends only on the supplied state, so
  // repeated solves over one interval reproduce their results exactly.
  integ_->reset(t0, v);
  forcing_ = &forcing;
  EvolveResult res = integ_->evolve(t1, EvolveMode::NormalTstop, v);
  forcing_ = nullptr;
  return res.ok();
}

void ArkInnerAdapter::full_rhs(double t, const Vector& v, Vector& out) {
  out.resize(v.size());
  ff_(t, v, out);
  ++ff_evals_;
}

void ArkInnerAdapter::reset(double t, const Vector& v) { integ_->reset(t, v); }

SolverStats ArkInnerAdapter::fast_stats() const {
  SolverStats s = integ_->stats();
  s.ff_evals = ff_evals_;
  return s;
}

std::unique_ptr<InnerStepper> wrap_ark_as_inner(const ButcherTable& table, bool implicit, RhsFn ff,
                                                int n, ArkInnerAdapter::Options options) {
  return std::make_unique<ArkInnerAdapter>(table, implicit, ff, n, std::move(options));
}

}  // namespace odekit
