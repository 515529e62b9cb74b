#include "odekit/nonlinear.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace odekit {

namespace {

constexpr double kUnitRoundoff = std::numeric_limits<double>::epsilon();

double fd_increment(double zj, double wj, double min_inc) {
  const double srur = std::sqrt(kUnitRoundoff);
  return std::max(srur * std::abs(zj), min_inc / wj);
}

double fd_min_inc(const Vector& f_of_z, const Vector& w) {
  const double fnorm = wrms_norm(f_of_z, w);
  const double n = static_cast<double>(f_of_z.size());
  return fnorm > 0.0 ? 1000.0 * kUnitRoundoff * n * fnorm : 1.0;
}

}  // namespace

std::optional<DenseMatrix> fd_jacobian_dense(const RhsFn& f, double t, const Vector& z,
                                             const Vector& f_of_z, const Vector& w) {
  const int n = static_cast<int>(z.size());
  DenseMatrix j(n, n);
  Vector zp = z, fp(n);
  const double min_inc = fd_min_inc(f_of_z, w);
  for (int col = 0; col < n; ++col) {
    const double inc = fd_increment(z[col], w[col], min_inc);
    zp[col] = z[col] + inc;
    f(t, zp, fp);
    zp[col] = z[col];
    if (!all_finite(fp)) return std::nullopt;
    const double inv = 1.0 / inc;
    for (int row = 0; row < n; ++row) j(row, col) = (fp[row] - f_of_z[row]) * inv;
  }
  return j;
}

std::optional<BandedMatrix> fd_jacobian_banded(const RhsFn& f, double t, const Vector& z,
                                               const Vector& f_of_z, const Vector& w,
                                               int ml, int mu) {
  const int n = static_cast<int>(z.size());
  BandedMatrix j(n, ml, mu);
  Vector zp = z, fp(n);
  const double min_inc = fd_min_inc(f_of_z, w);
  const int width = ml + mu + 1;
  for (int group = 0; group < std::min(width, n); ++group) {
    for (int col = group; col < n; col += width) zp[col] = z[col] + fd_increment(z[col], w[col], min_inc);
    f(t, zp, fp);
    if (!all_finite(fp)) return std::nullopt;
    for (int col = group; col < n; col += width) {
      const double inv = 1.0 / (zp[col] - z[col]);
      zp[col] = z[col];
      for (int row = std::max(0, col - mu); row <= std::min(n - 1, col + ml); ++row)
        j(row, col) = (fp[row] - f_of_z[row]) * inv;
    }
  }
  return j;
}

bool JacobianSlot::needs_setup(long step_index, double gamma, const NewtonConfig& cfg) const {
  if (!has_setup() || force_setup_) return true;
  if (step_index - setup_step_ >= cfg.max_steps_between_setups) return true;
  if (std::abs(gamma / gamma_ - 1.0) > cfg.gamma_change_threshold) return true;
  return false;
}

bool JacobianSlot::prepare(long step_index, const StageSystem& sys, const Vector& z,
                           const Vector& f_of_z, const Vector& w, const NewtonConfig& cfg,
                           SolverStats& stats, bool* did_setup) {
  if (did_setup) *did_setup = false;
  if (!needs_setup(step_index, sys.gamma, cfg)) {
    jac_current_ = false;  // carried over from an earlier setup
    return true;
  }

  const bool jac_stale = !((dense_j_ || banded_j_)) || force_jac_ ||
                         step_index - jac_step_ >= cfg.max_steps_between_setups;
  if (jac_stale) {
    if (structure_ == JacStructure::Dense) {
      auto j = fd_jacobian_dense(sys.rhs, sys.t, z, f_of_z, w);
      if (!j) return false;
      dense_j_ = std::move(*j);
    } else {
      auto j = fd_jacobian_banded(sys.rhs, sys.t, z, f_of_z, w, ml_, mu_);
      if (!j) return false;
      banded_j_ = std::move(*j);
    }
    ++stats.jacobian_evals;
    jac_step_ = step_index;
    jac_current_ = true;
  } else {
    jac_current_ = false;
  }

  // A = M - gamma * J
  const MassOperator identity;
  const MassOperator& mass = sys.mass ? *sys.mass : identity;
  if (structure_ == JacStructure::Dense) {
    DenseMatrix a(dense_j_->rows(), dense_j_->cols());
    for (int i = 0; i < a.rows(); ++i)
      for (int jj = 0; jj < a.cols(); ++jj) a(i, jj) = -sys.gamma * (*dense_j_)(i, jj);
    mass.add_to(a);
    auto lu = DenseLu::factor(a);
    if (!lu) return false;
    dense_lu_ = std::move(*lu);
  } else {
    BandedMatrix a(banded_j_->size(), ml_, mu_);
    for (int i = 0; i < a.size(); ++i)
      for (int jj = std::max(0, i - ml_); jj <= std::min(a.size() - 1, i + mu_); ++jj)
        a(i, jj) = -sys.gamma * (*banded_j_)(i, jj);
    mass.add_to(a);
    auto lu = BandedLu::factor(a);
    if (!lu) return false;
    banded_lu_ = std::move(*lu);
  }
  ++stats.linear_setups;
  setup_step_ = step_index;
  gamma_ = sys.gamma;
  force_setup_ = force_jac_ = false;
  if (did_setup) *did_setup = true;
  return true;
}

bool JacobianSlot::solve(Vector& b) const {
  if (dense_lu_) {
    dense_lu_->solve(b);
    return true;
  }
  if (banded_lu_) {
    banded_lu_->solve(b);
    return true;
  }
  return false;
}

void JacobianSlot::invalidate() {
  dense_j_.reset();
  banded_j_.reset();
  dense_lu_.reset();
  banded_lu_.reset();
  setup_step_ = jac_step_ = -1;
  force_setup_ = force_jac_ = true;
  jac_current_ = false;
}

NonlinearResult newton_solve(const StageSystem& sys, const Vector& z_pred, const NewtonConfig& cfg,
                             JacobianSlot& jac, const Vector& w, Vector& z_out, SolverStats& stats,
                             bool linearly_implicit, const Vector* f_at_pred) {
  const std::size_t n = z_pred.size();
  const Vector& a = *sys.known;

  if (sys.gamma == 0.0) {  // stage equation degenerates to z = a
    z_out = a;
    return {NonlinearOutcome::Converged, 0};
  }

  Vector z = z_pred;
  Vector zc(n, 0.0), fz(n), resid(n);
  double del_prev = 0.0, crate = 1.0;

  const int max_iters = linearly_implicit ? 1 : cfg.max_iters;
  for (int m = 1; m <= max_iters; ++m) {
    if (m == 1 && f_at_pred)
      fz = *f_at_pred;
    else
      sys.rhs(sys.t, z, fz);
    if (!all_finite(fz)) return {NonlinearOutcome::RhsFailure, m - 1};

    // G(z_c) = M z_c - gamma f(z) - M (a - z_p); solve A delta = -G
    if (sys.mass && !sys.mass->is_identity()) {
      Vector tmp(n);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = zc[i] - (a[i] - z_pred[i]);
      resid = sys.mass->apply(tmp);
      for (std::size_t i = 0; i < n; ++i) resid[i] -= sys.gamma * fz[i];
    } else {
      for (std::size_t i = 0; i < n; ++i) resid[i] = zc[i] - sys.gamma * fz[i] - (a[i] - z_pred[i]);
    }
    for (double& r : resid) r = -r;
    if (!jac.solve(resid)) return {NonlinearOutcome::LinearSolveFailure, m - 1};
    const Vector& delta = resid;

    for (std::size_t i = 0; i < n; ++i) {
      zc[i] += delta[i];
      z[i] = z_pred[i] + zc[i];
    }
    ++stats.nonlinear_iters;

    if (linearly_implicit) {
      z_out = z;
      return {NonlinearOutcome::Converged, m};
    }

    const double del = wrms_norm(delta, w);
    if (!std::isfinite(del)) return {NonlinearOutcome::Diverged, m};
    if (m > 1) crate = std::max(cfg.rate_memory * crate, del / del_prev);
    if (std::min(1.0, crate) * del <= cfg.tol_coef) {
      z_out = z;
      return {NonlinearOutcome::Converged, m};
    }
    if (m > 1 && del > cfg.divergence * del_prev) return {NonlinearOutcome::Diverged, m};
    del_prev = del;
  }
  return {NonlinearOutcome::MaxIters, max_iters};
}

NonlinearResult fixed_point_solve(const StageSystem& sys, const Vector& z_pred,
                                  const NewtonConfig& cfg, const Vector& w, Vector& z_out,
                                  SolverStats& stats) {
  const std::size_t n = z_pred.size();
  const Vector& a = *sys.known;

  if (sys.gamma == 0.0) {  // one sweep lands on z = a exactly
    z_out = a;
    ++stats.nonlinear_iters;
    return {NonlinearOutcome::Converged, 1};
  }

  Vector z = z_pred;
  Vector zc(n, 0.0), fz(n), gz(n);
  double del_prev = 0.0, crate = 1.0;

  for (int m = 1; m <= cfg.max_iters; ++m) {
    sys.rhs(sys.t, z, fz);
    if (!all_finite(fz)) return {NonlinearOutcome::RhsFailure, m - 1};

    for (std::size_t i = 0; i < n; ++i) gz[i] = sys.gamma * fz[i];
    if (sys.mass && !sys.mass->is_identity()) {
      sys.mass->solve_in_place(gz);
      ++stats.mass_solves;
    }
    double del_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double zc_new = gz[i] + (a[i] - z_pred[i]);
      const double d = (zc_new - zc[i]) * w[i];
      del_sq += d * d;
      zc[i] = zc_new;
      z[i] = z_pred[i] + zc[i];
    }
    ++stats.nonlinear_iters;
    const double del = std::sqrt(del_sq / static_cast<double>(n));
    if (!std::isfinite(del)) return {NonlinearOutcome::Diverged, m};
    if (m > 1) crate = std::max(cfg.rate_memory * crate, del / del_prev);
    if (std::min(1.0, crate) * del <= cfg.tol_coef) {
      z_out = z;
      return {NonlinearOutcome::Converged, m};
    }
    // a plain fixed-point sweep must contract; any growth in the correction
    // norm signals a non-contractive map
    if (m > 1 && del >= del_prev) return {NonlinearOutcome::Diverged, m};
    del_prev = del;
  }
  return {NonlinearOutcome::MaxIters, cfg.max_iters};
}

Vector predict_stage(PredictorKind kind, const DenseOutput* interp, double t_stage,
                     int stage_number, int xi_max, const Vector& y_prev) {
  if (kind == PredictorKind::Trivial || !interp || !interp->ready() || xi_max < 1) return y_prev;

  int xi = xi_max;
  switch (kind) {
    case PredictorKind::Trivial:
      return y_prev;
    case PredictorKind::MaxOrder:
      break;
    case PredictorKind::VariableOrder:
      xi = std::max(xi_max - stage_number, 1);
      break;
    case PredictorKind::Cutoff: {
      const double h_prev = interp->t_new() - interp->t_old();
      if (h_prev == 0.0) return y_prev;
      xi = (t_stage - interp->t_new()) / h_prev < 0.5 ? xi_max : 1;
      break;
    }
  }
  Vector z;
  interp->eval_degree(std::min(xi, interp->available_degree()), t_stage, 0, z);
  return z;
}

}  // namespace odekit
