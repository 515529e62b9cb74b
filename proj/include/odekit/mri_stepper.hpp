#ifndef ODEKIT_MRI_STEPPER_HPP
#define ODEKIT_MRI_STEPPER_HPP

#include <memory>

#include "odekit/ark_stepper.hpp"
#include "odekit/erk_stepper.hpp"
#include "odekit/integrator.hpp"
#include "odekit/mri_coupling.hpp"
#include "odekit/nonlinear.hpp"
#include "odekit/stepper.hpp"

namespace odekit {

/// Polynomial slow-tendency forcing r_i(t) for one fast interval:
/// r(t) = sum_k coeffs[k] * theta^k with theta = (t - t_shift) / denom.
struct ForcingPolynomial {
  double t_shift = 0.0;
  double denom = 1.0;  // dc_i * H
  std::vector<Vector> coeffs;

  bool empty() const { return coeffs.empty(); }

  void add_to(double t, Vector& dydt) const {
    if (coeffs.empty()) return;
    const double theta = (t - t_shift) / denom;
    double p = 1.0;
    for (const auto& c : coeffs) {
      for (std::size_t i = 0; i < dydt.size(); ++i) dydt[i] += p * c[i];
      p *= theta;
    }
  }

  /// Evaluates r(t) alone.
  void value(double t, Vector& out) const {
    out.assign(out.size(), 0.0);
    add_to(t, out);
  }
};

/// Contract for the fast-scale integrator driven by the MRI engine: evolve a
/// forced fast IVP over a stage interval, expose the fast right-hand side
/// for dense output, and reset to a prescribed initial condition. Each fast
/// solve must start exactly from the state passed to the preceding reset.
class InnerStepper {
 public:
  virtual ~InnerStepper() = default;

  virtual bool evolve(double t0, double t1, Vector& v, const ForcingPolynomial& forcing) = 0;
  virtual void full_rhs(double t, const Vector& v, Vector& out) = 0;
  virtual void reset(double t, const Vector& v) = 0;

  /// Fast-scale statistics accumulated across all fast solves.
  virtual SolverStats fast_stats() const { return {}; }
};

/// Builds the slow-tendency forcing for 0-based stage index i (dc_i > 0)
/// from the stored slow RHS values at stages j < i.
ForcingPolynomial build_forcing(const MriCoupling& cp, int i, double t_interval_start, double big_h,
                                const std::vector<Vector>& fe_vals, const std::vector<Vector>& fi_vals);

struct MriConfig {
  const MriCoupling* coupling = nullptr;
  RhsFn fe;  // slow nonstiff partition (optional)
  RhsFn fi;  // slow stiff partition (optional)
  InnerStepper* inner = nullptr;
  NewtonConfig newton;
  JacStructure jac_structure = JacStructure::Dense;
  int jac_ml = 0, jac_mu = 0;
  bool slow_linearly_implicit = false;
  PredictorKind predictor = PredictorKind::Trivial;
};

/// Multirate-infinitesimal single-step engine: the outer stage loop with
/// polynomial forcing, solve-decoupled implicit slow stages, and a pluggable
/// inner integrator. Runs fixed-H only and reports no embedded error.
class MriStepper : public OneStepMethod {
 public:
  MriStepper(MriConfig cfg, int n);

  int dimension() const override { return n_; }
  bool provides_error() const override { return false; }
  int method_order() const override { return cfg_.coupling->q; }
  int embedding_order() const override { return 0; }

  AttemptStatus attempt_step(double t, const Vector& y, double h, const StepContext& ctx,
                             StepAttempt& out) override;
  void full_rhs(double t, const Vector& y, Vector& out) override;

  SolverStats& stats() override { return stats_; }
  void clear_caches() override { jac_.invalidate(); }
  void resize(int n) override;

  SolverStats fast_stats() const { return cfg_.inner->fast_stats(); }

 private:
  MriConfig cfg_;
  int n_;
  std::vector<bool> used_e_, used_i_;
  std::vector<Vector> fe_vals_, fi_vals_;
  Vector a_, z_;
  JacobianSlot jac_;
  SolverStats stats_;
  RhsFn counted_fi_;
};

/// Inner integrator backed by the library's own adaptive ERK/DIRK machinery.
/// Evolve runs to the interval end in stop-at-endpoint mode; the step size
/// and controller history persist across fast intervals.
class ArkInnerAdapter : public InnerStepper {
 public:
  struct Options {
    Tolerances tol;
    ControllerKind controller = ControllerKind::Pi;
    JacStructure jac_structure = JacStructure::Dense;
    int jac_ml = 0, jac_mu = 0;
    NewtonConfig newton;
  };

  /// Explicit fast method when implicit == false, DIRK otherwise.
  ArkInnerAdapter(const ButcherTable& table, bool implicit, RhsFn ff, int n, Options options);

  bool evolve(double t0, double t1, Vector& v, const ForcingPolynomial& forcing) override;
  void full_rhs(double t, const Vector& v, Vector& out) override;
  void reset(double t, const Vector& v) override;
  SolverStats fast_stats() const override;

 private:
  RhsFn ff_;
  const ForcingPolynomial* forcing_ = nullptr;
  long ff_evals_ = 0;
  std::shared_ptr<OneStepMethod> stepper_;
  std::unique_ptr<Integrator> integ_;
};

std::unique_ptr<InnerStepper> wrap_ark_as_inner(const ButcherTable& table, bool implicit, RhsFn ff,
                                                int n, ArkInnerAdapter::Options options);

}  // namespace odekit

#endif
