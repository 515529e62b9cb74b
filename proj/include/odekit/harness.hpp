#ifndef ODEKIT_HARNESS_HPP
#define ODEKIT_HARNESS_HPP

#include <string>
#include <vector>

#include "odekit/brusselator.hpp"
#include "odekit/integrator.hpp"
#include "odekit/mri_stepper.hpp"
#include "odekit/nonlinear.hpp"
#include "odekit/stats.hpp"

namespace odekit {

/// One benchmark run's statistics row plus the final-time error.
struct RunReport {
  std::string label;
  std::string method;
  std::string controller;
  std::string predictor;
  double rtol = 0.0, atol = 0.0;
  SolverStats stats;       // slow scale for multirate runs
  SolverStats fast_stats;  // zeros for single-rate runs
  double max_rel_error = -1.0;
  double wall_ms = 0.0;
  SolveStatus status = SolveStatus::Success;
  bool ok() const { return status == SolveStatus::Success || status == SolveStatus::TstopReached; }
};

std::string csv_header();
std::string csv_row(const RunReport& r);
void write_csv(const std::string& path, const std::vector<RunReport>& rows);

double max_rel_error(const Vector& y, const Vector& ref);

/// Reference solution at t_f: the order-5 DIRK configuration at
/// rtol = 1e-8, atol = 1e-14 with a banded Newton solver.
Vector make_reference(const BrusselatorProblem& p);
void save_reference(const std::string& path, const BrusselatorProblem& p, const Vector& yref);
Vector load_reference(const std::string& path, const BrusselatorProblem& p);
/// Loads the cached reference for this problem from dir, computing and
/// storing it on a miss.
Vector reference_cached(const BrusselatorProblem& p, const std::string& dir);

ControllerKind controller_from_name(const std::string& name);
PredictorKind predictor_from_name(const std::string& name);
std::string controller_name(ControllerKind k);
std::string predictor_name(PredictorKind k);

/// One adaptive ERK run on the advection-reaction problem (d = 0).
RunReport erk_run(const BrusselatorProblem& p, const std::string& table, ControllerKind ctrl,
                  double rtol, double atol, const Vector& ref);

/// The ERK work-precision grid: four methods, four controllers, three
/// tolerance pairs -> 48 rows.
std::vector<RunReport> work_precision_sweep(const BrusselatorProblem& p, const Vector& ref);

enum class ArkSplit { DirkAll, Imex1, Imex2 };

/// Order-4 DIRK / ImEx comparison row with banded modified Newton.
RunReport table1_run(const BrusselatorProblem& p, ArkSplit split, PredictorKind predictor,
                     const Vector& ref, double rtol = 1e-4, double atol = 1e-9);

enum class FastInnerKind { Erk3, Dirk3, Custom };

/// Multirate run: advection at the slow scale (fixed H = 0.1 via the MIS
/// coupling of the third-order slow table), reactions at the fast scale.
RunReport table2_run(const BrusselatorProblem& p, FastInnerKind inner, const Vector& ref,
                     double big_h = 0.1, double rtol = 1e-4, double atol = 1e-9);

/// Hand-rolled adaptive DIRK loop implementing the inner-stepper contract
/// directly; ships as the reference custom adapter.
class CustomDirkInner : public InnerStepper {
 public:
  CustomDirkInner(RhsFn ff, int n, double rtol, double atol, int jac_ml, int jac_mu);

  bool evolve(double t0, double t1, Vector& v, const ForcingPolynomial& forcing) override;
  void full_rhs(double t, const Vector& v, Vector& out) override;
  void reset(double t, const Vector& v) override;
  SolverStats fast_stats() const override { return stats_; }

 private:
  bool attempt(double t, const Vector& v, double h, const Vector& w, Vector& y_new, double& err_norm);

  RhsFn ff_;
  int n_;
  double rtol_, atol_;
  double t_ = 0.0;
  double h_ = 0.0;
  Vector v_;
  const ForcingPolynomial* forcing_ = nullptr;
  JacobianSlot jac_;
  NewtonConfig newton_;
  SolverStats stats_;
};

}  // namespace odekit

#endif
