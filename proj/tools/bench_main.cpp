// Benchmark and utility CLI for the odekit integrators: single Brusselator
// runs, the ERK work-precision sweep, the DIRK/ImEx predictor comparison,
// the multirate inner-stepper comparison, reference generation, and
// coefficient-table inspection.

#include <chrono>
#include <memory>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "odekit/ark_stepper.hpp"
#include "odekit/butcher.hpp"
#include "odekit/erk_stepper.hpp"
#include "odekit/harness.hpp"
#include "odekit/integrator.hpp"
#include "odekit/mri_coupling.hpp"
#include "odekit/table_io.hpp"

using namespace odekit;

namespace {

void print_report(const RunReport& r) {
  std::printf("%-10s method=%s controller=%s predictor=%s rtol=%g atol=%g\n", r.label.c_str(),
              r.method.c_str(), r.controller.c_str(), r.predictor.c_str(), r.rtol, r.atol);
  std::printf("  steps %ld  attempts %ld  err fails %ld  solve fails %ld\n", r.stats.steps,
              r.stats.attempts, r.stats.err_test_fails, r.stats.step_solve_fails);
  std::printf("  fE evals %ld  fI evals %ld  NLS iters %ld  NLS fails %ld  LS setups %ld  J evals %ld\n",
              r.stats.fe_evals, r.stats.fi_evals, r.stats.nonlinear_iters, r.stats.nonlinear_fails,
              r.stats.linear_setups, r.stats.jacobian_evals);
  if (r.fast_stats.steps > 0 || r.fast_stats.ff_evals > 0) {
    std::printf("  fast: steps %ld  failed %ld  ff evals %ld  NLS iters %ld  NLS fails %ld  "
                "LS setups %ld  J evals %ld\n",
                r.fast_stats.steps, r.fast_stats.err_test_fails + r.fast_stats.step_solve_fails,
                r.fast_stats.ff_evals, r.fast_stats.nonlinear_iters, r.fast_stats.nonlinear_fails,
                r.fast_stats.linear_setups, r.fast_stats.jacobian_evals);
  }
  if (r.max_rel_error >= 0.0) std::printf("  max rel error %.3e\n", r.max_rel_error);
  std::printf("  wall %.1f ms  status %s\n", r.wall_ms, r.ok() ? "ok" : "FAILED");
}

void append_csv(const std::string& path, const std::vector<RunReport>& rows) {
  if (path.empty()) return;
  write_csv(path, rows);
  std::printf("wrote %zu rows to %s\n", rows.size(), path.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"odekit benchmark harness (1-D Brusselator advection-diffusion-reaction)"};
  app.require_subcommand(1);

  std::string ref_dir = ".";
  app.add_option("--ref-dir", ref_dir, "directory for cached reference solutions");

  // ---- tables ----
  auto* tables = app.add_subcommand("tables", "list or inspect coefficient tables");
  std::string check_name, export_name, export_path, load_path;
  tables->add_option("--check", check_name, "print order-condition residuals for a table");
  tables->add_option("--export", export_name, "write a builtin table to --out");
  tables->add_option("--out", export_path, "output path for --export");
  tables->add_option("--load", load_path, "validate a coefficient file");
  tables->callback([&] {
    if (!check_name.empty()) {
      const ButcherTable& t = resolve_table(check_name);
      std::printf("%s: s=%d q=%d p=%d %s\n", t.name.c_str(), t.s, t.q, t.p,
                  t.has_embedding() ? "embedded" : "no embedding");
      for (const auto& [id, r] : order_condition_residuals(t, std::min(t.q, 4)))
        std::printf("  %-8s % .3e\n", id.c_str(), r);
      return;
    }
    if (!export_name.empty()) {
      save_table_file(resolve_table(export_name), export_path);
      std::printf("wrote %s\n", export_path.c_str());
      return;
    }
    if (!load_path.empty()) {
      auto loaded = load_table_file(load_path);
      for (const auto& w : loaded.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
      std::printf("%s: ok\n", load_path.c_str());
      return;
    }
    std::printf("butcher tables:\n");
    for (const auto& n : builtin_table_names()) std::printf("  %s\n", n.c_str());
    std::printf("mri couplings:\n");
    for (const auto& n : builtin_coupling_names()) std::printf("  %s\n", n.c_str());
  });

  // ---- reference ----
  auto* refcmd = app.add_subcommand("reference", "generate the reference solution");
  int ref_npts = 512;
  double ref_d = 0.01;
  refcmd->add_option("--npts", ref_npts, "grid points");
  refcmd->add_option("--d", ref_d, "diffusion rate");
  refcmd->callback([&] {
    BrusselatorProblem p;
    p.npts = ref_npts;
    p.d = ref_d;
    reference_cached(p, ref_dir);
    std::printf("reference ready (npts=%d d=%g) in %s\n", p.npts, p.d, ref_dir.c_str());
  });

  // ---- single run ----
  auto* run = app.add_subcommand("brusselator", "run one configuration");
  std::string preset = "erk", table_spec, controller = "pid", predictor = "trivial";
  std::string inner = "erk", csv_path;
  double rtol = 1e-4, atol = 1e-9, big_h = 0.1;
  int npts = -1;
  double dval = -1.0;
  bool literal = false;
  run->add_option("--preset", preset, "erk|dirk|imex1|imex2|mri")
      ->check(CLI::IsMember({"erk", "dirk", "imex1", "imex2", "mri"}));
  run->add_option("--table", table_spec, "method table name or file:<path> (erk preset)");
  run->add_option("--controller", controller, "pid|pi|i|expgus|impgus|imexgus");
  run->add_option("--predictor", predictor, "trivial|maxorder|variable|cutoff");
  run->add_option("--rtol", rtol);
  run->add_option("--atol", atol);
  run->add_option("--npts", npts, "grid points (default 512; 128 for mri)");
  run->add_option("--d", dval, "diffusion rate (default per preset)");
  run->add_option("--inner", inner, "erk|dirk|custom (mri preset)");
  run->add_option("--H", big_h, "slow step size (mri preset)");
  run->add_flag("--literal-eq15", literal, "apply u_xx diffusion in all three equations");
  run->add_option("--csv", csv_path, "write the report as CSV");
  run->callback([&] {
    BrusselatorProblem p;
    p.npts = npts > 0 ? npts : (preset == "mri" ? 128 : 512);
    // erk and mri presets default to the advection-reaction setup
    p.d = dval >= 0.0 ? dval : ((preset == "erk" || preset == "mri") ? 0.0 : 0.01);
    p.literal_diffusion = literal;
    const Vector ref = reference_cached(p, ref_dir);

    RunReport rep;
    if (preset == "erk") {
      const std::string tbl = table_spec.empty() ? "bogacki_shampine_3_2" : table_spec;
      rep = erk_run(p, tbl, controller_from_name(controller), rtol, atol, ref);
    } else if (preset == "mri") {
      FastInnerKind k = inner == "dirk"     ? FastInnerKind::Dirk3
                        : inner == "custom" ? FastInnerKind::Custom
                                            : FastInnerKind::Erk3;
      rep = table2_run(p, k, ref, big_h, rtol, atol);
    } else {
      ArkSplit split = preset == "dirk" ? ArkSplit::DirkAll
                       : preset == "imex1" ? ArkSplit::Imex1
                                           : ArkSplit::Imex2;
      rep = table1_run(p, split, predictor_from_name(predictor), ref, rtol, atol);
    }
    print_report(rep);
    append_csv(csv_path, {rep});
  });

  // ---- fully configurable single run ----
  auto* custom = app.add_subcommand("run", "run the Brusselator with explicit solver configuration");
  struct {
    std::string stepper = "erk";
    std::string erk_table = "bogacki_shampine_3_2";
    std::string split = "imex1";  // ark presets: dirk|imex1|imex2
    std::string ark_table = "ark436l2sa";
    std::string coupling = "mis_kw3";
    std::string inner = "erk";
    std::string controller = "pid";
    std::string predictor = "trivial";
    std::string solver = "newton";
    std::string interpolant = "hermite";
    std::string evolve_mode = "tstop";
    std::string jac = "banded";
    std::string order_basis = "p";
    std::string csv;
    double rtol = 1e-4, atol = 1e-9, inner_rtol = 1e-4, inner_atol = 1e-9;
    double tf = -1.0, fixed_h = 0.0, big_h = 0.1;
    double safety = 0.96, bias = 1.5, max_growth = 20.0;
    double hmin = 0.0, hmax = 0.0;
    double newton_tol = 0.1, dgmax = 0.2;
    int max_newton_iters = 3, msbp = 20;
    int interpolant_degree = 3;
    int ml = -1, mu = -1;
    int npts = -1;
    double d = -1.0;
    bool literal = false, linimp = false;
    std::vector<double> gains;
  } rc;
  custom->add_option("--stepper", rc.stepper, "erk|ark|mri")
      ->check(CLI::IsMember({"erk", "ark", "mri"}));
  custom->add_option("--erk-table", rc.erk_table, "table name or file:<path>");
  custom->add_option("--split", rc.split, "ark term assignment: dirk|imex1|imex2")
      ->check(CLI::IsMember({"dirk", "imex1", "imex2"}));
  custom->add_option("--ark-table", rc.ark_table, "ARK family base name (suffixes _erk/_dirk)");
  custom->add_option("--mri-coupling", rc.coupling, "coupling name or file:<path>");
  custom->add_option("--inner", rc.inner, "erk|dirk|custom");
  custom->add_option("--inner-rtol", rc.inner_rtol);
  custom->add_option("--inner-atol", rc.inner_atol);
  custom->add_option("--H", rc.big_h, "slow step size (mri)");
  custom->add_option("--controller", rc.controller);
  custom->add_option("--gains", rc.gains, "controller gain overrides (k1 [k2 [k3]])")->expected(1, 3);
  custom->add_option("--predictor", rc.predictor);
  custom->add_option("--solver", rc.solver, "newton|fixedpoint");
  custom->add_option("--max-newton-iters", rc.max_newton_iters);
  custom->add_option("--newton-tol-coef", rc.newton_tol);
  custom->add_option("--msbp", rc.msbp, "max steps between Jacobian setups");
  custom->add_option("--dgmax", rc.dgmax, "relative gamma drift forcing a setup");
  custom->add_option("--jac", rc.jac, "dense|banded");
  custom->add_option("--ml", rc.ml, "lower bandwidth (banded Jacobian)");
  custom->add_option("--mu", rc.mu, "upper bandwidth (banded Jacobian)");
  custom->add_option("--interpolant", rc.interpolant, "hermite|lagrange");
  custom->add_option("--interpolant-degree", rc.interpolant_degree)->check(CLI::Range(0, 5));
  custom->add_option("--evolve-mode", rc.evolve_mode, "normal|tstop|onestep")
      ->check(CLI::IsMember({"normal", "tstop", "onestep"}));
  custom->add_option("--rtol", rc.rtol);
  custom->add_option("--atol", rc.atol);
  custom->add_option("--safety", rc.safety);
  custom->add_option("--bias", rc.bias);
  custom->add_option("--max-growth", rc.max_growth);
  custom->add_option("--hmin", rc.hmin);
  custom->add_option("--hmax", rc.hmax);
  custom->add_option("--order-basis", rc.order_basis, "p|q")->check(CLI::IsMember({"p", "q"}));
  custom->add_option("--fixed-h", rc.fixed_h, "disable adaptivity and use this step");
  custom->add_option("--tf", rc.tf, "final time (default 10)");
  custom->add_option("--npts", rc.npts);
  custom->add_option("--d", rc.d);
  custom->add_flag("--literal-eq15", rc.literal);
  custom->add_flag("--linearly-implicit", rc.linimp);
  custom->add_option("--csv", rc.csv);
  custom->callback([&] {
    BrusselatorProblem p;
    p.npts = rc.npts > 0 ? rc.npts : (rc.stepper == "mri" ? 128 : 512);
    p.d = rc.d >= 0.0 ? rc.d : ((rc.stepper == "erk" || rc.stepper == "mri") ? 0.0 : 0.01);
    p.literal_diffusion = rc.literal;
    if (rc.tf > 0.0) p.tf = rc.tf;

    const int ml = rc.ml >= 0 ? rc.ml : BrusselatorProblem::kBandwidth;
    const int mu = rc.mu >= 0 ? rc.mu : BrusselatorProblem::kBandwidth;

    NewtonConfig newton;
    newton.max_iters = rc.max_newton_iters;
    newton.tol_coef = rc.newton_tol;
    newton.max_steps_between_setups = rc.msbp;
    newton.gamma_change_threshold = rc.dgmax;

    std::shared_ptr<OneStepMethod> stepper;
    std::unique_ptr<InnerStepper> inner;
    if (rc.stepper == "erk") {
      stepper = std::make_shared<ErkStepper>(resolve_table(rc.erk_table),
                                             p.terms_fn(true, p.d != 0.0, true), p.size());
    } else if (rc.stepper == "ark") {
      ArkConfig cfg;
      cfg.newton = newton;
      cfg.linearly_implicit = rc.linimp;
      cfg.solver = rc.solver == "fixedpoint" ? StageSolverKind::FixedPoint : StageSolverKind::Newton;
      cfg.jac_structure = rc.jac == "dense" ? JacStructure::Dense : JacStructure::Banded;
      cfg.jac_ml = ml;
      cfg.jac_mu = mu;
      cfg.predictor = predictor_from_name(rc.predictor);
      if (rc.split == "dirk") {
        cfg.implicit_table = &resolve_table(rc.ark_table + "_dirk");
        cfg.fi = p.terms_fn(true, true, true);
      } else {
        cfg.explicit_table = &resolve_table(rc.ark_table + "_erk");
        cfg.implicit_table = &resolve_table(rc.ark_table + "_dirk");
        const bool react_implicit = rc.split == "imex1";
        cfg.fe = p.terms_fn(true, false, !react_implicit);
        cfg.fi = p.terms_fn(false, true, react_implicit);
      }
      stepper = std::make_shared<ArkStepper>(std::move(cfg), p.size());
    } else {
      RhsFn fast_rhs = p.terms_fn(false, false, true);
      ArkInnerAdapter::Options io;
      io.tol = Tolerances::scalar(rc.inner_rtol, rc.inner_atol);
      io.jac_structure = JacStructure::Banded;
      io.jac_ml = 2;
      io.jac_mu = 2;
      if (rc.inner == "custom")
        inner = std::make_unique<CustomDirkInner>(fast_rhs, p.size(), rc.inner_rtol, rc.inner_atol, 2, 2);
      else if (rc.inner == "dirk")
        inner = wrap_ark_as_inner(builtin_table("ark324l2sa_dirk"), true, fast_rhs, p.size(), io);
      else
        inner = wrap_ark_as_inner(builtin_table("bogacki_shampine_3_2"), false, fast_rhs, p.size(), io);
      MriConfig cfg;
      cfg.coupling = &resolve_coupling(rc.coupling);
      cfg.fe = p.terms_fn(true, p.d != 0.0, false);
      cfg.inner = inner.get();
      cfg.newton = newton;
      stepper = std::make_shared<MriStepper>(std::move(cfg), p.size());
    }

    IntegratorOptions opt;
    opt.tol = Tolerances::scalar(rc.rtol, rc.atol);
    opt.controller = controller_from_name(rc.controller);
    opt.interpolant = rc.interpolant == "lagrange" ? InterpolantKind::Lagrange : InterpolantKind::Hermite;
    opt.interpolant_degree = rc.interpolant_degree;
    opt.adapt.safety = rc.safety;
    opt.adapt.bias = rc.bias;
    opt.adapt.max_growth = rc.max_growth;
    if (rc.hmin > 0.0) opt.adapt.h_min = rc.hmin;
    if (rc.hmax > 0.0) opt.adapt.h_max = rc.hmax;
    opt.adapt.use_solution_order = rc.order_basis == "q";
    if (!rc.gains.empty()) {
      opt.adapt.pi_k1 = opt.adapt.pid_k1 = opt.adapt.expgus_k1 = opt.adapt.impgus_k1 = rc.gains[0];
      if (rc.gains.size() > 1)
        opt.adapt.pi_k2 = opt.adapt.pid_k2 = opt.adapt.expgus_k2 = opt.adapt.impgus_k2 = rc.gains[1];
      if (rc.gains.size() > 2) opt.adapt.pid_k3 = rc.gains[2];
    }
    if (rc.stepper == "mri") {
      opt.fixed_step = true;
      opt.h0 = rc.big_h;
    } else if (rc.fixed_h > 0.0) {
      opt.fixed_step = true;
      opt.h0 = rc.fixed_h;
    }

    Integrator integ(stepper, p.t0, p.initial_state(), opt);
    const auto start = std::chrono::steady_clock::now();
    Vector y(p.size());
    EvolveResult res;
    if (rc.evolve_mode == "onestep") {
      do {
        res = integ.evolve(p.tf, EvolveMode::OneStep, y);
      } while (res.ok() && (p.tf - integ.t()) > 0.0 && res.t < p.tf);
    } else {
      res = integ.evolve(p.tf, rc.evolve_mode == "normal" ? EvolveMode::Normal : EvolveMode::NormalTstop, y);
    }
    const double wall =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    RunReport rep;
    rep.label = rc.stepper;
    rep.method = rc.stepper == "erk" ? rc.erk_table : (rc.stepper == "ark" ? rc.ark_table : rc.coupling);
    rep.controller = rc.controller;
    rep.predictor = rc.predictor;
    rep.rtol = rc.rtol;
    rep.atol = rc.atol;
    rep.stats = integ.stats();
    if (inner) rep.fast_stats = inner->fast_stats();
    rep.status = res.status;
    rep.wall_ms = wall;
    if (res.ok() && p.tf == 10.0) {
      const Vector ref = reference_cached(p, ref_dir);
      rep.max_rel_error = max_rel_error(y, ref);
    }
    print_report(rep);
    append_csv(rc.csv, {rep});
  });

  // ---- fig. 2 sweep ----
  auto* sweep = app.add_subcommand("sweep", "ERK work-precision grid (48 runs)");
  std::string sweep_csv = "sweep.csv";
  int sweep_npts = 512;
  sweep->add_option("--csv", sweep_csv);
  sweep->add_option("--npts", sweep_npts);
  sweep->callback([&] {
    BrusselatorProblem p;
    p.npts = sweep_npts;
    p.d = 0.0;
    const Vector ref = reference_cached(p, ref_dir);
    auto rows = work_precision_sweep(p, ref);
    append_csv(sweep_csv, rows);
  });

  // ---- table 1 ----
  auto* t1 = app.add_subcommand("table1", "DIRK/ImEx predictor comparison (12 runs)");
  std::string t1_csv = "table1.csv";
  int t1_npts = 512;
  t1->add_option("--csv", t1_csv);
  t1->add_option("--npts", t1_npts);
  t1->callback([&] {
    BrusselatorProblem p;
    p.npts = t1_npts;
    p.d = 0.01;
    const Vector ref = reference_cached(p, ref_dir);
    std::vector<RunReport> rows;
    for (ArkSplit split : {ArkSplit::DirkAll, ArkSplit::Imex1, ArkSplit::Imex2})
      for (PredictorKind pk : {PredictorKind::Trivial, PredictorKind::MaxOrder,
                               PredictorKind::VariableOrder, PredictorKind::Cutoff}) {
        rows.push_back(table1_run(p, split, pk, ref));
        print_report(rows.back());
      }
    append_csv(t1_csv, rows);
  });

  // ---- table 2 ----
  auto* t2 = app.add_subcommand("table2", "multirate inner-stepper comparison (3 runs)");
  std::string t2_csv = "table2.csv";
  int t2_npts = 128;
  double t2_h = 0.1;
  t2->add_option("--csv", t2_csv);
  t2->add_option("--npts", t2_npts);
  t2->add_option("--H", t2_h);
  t2->callback([&] {
    BrusselatorProblem p;
    p.npts = t2_npts;
    p.d = 0.0;
    const Vector ref = reference_cached(p, ref_dir);
    std::vector<RunReport> rows;
    for (FastInnerKind k : {FastInnerKind::Erk3, FastInnerKind::Dirk3, FastInnerKind::Custom}) {
      rows.push_back(table2_run(p, k, ref, t2_h));
      print_report(rows.back());
    }
    append_csv(t2_csv, rows);
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}
