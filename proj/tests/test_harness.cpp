#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "odekit/harness.hpp"

using namespace odekit;

namespace {

BrusselatorProblem small_problem(int npts = 32, double d = 0.01) {
  BrusselatorProblem p;
  p.npts = npts;
  p.d = d;
  return p;
}

}  // namespace

TEST_CASE("constant state zeroes advection and diffusion") {
  BrusselatorProblem p = small_problem();
  Vector y(p.size(), 1.7), dydt(p.size(), 0.0);
  p.advection(y, dydt);
  p.diffusion(y, dydt);
  for (double v : dydt) CHECK(v == 0.0);
}

TEST_CASE("diffusion term is second-order accurate in space") {
  // d * u_xx of sin(2 pi x) vs the analytic value, refined grids
  const double pi = std::acos(-1.0);
  auto err_at = [&](int npts) {
    BrusselatorProblem p = small_problem(npts);
    Vector y(p.size(), 0.0), dydt(p.size(), 0.0);
    for (int i = 0; i < npts; ++i) {
      const double x = i * p.dx();
      y[3 * i] = std::sin(2 * pi * x);
    }
    p.diffusion(y, dydt);
    double m = 0.0;
    for (int i = 1; i < npts - 1; ++i) {
      const double x = i * p.dx();
      const double want = -p.d * 4 * pi * pi * std::sin(2 * pi * x);
      m = std::max(m, std::abs(dydt[3 * i] - want));
    }
    return m;
  };
  const double slope = std::log2(err_at(33) / err_at(129)) / 2.0;
  CHECK(slope >= 1.8);
  CHECK(slope <= 2.2);
}

TEST_CASE("advection term is second-order accurate in space") {
  const double pi = std::acos(-1.0);
  auto err_at = [&](int npts) {
    BrusselatorProblem p = small_problem(npts, 0.0);
    Vector y(p.size(), 0.0), dydt(p.size(), 0.0);
    for (int i = 0; i < npts; ++i) {
      const double x = i * p.dx();
      y[3 * i + 1] = std::cos(2 * pi * x);
    }
    p.advection(y, dydt);
    double m = 0.0;
    for (int i = 1; i < npts - 1; ++i) {
      const double x = i * p.dx();
      const double want = p.c * 2 * pi * std::sin(2 * pi * x);
      m = std::max(m, std::abs(dydt[3 * i + 1] - want));
    }
    return m;
  };
  const double slope = std::log2(err_at(33) / err_at(129)) / 2.0;
  CHECK(slope >= 1.8);
  CHECK(slope <= 2.2);
}

TEST_CASE("reaction balance at the steady point") {
  // u-equation: a - (b+1)a + (b/a) a^2 = 0 at (u, v, w) = (a, b/a, b)
  BrusselatorProblem p = small_problem();
  Vector y(p.size());
  for (int i = 0; i < p.npts; ++i) {
    y[3 * i + 0] = p.a;
    y[3 * i + 1] = p.b / p.a;
    y[3 * i + 2] = p.b;
  }
  Vector dydt(p.size(), 0.0);
  p.reaction(y, dydt);
  for (int i = 1; i < p.npts - 1; ++i) {
    CHECK(std::abs(dydt[3 * i + 0]) <= 1e-14);  // u-equation balances exactly
    // v and w equations at this point evaluate to w*u - v*u^2 = ab - ab = 0
    // and -w*u = -ab respectively
    CHECK(std::abs(dydt[3 * i + 1]) <= 1e-14);
    CHECK(dydt[3 * i + 2] == doctest::Approx(-p.b * p.a));
  }
}

TEST_CASE("boundary rows stay at zero time derivative") {
  BrusselatorProblem p = small_problem();
  Vector y = p.initial_state();
  Vector dydt(p.size(), 1.0);
  auto f = p.terms_fn(true, true, true);
  f(0.0, y, dydt);
  for (int s = 0; s < 3; ++s) {
    CHECK(dydt[s] == 0.0);
    CHECK(dydt[3 * (p.npts - 1) + s] == 0.0);
  }
}

TEST_CASE("literal diffusion flag applies u_xx everywhere") {
  BrusselatorProblem p = small_problem();
  p.literal_diffusion = true;
  Vector y(p.size(), 0.0), dydt(p.size(), 0.0);
  const double pi = std::acos(-1.0);
  for (int i = 0; i < p.npts; ++i) y[3 * i] = std::sin(pi * i * p.dx());
  p.diffusion(y, dydt);
  for (int i = 1; i < p.npts - 1; ++i) {
    CHECK(dydt[3 * i + 1] == dydt[3 * i + 0]);  // v-equation sees u_xx
    CHECK(dydt[3 * i + 2] == dydt[3 * i + 0]);
  }
}

TEST_CASE("initial state matches the stated profiles") {
  BrusselatorProblem p = small_problem();
  Vector y = p.initial_state();
  const double pi = std::acos(-1.0);
  const int i = p.npts / 2;
  const double x = i * p.dx();
  CHECK(y[3 * i + 0] == doctest::Approx(p.a + 0.1 * std::sin(pi * x)));
  CHECK(y[3 * i + 1] == doctest::Approx(p.b / p.a + 0.1 * std::sin(pi * x)));
  CHECK(y[3 * i + 2] == doctest::Approx(p.b + 0.1 * std::sin(pi * x)));
}

TEST_CASE("csv header is stable") {
  CHECK(csv_header() ==
        "method,controller,rtol,atol,rhs_evals,error,steps,rejections,wall_ms,"
        "label,predictor,fe_evals,fi_evals,ff_evals,solve_fails,nls_iters,nls_fails,"
        "ls_setups,jac_evals,steps_fast,attempts_fast,err_fails_fast,nls_iters_fast,"
        "nls_fails_fast,ls_setups_fast,jac_evals_fast,status");
}

TEST_CASE("reference generation is deterministic and self-consistent") {
  BrusselatorProblem p = small_problem(24, 0.01);
  const Vector ref1 = make_reference(p);
  const Vector ref2 = make_reference(p);
  REQUIRE(ref1.size() == ref2.size());
  for (std::size_t i = 0; i < ref1.size(); ++i) CHECK(ref1[i] == ref2[i]);

  double m = 0.0;
  for (double v : ref1) m = std::max(m, std::abs(v));
  CHECK(m > 0.0);
  CHECK(std::isfinite(m));

  // file round trip reproduces the bytes
  const std::string path = "/tmp/odekit_test_ref.txt";
  save_reference(path, p, ref1);
  const Vector back = load_reference(path, p);
  REQUIRE(back.size() == ref1.size());
  for (std::size_t i = 0; i < ref1.size(); ++i) CHECK(back[i] == ref1[i]);
  std::ostringstream a, b;
  save_reference("/tmp/odekit_test_ref2.txt", p, ref2);
  std::ifstream f1(path), f2("/tmp/odekit_test_ref2.txt");
  std::string s1((std::istreambuf_iterator<char>(f1)), {});
  std::string s2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(s1 == s2);
  std::remove(path.c_str());
  std::remove("/tmp/odekit_test_ref2.txt");
}

TEST_CASE("reference tolerance refinement oracle") {
  // the reference configuration against a 2x tighter run, small grid
  BrusselatorProblem p = small_problem(24, 0.01);
  const Vector ref = make_reference(p);

  ArkConfig cfg;
  cfg.implicit_table = &builtin_table("ark548l2sa_dirk");
  cfg.fi = p.terms_fn(true, true, true);
  cfg.jac_structure = JacStructure::Banded;
  cfg.jac_ml = BrusselatorProblem::kBandwidth;
  cfg.jac_mu = BrusselatorProblem::kBandwidth;
  auto stepper = std::make_shared<ArkStepper>(std::move(cfg), p.size());
  IntegratorOptions opt;
  opt.tol = Tolerances::scalar(5e-9, 5e-15);
  Integrator integ(stepper, p.t0, p.initial_state(), opt);
  Vector tighter(p.size());
  REQUIRE(integ.evolve(p.tf, EvolveMode::NormalTstop, tighter).ok());
  CHECK(max_rel_error(ref, tighter) <= 1e-6);
}

TEST_CASE("erk run produces a sane report") {
  BrusselatorProblem p = small_problem(32, 0.0);
  const Vector ref = make_reference(p);
  RunReport rep = erk_run(p, "bogacki_shampine_3_2", ControllerKind::Pid, 1e-5, 1e-10, ref);
  CHECK(rep.ok());
  CHECK(rep.stats.steps > 0);
  CHECK(rep.max_rel_error >= 0.0);
  CHECK(rep.max_rel_error <= 1e-3);
  CHECK(rep.stats.fe_evals > 4 * rep.stats.steps);  // 4 stages + dense output
}

TEST_CASE("csv row contains the report fields") {
  RunReport rep;
  rep.label = "erk";
  rep.method = "heun_euler_2_1";
  rep.controller = "pi";
  rep.predictor = "-";
  rep.rtol = 1e-4;
  rep.atol = 1e-9;
  rep.stats.steps = 12;
  rep.stats.fe_evals = 34;
  rep.max_rel_error = 5e-5;
  const std::string row = csv_row(rep);
  CHECK(row.find("heun_euler_2_1,pi,") != std::string::npos);
  CHECK(row.find(",34,") != std::string::npos);
}

TEST_CASE("name mappings round trip") {
  for (const char* n : {"pid", "pi", "i", "expgus", "impgus", "imexgus"})
    CHECK(controller_name(controller_from_name(n)) == n);
  for (const char* n : {"trivial", "maxorder", "variable", "cutoff"})
    CHECK(predictor_name(predictor_from_name(n)) == n);
  CHECK_THROWS_AS(controller_from_name("nope"), std::invalid_argument);
}
