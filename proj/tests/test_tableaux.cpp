#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "odekit/butcher.hpp"
#include "odekit/mri_coupling.hpp"
#include "odekit/table_io.hpp"

using namespace odekit;

namespace {

// Small exact-rational scalar for order-condition oracles on tables whose
// coefficients are machine-representable rationals.
struct Rat {
  long long num = 0, den = 1;
  Rat() = default;
  Rat(long long n, long long d = 1) : num(n), den(d) { normalize(); }
  void normalize() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const long long g = std::__gcd(std::abs(num), den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
  Rat operator+(const Rat& o) const { return Rat(num * o.den + o.num * den, den * o.den); }
  Rat operator-(const Rat& o) const { return Rat(num * o.den - o.num * den, den * o.den); }
  Rat operator*(const Rat& o) const { return Rat(num * o.num, den * o.den); }
  bool zero() const { return num == 0; }
};

}  // namespace

TEST_CASE("exact rational oracle: bogacki-shampine satisfies order 3") {
  // published coefficients as exact fractions
  const Rat A[4][4] = {{},
                       {Rat(1, 2)},
                       {Rat(0), Rat(3, 4)},
                       {Rat(2, 9), Rat(1, 3), Rat(4, 9)}};
  const Rat b[4] = {Rat(2, 9), Rat(1, 3), Rat(4, 9), Rat(0)};
  const Rat c[4] = {Rat(0), Rat(1, 2), Rat(3, 4), Rat(1)};

  Rat sb, sbc, sbc2, sbAc;
  Rat Ac[4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) Ac[i] = Ac[i] + A[i][j] * c[j];
  for (int i = 0; i < 4; ++i) {
    sb = sb + b[i];
    sbc = sbc + b[i] * c[i];
    sbc2 = sbc2 + b[i] * c[i] * c[i];
    sbAc = sbAc + b[i] * Ac[i];
  }
  CHECK((sb - Rat(1)).zero());
  CHECK((sbc - Rat(1, 2)).zero());
  CHECK((sbc2 - Rat(1, 3)).zero());
  CHECK((sbAc - Rat(1, 6)).zero());

  // the implementation agrees to roundoff
  CHECK(max_order_residual(builtin_table("bogacki_shampine_3_2"), 3) <= 1e-14);
}

TEST_CASE("order condition residual examples") {
  const ButcherTable& fe = builtin_table("forward_euler_1");
  auto r1 = order_condition_residuals(fe, 1);
  REQUIRE(r1.size() == 1);
  CHECK(r1[0].second == 0.0);

  auto r2 = order_condition_residuals(fe, 2);
  CHECK(std::abs(r2[1].second) == doctest::Approx(0.5));  // |sum b_i c_i - 1/2| = 1/2
}

TEST_CASE("catalog tables pass their declared order conditions") {
  for (const auto& name : builtin_table_names()) {
    const ButcherTable& t = builtin_table(name);
    INFO(name);
    CHECK(max_order_residual(t, std::min(t.q, 4)) <= 1e-13);
    if (t.has_embedding()) CHECK(max_order_residual(t, std::min(t.p, 4), true) <= 1e-13);
  }
}

TEST_CASE("structural validation") {
  ButcherTable t;
  t.name = "bad";
  t.kind = TableKind::Explicit;
  t.s = 2;
  t.q = 1;
  t.A = {{0.0, 0.5}, {1.0, 0.0}};  // nonzero above diagonal for explicit
  t.b = {0.5, 0.5};
  t.c = {0.0, 1.0};
  CHECK_THROWS_WITH_AS(static_cast<void>(t.validate()), doctest::Contains("nonzero A"),
                       std::invalid_argument);

  t.A = {{0.0, 0.0}, {1.0, 0.0}};
  CHECK_NOTHROW(static_cast<void>(t.validate()));

  // row-sum inconsistency warns but does not reject
  t.c = {0.0, 0.75};
  auto warnings = t.validate();
  CHECK(warnings.size() == 1);
}

TEST_CASE("stiffly accurate detection") {
  CHECK(builtin_table("ark436l2sa_dirk").stiffly_accurate());
  CHECK(builtin_table("ark324l2sa_dirk").stiffly_accurate());
  CHECK_FALSE(builtin_table("cash_karp_5_4").stiffly_accurate());
  CHECK_FALSE(builtin_table("ark436l2sa_erk").stiffly_accurate());
}

TEST_CASE("coefficient file round trip") {
  for (const auto& name : {"cash_karp_5_4", "ark548l2sa_dirk", "forward_euler_1"}) {
    const ButcherTable& t = builtin_table(name);
    std::stringstream ss;
    write_table(t, ss);
    auto loaded = parse_table(ss);
    REQUIRE(loaded.butcher.has_value());
    const ButcherTable& u = *loaded.butcher;
    CHECK(u.s == t.s);
    CHECK(u.q == t.q);
    CHECK(u.kind == t.kind);
    CHECK(u.has_embedding() == t.has_embedding());
    for (int i = 0; i < t.s; ++i) {
      CHECK(u.b[i] == t.b[i]);
      CHECK(u.c[i] == t.c[i]);
      for (int j = 0; j < t.s; ++j) CHECK(u.A[i][j] == t.A[i][j]);
    }
  }
}

TEST_CASE("coupling file round trip") {
  const MriCoupling& cp = builtin_coupling("mis_kw3");
  std::stringstream ss;
  write_table(cp, ss);
  auto loaded = parse_table(ss);
  REQUIRE(loaded.coupling.has_value());
  const MriCoupling& u = *loaded.coupling;
  CHECK(u.s == cp.s);
  CHECK(u.degree == cp.degree);
  CHECK(u.q == cp.q);
  for (int i = 0; i < cp.s; ++i) {
    CHECK(u.c[i] == cp.c[i]);
    for (int j = 0; j < cp.s; ++j) CHECK(u.omega[0][i][j] == cp.omega[0][i][j]);
  }
}

TEST_CASE("malformed files rejected with the violated invariant") {
  {
    std::stringstream ss("butcher t\nkind explicit\nstages 1\norder 1\nc 0\nA 0 1\nb 1\n");
    CHECK_THROWS(parse_table(ss));  // A row length mismatch
  }
  {
    // explicit kind with nonzero upper entry
    std::stringstream ss(
        "butcher t\nkind explicit\nstages 2\norder 2\nc 0 1\nA 0 0.5\nA 1 0\nb 0.5 0.5\n");
    CHECK_THROWS_WITH_AS(parse_table(ss), doctest::Contains("nonzero A"), std::invalid_argument);
  }
  {
    std::stringstream ss("salad t\n");
    CHECK_THROWS(parse_table(ss));
  }
}

TEST_CASE("forward euler file loads without embedding") {
  std::stringstream ss("butcher fe\nkind explicit\nstages 1\norder 1\nc 0\nA 0\nb 1\n");
  auto loaded = parse_table(ss);
  REQUIRE(loaded.butcher.has_value());
  CHECK_FALSE(loaded.butcher->has_embedding());  // adaptivity unavailable
}

TEST_CASE("heun-euler file loads with declared orders confirmed") {
  std::stringstream ss;
  write_table(builtin_table("heun_euler_2_1"), ss);
  auto loaded = parse_table(ss);
  REQUIRE(loaded.butcher.has_value());
  CHECK(max_order_residual(*loaded.butcher, 2) <= 1e-14);
  CHECK(max_order_residual(*loaded.butcher, 1, true) <= 1e-14);
}

TEST_CASE("mis conversion of forward euler") {
  MriCoupling cp = mis_to_mri(builtin_table("forward_euler_1"));
  CHECK(cp.s == 2);
  CHECK(cp.c[0] == 0.0);
  CHECK(cp.c[1] == 1.0);
  CHECK(cp.omega[0][0][0] == 0.0);
  CHECK(cp.omega[0][1][0] == 1.0);
  CHECK(cp.omega[0][1][1] == 0.0);
  CHECK(cp.stage_kind(1) == MriStageKind::FastIvp);
}

TEST_CASE("mis conversion rejects unsorted abscissae") {
  ButcherTable t;
  t.name = "unsorted";
  t.kind = TableKind::Explicit;
  t.s = 2;
  t.q = 1;
  t.A = {{0.0, 0.0}, {0.5, 0.0}};
  t.b = {0.5, 0.5};
  t.c = {0.5, 0.0};
  CHECK_THROWS_WITH_AS(mis_to_mri(t), doctest::Contains("sorted"), std::invalid_argument);
}

TEST_CASE("mis column sums telescope to b") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dist(-0.4, 0.8);
  for (int rep = 0; rep < 20; ++rep) {
    const int s = 2 + static_cast<int>(rng() % 4);
    ButcherTable t;
    t.name = "rand";
    t.kind = TableKind::Explicit;
    t.s = s;
    t.q = 1;
    t.A.assign(s, Vector(s, 0.0));
    t.b.resize(s);
    t.c.assign(s, 0.0);
    for (int i = 1; i < s; ++i) {
      for (int j = 0; j < i; ++j) t.A[i][j] = dist(rng);
      t.c[i] = std::min(t.c[i - 1] + std::abs(dist(rng)), 1.0);
    }
    double bs = 0.0;
    for (int i = 0; i < s; ++i) {
      t.b[i] = std::abs(dist(rng));
      bs += t.b[i];
    }
    for (auto& x : t.b) x /= bs;

    MriCoupling cp = mis_to_mri(t);
    for (int j = 0; j < s; ++j) {
      double col = 0.0;
      for (int i = 0; i < cp.s; ++i) col += cp.omega[0][i][j];
      CHECK(col == doctest::Approx(t.b[j]).epsilon(1e-12));
    }
  }
}

TEST_CASE("third-order condition residuals") {
  // the shipped third-order slow table satisfies the condition
  CHECK(std::abs(mis_third_order_residual(builtin_table("knoth_wolke_3"))) <= 1e-14);
  // explicit trapezoid misses it by exactly -1/3
  CHECK(mis_third_order_residual(builtin_table("heun_euler_2_1")) ==
        doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
  // forward Euler: (1 - 0)(1/2 + 0) - 1/3 = 1/6
  CHECK(mis_third_order_residual(builtin_table("forward_euler_1")) ==
        doctest::Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("mri stage kinds") {
  SUBCASE("mis-derived couplings have fast stages only") {
    const MriCoupling& cp = builtin_coupling("mis_kw3");
    for (int i = 1; i < cp.s; ++i) CHECK(cp.stage_kind(i) == MriStageKind::FastIvp);
  }
  SUBCASE("dc = 0 stages classify by the implicit diagonal") {
    MriCoupling cp;
    cp.name = "test";
    cp.s = 3;
    cp.q = 1;
    cp.degree = 0;
    cp.c = {0.0, 1.0, 1.0};
    MriCoupling::Mat zero(3, Vector(3, 0.0));
    cp.omega.assign(1, zero);
    cp.gamma.assign(1, zero);
    cp.omega[0][1][0] = 1.0;
    CHECK_NOTHROW(cp.validate());
    CHECK(cp.stage_kind(1) == MriStageKind::FastIvp);
    CHECK(cp.stage_kind(2) == MriStageKind::ExplicitArk);

    cp.gamma[0][2][2] = 0.25;
    CHECK_NOTHROW(cp.validate());
    CHECK(cp.stage_kind(2) == MriStageKind::ImplicitArk);
    CHECK(cp.ark_implicit_coeff(2, 2) == doctest::Approx(0.25));
  }
  SUBCASE("solve-decoupled violations rejected") {
    MriCoupling cp;
    cp.name = "bad";
    cp.s = 2;
    cp.q = 1;
    cp.degree = 0;
    cp.c = {0.0, 1.0};
    MriCoupling::Mat zero(2, Vector(2, 0.0));
    cp.omega.assign(1, zero);
    cp.gamma.assign(1, zero);
    cp.gamma[0][1][1] = 0.5;  // dc_2 = 1 with nonzero diagonal gamma
    CHECK_THROWS_WITH_AS(cp.validate(), doctest::Contains("solve-decoupled"), std::invalid_argument);
  }
}

TEST_CASE("ark implicit coefficient mixes polynomial powers") {
  MriCoupling cp;
  cp.name = "k1";
  cp.s = 3;
  cp.q = 2;
  cp.degree = 1;
  cp.c = {0.0, 1.0, 1.0};
  MriCoupling::Mat zero(3, Vector(3, 0.0));
  cp.omega.assign(2, zero);
  cp.gamma.assign(2, zero);
  cp.omega[0][1][0] = 1.0;
  cp.omega[0][2][0] = 0.3;
  cp.omega[1][2][0] = 0.6;
  CHECK_NOTHROW(cp.validate());
  // sum_k omega^k / (k+1) = 0.3 + 0.6/2
  CHECK(cp.ark_explicit_coeff(2, 0) == doctest::Approx(0.6));
}
