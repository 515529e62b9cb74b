#include "odekit/butcher.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace odekit {

bool ButcherTable::stiffly_accurate() const {
  for (int j = 0; j < s; ++j)
    if (b[j] != A[s - 1][j]) return false;
  return true;
}

std::vector<std::string> ButcherTable::validate() const {
  if (s < 1) throw std::invalid_argument(name + ": stage count must be >= 1");
  if (static_cast<int>(A.size()) != s || static_cast<int>(b.size()) != s || static_cast<int>(c.size()) != s)
    throw std::invalid_argument(name + ": A/b/c shape inconsistent with stage count");
  for (const auto& row : A)
    if (static_cast<int>(row.size()) != s) throw std::invalid_argument(name + ": A row length mismatch");
  if (!btilde.empty() && static_cast<int>(btilde.size()) != s)
    throw std::invalid_argument(name + ": embedding length mismatch");
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) {
      const bool zero_required = (kind == TableKind::Explicit) ? (j >= i) : (j > i);
      if (zero_required && A[i][j] != 0.0) {
        std::ostringstream os;
        os << name << ": " << (kind == TableKind::Explicit ? "explicit" : "dirk")
           << " table has nonzero A[" << i + 1 << "][" << j + 1 << "]";
        throw std::invalid_argument(os.str());
      }
    }
  std::vector<std::string> warnings;
  for (int i = 0; i < s; ++i) {
    double row = 0.0;
    for (int j = 0; j < s; ++j) row += A[i][j];
    if (std::abs(c[i] - row) > 1e-12) {
      std::ostringstream os;
      os << name << ": row " << i + 1 << " sum " << row << " differs from c = " << c[i];
      warnings.push_back(os.str());
    }
  }
  return warnings;
}

std::vector<std::pair<std::string, double>> order_condition_residuals(const ButcherTable& t, int up_to) {
  if (up_to > 4) throw std::invalid_argument("order_condition_residuals: analytic conditions capped at order 4");
  std::vector<std::pair<std::string, double>> out;
  const int s = t.s;

  Vector Ac(s, 0.0), Ac2(s, 0.0), AAc(s, 0.0);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) {
      Ac[i] += t.A[i][j] * t.c[j];
      Ac2[i] += t.A[i][j] * t.c[j] * t.c[j];
    }
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) AAc[i] += t.A[i][j] * Ac[j];

  auto emit = [&](const char* prefix, const Vector& w) {
    auto dot = [&](const Vector& v) {
      double acc = 0.0;
      for (int i = 0; i < s; ++i) acc += w[i] * v[i];
      return acc;
    };
    double sb = 0.0, sbc = 0.0, sbc2 = 0.0, sbc3 = 0.0;
    for (int i = 0; i < s; ++i) {
      sb += w[i];
      sbc += w[i] * t.c[i];
      sbc2 += w[i] * t.c[i] * t.c[i];
      sbc3 += w[i] * t.c[i] * t.c[i] * t.c[i];
    }
    double sbcAc = 0.0;
    for (int i = 0; i < s; ++i) sbcAc += w[i] * t.c[i] * Ac[i];
    out.emplace_back(std::string(prefix) + ":q1", sb - 1.0);
    if (up_to >= 2) out.emplace_back(std::string(prefix) + ":q2", sbc - 0.5);
    if (up_to >= 3) {
      out.emplace_back(std::string(prefix) + ":q3a", sbc2 - 1.0 / 3.0);
      out.emplace_back(std::string(prefix) + ":q3b", dot(Ac) - 1.0 / 6.0);
    }
    if (up_to >= 4) {
      out.emplace_back(std::string(prefix) + ":q4a", sbc3 - 0.25);
      out.emplace_back(std::string(prefix) + ":q4b", sbcAc - 0.125);
      out.emplace_back(std::string(prefix) + ":q4c", dot(Ac2) - 1.0 / 12.0);
      out.emplace_back(std::string(prefix) + ":q4d", dot(AAc) - 1.0 / 24.0);
    }
  };

  emit("b", t.b);
  if (t.has_embedding()) emit("bt", t.btilde);
  return out;
}

double max_order_residual(const ButcherTable& t, int up_to, bool embedding) {
  double m = 0.0;
  for (const auto& [id, r] : order_condition_residuals(t, up_to)) {
    const bool is_emb = id[0] == 'b' && id[1] == 't';
    if (is_emb == embedding) m = std::max(m, std::abs(r));
  }
  return m;
}

namespace {

ButcherTable make(const std::string& name, TableKind kind, int q, int p,
                  std::vector<Vector> A, Vector b, Vector btilde, Vector c) {
  ButcherTable t;
  t.name = name;
  t.kind = kind;
  t.s = static_cast<int>(b.size());
  t.q = q;
  t.p = p;
  t.A = std::move(A);
  t.b = std::move(b);
  t.btilde = std::move(btilde);
  t.c = std::move(c);
  // pad rows so A is s x s
  for (auto& row : t.A) row.resize(t.s, 0.0);
  t.validate();
  return t;
}

std::map<std::string, ButcherTable> build_catalog() {
  std::map<std::string, ButcherTable> cat;
  auto add = [&](ButcherTable t) { cat.emplace(t.name, std::move(t)); };

  add(make("forward_euler_1", TableKind::Explicit, 1, 0, {{0.0}}, {1.0}, {}, {0.0}));

  add(make("heun_euler_2_1", TableKind::Explicit, 2, 1,
           {{0.0}, {1.0}},
           {0.5, 0.5},
           {1.0, 0.0},
           {0.0, 1.0}));

  add(make("bogacki_shampine_3_2", TableKind::Explicit, 3, 2,
           {{0.0},
            {1.0 / 2},
            {0.0, 3.0 / 4},
            {2.0 / 9, 1.0 / 3, 4.0 / 9}},
           {2.0 / 9, 1.0 / 3, 4.0 / 9, 0.0},
           {7.0 / 24, 1.0 / 4, 1.0 / 3, 1.0 / 8},
           {0.0, 1.0 / 2, 3.0 / 4, 1.0}));

  add(make("zonneveld_4_3", TableKind::Explicit, 4, 3,
           {{0.0},
            {1.0 / 2},
            {0.0, 1.0 / 2},
            {0.0, 0.0, 1.0},
            {5.0 / 32, 7.0 / 32, 13.0 / 32, -1.0 / 32}},
           {1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6, 0.0},
           {-1.0 / 2, 7.0 / 3, 7.0 / 3, 13.0 / 6, -16.0 / 3},
           {0.0, 1.0 / 2, 1.0 / 2, 1.0, 3.0 / 4}));

  add(make("cash_karp_5_4", TableKind::Explicit, 5, 4,
           {{0.0},
            {1.0 / 5},
            {3.0 / 40, 9.0 / 40},
            {3.0 / 10, -9.0 / 10, 6.0 / 5},
            {-11.0 / 54, 5.0 / 2, -70.0 / 27, 35.0 / 27},
            {1631.0 / 55296, 175.0 / 512, 575.0 / 13824, 44275.0 / 110592, 253.0 / 4096}},
           {37.0 / 378, 0.0, 250.0 / 621, 125.0 / 594, 0.0, 512.0 / 1771},
           {2825.0 / 27648, 0.0, 18575.0 / 48384, 13525.0 / 55296, 277.0 / 14336, 1.0 / 4},
           {0.0, 1.0 / 5, 3.0 / 10, 3.0 / 5, 1.0, 7.0 / 8}));

  // Knoth & Wolke third-order table; satisfies the extra condition that
  // makes its MIS conversion third order.
  add(make("knoth_wolke_3", TableKind::Explicit, 3, 0,
           {{0.0},
            {1.0 / 3},
            {-3.0 / 16, 15.0 / 16}},
           {1.0 / 6, 3.0 / 10, 8.0 / 15},
           {},
           {0.0, 1.0 / 3, 3.0 / 4}));

  // ARK3(2)4L[2]SA additive pair, shared b, btilde, c.
  {
    const Vector b = {1471266399579.0 / 7840856788654.0, -4482444167858.0 / 7529755066697.0,
                      11266239266428.0 / 11593286722821.0, 1767732205903.0 / 4055673282236.0};
    const Vector bt = {2756255671327.0 / 12835298489170.0, -10771552573575.0 / 22201958757719.0,
                       9247589265047.0 / 10645013368117.0, 2193209047091.0 / 5459859503100.0};
    const Vector c = {0.0, 1767732205903.0 / 2027836641118.0, 3.0 / 5, 1.0};
    const double g = 1767732205903.0 / 4055673282236.0;
    add(make("ark324l2sa_erk", TableKind::Explicit, 3, 2,
             {{0.0},
              {1767732205903.0 / 2027836641118.0},
              {5535828885825.0 / 10492691773637.0, 788022342437.0 / 10882634858940.0},
              {6485989280629.0 / 16251701735622.0, -4246266847089.0 / 9704473918619.0,
               10755448449292.0 / 10357097424841.0}},
             b, bt, c));
    add(make("ark324l2sa_dirk", TableKind::Dirk, 3, 2,
             {{0.0},
              {g, g},
              {2746238789719.0 / 10658868560708.0, -640167445237.0 / 6845629431997.0, g},
              b},
             b, bt, c));
  }

  // ARK4(3)6L[2]SA additive pair.
  {
    const Vector b = {82889.0 / 524892.0, 0.0, 15625.0 / 83664.0, 69875.0 / 102672.0,
                      -2260.0 / 8211.0, 1.0 / 4};
    const Vector bt = {4586570599.0 / 29645900160.0, 0.0, 178811875.0 / 945068544.0,
                       814220225.0 / 1159782912.0, -3700637.0 / 11593932.0, 61727.0 / 225920.0};
    const Vector c = {0.0, 1.0 / 2, 83.0 / 250, 31.0 / 50, 17.0 / 20, 1.0};
    add(make("ark436l2sa_erk", TableKind::Explicit, 4, 3,
             {{0.0},
              {1.0 / 2},
              {13861.0 / 62500.0, 6889.0 / 62500.0},
              {-116923316275.0 / 2393684061468.0, -0.17772065232640100,
               9408046702089.0 / 11113171139209.0},
              {-451086348788.0 / 2902428689909.0, -2682348792572.0 / 7519795681897.0,
               12662868775082.0 / 11960479115383.0, 3355817975965.0 / 11060851509271.0},
              {647845179188.0 / 3216320057751.0, 73281519250.0 / 8382639484533.0,
               552539513391.0 / 3454668386233.0, 3354512671639.0 / 8306763924573.0,
               4040.0 / 17871.0}},
             b, bt, c));
    add(make("ark436l2sa_dirk", TableKind::Dirk, 4, 3,
             {{0.0},
              {1.0 / 4, 1.0 / 4},
              {8611.0 / 62500.0, -1743.0 / 31250.0, 1.0 / 4},
              {5012029.0 / 34652500.0, -654441.0 / 2922500.0, 174375.0 / 388108.0, 1.0 / 4},
              {15267082809.0 / 155376265600.0, -71443401.0 / 120774400.0,
               730878875.0 / 902184768.0, 2285395.0 / 8070912.0, 1.0 / 4},
              b},
             b, bt, c));
  }

  // ARK5(4)8L[2]SA ESDIRK; the reference-solution method for the benchmarks.
  {
    const double g = 41.0 / 200.0;
    const Vector b = {-872700587467.0 / 9133579230613.0, 0.0, 0.0, 22348218063261.0 / 9555858737531.0,
                      -1143369518992.0 / 8141816002931.0, -39379526789629.0 / 19018526304540.0,
                      32727382324388.0 / 42900044865799.0, g};
    const Vector bt = {-975461918565.0 / 9796059967033.0, 0.0, 0.0, 78070527104295.0 / 32432590147079.0,
                       -548382580838.0 / 3424219808633.0, -33438840321285.0 / 15594753105479.0,
                       3629800801594.0 / 4656183773603.0, 4035322873751.0 / 18575991585200.0};
    const Vector c = {0.0, 41.0 / 100.0, 2935347310677.0 / 11292855782101.0,
                      1426016391358.0 / 7196633302097.0, 92.0 / 100.0, 24.0 / 100.0, 3.0 / 5, 1.0};
    add(make("ark548l2sa_dirk", TableKind::Dirk, 5, 4,
             {{0.0},
              {g, g},
              {41.0 / 400.0, -567603406766.0 / 11931857230679.0, g},
              {683785636431.0 / 9252920307686.0, 0.0, -110385047103.0 / 1367015193373.0, g},
              {3016520224154.0 / 10081342136671.0, 0.0, 30586259806659.0 / 12414158314087.0,
               -22760509404356.0 / 11113319521817.0, g},
              {218866479029.0 / 1489978393911.0, 0.0, 638256894668.0 / 5436446318841.0,
               -1179710474555.0 / 5321154724896.0, -60928119172.0 / 8023461067671.0, g},
              {1020004230633.0 / 5715676835656.0, 0.0, 25762820946817.0 / 25263940353407.0,
               -2161375909145.0 / 9755907335909.0, -211217309593.0 / 5846859502534.0,
               -4269925059573.0 / 7827059040749.0, g},
              b},
             b, bt, c));
  }

  return cat;
}

const std::map<std::string, ButcherTable>& catalog() {
  static const std::map<std::string, ButcherTable> cat = build_catalog();
  return cat;
}

}  // namespace

const ButcherTable& builtin_table(const std::string& name) {
  const auto& cat = catalog();
  auto it = cat.find(name);
  if (it == cat.end()) throw std::invalid_argument("unknown builtin table: " + name);
  return it->second;
}

std::vector<std::string> builtin_table_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : catalog()) names.push_back(k);
  return names;
}

}  // namespace odekit
