#include "odekit/mri_coupling.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace odekit {

MriStageKind MriCoupling::stage_kind(int i) const {
  if (i < 1 || i >= s) throw std::invalid_argument("stage_kind: index out of range");
  if (delta_c(i) > 0.0) return MriStageKind::FastIvp;
  return ark_implicit_coeff(i, i) != 0.0 ? MriStageKind::ImplicitArk : MriStageKind::ExplicitArk;
}

double MriCoupling::ark_explicit_coeff(int i, int j) const {
  double acc = 0.0;
  for (int k = 0; k <= degree; ++k) acc += omega[k][i][j] / (k + 1);
  return acc;
}

double MriCoupling::ark_implicit_coeff(int i, int j) const {
  double acc = 0.0;
  for (int k = 0; k <= degree; ++k) acc += gamma[k][i][j] / (k + 1);
  return acc;
}

bool MriCoupling::has_implicit() const {
  for (int k = 0; k <= degree; ++k)
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j)
        if (gamma[k][i][j] != 0.0) return true;
  return false;
}

void MriCoupling::validate() const {
  if (s < 2) throw std::invalid_argument(name + ": coupling needs at least 2 stages");
  if (degree < 0 || degree > 2) throw std::invalid_argument(name + ": polynomial degree K must be in [0, 2]");
  if (static_cast<int>(c.size()) != s) throw std::invalid_argument(name + ": abscissae length mismatch");
  if (static_cast<int>(omega.size()) != degree + 1 || static_cast<int>(gamma.size()) != degree + 1)
    throw std::invalid_argument(name + ": need K+1 omega and gamma tables");
  for (int k = 0; k <= degree; ++k) {
    if (static_cast<int>(omega[k].size()) != s || static_cast<int>(gamma[k].size()) != s)
      throw std::invalid_argument(name + ": coupling table row count mismatch");
    for (int i = 0; i < s; ++i)
      if (static_cast<int>(omega[k][i].size()) != s || static_cast<int>(gamma[k][i].size()) != s)
        throw std::invalid_argument(name + ": coupling table column count mismatch");
  }
  if (c[0] != 0.0) throw std::invalid_argument(name + ": c_1 must equal 0");
  if (c[s - 1] != 1.0) throw std::invalid_argument(name + ": c_s must equal 1");
  for (int i = 1; i < s; ++i)
    if (c[i] < c[i - 1]) throw std::invalid_argument(name + ": abscissae must be nondecreasing");
  for (int k = 0; k <= degree; ++k)
    for (int i = 0; i < s; ++i) {
      for (int j = i; j < s; ++j)
        if (omega[k][i][j] != 0.0)
          throw std::invalid_argument(name + ": omega has nonzero entry on/above diagonal (solve-decoupled)");
      for (int j = i + 1; j < s; ++j)
        if (gamma[k][i][j] != 0.0)
          throw std::invalid_argument(name + ": gamma has nonzero entry above diagonal (solve-decoupled)");
      if (i >= 1 && gamma[k][i][i] != 0.0 && delta_c(i) != 0.0)
        throw std::invalid_argument(name + ": implicit stage requires dc_i = 0 (solve-decoupled)");
      if (i == 0 && gamma[k][0][0] != 0.0)
        throw std::invalid_argument(name + ": first stage must be trivial");
    }
}

MriCoupling mis_to_mri(const ButcherTable& slow) {
  if (slow.kind != TableKind::Explicit)
    throw std::invalid_argument("mis_to_mri: slow table must be explicit");
  for (int i = 1; i < slow.s; ++i)
    if (slow.c[i] < slow.c[i - 1])
      throw std::invalid_argument("mis_to_mri: slow abscissae must be sorted");

  const int shat = slow.s;
  MriCoupling cp;
  cp.name = "mis(" + slow.name + ")";
  cp.s = shat + 1;
  cp.q = slow.q >= 3 && std::abs(mis_third_order_residual(slow)) <= 1e-12 ? 3 : std::min(slow.q, 2);
  cp.degree = 0;
  cp.c.assign(cp.s, 0.0);
  for (int i = 0; i < shat; ++i) cp.c[i] = slow.c[i];
  cp.c[cp.s - 1] = 1.0;

  MriCoupling::Mat zero(cp.s, Vector(cp.s, 0.0));
  cp.omega.assign(1, zero);
  cp.gamma.assign(1, zero);
  for (int i = 1; i < cp.s; ++i)
    for (int j = 0; j < shat; ++j) {
      if (i < cp.s - 1)
        cp.omega[0][i][j] = slow.A[i][j] - slow.A[i - 1][j];
      else
        cp.omega[0][i][j] = slow.b[j] - slow.A[shat - 1][j];
    }
  cp.validate();
  return cp;
}

double mis_third_order_residual(const ButcherTable& slow) {
  const int shat = slow.s;
  Vector Ac(shat, 0.0);
  for (int i = 0; i < shat; ++i)
    for (int j = 0; j < shat; ++j) Ac[i] += slow.A[i][j] * slow.c[j];
  double acc = 0.0;
  for (int i = 1; i < shat; ++i) acc += (slow.c[i] - slow.c[i - 1]) * (Ac[i] + Ac[i - 1]);
  acc += (1.0 - slow.c[shat - 1]) * (0.5 + Ac[shat - 1]);
  return acc - 1.0 / 3.0;
}

namespace {

std::map<std::string, MriCoupling> build_couplings() {
  std::map<std::string, MriCoupling> cat;

  MriCoupling kw3 = mis_to_mri(builtin_table("knoth_wolke_3"));
  kw3.name = "mis_kw3";
  cat.emplace(kw3.name, std::move(kw3));

  // Second-order K = 0 coupling (MIS form of the explicit midpoint rule),
  // stored directly as coupling tables.
  {
    MriCoupling cp;
    cp.name = "mri_erk22";
    cp.s = 3;
    cp.q = 2;
    cp.degree = 0;
    cp.c = {0.0, 0.5, 1.0};
    MriCoupling::Mat zero(3, Vector(3, 0.0));
    cp.omega.assign(1, zero);
    cp.gamma.assign(1, zero);
    cp.omega[0][1] = {0.5, 0.0, 0.0};
    cp.omega[0][2] = {-0.5, 1.0, 0.0};
    cp.validate();
    cat.emplace(cp.name, std::move(cp));
  }

  return cat;
}

const std::map<std::string, MriCoupling>& coupling_catalog() {
  static const std::map<std::string, MriCoupling> cat = build_couplings();
  return cat;
}

}  // namespace

const MriCoupling& builtin_coupling(const std::string& name) {
  const auto& cat = coupling_catalog();
  auto it = cat.find(name);
  if (it == cat.end()) throw std::invalid_argument("unknown builtin coupling: " + name);
  return it->second;
}

std::vector<std::string> builtin_coupling_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : coupling_catalog()) names.push_back(k);
  return names;
}

}  // namespace odekit
