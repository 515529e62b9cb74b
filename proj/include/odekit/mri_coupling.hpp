#ifndef ODEKIT_MRI_COUPLING_HPP
#define ODEKIT_MRI_COUPLING_HPP

#include <string>
#include <vector>

#include "odekit/butcher.hpp"
#include "odekit/vector_ops.hpp"

namespace odekit {

enum class MriStageKind { FastIvp, ExplicitArk, ImplicitArk };

/// Multirate-infinitesimal coupling tables Omega^{k}, Gamma^{k} (k = 0..K)
/// with abscissae 0 = c_1 <= ... <= c_s = 1.
///
/// Only diagonally implicit, solve-decoupled couplings are representable:
/// omega_{i,j} = 0 for j >= i, gamma_{i,j} = 0 for j > i, and any stage with
/// a nonzero gamma_{i,i} must have dc_i = 0.
struct MriCoupling {
  using Mat = std::vector<Vector>;

  std::string name;
  int s = 0;       // stages
  int q = 2;       // slow-scale order of accuracy
  int degree = 0;  // K, polynomial degree bound (0..2)
  std::vector<Mat> omega;  // K+1 matrices, each s x s
  std::vector<Mat> gamma;  // K+1 matrices, each s x s
  Vector c;

  double delta_c(int i) const { return c[i] - c[i - 1]; }  // i in [1, s)

  /// Stage classification for 0-based stage index i in [1, s).
  MriStageKind stage_kind(int i) const;

  /// Equivalent ARK coefficients for a dc = 0 stage: sum_k coeff^{k}/(k+1).
  double ark_explicit_coeff(int i, int j) const;
  double ark_implicit_coeff(int i, int j) const;

  bool has_implicit() const;

  /// Throws std::invalid_argument naming the violated invariant.
  void validate() const;
};

/// Converts a slow explicit Butcher table with sorted abscissae into the
/// MIS coupling: c = [c^E_1 ... c^E_{s-1} 1], K = 0, Gamma^{0} = 0, and
/// Omega^{0} rows formed from successive differences of A^E rows and b^E.
MriCoupling mis_to_mri(const ButcherTable& slow);

/// Residual of the extra condition a slow table must satisfy (beyond being
/// third order itself) for its MIS conversion to be third order; zero means
/// the condition holds.
double mis_third_order_residual(const ButcherTable& slow);

/// Built-in coupling catalog ("mis_kw3", "mri_erk22").
const MriCoupling& builtin_coupling(const std::string& name);
std::vector<std::string> builtin_coupling_names();

}  // namespace odekit

#endif
