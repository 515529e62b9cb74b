#ifndef ODEKIT_BUTCHER_HPP
#define ODEKIT_BUTCHER_HPP

#include <string>
#include <utility>
#include <vector>

#include "odekit/vector_ops.hpp"

namespace odekit {

enum class TableKind { Explicit, Dirk };

/// Runge-Kutta coefficients (A, b, b~, c) plus declared orders.
///
/// Structural invariants: explicit tables have strictly lower triangular A,
/// DIRK tables lower triangular A. A missing embedding (btilde empty)
/// disables temporal adaptivity for the method. Row-sum consistency
/// |c_i - sum_j A_ij| is checked at load but only warned about, since valid
/// low-stage-order methods define c independently.
struct ButcherTable {
  std::string name;
  TableKind kind = TableKind::Explicit;
  int s = 0;  // stage count
  int q = 0;  // method order
  int p = 0;  // embedding order (ignored when btilde empty)
  std::vector<Vector> A;
  Vector b;
  Vector btilde;  // empty when no embedding
  Vector c;

  bool has_embedding() const { return !btilde.empty(); }

  /// True when b equals the last row of A (solution is the last stage).
  bool stiffly_accurate() const;

  /// Throws std::invalid_argument naming the violated invariant; returns
  /// human-readable warnings (row-sum inconsistencies).
  std::vector<std::string> validate() const;
};

/// Residuals of the rooted-tree order conditions through order min(up_to, 4),
/// for b and (when present) btilde. Returned as (condition id, residual).
/// Condition ids: "b:q1", "b:q2", "b:q3a", "b:q3b", "b:q4a".."b:q4d" and the
/// same with "bt:" for the embedding.
std::vector<std::pair<std::string, double>> order_condition_residuals(const ButcherTable& t, int up_to);

/// Largest residual magnitude among b-conditions up to the given order.
double max_order_residual(const ButcherTable& t, int up_to, bool embedding = false);

/// Built-in method catalog. Throws std::invalid_argument for unknown names.
const ButcherTable& builtin_table(const std::string& name);
std::vector<std::string> builtin_table_names();

}  // namespace odekit

#endif
