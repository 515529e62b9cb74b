#ifndef ODEKIT_MATRIX_HPP
#define ODEKIT_MATRIX_HPP

#include <optional>
#include <vector>

#include "odekit/vector_ops.hpp"

namespace odekit {

/// Row-major dense matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0.0) {}

  static DenseMatrix identity(int n) {
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  void set_zero() { fill(a_, 0.0); }

  Vector multiply(const Vector& x) const;

 private:
  int rows_ = 0, cols_ = 0;
  Vector a_;
};

/// Square banded matrix with lower bandwidth ml and upper bandwidth mu.
/// Entries outside the band are structurally zero; writes there are rejected.
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(int n, int ml, int mu);

  int size() const { return n_; }
  int lower() const { return ml_; }
  int upper() const { return mu_; }

  bool in_band(int i, int j) const { return i - j <= ml_ && j - i <= mu_; }

  double& operator()(int i, int j);
  double operator()(int i, int j) const;

  void set_zero() { fill(ab_, 0.0); }

  Vector multiply(const Vector& x) const;
  DenseMatrix to_dense() const;

 private:
  friend class BandedLu;
  // Column-major band storage with ml extra rows of pivot fill-in,
  // LINPACK dgbfa layout: entry (i,j) lives at row ml+mu+i-j of column j.
  int n_ = 0, ml_ = 0, mu_ = 0;
  Vector ab_;
  int ldab() const { return 2 * ml_ + mu_ + 1; }
};

/// LU factorization with partial pivoting; reusable across right-hand sides.
class DenseLu {
 public:
  /// Returns nullopt when an exactly zero pivot survives pivoting.
  static std::optional<DenseLu> factor(const DenseMatrix& a);

  void solve(Vector& b) const;  // in place
  Vector solve_copy(const Vector& b) const {
    Vector x = b;
    solve(x);
    return x;
  }
  int size() const { return n_; }

 private:
  int n_ = 0;
  std::vector<double> lu_;   // row-major, L below unit diagonal, U on/above
  std::vector<int> pivot_;
};

/// Banded LU with partial pivoting (LINPACK dgbfa/dgbsl port).
class BandedLu {
 public:
  static std::optional<BandedLu> factor(const BandedMatrix& a);

  void solve(Vector& b) const;  // in place
  Vector solve_copy(const Vector& b) const {
    Vector x = b;
    solve(x);
    return x;
  }
  int size() const { return n_; }

 private:
  int n_ = 0, ml_ = 0, mu_ = 0;
  Vector ab_;
  std::vector<int> pivot_;
  int ldab() const { return 2 * ml_ + mu_ + 1; }
};

}  // namespace odekit

#endif
