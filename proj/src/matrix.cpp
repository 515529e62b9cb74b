#include "odekit/matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace odekit {

Vector DenseMatrix::multiply(const Vector& x) const {
  if (static_cast<int>(x.size()) != cols_)
    throw std::invalid_argument("DenseMatrix::multiply: size mismatch");
  Vector y(rows_, 0.0);
  for (int i = 0; i < rows_; ++i) {
    double acc = 0.0;
    for (int j = 0; j < cols_; ++j) acc += (*this)(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

BandedMatrix::BandedMatrix(int n, int ml, int mu) : n_(n), ml_(ml), mu_(mu) {
  if (n < 1 || ml < 0 || mu < 0 || ml >= n || mu >= n)
    throw std::invalid_argument("BandedMatrix: bad dimensions");
  ab_.assign(static_cast<std::size_t>(ldab()) * n_, 0.0);
}

double& BandedMatrix::operator()(int i, int j) {
  if (!in_band(i, j)) throw std::out_of_range("BandedMatrix: entry outside band");
  return ab_[static_cast<std::size_t>(j) * ldab() + (ml_ + mu_ + i - j)];
}

double BandedMatrix::operator()(int i, int j) const {
  if (!in_band(i, j)) return 0.0;
  return ab_[static_cast<std::size_t>(j) * ldab() + (ml_ + mu_ + i - j)];
}

Vector BandedMatrix::multiply(const Vector& x) const {
  if (static_cast<int>(x.size()) != n_)
    throw std::invalid_argument("BandedMatrix::multiply: size mismatch");
  Vector y(n_, 0.0);
  for (int i = 0; i < n_; ++i) {
    const int jlo = std::max(0, i - ml_);
    const int jhi = std::min(n_ - 1, i + mu_);
    double acc = 0.0;
    for (int j = jlo; j <= jhi; ++j) acc += (*this)(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

DenseMatrix BandedMatrix::to_dense() const {
  DenseMatrix d(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = std::max(0, i - ml_); j <= std::min(n_ - 1, i + mu_); ++j)
      d(i, j) = (*this)(i, j);
  return d;
}

std::optional<DenseLu> DenseLu::factor(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("DenseLu: matrix not square");
  const int n = a.rows();
  DenseLu f;
  f.n_ = n;
  f.lu_.resize(static_cast<std::size_t>(n) * n);
  f.pivot_.resize(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) f.lu_[static_cast<std::size_t>(i) * n + j] = a(i, j);

  auto lu = [&](int i, int j) -> double& { return f.lu_[static_cast<std::size_t>(i) * n + j]; };

  for (int k = 0; k < n; ++k) {
    int p = k;
    double pmax = std::abs(lu(k, k));
    for (int i = k + 1; i < n; ++i) {
      const double v = std::abs(lu(i, k));
      if (v > pmax) {
        pmax = v;
        p = i;
      }
    }
    f.pivot_[k] = p;
    if (lu(p, k) == 0.0) return std::nullopt;  // exactly singular
    if (p != k)
      for (int j = 0; j < n; ++j) std::swap(lu(k, j), lu(p, j));
    const double inv = 1.0 / lu(k, k);
    for (int i = k + 1; i < n; ++i) {
      const double m = lu(i, k) * inv;
      lu(i, k) = m;
      if (m != 0.0)
        for (int j = k + 1; j < n; ++j) lu(i, j) -= m * lu(k, j);
    }
  }
  return f;
}

void DenseLu::solve(Vector& b) const {
  if (static_cast<int>(b.size()) != n_) throw std::invalid_argument("DenseLu::solve: size mismatch");
  auto lu = [&](int i, int j) { return lu_[static_cast<std::size_t>(i) * n_ + j]; };
  for (int k = 0; k < n_; ++k) {
    if (pivot_[k] != k) std::swap(b[k], b[pivot_[k]]);
    for (int i = k + 1; i < n_; ++i) b[i] -= lu(i, k) * b[k];
  }
  for (int k = n_ - 1; k >= 0; --k) {
    b[k] /= lu(k, k);
    for (int i = 0; i < k; ++i) b[i] -= lu(i, k) * b[k];
  }
}

std::optional<BandedLu> BandedLu::factor(const BandedMatrix& a) {
  BandedLu f;
  f.n_ = a.size();
  f.ml_ = a.lower();
  f.mu_ = a.upper();
  f.ab_ = a.ab_;
  f.pivot_.assign(f.n_, 0);

  const int n = f.n_, ml = f.ml_, mu = f.mu_;
  const int ld = f.ldab();
  auto ab = [&](int r, int c) -> double& { return f.ab_[static_cast<std::size_t>(c) * ld + r]; };

  const int m = ml + mu;  // 0-based row of the diagonal
  // zero the fill-in rows for the first columns
  for (int j = mu + 1; j < std::min(n, m + 1); ++j)
    for (int i = m - j; i < ml; ++i) ab(i, j) = 0.0;

  int jz = std::min(n, m + 1) - 1;
  int ju = -1;
  for (int k = 0; k < n - 1; ++k) {
    ++jz;
    if (jz < n)
      for (int i = 0; i < ml; ++i) ab(i, jz) = 0.0;

    const int lm = std::min(ml, n - 1 - k);
    int l = m;
    for (int i = 1; i <= lm; ++i)
      if (std::abs(ab(m + i, k)) > std::abs(ab(l, k))) l = m + i;
    f.pivot_[k] = l + k - m;
    if (ab(l, k) == 0.0) return std::nullopt;

    if (l != m) std::swap(ab(l, k), ab(m, k));
    const double t = -1.0 / ab(m, k);
    for (int i = 1; i <= lm; ++i) ab(m + i, k) *= t;

    ju = std::min(std::max(ju, mu + f.pivot_[k]), n - 1);
    int mm = m;
    int ll = l;
    for (int j = k + 1; j <= ju; ++j) {
      --ll;
      --mm;
      const double tj = ab(ll, j);
      if (ll != mm) {
        ab(ll, j) = ab(mm, j);
        ab(mm, j) = tj;
      }
      for (int i = 1; i <= lm; ++i) ab(mm + i, j) += tj * ab(m + i, k);
    }
  }
  f.pivot_[n - 1] = n - 1;
  if (ab(m, n - 1) == 0.0) return std::nullopt;
  return f;
}

void BandedLu::solve(Vector& b) const {
  if (static_cast<int>(b.size()) != n_) throw std::invalid_argument("BandedLu::solve: size mismatch");
  const int n = n_, ml = ml_, mu = mu_;
  const int ld = ldab();
  auto ab = [&](int r, int c) { return ab_[static_cast<std::size_t>(c) * ld + r]; };
  const int m = ml + mu;

  if (ml > 0) {
    for (int k = 0; k < n - 1; ++k) {
      const int lm = std::min(ml, n - 1 - k);
      const int l = pivot_[k];
      double t = b[l];
      if (l != k) {
        b[l] = b[k];
        b[k] = t;
      }
      for (int i = 1; i <= lm; ++i) b[k + i] += t * ab(m + i, k);
    }
  }
  for (int k = n - 1; k >= 0; --k) {
    b[k] /= ab(m, k);
    const int lm = std::min(k + 1, m + 1) - 1;
    const double t = -b[k];
    for (int i = 1; i <= lm; ++i) b[k - i] += t * ab(m - i, k);
  }
}

}  // namespace odekit
