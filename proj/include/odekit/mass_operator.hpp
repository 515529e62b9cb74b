#ifndef ODEKIT_MASS_OPERATOR_HPP
#define ODEKIT_MASS_OPERATOR_HPP

#include <memory>
#include <stdexcept>

#include "odekit/matrix.hpp"
#include "odekit/vector_ops.hpp"

namespace odekit {

/// Constant mass operator M in M y' = f(t, y): identity or a fixed
/// nonsingular matrix supplied once at configuration. The matrix form is
/// factored on construction so applications and solves are cheap.
class MassOperator {
 public:
  MassOperator() = default;  // identity

  explicit MassOperator(DenseMatrix m) : dense_(std::make_shared<DenseMatrix>(std::move(m))) {
    auto lu = DenseLu::factor(*dense_);
    if (!lu) throw std::invalid_argument("MassOperator: singular mass matrix");
    dense_lu_ = std::make_shared<DenseLu>(std::move(*lu));
  }

  explicit MassOperator(BandedMatrix m) : banded_(std::make_shared<BandedMatrix>(std::move(m))) {
    auto lu = BandedLu::factor(*banded_);
    if (!lu) throw std::invalid_argument("MassOperator: singular mass matrix");
    banded_lu_ = std::make_shared<BandedLu>(std::move(*lu));
  }

  bool is_identity() const { return !dense_ && !banded_; }

  Vector apply(const Vector& v) const {
    if (dense_) return dense_->multiply(v);
    if (banded_) return banded_->multiply(v);
    return v;
  }

  /// Solves M x = b in place.
  void solve_in_place(Vector& b) const {
    if (dense_lu_)
      dense_lu_->solve(b);
    else if (banded_lu_)
      banded_lu_->solve(b);
  }

  /// Adds M into a dense accumulator (used to assemble M - gamma*J).
  void add_to(DenseMatrix& a) const {
    if (is_identity()) {
      for (int i = 0; i < a.rows(); ++i) a(i, i) += 1.0;
    } else if (dense_) {
      for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) a(i, j) += (*dense_)(i, j);
    } else {
      for (int i = 0; i < a.rows(); ++i)
        for (int j = std::max(0, i - banded_->lower()); j <= std::min(a.cols() - 1, i + banded_->upper()); ++j)
          a(i, j) += (*banded_)(i, j);
    }
  }

  /// Banded variant; the mass band must fit inside the accumulator band.
  void add_to(BandedMatrix& a) const {
    if (is_identity()) {
      for (int i = 0; i < a.size(); ++i) a(i, i) += 1.0;
      return;
    }
    if (dense_) throw std::invalid_argument("MassOperator: dense mass with banded system matrix");
    if (banded_->lower() > a.lower() || banded_->upper() > a.upper())
      throw std::invalid_argument("MassOperator: mass band exceeds system band");
    for (int i = 0; i < a.size(); ++i)
      for (int j = std::max(0, i - banded_->lower()); j <= std::min(a.size() - 1, i + banded_->upper()); ++j)
        a(i, j) += (*banded_)(i, j);
  }

 private:
  std::shared_ptr<DenseMatrix> dense_;
  std::shared_ptr<BandedMatrix> banded_;
  std::shared_ptr<DenseLu> dense_lu_;
  std::shared_ptr<BandedLu> banded_lu_;
};

}  // namespace odekit

#endif
