#ifndef ODEKIT_INTERPOLANT_HPP
#define ODEKIT_INTERPOLANT_HPP

#include <array>
#include <deque>
#include <optional>
#include <vector>

#include "odekit/vector_ops.hpp"

namespace odekit {

/// Hermite dense output over the most recently completed step, built from
/// solution and derivative data (y_{n-1}, y_n, f_{n-1}, f_n). Degrees 4 and 5
/// add derivative conditions at t_n - h/3 and t_n - 2h/3 whose right-hand
/// side data costs one and four extra f evaluations per step, respectively;
/// those evaluations happen at step completion and the data is cached for
/// the remainder of the step.
class HermiteInterpolant {
 public:
  explicit HermiteInterpolant(int degree = 3);

  int configured_degree() const { return degree_; }
  /// Highest degree evaluable right now (-1 before any completed step).
  int available_degree() const { return ready_ ? degree_ : -1; }
  bool ready() const { return ready_; }

  double t_old() const { return t_old_; }
  double t_new() const { return t_new_; }

  /// Installs the integration start state; no step has completed yet.
  void prime(double t0, const Vector& y0, const Vector& f0);

  /// Shifts in an accepted step. full_rhs supplies the extra-point data for
  /// degrees 4-5 and is invoked lazily per the configured degree.
  void update(double t_new, const Vector& y_new, const Vector& f_new, const RhsFn& full_rhs);

  /// Evaluates the degree-xi interpolant (xi <= configured degree) or its
  /// d-th derivative, d <= min(xi, 3).
  void eval_degree(int xi, double t, int d, Vector& out) const;
  void eval(double t, int d, Vector& out) const { eval_degree(degree_, t, d, out); }

  void reset();

 private:
  using Coeffs = std::vector<Vector>;  // monomial coefficients in theta

  const Coeffs& coeffs_for(int xi) const;
  Coeffs build_coeffs(int xi) const;
  void eval_with(const Coeffs& c, double t, int d, Vector& out) const;

  int degree_;
  bool ready_ = false;
  bool primed_ = false;
  double t_old_ = 0.0, t_new_ = 0.0, h_ = 0.0;
  Vector y_old_, y_new_, f_old_, f_new_;
  Vector f_third_;     // f at t_n - h/3 for the quartic (degree 4)
  Vector f5_third_, f5_two_thirds_;  // quartic-based data for the quintic
  mutable std::array<std::optional<Coeffs>, 6> cache_;
  mutable Vector scratch_;
};

/// Lagrange dense output over a history of up to degree+1 accepted solutions,
/// for stiff problems where derivative-based interpolants lose accuracy.
/// During startup the highest currently available degree is used.
class LagrangeInterpolant {
 public:
  explicit LagrangeInterpolant(int max_degree = 3);

  int configured_degree() const { return max_degree_; }
  int available_degree() const { return static_cast<int>(hist_.size()) - 1; }
  bool ready() const { return hist_.size() >= 2; }

  double t_old() const;
  double t_new() const { return hist_.front().first; }

  void push(double t, const Vector& y);

  /// Evaluates the interpolant of degree min(xi, available) or its d-th
  /// derivative, d <= 3. Basis functions are evaluated first, then a single
  /// linear combination over the stored solutions.
  void eval_degree(int xi, double t, int d, Vector& out) const;

  void reset() { hist_.clear(); }

 private:
  int max_degree_;
  std::deque<std::pair<double, Vector>> hist_;  // most recent first
};

/// Interpolant selection for the integrator.
enum class InterpolantKind { Hermite, Lagrange };

/// Uniform front for the two interpolant families as used by the evolve
/// loop and the implicit-stage predictors.
class DenseOutput {
 public:
  DenseOutput(InterpolantKind kind, int degree)
      : kind_(kind), hermite_(kind == InterpolantKind::Hermite ? degree : 3),
        lagrange_(kind == InterpolantKind::Lagrange ? degree : 3) {}

  InterpolantKind kind() const { return kind_; }
  bool ready() const {
    return kind_ == InterpolantKind::Hermite ? hermite_.ready() : lagrange_.ready();
  }
  int available_degree() const {
    return kind_ == InterpolantKind::Hermite ? hermite_.available_degree()
                                             : lagrange_.available_degree();
  }
  double t_old() const { return kind_ == InterpolantKind::Hermite ? hermite_.t_old() : lagrange_.t_old(); }
  double t_new() const { return kind_ == InterpolantKind::Hermite ? hermite_.t_new() : lagrange_.t_new(); }

  void prime(double t0, const Vector& y0, const Vector& f0) {
    if (kind_ == InterpolantKind::Hermite)
      hermite_.prime(t0, y0, f0);
    else
      lagrange_.push(t0, y0);
  }

  /// Records an accepted step; full_rhs feeds Hermite extra-point data.
  void update(double t_new, const Vector& y_new, const Vector& f_new, const RhsFn& full_rhs) {
    if (kind_ == InterpolantKind::Hermite)
      hermite_.update(t_new, y_new, f_new, full_rhs);
    else
      lagrange_.push(t_new, y_new);
  }

  void eval(double t, int d, Vector& out) const {
    if (kind_ == InterpolantKind::Hermite)
      hermite_.eval(t, d, out);
    else
      lagrange_.eval_degree(lagrange_.configured_degree(), t, d, out);
  }

  void eval_degree(int xi, double t, int d, Vector& out) const {
    if (kind_ == InterpolantKind::Hermite)
      hermite_.eval_degree(std::min(xi, hermite_.configured_degree()), t, d, out);
    else
      lagrange_.eval_degree(xi, t, d, out);
  }

  void reset() {
    hermite_.reset();
    lagrange_.reset();
  }

 private:
  InterpolantKind kind_;
  HermiteInterpolant hermite_;
  LagrangeInterpolant lagrange_;
};

}  // namespace odekit

#endif
