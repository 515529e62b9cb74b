#include "odekit/interpolant.hpp"

#include <cmath>
#include <stdexcept>

#include "odekit/matrix.hpp"

namespace odekit {

HermiteInterpolant::HermiteInterpolant(int degree) : degree_(degree) {
  if (degree < 0 || degree > 5) throw std::invalid_argument("HermiteInterpolant: degree must be in [0, 5]");
}

void HermiteInterpolant::prime(double t0, const Vector& y0, const Vector& f0) {
  t_new_ = t0;
  y_new_ = y0;
  f_new_ = f0;
  primed_ = true;
  ready_ = false;
  cache_.fill(std::nullopt);
}

void HermiteInterpolant::update(double t_new, const Vector& y_new, const Vector& f_new,
                                const RhsFn& full_rhs) {
  if (!primed_) throw std::logic_error("HermiteInterpolant: update before prime");
  t_old_ = t_new_;
  y_old_ = y_new_;
  f_old_ = f_new_;
  t_new_ = t_new;
  y_new_ = y_new;
  f_new_ = f_new;
  h_ = t_new_ - t_old_;
  ready_ = true;
  cache_.fill(std::nullopt);
  f_third_.clear();
  f5_third_.clear();
  f5_two_thirds_.clear();

  // Extra-point derivative data, only when the configured degree needs it.
  if (degree_ == 4) {
    const double ta = t_new_ - h_ / 3.0;  // theta = 2/3
    Vector ya;
    eval_with(coeffs_for(3), ta, 0, ya);
    f_third_.resize(ya.size());
    full_rhs(ta, ya, f_third_);
  }
  if (degree_ == 5) {
    // The quartic behind each extra condition is rebuilt per point, so the
    // quintic costs four fresh evaluations per step in total.
    const double ta = t_new_ - h_ / 3.0;        // theta = 2/3
    const double tb = t_new_ - 2.0 * h_ / 3.0;  // theta = 1/3
    for (int pass = 0; pass < 2; ++pass) {
      const double tx = pass == 0 ? ta : tb;
      Vector y3, yq, fq(y_new_.size()), fx(y_new_.size());
      eval_with(coeffs_for(3), ta, 0, y3);
      full_rhs(ta, y3, fq);
      f_third_ = fq;  // identical both passes; doubles as the degree-4 data
      const Coeffs quartic = build_coeffs(4);
      eval_with(quartic, tx, 0, yq);
      full_rhs(tx, yq, fx);
      (pass == 0 ? f5_two_thirds_ : f5_third_) = fx;
    }
  }
}

const HermiteInterpolant::Coeffs& HermiteInterpolant::coeffs_for(int xi) const {
  if (!cache_[xi]) cache_[xi] = build_coeffs(xi);
  return *cache_[xi];
}

HermiteInterpolant::Coeffs HermiteInterpolant::build_coeffs(int xi) const {
  const std::size_t n = y_new_.size();
  Coeffs c;
  if (xi == 0) {
    Vector mid(n);
    for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (y_old_[i] + y_new_[i]);
    c.push_back(std::move(mid));
    return c;
  }

  // Interpolation conditions in theta = (t - t_old)/h on [0, 1]; derivative
  // conditions carry a factor h on their data. Rows: (is_deriv, theta, data).
  struct Cond {
    bool deriv;
    double theta;
    const Vector* data;
  };
  std::vector<Cond> conds;
  conds.push_back({false, 0.0, &y_old_});
  conds.push_back({false, 1.0, &y_new_});
  if (xi == 2) conds.push_back({true, 1.0, &f_new_});
  if (xi >= 3) {
    conds.push_back({true, 0.0, &f_old_});
    conds.push_back({true, 1.0, &f_new_});
  }
  if (xi == 4) {
    if (f_third_.empty()) throw std::logic_error("HermiteInterpolant: missing extra-point data for degree 4");
    conds.push_back({true, 2.0 / 3.0, &f_third_});
  }
  if (xi == 5) {
    if (f5_third_.empty() || f5_two_thirds_.empty())
      throw std::logic_error("HermiteInterpolant: missing extra-point data for degree 5");
    conds.push_back({true, 2.0 / 3.0, &f5_two_thirds_});
    conds.push_back({true, 1.0 / 3.0, &f5_third_});
  }

  const int m = xi + 1;
  DenseMatrix bmat(m, m);
  for (int r = 0; r < m; ++r) {
    const auto& cd = conds[r];
    for (int k = 0; k < m; ++k) {
      if (!cd.deriv)
        bmat(r, k) = std::pow(cd.theta, k);
      else
        bmat(r, k) = k == 0 ? 0.0 : k * std::pow(cd.theta, k - 1);
    }
  }
  auto lu = DenseLu::factor(bmat);
  if (!lu) throw std::logic_error("HermiteInterpolant: singular condition matrix");

  // Monomial coefficient vectors: C_k = sum_r inv(B)[k][r] * data_r, where
  // derivative rows contribute h * f.
  c.assign(m, Vector(n, 0.0));
  for (int r = 0; r < m; ++r) {
    Vector e(m, 0.0);
    e[r] = 1.0;
    lu->solve(e);  // e now holds column r of inv(B)
    const double scale = conds[r].deriv ? h_ : 1.0;
    const Vector& data = *conds[r].data;
    for (int k = 0; k < m; ++k) {
      const double w = e[k] * scale;
      if (w == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i) c[k][i] += w * data[i];
    }
  }
  return c;
}

void HermiteInterpolant::eval_with(const Coeffs& c, double t, int d, Vector& out) const {
  const std::size_t n = y_new_.size();
  const double theta = h_ != 0.0 ? (t - t_old_) / h_ : 0.0;
  out.assign(n, 0.0);
  const int m = static_cast<int>(c.size());
  for (int k = d; k < m; ++k) {
    double fac = 1.0;
    for (int j = 0; j < d; ++j) fac *= (k - j);
    const double w = fac * std::pow(theta, k - d);
    for (std::size_t i = 0; i < n; ++i) out[i] += w * c[k][i];
  }
  if (d > 0) {
    const double hs = std::pow(h_, -d);
    for (double& x : out) x *= hs;
  }
}

void HermiteInterpolant::eval_degree(int xi, double t, int d, Vector& out) const {
  if (!ready_) throw std::logic_error("HermiteInterpolant: no completed step");
  if (xi < 0 || xi > degree_) throw std::invalid_argument("HermiteInterpolant: degree unavailable");
  if (d < 0 || d > std::min(xi, 3)) throw std::invalid_argument("HermiteInterpolant: derivative order too large");
  eval_with(coeffs_for(xi), t, d, out);
}

void HermiteInterpolant::reset() {
  ready_ = false;
  primed_ = false;
  cache_.fill(std::nullopt);
  f_third_.clear();
  f5_third_.clear();
  f5_two_thirds_.clear();
}

LagrangeInterpolant::LagrangeInterpolant(int max_degree) : max_degree_(max_degree) {
  if (max_degree < 0 || max_degree > 5)
    throw std::invalid_argument("LagrangeInterpolant: degree must be in [0, 5]");
}

double LagrangeInterpolant::t_old() const { return hist_.back().first; }

void LagrangeInterpolant::push(double t, const Vector& y) {
  if (!hist_.empty() && t == hist_.front().first)
    throw std::invalid_argument("LagrangeInterpolant: repeated time in history");
  hist_.emplace_front(t, y);
  while (static_cast<int>(hist_.size()) > max_degree_ + 1) hist_.pop_back();
}

void LagrangeInterpolant::eval_degree(int xi, double t, int d, Vector& out) const {
  if (hist_.empty()) throw std::logic_error("LagrangeInterpolant: empty history");
  if (d < 0 || d > 3) throw std::invalid_argument("LagrangeInterpolant: derivative order capped at 3");
  const int deg = std::min({xi, available_degree(), max_degree_});
  if (deg < 0) throw std::logic_error("LagrangeInterpolant: empty history");
  const int m = deg + 1;

  // Basis values/derivatives by product-rule recursion over linear factors,
  // then one linear combination of the stored solutions.
  const std::size_t n = hist_.front().second.size();
  out.assign(n, 0.0);
  for (int j = 0; j < m; ++j) {
    double p0 = 1.0, p1 = 0.0, p2 = 0.0, p3 = 0.0;
    const double tj = hist_[j].first;
    for (int i = 0; i < m; ++i) {
      if (i == j) continue;
      const double ti = hist_[i].first;
      const double u = (t - ti) / (tj - ti);
      const double du = 1.0 / (tj - ti);
      p3 = p3 * u + 3.0 * p2 * du;
      p2 = p2 * u + 2.0 * p1 * du;
      p1 = p1 * u + p0 * du;
      p0 = p0 * u;
    }
    const double w = d == 0 ? p0 : d == 1 ? p1 : d == 2 ? p2 : p3;
    if (w == 0.0) continue;
    const Vector& yj = hist_[j].second;
    for (std::size_t i = 0; i < n; ++i) out[i] += w * yj[i];
  }
}

}  // namespace odekit
