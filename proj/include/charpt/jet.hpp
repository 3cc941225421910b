#pragma once

// Truncated multivariate Taylor polynomials ("jets"). Coefficient at exponent
// e = (e_1..e_N) is d^e f(base) / e!, stored dense by total degree. All
// arithmetic truncates exactly at the jet order.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "charpt/errors.hpp"
#include "charpt/expr.hpp"
#include "charpt/types.hpp"

namespace charpt {

inline constexpr int kMaxJetOrder = 16;

template <int N>
class Jet {
  static_assert(N >= 1 && N <= 3, "jets are implemented for 1, 2 and 3 variables");

public:
  using Exponent = std::array<int, N>;
  using Storage = boost::container::small_vector<double, 10>;

  Jet() : Jet(0) {}
  explicit Jet(int order, std::array<double, N> base = {}) : order_(order), base_(base), c_(size(order), 0.0) {
    if (order < 0 || order > kMaxJetOrder) throw OrderError("jet order must lie in [0, 16]");
  }

  static Jet constant(double v, int order, std::array<double, N> base = {}) {
    Jet j(order, base);
    j.c_[0] = v;
    return j;
  }

  // The coordinate function x_k expanded at base.
  static Jet variable(int k, int order, std::array<double, N> base = {}) {
    Jet j(order, base);
    j.c_[0] = base[k];
    if (order >= 1) {
      Exponent e{};
      e[k] = 1;
      j.c_[index(e)] = 1.0;
    }
    return j;
  }

  static std::size_t size(int order) {
    std::size_t n = 1;
    for (int k = 1; k <= N; ++k) n = n * static_cast<std::size_t>(order + k) / static_cast<std::size_t>(k);
    return n;
  }

  // Number of coefficients of total degree below s.
  static std::size_t block_start(int s) { return s == 0 ? 0 : size(s - 1); }

  static std::size_t index(const Exponent& e) {
    if constexpr (N == 1) {
      return static_cast<std::size_t>(e[0]);
    } else if constexpr (N == 2) {
      const int s = e[0] + e[1];
      return static_cast<std::size_t>(s * (s + 1) / 2 + e[1]);
    } else {
      const int s = e[0] + e[1] + e[2];
      const int m = e[1] + e[2];
      return static_cast<std::size_t>(s * (s + 1) * (s + 2) / 6 + m * (m + 1) / 2 + e[2]);
    }
  }

  static const Exponent& exponent_of(std::size_t idx) { return exponent_table()[idx]; }

  static int degree(const Exponent& e) {
    int s = 0;
    for (int v : e) s += v;
    return s;
  }

  int order() const { return order_; }
  const std::array<double, N>& base() const { return base_; }
  std::size_t size() const { return c_.size(); }

  double operator[](std::size_t i) const { return c_[i]; }
  double& operator[](std::size_t i) { return c_[i]; }

  double coeff(const Exponent& e) const {
    if (degree(e) > order_) return 0.0;
    for (int v : e)
      if (v < 0) return 0.0;
    return c_[index(e)];
  }
  void set_coeff(const Exponent& e, double v) { c_[index(e)] = v; }

  double value() const { return c_[0]; }

  // Raw partial derivative d^e f(base) = coefficient * e!.
  double partial(const Exponent& e) const {
    double f = 1.0;
    for (int v : e)
      for (int i = 2; i <= v; ++i) f *= i;
    return coeff(e) * f;
  }

  Jet truncated(int order) const {
    if (order > order_) throw OrderError("cannot extend a jet beyond its order");
    Jet r(order, base_);
    for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] = c_[i];
    return r;
  }

  // d/dx_k; the result has order one lower.
  Jet derivative(int k) const {
    Jet r(order_ > 0 ? order_ - 1 : 0, base_);
    if (order_ == 0) return r;
    for (std::size_t i = 0; i < r.c_.size(); ++i) {
      Exponent e = exponent_of(i);
      e[k] += 1;
      r.c_[i] = e[k] * c_[index(e)];
    }
    return r;
  }

  bool is_finite() const {
    for (double v : c_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  Jet& operator+=(const Jet& o) {
    shrink_to(o.order_);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    shrink_to(o.order_);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Jet& operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
  }
  Jet& operator+=(double s) {
    c_[0] += s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a += -s; }
  Jet operator-() const {
    Jet r = *this;
    for (double& v : r.c_) v = -v;
    return r;
  }

  friend Jet operator*(const Jet& a, const Jet& b) {
    const int d = std::min(a.order_, b.order_);
    Jet r(d, a.base_);
    for (std::size_t ia = 0; ia < size(d); ++ia) {
      const double ca = a.c_[ia];
      if (ca == 0.0) continue;
      const Exponent& ea = exponent_of(ia);
      const int rest = d - degree(ea);
      for (std::size_t ib = 0; ib < size(rest); ++ib) {
        const double cb = b.c_[ib];
        if (cb == 0.0) continue;
        Exponent e = exponent_of(ib);
        for (int k = 0; k < N; ++k) e[k] += ea[k];
        r.c_[index(e)] += ca * cb;
      }
    }
    return r;
  }

  Jet& operator*=(const Jet& o) { return *this = *this * o; }

private:
  void shrink_to(int order) {
    if (order < order_) {
      order_ = order;
      c_.resize(size(order));
    }
  }

  static Exponent compute_exponent(std::size_t idx) {
    int s = 0;
    while (size(s) <= idx) ++s;
    const std::size_t r = idx - block_start(s);
    Exponent e{};
    if constexpr (N == 1) {
      e[0] = s;
    } else if constexpr (N == 2) {
      e[1] = static_cast<int>(r);
      e[0] = s - e[1];
    } else {
      int m = 0;
      while (static_cast<std::size_t>((m + 1) * (m + 2) / 2) <= r) ++m;
      e[2] = static_cast<int>(r) - m * (m + 1) / 2;
      e[1] = m - e[2];
      e[0] = s - m;
    }
    return e;
  }

  static const std::vector<Exponent>& exponent_table() {
    static const std::vector<Exponent> table = [] {
      std::vector<Exponent> t(size(kMaxJetOrder));
      for (std::size_t i = 0; i < t.size(); ++i) t[i] = compute_exponent(i);
      return t;
    }();
    return table;
  }

  int order_ = 0;
  std::array<double, N> base_{};
  Storage c_;
};

using Jet1 = Jet<1>;
using Jet2 = Jet<2>;
using Jet3 = Jet<3>;

// Taylor coefficients f^(n)(c)/n!, n = 0..order, of a builtin at c. Throws
// DomainError outside the builtin's domain (log, sqrt at c <= 0 for order >= 1).
std::vector<double> builtin_series(Builtin fn, double c, int order);

// f(u) for a univariate series a_n = f^(n)(u0)/n! with u0 = u.value():
// sum a_n (u - u0)^n evaluated by Horner in the nilpotent part.
template <int N>
Jet<N> apply_series(const std::vector<double>& a, const Jet<N>& u) {
  Jet<N> delta = u;
  delta[0] = 0.0;
  const int d = std::min(u.order(), static_cast<int>(a.size()) - 1);
  Jet<N> r = Jet<N>::constant(a[static_cast<std::size_t>(d)], u.order(), u.base());
  for (int n = d - 1; n >= 0; --n) {
    r = r * delta;
    r[0] += a[static_cast<std::size_t>(n)];
  }
  return r;
}

template <int N>
Jet<N> apply_builtin(Builtin fn, const Jet<N>& u) {
  return apply_series(builtin_series(fn, u.value(), u.order()), u);
}

template <int N>
Jet<N> reciprocal(const Jet<N>& u) {
  const double c = u.value();
  if (c == 0.0) throw DomainError("division by a jet with zero constant term");
  std::vector<double> a(static_cast<std::size_t>(u.order()) + 1);
  double p = 1.0 / c;
  for (std::size_t n = 0; n < a.size(); ++n) {
    a[n] = p;
    p *= -1.0 / c;
  }
  return apply_series(a, u);
}

template <int N>
Jet<N> operator/(const Jet<N>& a, const Jet<N>& b) {
  return a * reciprocal(b);
}

template <int N>
Jet<N> pow(const Jet<N>& u, int n) {
  if (n < 0) return reciprocal(pow(u, -n));
  Jet<N> result = Jet<N>::constant(1.0, u.order(), u.base());
  Jet<N> b = u;
  while (n > 0) {
    if (n & 1) result = result * b;
    n >>= 1;
    if (n > 0) b = b * b;
  }
  return result;
}

// Composition of univariate series. outer is the expansion of f at t0 and
// inner the expansion of s -> t(s) with t(s0) = t0; returns the expansion of
// f(t(s)) at s0 to the order of inner. Throws OrderError when outer is shorter
// than inner, DomainError when inner's constant term is not outer's base.
Jet1 compose_1d(const Jet1& outer, const Jet1& inner);

struct JetOptions {
  // When false, a (0,0) coefficient that only feeds additive combinations is
  // left at 0 instead of being computed (saves the antider_x quadrature).
  bool need_value = true;
  // Tolerance for the quadrature of antider_x value and y-derivative terms.
  double antider_tol = 1e-12;
};

// Jet of an (x,y) expression at base. Throws DomainError/QuadratureError.
Jet2 jet_of(const Expr& e, Point2 base, int order, const JetOptions& opt = {});

// Jet of an (x,y,z) expression at base; antider_x is not supported here.
Jet3 jet_of(const Expr& e, Point3 base, int order);

} // namespace charpt
