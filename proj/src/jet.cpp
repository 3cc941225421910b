#include "charpt/jet.hpp"

#include <cmath>
#include <string>

#include "charpt/gauss_kronrod.hpp"

namespace charpt {

namespace {

void require_finite(const std::vector<double>& a, const char* fn) {
  for (double v : a)
    if (!std::isfinite(v)) throw DomainError(std::string("non-finite Taylor coefficient of ") + fn);
}

} // namespace

std::vector<double> builtin_series(Builtin fn, double c, int order) {
  const std::size_t n = static_cast<std::size_t>(order) + 1;
  std::vector<double> a(n, 0.0);
  switch (fn) {
  case Builtin::exp: {
    double v = std::exp(c);
    for (std::size_t k = 0; k < n; ++k) {
      a[k] = v;
      v /= static_cast<double>(k + 1);
    }
    break;
  }
  case Builtin::log: {
    if (c <= 0.0) throw DomainError("log of non-positive value");
    a[0] = std::log(c);
    double p = 1.0 / c;
    for (std::size_t k = 1; k < n; ++k) {
      a[k] = ((k % 2 == 1) ? 1.0 : -1.0) * p / static_cast<double>(k);
      p /= c;
    }
    break;
  }
  case Builtin::sin:
  case Builtin::cos: {
    // sin(c+t) = sin c cos t + cos c sin t, and d/dt cycles sin -> cos -> -sin -> -cos.
    const double s = std::sin(c);
    const double co = std::cos(c);
    const double cyc_sin[4] = {s, co, -s, -co};
    const double cyc_cos[4] = {co, -s, -co, s};
    double fact = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k > 0) fact *= static_cast<double>(k);
      a[k] = (fn == Builtin::sin ? cyc_sin[k % 4] : cyc_cos[k % 4]) / fact;
    }
    break;
  }
  case Builtin::sqrt: {
    if (c < 0.0 || (c == 0.0 && order >= 1)) throw DomainError("sqrt outside its differentiable domain");
    const double r = std::sqrt(c);
    double b = 1.0; // binomial(1/2, k)
    double p = 1.0; // c^-k
    for (std::size_t k = 0; k < n; ++k) {
      if (k > 0) {
        b *= (0.5 - static_cast<double>(k - 1)) / static_cast<double>(k);
        p /= c;
      }
      a[k] = r * b * p;
    }
    break;
  }
  case Builtin::atan: {
    // atan' = 1/(1+t^2); expand q(t) = 1/((1+c^2) + 2c t + t^2) and integrate termwise.
    a[0] = std::atan(c);
    const double q0 = 1.0 + c * c;
    std::vector<double> q(n, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      double acc = k == 0 ? 1.0 : 0.0;
      if (k >= 1) acc -= 2.0 * c * q[k - 1];
      if (k >= 2) acc -= q[k - 2];
      q[k] = acc / q0;
      a[k + 1] = q[k] / static_cast<double>(k + 1);
    }
    break;
  }
  case Builtin::flat: {
    if (c == 0.0) break; // every derivative vanishes at the origin
    // flat = exp(w) with w(t) = -1/(c+t)^2 = -c^-2 sum (k+1) (-t/c)^k.
    std::vector<double> w(n, 0.0);
    double p = -1.0 / (c * c);
    for (std::size_t k = 0; k < n; ++k) {
      w[k] = p * static_cast<double>(k + 1);
      p *= -1.0 / c;
    }
    a[0] = std::exp(w[0]);
    if (a[0] == 0.0) break; // underflow: the remaining coefficients carry the same factor
    for (std::size_t k = 1; k < n; ++k) {
      double acc = 0.0;
      for (std::size_t m = 1; m <= k; ++m) acc += static_cast<double>(m) * w[m] * a[k - m];
      a[k] = acc / static_cast<double>(k);
    }
    break;
  }
  }
  require_finite(a, expr::builtin_name(fn));
  return a;
}

Jet1 compose_1d(const Jet1& outer, const Jet1& inner) {
  if (outer.order() < inner.order())
    throw OrderError("compose_1d: outer order " + std::to_string(outer.order()) + " below inner order " +
                     std::to_string(inner.order()));
  const double t0 = outer.base()[0];
  const double scale = std::max(1.0, std::abs(t0));
  if (std::abs(inner.value() - t0) > 1e-12 * scale)
    throw DomainError("compose_1d: inner constant term differs from the outer expansion point");
  std::vector<double> a(static_cast<std::size_t>(outer.order()) + 1);
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = outer[k];
  return apply_series(a, inner);
}

namespace {

bool variable_free(const Expr& e) { return !depends_on_x(e) && !depends_on_y(e) && !depends_on_z(e); }

struct Jet2Builder {
  Point2 base;
  const JetOptions& opt;

  Jet2 build(const Expr& e, int order, bool need_value) const {
    const std::array<double, 2> b{base.x, base.y};
    switch (e->kind) {
    case NodeKind::constant: return Jet2::constant(e->value, order, b);
    case NodeKind::var_x: return Jet2::variable(0, order, b);
    case NodeKind::var_y: return Jet2::variable(1, order, b);
    case NodeKind::var_z: throw DomainError("z is not a variable of a graph function");
    case NodeKind::add: return build(e->children[0], order, need_value) + build(e->children[1], order, need_value);
    case NodeKind::sub: return build(e->children[0], order, need_value) - build(e->children[1], order, need_value);
    case NodeKind::neg: return -build(e->children[0], order, need_value);
    case NodeKind::mul: {
      const Expr& l = e->children[0];
      const Expr& r = e->children[1];
      if (variable_free(l)) return eval_point(l, base) * build(r, order, need_value);
      if (variable_free(r)) return build(l, order, need_value) * eval_point(r, base);
      return build(l, order, true) * build(r, order, true);
    }
    case NodeKind::div: {
      const Expr& r = e->children[1];
      if (variable_free(r)) {
        const double d = eval_point(r, base);
        if (d == 0.0) throw DomainError("division by zero");
        return build(e->children[0], order, need_value) * (1.0 / d);
      }
      return build(e->children[0], order, true) / build(r, order, true);
    }
    case NodeKind::pow: return pow(build(e->children[0], order, true), e->exponent);
    case NodeKind::call: return apply_builtin(e->fn, build(e->children[0], order, true));
    case NodeKind::antider_x: return antider(e, order, need_value);
    }
    throw DomainError("unknown expression node");
  }

  Jet2 antider(const Expr& e, int order, bool need_value) const {
    const Expr& f = e->children[0];
    Jet2 out(order, {base.x, base.y});
    if (order >= 1) {
      const Jet2 fj = build(f, order - 1, true);
      for (int s = 1; s <= order; ++s)
        for (int j = 0; j < s; ++j) {
          const int i = s - j;
          out.set_coeff({i, j}, fj.coeff({i - 1, j}) / i);
        }
    }
    if (base.x == 0.0) return out;
    const int j0 = need_value ? 0 : 1;
    const int j1 = depends_on_y(f) ? order : 0;
    if (j0 > j1) return out;
    // Pure y-derivatives: integrate the y-jet of the integrand along [0, x].
    gk::Options go;
    go.abs_tol = opt.antider_tol;
    go.rel_tol = opt.antider_tol;
    auto integrand = [&](double t) {
      std::vector<double> v(static_cast<std::size_t>(j1 - j0 + 1));
      if (j1 == 0) {
        v[0] = eval_point(f, Point2{t, base.y});
        return v;
      }
      const Jet2 fj = Jet2Builder{Point2{t, base.y}, opt}.build(f, j1, true);
      for (int j = j0; j <= j1; ++j) v[static_cast<std::size_t>(j - j0)] = fj.coeff({0, j});
      return v;
    };
    const double a = std::min(0.0, base.x);
    const double b = std::max(0.0, base.x);
    auto res = gk::integrate<std::vector<double>>(integrand, a, b, go);
    if (!res.converged)
      throw QuadratureError("antider_x: tolerance " + std::to_string(opt.antider_tol) + " not met (error estimate " +
                            std::to_string(res.error) + ")");
    const double sign = base.x > 0.0 ? 1.0 : -1.0;
    for (int j = j0; j <= j1; ++j) {
      const std::size_t k = static_cast<std::size_t>(j - j0);
      out.set_coeff({0, j}, sign * (k < res.value.size() ? res.value[k] : 0.0));
    }
    return out;
  }
};

Jet3 build3(const Expr& e, const std::array<double, 3>& b, int order) {
  switch (e->kind) {
  case NodeKind::constant: return Jet3::constant(e->value, order, b);
  case NodeKind::var_x: return Jet3::variable(0, order, b);
  case NodeKind::var_y: return Jet3::variable(1, order, b);
  case NodeKind::var_z: return Jet3::variable(2, order, b);
  case NodeKind::add: return build3(e->children[0], b, order) + build3(e->children[1], b, order);
  case NodeKind::sub: return build3(e->children[0], b, order) - build3(e->children[1], b, order);
  case NodeKind::neg: return -build3(e->children[0], b, order);
  case NodeKind::mul: return build3(e->children[0], b, order) * build3(e->children[1], b, order);
  case NodeKind::div: return build3(e->children[0], b, order) / build3(e->children[1], b, order);
  case NodeKind::pow: return pow(build3(e->children[0], b, order), e->exponent);
  case NodeKind::call: return apply_builtin(e->fn, build3(e->children[0], b, order));
  case NodeKind::antider_x: throw DomainError("antider_x is only supported in graph functions of (x, y)");
  }
  throw DomainError("unknown expression node");
}

} // namespace

Jet2 jet_of(const Expr& e, Point2 base, int order, const JetOptions& opt) {
  Jet2 j = Jet2Builder{base, opt}.build(e, order, opt.need_value);
  if (!j.is_finite()) throw DomainError("non-finite jet coefficient");
  return j;
}

Jet3 jet_of(const Expr& e, Point3 base, int order) {
  Jet3 j = build3(e, {base.x, base.y, base.z}, order);
  if (!j.is_finite()) throw DomainError("non-finite jet coefficient");
  return j;
}

} // namespace charpt
