#include "charpt/surface.hpp"

#include <cmath>

#include "charpt/errors.hpp"

namespace charpt {

GraphSurface::GraphSurface(Expr g, std::string source, Window window)
    : g_(std::move(g)), source_(std::move(source)), window_(window) {
  if (!window_.valid()) throw ConfigError("empty window");
  if (depends_on_z(g_)) throw DomainError("surface expression must not depend on z");
  for (const Expr& s : summands(g_)) {
    if (auto p = to_polynomial(s))
      poly_orig_ = poly_orig_ + *p;
    else
      terms_.push_back(s);
  }
  poly_ = poly_orig_;
}

GraphSurface GraphSurface::parse(const std::string& text, Window window) {
  return GraphSurface(parse_expr(text), text, window);
}

bool GraphSurface::has_flat() const {
  for (const Expr& t : terms_)
    if (contains_builtin(t, Builtin::flat)) return true;
  return false;
}

GraphSurface GraphSurface::in_chart(Point2 p, double a, double b) const {
  GraphSurface s = *this;
  s.chart_ = Chart{p, a, b};
  s.q_ = {};
  Polynomial local = poly_orig_.affine_substitute(p, Mat2{{{a, -b}, {b, a}}});
  // Left translation by -p adds (p_y X - p_x Y)/2 with (X, Y) = R v.
  local.add_to_coeff(1, 0, 0.5 * (p.y * a - p.x * b));
  local.add_to_coeff(0, 1, 0.5 * (-p.y * b - p.x * a));
  local.set_coeff(0, 0, 0.0);
  s.poly_ = local;
  s.absorb_quadratic();
  return s;
}

void GraphSurface::absorb_quadratic() {
  q_.q20 += 2.0 * poly_.coeff(2, 0);
  q_.q11 += poly_.coeff(1, 1);
  q_.q02 += 2.0 * poly_.coeff(0, 2);
  poly_.set_coeff(2, 0, 0.0);
  poly_.set_coeff(1, 1, 0.0);
  poly_.set_coeff(0, 2, 0.0);
}

void GraphSurface::set_quadratic(const QuadraticPart& q) {
  poly_.add_to_coeff(2, 0, 0.5 * (q_.q20 - q.q20));
  poly_.add_to_coeff(1, 1, q_.q11 - q.q11);
  poly_.add_to_coeff(0, 2, 0.5 * (q_.q02 - q.q02));
  q_ = q;
}

Jet2 rotate_jet(const Jet2& j, double a, double b) {
  if (a == 1.0 && b == 0.0) return j;
  const int d = j.order();
  const std::array<double, 2> base = j.base();
  Jet2 X(d, base), Y(d, base);
  if (d >= 1) {
    X.set_coeff({1, 0}, a);
    X.set_coeff({0, 1}, -b);
    Y.set_coeff({1, 0}, b);
    Y.set_coeff({0, 1}, a);
  }
  std::vector<Jet2> px{Jet2::constant(1.0, d, base)}, py{Jet2::constant(1.0, d, base)};
  for (int k = 1; k <= d; ++k) {
    px.push_back(px.back() * X);
    py.push_back(py.back() * Y);
  }
  Jet2 r(d, base);
  for (std::size_t idx = 0; idx < j.size(); ++idx) {
    const double c = j[idx];
    if (c == 0.0) continue;
    const auto& e = Jet2::exponent_of(idx);
    r += c * (px[static_cast<std::size_t>(e[0])] * py[static_cast<std::size_t>(e[1])]);
  }
  return r;
}

Jet2 GraphSurface::h_jet(Point2 v, int order, bool need_value) const {
  const std::array<double, 2> base{v.x, v.y};
  Jet2 r(order, base);
  const std::vector<double> pc = poly_.taylor(v, order);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = pc[i];
  if (terms_.empty()) return r;
  const Point2 q = chart_.to_original(v);
  JetOptions opt;
  opt.need_value = need_value;
  for (const Expr& t : terms_) {
    Jet2 tj = rotate_jet(jet_of(t, q, order, opt), chart_.a, chart_.b);
    if (need_value && !(chart_.origin.x == 0.0 && chart_.origin.y == 0.0)) tj[0] -= eval_point(t, chart_.origin);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += tj[i];
  }
  return r;
}

Jet2 GraphSurface::local_jet(Point2 v, int order, bool need_value) const {
  Jet2 r = h_jet(v, order, need_value);
  // Q expanded at v.
  r[0] += 0.5 * q_.q20 * v.x * v.x + q_.q11 * v.x * v.y + 0.5 * q_.q02 * v.y * v.y;
  if (order >= 1) {
    r[Jet2::index({1, 0})] += q_.q20 * v.x + q_.q11 * v.y;
    r[Jet2::index({0, 1})] += q_.q11 * v.x + q_.q02 * v.y;
  }
  if (order >= 2) {
    r[Jet2::index({2, 0})] += 0.5 * q_.q20;
    r[Jet2::index({1, 1})] += q_.q11;
    r[Jet2::index({0, 2})] += 0.5 * q_.q02;
  }
  return r;
}

double GraphSurface::local_value(Point2 v) const { return local_jet(v, 0, true).value(); }

double GraphSurface::original_z(Point2 v) const { return eval_point(g_, chart_.to_original(v)); }

} // namespace charpt
