#include "charpt/polynomial.hpp"

#include <cmath>
#include <stdexcept>

#include "charpt/errors.hpp"

namespace charpt {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

} // namespace

Polynomial::Polynomial(int degree) : degree_(degree), c_(static_cast<std::size_t>(index(0, degree) + 1), 0.0) {}

Polynomial Polynomial::constant(double c) {
  Polynomial p;
  p.c_[0] = c;
  return p;
}

Polynomial Polynomial::x() {
  Polynomial p(1);
  p.set_coeff(1, 0, 1.0);
  return p;
}

Polynomial Polynomial::y() {
  Polynomial p(1);
  p.set_coeff(0, 1, 1.0);
  return p;
}

double Polynomial::coeff(int i, int j) const {
  if (i < 0 || j < 0 || i + j > degree_) return 0.0;
  return c_[index(i, j)];
}

void Polynomial::grow(int degree) {
  if (degree <= degree_) return;
  c_.resize(static_cast<std::size_t>(index(0, degree) + 1), 0.0);
  degree_ = degree;
}

void Polynomial::trim() {
  while (degree_ > 0) {
    bool zero = true;
    for (int j = 0; j <= degree_; ++j) {
      if (c_[index(degree_ - j, j)] != 0.0) {
        zero = false;
        break;
      }
    }
    if (!zero) break;
    --degree_;
  }
  c_.resize(static_cast<std::size_t>(index(0, degree_) + 1));
}

void Polynomial::set_coeff(int i, int j, double c) {
  grow(i + j);
  c_[index(i, j)] = c;
}

void Polynomial::add_to_coeff(int i, int j, double c) {
  grow(i + j);
  c_[index(i, j)] += c;
}

bool Polynomial::is_zero() const {
  for (double c : c_)
    if (c != 0.0) return false;
  return true;
}

double Polynomial::operator()(Point2 p) const {
  // Horner in y for each x-power, then Horner in x.
  double acc = 0.0;
  for (int i = degree_; i >= 0; --i) {
    double inner = 0.0;
    for (int j = degree_ - i; j >= 0; --j) inner = inner * p.y + c_[index(i, j)];
    acc = acc * p.x + inner;
  }
  return acc;
}

double Polynomial::abs_eval(Point2 p) const {
  const double ax = std::abs(p.x);
  const double ay = std::abs(p.y);
  double acc = 0.0;
  for (int i = degree_; i >= 0; --i) {
    double inner = 0.0;
    for (int j = degree_ - i; j >= 0; --j) inner = inner * ay + std::abs(c_[index(i, j)]);
    acc = acc * ax + inner;
  }
  return acc;
}

Polynomial Polynomial::derivative_x() const {
  Polynomial d(std::max(degree_ - 1, 0));
  for (int s = 1; s <= degree_; ++s)
    for (int j = 0; j <= s; ++j) {
      const int i = s - j;
      if (i > 0) d.c_[index(i - 1, j)] = i * c_[index(i, j)];
    }
  d.trim();
  return d;
}

Polynomial Polynomial::derivative_y() const {
  Polynomial d(std::max(degree_ - 1, 0));
  for (int s = 1; s <= degree_; ++s)
    for (int j = 1; j <= s; ++j) d.c_[index(s - j, j - 1)] = j * c_[index(s - j, j)];
  d.trim();
  return d;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  Polynomial r = a;
  r.grow(b.degree_);
  for (std::size_t k = 0; k < b.c_.size(); ++k) r.c_[k] += b.c_[k];
  r.trim();
  return r;
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  for (double& c : r.c_) c = -c;
  return r;
}

Polynomial operator*(double s, const Polynomial& a) {
  Polynomial r = a;
  for (double& c : r.c_) c *= s;
  r.trim();
  return r;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial r(a.degree_ + b.degree_);
  for (int sa = 0; sa <= a.degree_; ++sa)
    for (int ja = 0; ja <= sa; ++ja) {
      const double ca = a.c_[Polynomial::index(sa - ja, ja)];
      if (ca == 0.0) continue;
      for (int sb = 0; sb <= b.degree_; ++sb)
        for (int jb = 0; jb <= sb; ++jb) {
          const double cb = b.c_[Polynomial::index(sb - jb, jb)];
          if (cb == 0.0) continue;
          r.c_[Polynomial::index(sa - ja + sb - jb, ja + jb)] += ca * cb;
        }
    }
  r.trim();
  return r;
}

Polynomial Polynomial::pow(int n) const {
  if (n < 0) throw std::invalid_argument("Polynomial::pow: negative exponent");
  Polynomial result = constant(1.0);
  Polynomial base = *this;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

Polynomial Polynomial::affine_substitute(Point2 shift, const Mat2& m) const {
  Polynomial lx = constant(shift.x) + m[0][0] * x() + m[0][1] * y();
  Polynomial ly = constant(shift.y) + m[1][0] * x() + m[1][1] * y();
  std::vector<Polynomial> px{constant(1.0)};
  std::vector<Polynomial> py{constant(1.0)};
  for (int k = 1; k <= degree_; ++k) {
    px.push_back(px.back() * lx);
    py.push_back(py.back() * ly);
  }
  Polynomial r;
  for (int s = 0; s <= degree_; ++s)
    for (int j = 0; j <= s; ++j) {
      const double c = c_[index(s - j, j)];
      if (c != 0.0) r = r + c * (px[s - j] * py[j]);
    }
  return r;
}

std::vector<double> Polynomial::taylor(Point2 base, int order) const {
  std::vector<double> out(static_cast<std::size_t>(index(0, order) + 1), 0.0);
  // Powers of the base coordinates.
  std::vector<double> bx(degree_ + 1, 1.0), by(degree_ + 1, 1.0);
  for (int k = 1; k <= degree_; ++k) {
    bx[k] = bx[k - 1] * base.x;
    by[k] = by[k - 1] * base.y;
  }
  for (int s = 0; s <= degree_; ++s)
    for (int j = 0; j <= s; ++j) {
      const int i = s - j;
      const double c = c_[index(i, j)];
      if (c == 0.0) continue;
      for (int m = 0; m <= std::min(i, order); ++m)
        for (int n = 0; n <= std::min(j, order - m); ++n)
          out[index(m, n)] += c * binomial(i, m) * binomial(j, n) * bx[i - m] * by[j - n];
    }
  return out;
}

namespace {

std::optional<double> constant_value(const Expr& e) {
  if (depends_on_x(e) || depends_on_y(e) || depends_on_z(e)) return std::nullopt;
  try {
    return eval_point(e, Point2{0.0, 0.0});
  } catch (const Error&) {
    return std::nullopt;
  }
}

} // namespace

std::optional<Polynomial> to_polynomial(const Expr& e) {
  switch (e->kind) {
  case NodeKind::constant:
    return Polynomial::constant(e->value);
  case NodeKind::var_x:
    return Polynomial::x();
  case NodeKind::var_y:
    return Polynomial::y();
  case NodeKind::var_z:
    return std::nullopt;
  case NodeKind::add:
  case NodeKind::sub:
  case NodeKind::mul: {
    auto a = to_polynomial(e->children[0]);
    if (!a) return std::nullopt;
    auto b = to_polynomial(e->children[1]);
    if (!b) return std::nullopt;
    if (e->kind == NodeKind::add) return *a + *b;
    if (e->kind == NodeKind::sub) return *a - *b;
    return *a * *b;
  }
  case NodeKind::div: {
    auto a = to_polynomial(e->children[0]);
    if (!a) return std::nullopt;
    auto d = constant_value(e->children[1]);
    if (!d || *d == 0.0) return std::nullopt;
    return (1.0 / *d) * *a;
  }
  case NodeKind::pow: {
    if (e->exponent < 0) {
      auto c = constant_value(e);
      if (c) return Polynomial::constant(*c);
      return std::nullopt;
    }
    auto a = to_polynomial(e->children[0]);
    if (!a) return std::nullopt;
    return a->pow(e->exponent);
  }
  case NodeKind::neg: {
    auto a = to_polynomial(e->children[0]);
    if (!a) return std::nullopt;
    return -*a;
  }
  case NodeKind::call:
  case NodeKind::antider_x: {
    auto c = constant_value(e);
    if (c) return Polynomial::constant(*c);
    return std::nullopt;
  }
  }
  return std::nullopt;
}

} // namespace charpt
