#include "charpt/geometry.hpp"

#include <cmath>

#include "charpt/errors.hpp"

namespace charpt {

FrameModel FrameModel::heisenberg(double theta) {
  FrameModel f;
  f.kind_ = FrameKind::heisenberg;
  f.theta_ = theta;
  return f;
}

FrameModel FrameModel::contact(Expr beta, Expr gamma, double theta) {
  if (!beta || !gamma) throw FrameError("contact frame needs both beta and gamma");
  if (contains_antider(beta) || contains_antider(gamma))
    throw FrameError("frame coefficients may not use antider_x");
  FrameModel f;
  f.kind_ = FrameKind::contact_normal_form;
  f.theta_ = theta;
  f.beta_ = std::move(beta);
  f.gamma_ = std::move(gamma);
  constexpr double tol = 1e-10;
  for (int k = -4; k <= 4; ++k) {
    const Point3 p{0.0, 0.0, 0.25 * k};
    const Jet3 b = jet_of(f.beta_, p, 0);
    const Jet3 g = jet_of(f.gamma_, p, 1);
    if (std::abs(b.value()) > tol || std::abs(g.value()) > tol || std::abs(g.coeff({1, 0, 0})) > tol ||
        std::abs(g.coeff({0, 1, 0})) > tol)
      throw FrameError("contact normal form requires beta = gamma = d_x gamma = d_y gamma = 0 on the z-axis (violated at z = " +
                       std::to_string(p.z) + ")");
  }
  return f;
}

FrameModel FrameModel::rotated(double dtheta) const {
  FrameModel f = *this;
  f.theta_ += dtheta;
  return f;
}

std::array<std::array<Jet3, 3>, 2> FrameModel::coefficients(Point3 p, int order) const {
  const std::array<double, 3> base{p.x, p.y, p.z};
  const Jet3 x = Jet3::variable(0, order, base);
  const Jet3 y = Jet3::variable(1, order, base);
  const Jet3 one = Jet3::constant(1.0, order, base);
  const Jet3 zero(order, base);
  std::array<std::array<Jet3, 3>, 2> c{{{one, zero, -0.5 * y}, {zero, one, 0.5 * x}}};
  if (kind_ == FrameKind::contact_normal_form) {
    const Jet3 b = jet_of(beta_, p, order);
    const Jet3 g = jet_of(gamma_, p, order);
    const Jet3 bx = b * x;
    const Jet3 by = b * y;
    c[0][0] += by * y;
    c[0][1] -= by * x;
    c[0][2] += g * y;
    c[1][0] -= bx * y;
    c[1][1] += bx * x;
    c[1][2] += g * x;
  }
  if (theta_ != 0.0) {
    const double cs = std::cos(theta_);
    const double sn = std::sin(theta_);
    std::array<std::array<Jet3, 3>, 2> r = c;
    for (int k = 0; k < 3; ++k) {
      r[0][k] = cs * c[0][k] + sn * c[1][k];
      r[1][k] = -sn * c[0][k] + cs * c[1][k];
    }
    return r;
  }
  return c;
}

namespace {

// Generic assembly from first/second partials of u and the frame coefficients.
HorizontalData assemble(const FrameModel& frame, Point3 p, const std::array<double, 3>& du,
                        const std::array<std::array<double, 3>, 3>& d2u) {
  const auto c = frame.coefficients(p, 1);
  auto val = [&](int i, int k) { return c[i][k].value(); };
  auto der = [&](int i, int k, int l) {
    std::array<int, 3> e{0, 0, 0};
    e[l] = 1;
    return c[i][k].coeff(e);
  };
  HorizontalData hd;
  hd.point = {p.x, p.y};
  double xu[2];
  for (int i = 0; i < 2; ++i) {
    xu[i] = 0.0;
    for (int k = 0; k < 3; ++k) xu[i] += val(i, k) * du[k];
  }
  hd.X1u = xu[0];
  hd.X2u = xu[1];
  hd.W = std::hypot(xu[0], xu[1]);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double s = 0.0;
      for (int l = 0; l < 3; ++l) {
        double inner = 0.0;
        for (int k = 0; k < 3; ++k) inner += der(j, k, l) * du[k] + val(j, k) * d2u[l][k];
        s += val(i, l) * inner;
      }
      hd.second[i][j] = s;
    }
  double lap = hd.second[0][0] + hd.second[1][1];
  for (int i = 0; i < 2; ++i) {
    double div = 0.0;
    for (int k = 0; k < 3; ++k) div += der(i, k, k);
    lap += xu[i] * div;
  }
  hd.subLaplacian = lap;
  // Coefficient matrix rows X_1, X_2, d_z.
  const double m00 = val(0, 0), m01 = val(0, 1), m10 = val(1, 0), m11 = val(1, 1);
  hd.frame_volume = std::abs(m00 * m11 - m01 * m10);
  return hd;
}

} // namespace

HorizontalData horizontal_data(const FrameModel& frame, const GraphSurface& surf, Point2 v) {
  if (frame.plain_heisenberg()) {
    // Split form: g~ = Q + h keeps the +-1/2 frame terms exact.
    const Jet2 h = surf.h_jet(v, 2, false);
    const QuadraticPart& q = surf.quadratic();
    const double h10 = h.coeff({1, 0}), h01 = h.coeff({0, 1});
    const double h20 = h.coeff({2, 0}), h11 = h.coeff({1, 1}), h02 = h.coeff({0, 2});
    HorizontalData hd;
    hd.point = v;
    hd.X1u = -(q.q20 * v.x + (q.q11 + 0.5) * v.y + h10);
    hd.X2u = -((q.q11 - 0.5) * v.x + q.q02 * v.y + h01);
    hd.W = std::hypot(hd.X1u, hd.X2u);
    hd.second[0][0] = -(q.q20 + 2.0 * h20);
    hd.second[0][1] = -((q.q11 - 0.5) + h11);
    hd.second[1][0] = -((q.q11 + 0.5) + h11);
    hd.second[1][1] = -(q.q02 + 2.0 * h02);
    hd.subLaplacian = hd.second[0][0] + hd.second[1][1];
    hd.frame_volume = 1.0;
    return hd;
  }
  const bool need_z = frame.depends_on_height();
  const Jet2 g = surf.local_jet(v, 2, need_z);
  const std::array<double, 3> du{-g.coeff({1, 0}), -g.coeff({0, 1}), 1.0};
  const double gxx = 2.0 * g.coeff({2, 0}), gxy = g.coeff({1, 1}), gyy = 2.0 * g.coeff({0, 2});
  const std::array<std::array<double, 3>, 3> d2u{{{-gxx, -gxy, 0.0}, {-gxy, -gyy, 0.0}, {0.0, 0.0, 0.0}}};
  HorizontalData hd = assemble(frame, Point3{v.x, v.y, need_z ? g.value() : 0.0}, du, d2u);
  hd.point = v;
  return hd;
}

HorizontalData horizontal_data_implicit(const FrameModel& frame, const Expr& u, Point3 p) {
  const Jet3 j = jet_of(u, p, 2);
  const std::array<double, 3> du{j.coeff({1, 0, 0}), j.coeff({0, 1, 0}), j.coeff({0, 0, 1})};
  if (std::abs(du[0]) + std::abs(du[1]) + std::abs(du[2]) < 1e-14)
    throw SubmersionError("du vanishes at (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ", " +
                          std::to_string(p.z) + ")");
  std::array<std::array<double, 3>, 3> d2u{};
  for (int l = 0; l < 3; ++l)
    for (int k = 0; k < 3; ++k) {
      std::array<int, 3> e{0, 0, 0};
      e[l] += 1;
      e[k] += 1;
      d2u[l][k] = j.partial(e);
    }
  return assemble(frame, p, du, d2u);
}

double mean_curvature(const HorizontalData& hd, double w_min) {
  if (!(hd.W >= w_min))
    throw CharacteristicPointError("horizontal gradient vanishes at (" + std::to_string(hd.point.x) + ", " +
                                   std::to_string(hd.point.y) + ")");
  const double n[2] = {hd.X1u / hd.W, hd.X2u / hd.W};
  double quad = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) quad += n[i] * n[j] * hd.second[i][j];
  return (-hd.subLaplacian + quad) / hd.W;
}

double mean_curvature(const FrameModel& frame, const GraphSurface& surf, Point2 v, double w_min) {
  return mean_curvature(horizontal_data(frame, surf, v), w_min);
}

double mean_curvature_implicit(const FrameModel& frame, const Expr& u, Point3 p, double w_min) {
  return mean_curvature(horizontal_data_implicit(frame, u, p), w_min);
}

double riemannian_density(const HorizontalData& hd) { return std::hypot(1.0, hd.W) / hd.frame_volume; }

double sub_riemannian_density(const HorizontalData& hd) { return hd.W / hd.frame_volume; }

double c0_bound(const FrameModel& frame, const GraphSurface& surf, const Window& region, int level) {
  if (!region.valid()) throw ConfigError("c0_bound: empty region");
  const int n = (1 << level) + 1;
  double best = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Point2 v{region.x0 + (region.x1 - region.x0) * i / (n - 1), region.y0 + (region.y1 - region.y0) * j / (n - 1)};
      const HorizontalData hd = horizontal_data(frame, surf, v);
      double s = std::abs(hd.subLaplacian);
      for (const auto& row : hd.second)
        for (double e : row) s += std::abs(e);
      best = std::max(best, s);
    }
  return best;
}

} // namespace charpt
