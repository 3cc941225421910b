#include "charpt/charlocus.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>

#include "charpt/errors.hpp"

namespace charpt {

const char* to_string(PointClass c) {
  switch (c) {
  case PointClass::nondegenerate: return "nondegenerate";
  case PointClass::mildly_degenerate: return "mildly_degenerate";
  case PointClass::not_mildly_degenerate: return "not_mildly_degenerate";
  case PointClass::non_isolated: return "non_isolated";
  case PointClass::unresolved: return "unresolved";
  }
  return "unresolved";
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Residual {
  double f1 = 0.0;
  double f2 = 0.0;
  bool ok = false;
  double norm1() const { return std::abs(f1) + std::abs(f2); }
  double norm2sq() const { return f1 * f1 + f2 * f2; }
};

Residual residual(const FrameModel& frame, const GraphSurface& surf, Point2 v) {
  try {
    const HorizontalData hd = horizontal_data(frame, surf, v);
    return {hd.X1u, hd.X2u, std::isfinite(hd.X1u) && std::isfinite(hd.X2u)};
  } catch (const DomainError&) {
    return {};
  } catch (const QuadratureError&) {
    return {};
  }
}

// d(X1u, X2u)/d(x, y); rows are components.
Mat2 jacobian(const FrameModel& frame, const GraphSurface& surf, Point2 v, double h) {
  if (frame.plain_heisenberg()) {
    // X1u = -g_x - y/2, X2u = -g_y + x/2, so the Jacobian is the transposed Hessian.
    const HorizontalData hd = horizontal_data(frame, surf, v);
    return Mat2{{{hd.second[0][0], hd.second[1][0]}, {hd.second[0][1], hd.second[1][1]}}};
  }
  const Residual xp = residual(frame, surf, {v.x + h, v.y});
  const Residual xm = residual(frame, surf, {v.x - h, v.y});
  const Residual yp = residual(frame, surf, {v.x, v.y + h});
  const Residual ym = residual(frame, surf, {v.x, v.y - h});
  if (!(xp.ok && xm.ok && yp.ok && ym.ok)) throw DomainError("Jacobian stencil leaves the domain");
  return Mat2{{{(xp.f1 - xm.f1) / (2 * h), (yp.f1 - ym.f1) / (2 * h)},
               {(xp.f2 - xm.f2) / (2 * h), (yp.f2 - ym.f2) / (2 * h)}}};
}

struct NewtonOutcome {
  Point2 p;
  Residual r;
  bool converged;
};

// Levenberg-Marquardt on (X1u, X2u) = 0. Iterates until the step is at the
// roundoff level so that degenerate (slowly converging) roots are polished.
NewtonOutcome refine(const FrameModel& frame, const GraphSurface& surf, Point2 v, const Window& box, double size,
                     const CharLocusOptions& opt) {
  Residual r = residual(frame, surf, v);
  if (!r.ok) return {v, r, false};
  double lambda = 1e-6;
  const double fd_h = 1e-6 * size;
  for (int it = 0; it < opt.max_newton_iterations; ++it) {
    if (r.f1 == 0.0 && r.f2 == 0.0) break;
    Mat2 J;
    try {
      J = jacobian(frame, surf, v, fd_h);
    } catch (const Error&) {
      break;
    }
    const double a11 = J[0][0] * J[0][0] + J[1][0] * J[1][0];
    const double a12 = J[0][0] * J[0][1] + J[1][0] * J[1][1];
    const double a22 = J[0][1] * J[0][1] + J[1][1] * J[1][1];
    const double g1 = J[0][0] * r.f1 + J[1][0] * r.f2;
    const double g2 = J[0][1] * r.f1 + J[1][1] * r.f2;
    const double scale = std::max(a11 + a22, 1e-300);
    bool accepted = false;
    Point2 step{};
    for (int tries = 0; tries < 40; ++tries) {
      const double m11 = a11 + lambda * scale;
      const double m22 = a22 + lambda * scale;
      const double d = m11 * m22 - a12 * a12;
      if (d == 0.0 || !std::isfinite(d)) {
        lambda *= 10.0;
        continue;
      }
      step = {-(m22 * g1 - a12 * g2) / d, -(m11 * g2 - a12 * g1) / d};
      const Point2 vn = v + step;
      const Residual rn = residual(frame, surf, vn);
      if (rn.ok && rn.norm2sq() < r.norm2sq()) {
        v = vn;
        r = rn;
        lambda = std::max(lambda * 0.1, 1e-15);
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) break;
    if (!box.contains(v)) return {v, r, false};
    if (step.norm() <= 1e-15 * size) break;
  }
  return {v, r, r.ok && r.norm1() <= opt.tol_char};
}

double window_size(const Window& w) { return std::max(w.width(), w.height()); }

} // namespace

RootSearch find_characteristic_points(const FrameModel& frame, const GraphSurface& surf, const Window& window,
                                      int grid_n, const CharLocusOptions& opt) {
  if (grid_n < 16) throw ConfigError("grid_n must be at least 16");
  if (!window.valid()) throw ConfigError("empty search window");
  RootSearch out;
  const int n = grid_n;
  const double hx = window.width() / n;
  const double hy = window.height() / n;
  const double size = window_size(window);
  auto node = [&](int i, int j) { return Point2{window.x0 + hx * i, window.y0 + hy * j}; };
  std::vector<Residual> F(static_cast<std::size_t>((n + 1) * (n + 1)));
  auto at = [&](int i, int j) -> Residual& { return F[static_cast<std::size_t>(i * (n + 1) + j)]; };
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) at(i, j) = residual(frame, surf, node(i, j));

  std::vector<Point2> seeds;
  // Cells in which both components change sign (or vanish).
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Residual* c[4] = {&at(i, j), &at(i + 1, j), &at(i, j + 1), &at(i + 1, j + 1)};
      bool ok = true;
      double lo1 = INFINITY, hi1 = -INFINITY, lo2 = INFINITY, hi2 = -INFINITY;
      for (const Residual* r : c) {
        ok = ok && r->ok;
        lo1 = std::min(lo1, r->f1);
        hi1 = std::max(hi1, r->f1);
        lo2 = std::min(lo2, r->f2);
        hi2 = std::max(hi2, r->f2);
      }
      if (ok && lo1 <= 0.0 && hi1 >= 0.0 && lo2 <= 0.0 && hi2 >= 0.0)
        seeds.push_back({window.x0 + hx * (i + 0.5), window.y0 + hy * (j + 0.5)});
    }
  // Local minima of |F| on the node lattice.
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      const Residual& r = at(i, j);
      if (!r.ok) continue;
      bool minimum = true;
      for (int di = -1; di <= 1 && minimum; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const int a = i + di, b = j + dj;
          if (a < 0 || a > n || b < 0 || b > n) continue;
          const Residual& s = at(a, b);
          if (s.ok && s.norm1() < r.norm1()) {
            minimum = false;
            break;
          }
        }
      if (minimum) seeds.push_back(node(i, j));
    }
  out.seeds = seeds.size();

  Window box = window;
  box.x0 -= hx;
  box.x1 += hx;
  box.y0 -= hy;
  box.y1 += hy;
  std::vector<FoundPoint> roots;
  for (const Point2& s : seeds) {
    const NewtonOutcome o = refine(frame, surf, s, box, size, opt);
    if (!o.converged || !window.contains(o.p)) {
      ++out.diverged_seeds;
      continue;
    }
    roots.push_back({o.p, o.r.norm1(), true, false});
  }
  // Coalesce duplicates, keeping the smallest residual.
  std::stable_sort(roots.begin(), roots.end(), [](const FoundPoint& a, const FoundPoint& b) { return a.residual < b.residual; });
  const double merge = opt.merge_radius * size;
  for (const FoundPoint& r : roots) {
    bool dup = false;
    for (const FoundPoint& k : out.points)
      if ((r.p - k.p).norm() <= merge) {
        dup = true;
        break;
      }
    if (!dup) out.points.push_back(r);
  }
  std::sort(out.points.begin(), out.points.end(), [](const FoundPoint& a, const FoundPoint& b) {
    return a.p.x != b.p.x ? a.p.x < b.p.x : a.p.y < b.p.y;
  });
  const double iso = opt.isolation_radius * size;
  for (FoundPoint& p : out.points) {
    for (const FoundPoint& q : out.points)
      if (&p != &q && (p.p - q.p).norm() < iso) p.isolated = false;
    const double margin = std::min({p.p.x - window.x0, window.x1 - p.p.x, p.p.y - window.y0, window.y1 - p.p.y});
    if (margin < std::max(hx, hy)) {
      p.near_boundary = true;
      out.warnings.push_back("WindowBoundaryWarning: root (" + std::to_string(p.p.x) + ", " + std::to_string(p.p.y) +
                             ") lies within one grid cell of the window boundary");
    }
  }
  if (out.diverged_seeds > 0)
    out.warnings.push_back("NewtonDivergence: " + std::to_string(out.diverged_seeds) + " of " +
                           std::to_string(out.seeds) + " seeds did not converge to a characteristic point");
  return out;
}

std::vector<std::vector<FoundPoint>> cluster_points(const std::vector<FoundPoint>& pts, double radius) {
  const std::size_t n = pts.size();
  std::vector<int> label(n, -1);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] >= 0) continue;
    label[i] = next;
    std::vector<std::size_t> stack{i};
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      for (std::size_t b = 0; b < n; ++b)
        if (label[b] < 0 && (pts[a].p - pts[b].p).norm() < radius) {
          label[b] = next;
          stack.push_back(b);
        }
    }
    ++next;
  }
  std::vector<std::vector<FoundPoint>> out(static_cast<std::size_t>(next));
  for (std::size_t i = 0; i < n; ++i) out[static_cast<std::size_t>(label[i])].push_back(pts[i]);
  return out;
}

CharPointRecord hessian_at(const FrameModel& frame, const GraphSurface& surf, Point2 p, const CharLocusOptions& opt) {
  const HorizontalData hd = horizontal_data(frame, surf, p);
  const double res = std::abs(hd.X1u) + std::abs(hd.X2u);
  if (!(res <= opt.tol_char))
    throw NotCharacteristic("|X1u| + |X2u| = " + std::to_string(res) + " exceeds the characteristic tolerance");
  CharPointRecord rec;
  rec.location = p;
  rec.original = surf.to_original(p);
  rec.z = surf.original_z(p);
  rec.hessian = hd.second;
  rec.det = det(hd.second);
  const Jet2 g = surf.local_jet(p, 2, false);
  const double g20 = 2.0 * g.coeff({2, 0}), g11 = g.coeff({1, 1}), g02 = 2.0 * g.coeff({0, 2});
  rec.det_graph = g20 * g02 - g11 * g11 + 0.25;
  double m = 0.0;
  for (const auto& row : hd.second)
    for (double e : row) m = std::max(m, std::abs(e));
  rec.det_scale = m * m;
  rec.degenerate = std::abs(rec.det) <= opt.tol_degenerate * rec.det_scale;
  rec.ill_conditioned = !rec.degenerate && std::abs(rec.det) < opt.tol_ill_conditioned * rec.det_scale;
  rec.W0 = std::hypot(hd.second[1][0], hd.second[0][0]);
  return rec;
}

KernelFrame kernel_frame(const CharPointRecord& rec, const CharLocusOptions& opt) {
  const Mat2& H = rec.hessian;
  double m = 0.0;
  for (const auto& row : H)
    for (double e : row) m = std::max(m, std::abs(e));
  if (m < 1e-12) throw ZeroHessian("horizontal Hessian vanishes identically; the frame is not bracket generating");
  if (std::abs(rec.det) > opt.tol_degenerate * m * m)
    throw NotDegenerate("det = " + std::to_string(rec.det) + " is not zero within tolerance");
  // Left kernel: rows of H^T give two candidate normals; take the better conditioned.
  Point2 v1{-H[1][0], H[0][0]};
  Point2 v2{-H[1][1], H[0][1]};
  Point2 v = v1.norm() >= v2.norm() ? v1 : v2;
  const double len = v.norm();
  v = {v.x / len, v.y / len};
  if (v.x < 0.0 || (v.x == 0.0 && v.y < 0.0)) v = {-v.x, -v.y};
  if (v.x == 0.0) v.x = 0.0; // normalise -0
  if (v.y == 0.0) v.y = 0.0;
  KernelFrame kf;
  kf.N = v;
  kf.T = {v.y == 0.0 ? 0.0 : -v.y, v.x};
  kf.theta = std::atan2(v.y, v.x);
  return kf;
}

double nt_u(const Mat2& H, const KernelFrame& kf) {
  const double n[2] = {kf.N.x, kf.N.y};
  const double t[2] = {kf.T.x, kf.T.y};
  double s = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) s += n[i] * t[j] * H[i][j];
  return s;
}

double tn_u(const Mat2& H, const KernelFrame& kf) {
  const double n[2] = {kf.N.x, kf.N.y};
  const double t[2] = {kf.T.x, kf.T.y};
  double s = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) s += t[i] * n[j] * H[i][j];
  return s;
}

NormalForm rotate_to_normal_form(const GraphSurface& surf, const CharPointRecord& rec, const CharLocusOptions& opt) {
  if (!rec.degenerate) throw NotDegenerate("normal form requires a degenerate characteristic point");
  const KernelFrame kf = kernel_frame(rec, opt);
  // Compose the input chart rotation with the kernel rotation.
  const Chart& c = surf.chart();
  const double a = c.a * kf.N.x - c.b * kf.N.y;
  const double b = c.a * kf.N.y + c.b * kf.N.x;
  NormalForm nf{surf.in_chart(rec.original, a, b), 0.0, 0.0, 0.0};
  const Jet2 g = nf.surface.local_jet({0.0, 0.0}, 2, false);
  nf.residual_xx = g.coeff({2, 0});
  nf.residual_xy = g.coeff({1, 1}) - 0.5;
  if (std::abs(nf.residual_xx) > opt.tol_nf || std::abs(nf.residual_xy) > opt.tol_nf)
    throw NormalFormResidual("normal-form coefficients miss their targets: x^2 -> " + std::to_string(nf.residual_xx) +
                             ", xy - 1/2 -> " + std::to_string(nf.residual_xy));
  nf.alpha = 2.0 * g.coeff({0, 2});
  nf.surface.set_quadratic({0.0, 0.5, nf.alpha});
  return nf;
}

CriticalCurve trace_critical_curve(const NormalForm& nf, const CurveOptions& copt) {
  CriticalCurve out;
  const GraphSurface& s = nf.surface;
  const QuadraticPart& q = s.quadratic();
  const Polynomial py = s.polynomial_part().derivative_y();
  for (int side : {-1, 1}) {
    std::vector<CurveSample>& dst = side < 0 ? out.negative : out.positive;
    for (int i = 0; i < copt.levels; ++i) {
      const double x = side * copt.x_max * std::pow(copt.ratio, i);
      CurveSample smp;
      smp.x_param = x;
      double y = 0.0;
      bool converged = false;
      std::string failure;
      try {
        for (int it = 0; it < 100; ++it) {
          const Jet2 h = s.h_jet({x, y}, 2, false);
          const double t = q.q20 * x + (q.q11 + 0.5) * y + h.coeff({1, 0});
          const double dt = (q.q11 + 0.5) + h.coeff({1, 1});
          if (std::abs(dt) < 1e-6) {
            failure = "JacobianDegenerate";
            break;
          }
          const double step = t / dt;
          y -= step;
          if (t == 0.0 || std::abs(step) <= 4.0 * kEps * std::abs(y)) {
            const Jet2 hc = s.h_jet({x, y}, 1, false);
            const double tr = q.q20 * x + (q.q11 + 0.5) * y + hc.coeff({1, 0});
            converged = std::abs(tr) <= copt.tol_curve * (1.0 + std::abs(x));
            if (!converged) failure = "NewtonDivergence";
            break;
          }
        }
      } catch (const Error& e) {
        failure = e.what();
      }
      if (!converged) {
        out.gaps.push_back("x = " + std::to_string(x) + ": " + (failure.empty() ? "NewtonDivergence" : failure));
        continue;
      }
      smp.local = {x, y};
      smp.original = s.to_original(smp.local);
      if (!s.window().contains(smp.original)) {
        out.gaps.push_back("x = " + std::to_string(x) + ": CurveLeavesWindow");
        break;
      }
      const Jet2 h = s.h_jet(smp.local, 2, false);
      const double h01 = h.coeff({0, 1});
      smp.xi = -((q.q11 - 0.5) * x + q.q02 * y + h01);
      const double poly_part = py(smp.local);
      const double scale = std::abs((q.q11 - 0.5) * x) + std::abs(q.q02 * y) + py.abs_eval(smp.local) +
                           std::abs(h01 - poly_part);
      const double dxi_dy = std::abs(q.q02 + 2.0 * h.coeff({0, 2}));
      smp.xi_error = 32.0 * kEps * scale + 8.0 * kEps * dxi_dy * std::abs(y);
      smp.valid = std::abs(smp.xi) > 10.0 * smp.xi_error && std::abs(smp.xi) > DBL_MIN;
      if (copt.need_z) {
        try {
          smp.z = s.original_z(smp.local);
        } catch (const Error&) {
          smp.z = NAN;
        }
      }
      dst.push_back(smp);
    }
  }
  return out;
}

namespace {

double ls_slope(const std::vector<double>& lx, const std::vector<double>& ly, std::size_t begin, std::size_t end) {
  const double n = static_cast<double>(end - begin);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxy / sxx;
}

struct SideSummary {
  std::size_t valid = 0;
  bool all_zero = true;
  bool underflow = false;
  bool has_slopes = false;
  double slope_coarse = 0.0;
  double slope_fine = 0.0;
  double finest_x = 0.0;
  double finest_xi = 0.0;
};

SideSummary summarize(const std::vector<CurveSample>& side) {
  SideSummary s;
  std::vector<double> lx, ly;
  bool seen_valid = false;
  for (const CurveSample& c : side) {
    if (c.valid) {
      s.all_zero = false;
      seen_valid = true;
      lx.push_back(std::log(std::abs(c.x_param)));
      ly.push_back(std::log(std::abs(c.xi)));
      s.finest_x = c.x_param;
      s.finest_xi = c.xi;
    } else if (std::abs(c.xi) > 10.0 * c.xi_error) {
      s.all_zero = false;
    } else if (seen_valid && std::abs(c.xi) < DBL_MIN && std::abs(c.x_param) >= 1e-3) {
      // xi collapsed to zero although x is still macroscopic: faster than any power.
      s.underflow = true;
    }
  }
  s.valid = lx.size();
  if (lx.size() >= 5) {
    s.has_slopes = true;
    s.slope_fine = ls_slope(lx, ly, lx.size() - 4, lx.size());
    s.slope_coarse = ls_slope(lx, ly, lx.size() - 5, lx.size() - 1);
  }
  return s;
}

} // namespace

OrderResult xi_order_numeric(const std::vector<CurveSample>& negative, const std::vector<CurveSample>& positive,
                             int k_max) {
  OrderResult r;
  const SideSummary sides[2] = {summarize(negative), summarize(positive)};
  for (const SideSummary& s : sides)
    if (s.has_slopes) {
      r.slopes.push_back(s.slope_coarse);
      r.slopes.push_back(s.slope_fine);
    }
  if (sides[0].all_zero && sides[1].all_zero) {
    r.kind = OrderResult::Kind::identically_zero;
    r.detail = "xi vanishes at every sample within rounding";
    return r;
  }
  for (const SideSummary& s : sides) {
    const bool steep = s.has_slopes && s.slope_coarse > k_max && s.slope_fine > k_max;
    if (s.underflow || steep) {
      r.kind = OrderResult::Kind::no_finite_order;
      r.detail = s.underflow ? "xi underflows while x is not small" : "log-log slope exceeds k_max";
      if (s.has_slopes) r.detail += " (finest slopes " + std::to_string(s.slope_coarse) + ", " + std::to_string(s.slope_fine) + ")";
      return r;
    }
  }
  int k = -1;
  for (const SideSummary& s : sides) {
    if (s.valid < 8) {
      r.kind = OrderResult::Kind::unresolved;
      r.detail = "fewer than 8 valid samples on one side";
      return r;
    }
    const double kc = std::round(s.slope_coarse);
    const double kf = std::round(s.slope_fine);
    if (kc != kf || std::abs(s.slope_coarse - kc) >= 0.15 || std::abs(s.slope_fine - kf) >= 0.15 || (k >= 0 && k != kf)) {
      r.kind = OrderResult::Kind::unresolved;
      r.detail = "OrderAmbiguous: slopes " + std::to_string(s.slope_coarse) + ", " + std::to_string(s.slope_fine);
      return r;
    }
    k = static_cast<int>(kf);
  }
  r.kind = OrderResult::Kind::finite;
  r.k = k;
  r.c0 = sides[1].finest_xi / std::pow(sides[1].finest_x, k);
  r.detail = "two-sided log-log slopes agree";
  return r;
}

namespace {

// f(s, y(s)) for a bivariate jet f at the origin and a univariate series y.
Jet1 compose_curve(const Jet2& f, const Jet1& y) {
  const int d = y.order();
  const Jet1 s = Jet1::variable(0, d);
  std::vector<Jet1> ps{Jet1::constant(1.0, d)}, pyv{Jet1::constant(1.0, d)};
  for (int k = 1; k <= f.order(); ++k) {
    ps.push_back(ps.back() * s);
    pyv.push_back(pyv.back() * y);
  }
  Jet1 r(d);
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    const double c = f[idx];
    if (c == 0.0) continue;
    const auto& e = Jet2::exponent_of(idx);
    r += c * (ps[static_cast<std::size_t>(e[0])] * pyv[static_cast<std::size_t>(e[1])]);
  }
  return r;
}

} // namespace

OrderResult xi_order_exact(const NormalForm& nf, int k_max) {
  OrderResult r;
  if (nf.surface.has_flat()) {
    r.kind = OrderResult::Kind::unresolved;
    r.detail = "flat terms have no informative Taylor expansion";
    return r;
  }
  const int K = std::min(k_max + 2, kMaxJetOrder);
  const Jet2 h = nf.surface.h_jet({0.0, 0.0}, K, false);
  const Jet2 hx = h.derivative(0);
  const Jet2 hy = h.derivative(1);
  const QuadraticPart& q = nf.surface.quadratic();
  const int d = K - 1;
  // Critical curve y(s): (q11 + 1/2) y + q20 s + h_x(s, y) = 0, solved by fixed-point
  // iteration; each sweep fixes at least one more Taylor coefficient.
  Jet1 y(d);
  const Jet1 s = Jet1::variable(0, d);
  for (int it = 0; it <= d + 1; ++it) y = (-1.0 / (q.q11 + 0.5)) * (q.q20 * s + compose_curve(hx, y));
  const Jet1 xi = -((q.q11 - 0.5) * s + q.q02 * y + compose_curve(hy, y));
  double scale = 1.0;
  for (std::size_t i = 0; i < h.size(); ++i) scale = std::max(scale, std::abs(h[i]));
  const double thresh = 1e-10 * scale;
  for (int n = 0; n <= d; ++n) {
    if (std::abs(xi[static_cast<std::size_t>(n)]) > thresh) {
      if (n > k_max) {
        r.kind = OrderResult::Kind::unresolved;
        r.detail = "first nonzero Taylor coefficient of xi at order " + std::to_string(n) + " exceeds k_max";
        return r;
      }
      r.kind = OrderResult::Kind::finite;
      r.k = n;
      r.c0 = xi[static_cast<std::size_t>(n)];
      r.detail = "Taylor expansion of xi along the critical curve";
      return r;
    }
  }
  r.kind = OrderResult::Kind::identically_zero;
  r.detail = "xi vanishes to order " + std::to_string(d);
  return r;
}

CharPointRecord classify(const FrameModel& frame, const GraphSurface& surf, Point2 p, const CharLocusOptions& opt,
                         const CurveOptions& copt) {
  CharPointRecord rec = hessian_at(frame, surf, p, opt);
  if (!rec.degenerate) {
    rec.cls = PointClass::nondegenerate;
    if (rec.ill_conditioned) rec.note = "ill-conditioned: |det| is small relative to the Hessian scale";
    return rec;
  }
  if (!frame.plain_heisenberg()) {
    rec.cls = PointClass::unresolved;
    rec.note = "degenerate classification is implemented for the Heisenberg frame only";
    return rec;
  }
  const KernelFrame kf = kernel_frame(rec, opt);
  rec.N = kf.N;
  rec.T = kf.T;
  rec.theta = kf.theta;
  const NormalForm nf = rotate_to_normal_form(surf, rec, opt);
  rec.alpha = nf.alpha;

  CurveOptions c = copt;
  c.need_z = false;
  c.x_max = std::min(copt.x_max, 0.5 * surf.window().inradius(rec.original));
  const CriticalCurve curve = trace_critical_curve(nf, c);
  const OrderResult numeric = xi_order_numeric(curve.negative, curve.positive, opt.k_max);

  auto apply = [&](const OrderResult& r, const char* mode) {
    rec.order_mode = mode;
    switch (r.kind) {
    case OrderResult::Kind::finite:
      rec.cls = PointClass::mildly_degenerate;
      rec.order_k = r.k;
      rec.xi_leading = r.c0;
      break;
    case OrderResult::Kind::no_finite_order: rec.cls = PointClass::not_mildly_degenerate; break;
    case OrderResult::Kind::identically_zero:
      rec.cls = PointClass::non_isolated;
      rec.isolated = false;
      break;
    case OrderResult::Kind::unresolved: rec.cls = PointClass::unresolved; break;
    }
    rec.note = r.detail;
  };

  if (!surf.has_flat()) {
    const OrderResult exact = xi_order_exact(nf, opt.k_max);
    if (exact.kind == OrderResult::Kind::identically_zero && numeric.kind != OrderResult::Kind::identically_zero) {
      apply(OrderResult{OrderResult::Kind::unresolved, 0, 0.0,
                        "Taylor expansion of xi vanishes but sampled xi does not", {}},
            "exact");
      return rec;
    }
    apply(exact, "exact");
    return rec;
  }
  apply(numeric, "numeric");
  return rec;
}

} // namespace charpt
