#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "charpt/charlocus.hpp"
#include "charpt/errors.hpp"
#include "support.hpp"

using namespace charpt;
using testing::coef;
using testing::jacobian_fd;
using testing::rotated;

namespace {

const FrameModel kHeis = FrameModel::heisenberg();

} // namespace

TEST_CASE("root search: unique roots of the plane and the paraboloid") {
  for (const char* g : {"0", "(x^2+y^2)/2"}) {
    const GraphSurface s = GraphSurface::parse(g);
    const RootSearch rs = find_characteristic_points(kHeis, s, s.window(), 64);
    REQUIRE(rs.points.size() == 1);
    CHECK(std::abs(rs.points[0].p.x) < 1e-12);
    CHECK(std::abs(rs.points[0].p.y) < 1e-12);
    CHECK(rs.points[0].isolated);
  }
}

TEST_CASE("root search: two roots from direct algebra") {
  // X1u = -(x^2 - 0.3 + y/2), X2u = -(y - x/2): x^2 + x/4 - 0.3 = 0, y = x/2.
  const GraphSurface s = GraphSurface::parse("y^2/2 + x^3/3 - 0.3*x");
  const RootSearch rs = find_characteristic_points(kHeis, s, s.window(), 64);
  REQUIRE(rs.points.size() == 2);
  std::vector<double> xs{rs.points[0].p.x, rs.points[1].p.x};
  std::sort(xs.begin(), xs.end());
  const double disc = std::sqrt(0.0625 + 1.2);
  CHECK(xs[0] == doctest::Approx((-0.25 - disc) / 2).epsilon(1e-10));
  CHECK(xs[1] == doctest::Approx((-0.25 + disc) / 2).epsilon(1e-10));
  for (const auto& fp : rs.points) CHECK(fp.p.y == doctest::Approx(fp.p.x / 2).epsilon(1e-10));
}

TEST_CASE("root search: a non-isolated segment") {
  const GraphSurface s = GraphSurface::parse("x*y/2");
  const RootSearch rs = find_characteristic_points(kHeis, s, s.window(), 64);
  REQUIRE(rs.points.size() > 10);
  for (const auto& fp : rs.points) {
    CHECK(std::abs(fp.p.y) < 1e-10);
    CHECK_FALSE(fp.isolated);
  }
  const auto clusters = cluster_points(rs.points, 0.1 * s.window().size());
  CHECK(clusters.size() == 1);
  // The segment's tangent (1, 0) spans the kernel of the Hessian.
  const CharPointRecord rec = hessian_at(kHeis, s, {0.0, 0.0});
  const KernelFrame kf = kernel_frame(rec);
  CHECK(std::abs(kf.N.x) == 1.0);
  CHECK(kf.N.y == 0.0);
}

TEST_CASE("Hessians and determinants from hand computation") {
  const CharPointRecord p = hessian_at(kHeis, GraphSurface::parse("(x^2+y^2)/2"), {0, 0});
  CHECK(p.hessian == Mat2{{{-1.0, 0.5}, {-0.5, -1.0}}});
  CHECK(p.det == 1.25);
  CHECK_FALSE(p.degenerate);
  const CharPointRecord q = hessian_at(kHeis, GraphSurface::parse("0"), {0, 0});
  CHECK(q.hessian == Mat2{{{0.0, 0.5}, {-0.5, 0.0}}});
  CHECK(q.det == 0.25);
  const CharPointRecord r = hessian_at(kHeis, GraphSurface::parse("x*y/2 + x^2*y"), {0, 0});
  CHECK(r.hessian == Mat2{{{0.0, 0.0}, {-1.0, 0.0}}});
  CHECK(r.det == 0.0);
  CHECK(r.degenerate);
  CHECK_THROWS_AS(hessian_at(kHeis, GraphSurface::parse("0"), {0.5, 0.0}), NotCharacteristic);
}

TEST_CASE("degeneracy identity on random quadratics") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const CharLocusOptions opt;
  for (int i = 0; i < 100; ++i) {
    double g20 = u(rng), g11 = u(rng), g02 = u(rng);
    if (i % 2 == 0) {
      while (std::abs(g02) < 0.2) g02 = u(rng);
      g20 = (g11 * g11 - 0.25) / g02;
    }
    const std::string text = coef(g20 / 2) + "*x^2 + " + coef(g11) + "*x*y + " + coef(g02 / 2) + "*y^2";
    const CharPointRecord rec = hessian_at(kHeis, GraphSurface::parse(text), {0, 0}, opt);
    double m = 0.0;
    for (const auto& row : rec.hessian)
      for (double e : row) m = std::max(m, std::abs(e));
    const double graph = g20 * g02 - g11 * g11 + 0.25;
    CHECK(std::abs(rec.det - graph) <= 1e-14);
    CHECK(rec.degenerate == (std::abs(graph) < opt.tol_degenerate * m * m));
    CHECK(rec.degenerate == (i % 2 == 0));
  }
}

TEST_CASE("Jacobian of the horizontal gradient equals the Hessian determinant") {
  std::mt19937_64 rng(47);
  for (int s = 0; s < 6; ++s) {
    const GraphSurface surf = GraphSurface::parse(testing::random_polynomial_surface(rng));
    const RootSearch rs = find_characteristic_points(kHeis, surf, surf.window(), 48);
    for (const auto& fp : rs.points) {
      const CharPointRecord rec = hessian_at(kHeis, surf, fp.p);
      const double jac = jacobian_fd(kHeis, surf, fp.p);
      CHECK(std::abs(jac - rec.det) <= 1e-9 * std::max(1e-3, std::abs(rec.det)));
    }
  }
}

TEST_CASE("kernel frame, NTu and TNu at degenerate points") {
  std::mt19937_64 rng(53);
  for (int i = 0; i < 30; ++i) {
    const auto d = testing::random_degenerate_cubic(rng);
    const CharPointRecord rec = hessian_at(kHeis, GraphSurface::parse(d.text), {0, 0});
    REQUIRE(rec.degenerate);
    const KernelFrame kf = kernel_frame(rec);
    CHECK(kf.N.norm() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(kf.N.x >= 0.0);
    CHECK(kf.T.x == -kf.N.y);
    CHECK(kf.T.y == kf.N.x);
    // N spans the left kernel.
    CHECK(std::abs(kf.N.x * rec.hessian[0][0] + kf.N.y * rec.hessian[1][0]) < 1e-12);
    CHECK(std::abs(kf.N.x * rec.hessian[0][1] + kf.N.y * rec.hessian[1][1]) < 1e-12);
    CHECK(std::abs(nt_u(rec.hessian, kf)) < 1e-8);
    CHECK(std::abs(tn_u(rec.hessian, kf) + 1.0) < 1e-8);
  }
  CHECK_THROWS_AS(kernel_frame(hessian_at(kHeis, GraphSurface::parse("0"), {0, 0})), NotDegenerate);
}

TEST_CASE("normal forms: N = X for every alpha, and rotation equivariance") {
  for (double alpha : {-2.0, -0.5, 0.0, 0.7, 3.0}) {
    const GraphSurface s = GraphSurface::parse("x*y/2 + " + coef(alpha / 2) + "*y^2 + x^2*y");
    const KernelFrame kf = kernel_frame(hessian_at(kHeis, s, {0, 0}));
    CHECK(kf.N.x == 1.0);
    CHECK(kf.N.y == 0.0);
  }
  for (double phi : {0.3, 1.1, -2.0}) {
    const GraphSurface s = GraphSurface::parse(rotated("x*y/2 + x^2*y", phi));
    const CharPointRecord rec = hessian_at(kHeis, s, {0, 0});
    const KernelFrame kf = kernel_frame(rec);
    const Point2 expect{std::cos(phi), std::sin(phi)};
    CHECK(std::abs(std::abs(kf.N.x * expect.x + kf.N.y * expect.y) - 1.0) < 1e-12);
  }
}

TEST_CASE("normal-form cancellation on random degenerate cubics") {
  std::mt19937_64 rng(59);
  for (int i = 0; i < 50; ++i) {
    const auto d = testing::random_degenerate_cubic(rng);
    const GraphSurface s = GraphSurface::parse(d.text);
    CharPointRecord rec = hessian_at(kHeis, s, {0, 0});
    const KernelFrame kf = kernel_frame(rec);
    rec.N = kf.N;
    rec.T = kf.T;
    rec.theta = kf.theta;
    const NormalForm nf = rotate_to_normal_form(s, rec);
    INFO(d.text);
    CHECK(std::abs(nf.residual_xx) < 1e-9);
    CHECK(std::abs(nf.residual_xy) < 1e-9);
    CHECK(nf.surface.quadratic().q20 == 0.0);
    CHECK(nf.surface.quadratic().q11 == 0.5);
    CHECK(nf.surface.quadratic().q02 == nf.alpha);
    // Its Hessian is [[0, 0], [-1, -alpha]] up to roundoff; N = (1, 0).
    const CharPointRecord r2 = hessian_at(kHeis, nf.surface, {0, 0});
    CHECK(std::abs(r2.hessian[0][0]) < 1e-9);
    CHECK(std::abs(r2.hessian[0][1]) < 1e-9);
    CHECK(r2.hessian[1][0] == doctest::Approx(-1.0).epsilon(1e-9));
  }
}

TEST_CASE("normal form of a rotated copy recovers alpha = 0") {
  const GraphSurface s = GraphSurface::parse(rotated("x*y/2 + x^2*y", M_PI / 6));
  const CharPointRecord rec = classify(kHeis, s, {0, 0});
  const NormalForm nf = rotate_to_normal_form(s, rec);
  CHECK(std::abs(nf.alpha) < 1e-9);
  CHECK(std::abs(nf.residual_xy) < 1e-9);
  CHECK(rec.cls == PointClass::mildly_degenerate);
  CHECK(rec.order_k == 2);
}

TEST_CASE("normal form of the counterexample keeps its flat term") {
  const GraphSurface s = GraphSurface::parse("x*y/2 + y^2/2 + antider_x(flat(x))");
  const CharPointRecord rec = classify(kHeis, s, {0, 0});
  const NormalForm nf = rotate_to_normal_form(s, rec);
  CHECK(nf.alpha == 1.0);
  CHECK(nf.surface.has_flat());
}

TEST_CASE("critical curve of the worked surface") {
  const GraphSurface s = GraphSurface::parse("x*y/2 + x^2*y");
  const CharPointRecord rec = classify(kHeis, s, {0, 0});
  const CriticalCurve c = trace_critical_curve(rotate_to_normal_form(s, rec), CurveOptions{0.4});
  REQUIRE(c.positive.size() > 10);
  for (const auto* side : {&c.negative, &c.positive})
    for (const auto& smp : *side) {
      if (!smp.valid) continue;
      CHECK(smp.local.y == 0.0);
      CHECK(smp.xi == doctest::Approx(-smp.local.x * smp.local.x).epsilon(1e-13));
    }
}

TEST_CASE("critical curve of the counterexample") {
  const GraphSurface s = GraphSurface::parse("x*y/2 + y^2/2 + antider_x(flat(x))");
  const CharPointRecord rec = classify(kHeis, s, {0, 0});
  const CriticalCurve c = trace_critical_curve(rotate_to_normal_form(s, rec));
  int checked = 0;
  for (const auto* side : {&c.negative, &c.positive})
    for (const auto& smp : *side) {
      if (!smp.valid || std::abs(smp.local.x) < 0.1) continue;
      const double f = std::exp(-1.0 / (smp.local.x * smp.local.x));
      CHECK(smp.local.y == doctest::Approx(-f).epsilon(1e-12));
      CHECK(std::abs(smp.xi) == doctest::Approx(f).epsilon(1e-12));
      ++checked;
    }
  CHECK(checked >= 8);
}

TEST_CASE("order of vanishing: worked surface, synthetic orders and the counterexample") {
  {
    const GraphSurface s = GraphSurface::parse("x*y/2 + x^2*y");
    const CharPointRecord rec = classify(kHeis, s, {0, 0});
    const OrderResult r = xi_order_exact(rotate_to_normal_form(s, rec));
    CHECK(r.kind == OrderResult::Kind::finite);
    CHECK(r.k == 2);
    CHECK(r.c0 == doctest::Approx(-1.0).epsilon(1e-12));
  }
  for (int k = 2; k <= 6; ++k) {
    // h = -y x^k (1 + x/2): the critical curve is y = 0 and xi = x^k (1 + x/2).
    const std::string g = "x*y/2 - y*x^" + std::to_string(k) + "*(1 + x/2)";
    const GraphSurface s = GraphSurface::parse(g);
    const CharPointRecord rec = classify(kHeis, s, {0, 0});
    const NormalForm nf = rotate_to_normal_form(s, rec);
    const CriticalCurve c = trace_critical_curve(nf);
    const OrderResult num = xi_order_numeric(c.negative, c.positive);
    const OrderResult ex = xi_order_exact(nf);
    INFO("k = " << k);
    CHECK(num.kind == OrderResult::Kind::finite);
    CHECK(num.k == k);
    CHECK(ex.kind == OrderResult::Kind::finite);
    CHECK(ex.k == k);
    CHECK(ex.c0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(num.c0 == doctest::Approx(1.0).epsilon(1e-2));
    CHECK(rec.cls == PointClass::mildly_degenerate);
  }
  {
    const GraphSurface s = GraphSurface::parse("x*y/2 + y^2/2 + antider_x(flat(x))");
    const CharPointRecord rec = classify(kHeis, s, {0, 0});
    CHECK(rec.cls == PointClass::not_mildly_degenerate);
    const CriticalCurve c = trace_critical_curve(rotate_to_normal_form(s, rec));
    const OrderResult num = xi_order_numeric(c.negative, c.positive);
    CHECK(num.kind == OrderResult::Kind::no_finite_order);
    for (double slope : num.slopes) CHECK(slope > 12.0);
  }
}

TEST_CASE("pure normal-form quadratics have a non-isolated characteristic set") {
  for (double alpha : {0.0, 1.5}) {
    const GraphSurface s = GraphSurface::parse("x*y/2 + " + coef(alpha / 2) + "*y^2");
    const CharPointRecord rec = classify(kHeis, s, {0, 0});
    CHECK(rec.cls == PointClass::non_isolated);
    CHECK_FALSE(rec.isolated);
  }
}

TEST_CASE("classification examples") {
  CHECK(classify(kHeis, GraphSurface::parse("(x^2+y^2)/2"), {0, 0}).cls == PointClass::nondegenerate);
  CHECK(classify(kHeis, GraphSurface::parse("0"), {0, 0}).cls == PointClass::nondegenerate);
  const CharPointRecord r = classify(kHeis, GraphSurface::parse("x*y/2 + x^2*y"), {0, 0});
  CHECK(r.cls == PointClass::mildly_degenerate);
  CHECK(r.order_k == 2);
  CHECK(r.alpha == 0.0);
  CHECK(r.N.x == 1.0);
  CHECK(r.N.y == 0.0);
  CHECK(r.order_mode == "exact");
}

TEST_CASE("det is invariant under frame rotation at characteristic points") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> th(-3.1, 3.1);
  for (const char* g : {"(x^2+y^2)/2", "0", "x*y/2 + x^2*y + y^2", "y^2/2 + x^3/3 - 0.3*x"}) {
    const GraphSurface s = GraphSurface::parse(g);
    for (const auto& fp : find_characteristic_points(kHeis, s, s.window(), 64).points) {
      const CharPointRecord base = hessian_at(kHeis, s, fp.p);
      for (int i = 0; i < 20; ++i) {
        const CharPointRecord rot = hessian_at(FrameModel::heisenberg(th(rng)), s, fp.p);
        CHECK(std::abs(rot.det - base.det) <= 1e-9 * std::max(1.0, std::abs(base.det)));
      }
    }
  }
}

TEST_CASE("clustering groups roots by chain distance") {
  std::vector<FoundPoint> pts;
  for (int i = 0; i < 5; ++i) pts.push_back({{0.05 * i, 0.0}});
  pts.push_back({{0.9, 0.9}});
  const auto c = cluster_points(pts, 0.1);
  REQUIRE(c.size() == 2);
  CHECK(c[0].size() == 5);
  CHECK(c[1].size() == 1);
}
