#pragma once

// Characteristic points of graph surfaces: location, horizontal Hessian,
// degeneracy, kernel frame {N, T}, normal form, critical curve and the order of
// vanishing of xi = Tu along it.

#include <optional>
#include <string>
#include <vector>

#include "charpt/geometry.hpp"
#include "charpt/surface.hpp"
#include "charpt/types.hpp"

namespace charpt {

struct CharLocusOptions {
  double tol_char = 1e-10;        // |X1u| + |X2u| at an accepted root
  double tol_degenerate = 1e-8;   // relative to (max |hessian entry|)^2
  double tol_ill_conditioned = 1e-4; // same scale; flags near-degenerate points
  double merge_radius = 1e-6;     // relative to the window size
  double isolation_radius = 0.1;  // relative to the window size
  double tol_nf = 1e-9;
  int k_max = 12;
  int max_newton_iterations = 400;
};

enum class PointClass { nondegenerate, mildly_degenerate, not_mildly_degenerate, non_isolated, unresolved };

const char* to_string(PointClass c);

struct FoundPoint {
  Point2 p{};
  double residual = 0.0; // |X1u| + |X2u|
  bool isolated = true;
  bool near_boundary = false;
};

struct RootSearch {
  std::vector<FoundPoint> points;
  std::size_t seeds = 0;
  std::size_t diverged_seeds = 0;
  std::vector<std::string> warnings;
};

// Grid scan of (X1u, X2u) over window (chart coordinates) seeded at sign-change
// cells and local minima of |X1u| + |X2u|, refined by damped Newton.
RootSearch find_characteristic_points(const FrameModel& frame, const GraphSurface& surf, const Window& window,
                                      int grid_n, const CharLocusOptions& opt = {});

// Groups roots whose chain distance is below the isolation radius.
std::vector<std::vector<FoundPoint>> cluster_points(const std::vector<FoundPoint>& pts, double radius);

struct OrderResult {
  enum class Kind { finite, no_finite_order, identically_zero, unresolved };
  Kind kind = Kind::unresolved;
  int k = 0;
  double c0 = 0.0;
  std::string detail;
  std::vector<double> slopes; // numeric mode: finest two windows, negative side then positive side
};

struct CharPointRecord {
  Point2 location{}; // chart coordinates of the input surface
  Point2 original{}; // original coordinates
  double z = 0.0;
  Mat2 hessian{};
  double det = 0.0;
  double det_graph = 0.0; // g20 g02 - g11^2 + 1/4 from the jet
  double det_scale = 1.0;
  bool degenerate = false;
  bool ill_conditioned = false;
  Point2 N{1.0, 0.0};
  Point2 T{0.0, 1.0};
  double theta = 0.0;
  double alpha = 0.0;
  double W0 = 0.0;
  PointClass cls = PointClass::unresolved;
  int order_k = 0;
  double xi_leading = 0.0;
  bool isolated = true;
  std::string order_mode; // "exact" or "numeric"
  std::string note;
};

// Fills location, hessian, det and degeneracy. Throws NotCharacteristic.
CharPointRecord hessian_at(const FrameModel& frame, const GraphSurface& surf, Point2 p,
                           const CharLocusOptions& opt = {});

struct KernelFrame {
  Point2 N;
  Point2 T;
  double theta;
};

// Unit N with sum_i N_i hessian[i][j] = 0, a >= 0 (b > 0 on ties), T = N
// rotated by +pi/2. Throws NotDegenerate and ZeroHessian.
KernelFrame kernel_frame(const CharPointRecord& rec, const CharLocusOptions& opt = {});

// N T u and T N u from the Hessian (T N u = N T u - 1 for graphs).
double nt_u(const Mat2& hessian, const KernelFrame& kf);
double tn_u(const Mat2& hessian, const KernelFrame& kf);

struct NormalForm {
  GraphSurface surface; // chart centred at the point, N along the first axis
  double alpha = 0.0;
  double residual_xx = 0.0; // coefficient of x~^2 before it was set to 0
  double residual_xy = 0.0; // coefficient of x~ y~ minus 1/2
};

// g~ = x~ y~ / 2 + alpha y~^2 / 2 + h with h of order >= 3. Throws NotDegenerate
// and NormalFormResidual.
NormalForm rotate_to_normal_form(const GraphSurface& surf, const CharPointRecord& rec,
                                 const CharLocusOptions& opt = {});

struct CurveSample {
  double x_param = 0.0;
  Point2 local{};    // normal-form coordinates
  Point2 original{}; // original coordinates
  double z = 0.0;
  double xi = 0.0;
  double xi_error = 0.0; // rounding-level uncertainty of xi
  bool valid = false;
};

struct CurveOptions {
  double x_max = 0.5;
  int levels = 24;
  double ratio = 0.70710678118654752440; // ladder x_i = x_max ratio^i
  double tol_curve = 1e-12;
  bool need_z = true;
};

struct CriticalCurve {
  std::vector<CurveSample> negative; // ordered by decreasing |x|
  std::vector<CurveSample> positive;
  std::vector<std::string> gaps;
};

// Solves y + h_x(x, y) = 0 on a geometric ladder of x on both sides, seeded at
// y = 0, and samples xi = -(alpha y + h_y).
CriticalCurve trace_critical_curve(const NormalForm& nf, const CurveOptions& copt = {});

// Numeric order from |xi| samples on both sides (each ordered by decreasing |x|).
OrderResult xi_order_numeric(const std::vector<CurveSample>& negative, const std::vector<CurveSample>& positive,
                             int k_max = 12);

// Exact order from the Taylor expansion of h at the origin (requires a surface
// without flat terms). identically_zero when no coefficient up to k_max + 2
// survives.
OrderResult xi_order_exact(const NormalForm& nf, int k_max = 12);

// Full pipeline for a characteristic point p (chart coordinates of surf).
CharPointRecord classify(const FrameModel& frame, const GraphSurface& surf, Point2 p,
                         const CharLocusOptions& opt = {}, const CurveOptions& copt = {});

} // namespace charpt
