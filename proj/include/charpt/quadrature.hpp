#pragma once

// Integrability of 1/W and |H| near a characteristic point, against the
// Riemannian (sigma_R) and sub-Riemannian (sigma_H) induced measures.
//
// Three coordinate strategies:
//  * cartesian: adaptive cubature on annuli around the point, parametrised in
//    polar coordinates (r, phi) so that the 1/r blow-up of 1/W is absorbed;
//  * rectified: normal-form coordinates (x, t) with t = y + h_x(x, y), nested
//    1D adaptive quadrature with the t-integral graded towards t = 0;
//  * weighted_polar: c x^k = rho cos(theta), sqrt(1 + alpha^2) t = rho sin(theta)
//    for a mildly degenerate point of order k, with both endpoint
//    singularities removed by power substitutions.
// Each strategy produces a sequence of shell integrals on a geometric ladder
// and a verdict (converged / diverged / inconclusive) derived from it.

#include <string>
#include <vector>

#include "charpt/charlocus.hpp"
#include "charpt/geometry.hpp"
#include "charpt/surface.hpp"

namespace charpt {

enum class Quantity { inv_w, abs_mean, signed_mean };
enum class Measure { riemannian, sub_riemannian };
enum class Strategy { cartesian, rectified, weighted_polar };
enum class Verdict { converged, diverged, inconclusive };

const char* to_string(Quantity q);
const char* to_string(Measure m);
const char* to_string(Strategy s);
const char* to_string(Verdict v);

struct IntegrandSpec {
  Quantity quantity = Quantity::inv_w;
  Measure measure = Measure::riemannian;
};

// Integrand in graph coordinates: quantity times area density. Throws
// NonFiniteIntegrand when the value is not finite (W = 0 inside the region).
double integrand_value(const HorizontalData& hd, const IntegrandSpec& spec);

struct CubatureOptions {
  double rel_tol = 1e-7;
  double abs_tol = 1e-15;
  int max_depth = 24;           // per axis
  std::size_t max_cells = 400000;
  bool parallel = true;         // OpenMP evaluation of each refinement round
};

struct CubatureResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = false; // false: MaxSubdivision, value is the best estimate
  std::size_t cells = 0;
  std::size_t evaluations = 0;
};

// Integral over eps_in <= |v - center| <= eps_out (chart coordinates of surf).
CubatureResult integrate_annulus(const FrameModel& frame, const GraphSurface& surf, const IntegrandSpec& spec,
                                 Point2 center, double eps_in, double eps_out, const CubatureOptions& opt = {});

struct ShellRecord {
  double eps = 0.0;   // ladder value at the inner edge
  double value = 0.0; // cumulative integral from the outer edge of the scan down to eps
  double error = 0.0; // cumulative quadrature error
  double increment = 0.0;
  double increment_error = 0.0;
  bool converged = true;
};

struct IntegrabilityReport {
  Point2 center{}; // original coordinates
  double outer_radius = 0.0;
  IntegrandSpec spec{};
  Strategy strategy = Strategy::cartesian;
  std::string ladder;  // "r" (annuli), "x" (x-shells) or "u" (weighted-polar radial fraction)
  double ratio = 0.5;  // ladder ratio
  std::vector<ShellRecord> annuli;
  Verdict verdict = Verdict::inconclusive;
  double limit = 0.0;
  double tail_bound = 0.0;
  double growth_exponent = 0.0; // c in increment ~ 2^(c n) per halving of eps (diverged)
  double decay_exponent = 0.0;  // p in increment ~ eps^p
  double quadrature_error = 0.0;
  std::vector<std::string> notes;
};

struct ScanOptions {
  double eps_max = 0.25;
  double eps_min = 1e-6;
  double ratio = 0.5;
  double tol = 1e-7;          // per-shell relative tolerance
  double tol_verdict = 1e-4;
  int fit_window = 6;         // increments used by the growth/decay fit (at least 4)
  bool parallel = true;
  CubatureOptions cubature{};
};

// Verdict from shell increments on the ladder eps_0 > eps_1 > ... (eps.size() ==
// increments.size() + 1); fills verdict, limit, tail_bound and the exponents.
void assign_verdict(IntegrabilityReport& rep, const std::vector<double>& eps, const std::vector<double>& increments,
                    double tol_verdict, int fit_window = 6);

// Cartesian strategy: annuli eps_{n+1} <= r <= eps_n around center.
IntegrabilityReport scan_cartesian(const FrameModel& frame, const GraphSurface& surf, const IntegrandSpec& spec,
                                   Point2 center, const ScanOptions& opt = {});

// Rectified strategy on the normal form: x-shells eps_{n+1} <= |x| <= eps_n of
// the disk of radius eps_max around the point.
IntegrabilityReport scan_rectified(const NormalForm& nf, const IntegrandSpec& spec, const ScanOptions& opt = {});

// Inner integral of the rectified strategy at fixed x over t in [t_lo, t_hi],
// including the Jacobian dy/dt = 1/(1 + h_xy). Throws JacobianDegenerate.
struct FiberResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = false;
  double xi = 0.0; // xi(x), the graded scale
};
FiberResult fiber_integral(const NormalForm& nf, const IntegrandSpec& spec, double x, double t_lo, double t_hi,
                           double rel_tol = 1e-10);

// y with y + h_x(x, y) = t (Newton from y = t). Throws JacobianDegenerate.
double rectified_y(const NormalForm& nf, double x, double t);

// Weighted polar strategy on the disk of radius eps_max. Throws NotMild when
// k < 1 or c0 = 0.
IntegrabilityReport scan_weighted_polar(const NormalForm& nf, const IntegrandSpec& spec, int k, double c0,
                                        const ScanOptions& opt = {});

// cos(theta)^(1/k - 1) d theta / d w under theta = (pi/2)(1 - w^k); bounded on
// [0, 1] for k >= 1, and its integral over [0, 1] is the half-range angular
// integral of cos(theta)^(1/k - 1).
double polar_angular_weight(double w, int k);

// 1 + alpha sin(2 theta) / sqrt(1 + alpha^2) >= 1 - |alpha| / sqrt(1 + alpha^2).
double polar_denominator_bound(double alpha);

} // namespace charpt
