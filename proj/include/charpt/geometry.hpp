#pragma once

// Horizontal frames, horizontal gradient, sub-Laplacian and horizontal mean
// curvature of surfaces in a 3D contact sub-Riemannian structure.
//
// Frame fields are written X_i = sum_k c_ik(x,y,z) d_k. The Riemannian extension
// declares {X_1, X_2, d_z} orthonormal and divergences are taken with respect to
// Lebesgue measure in (x,y,z), so for a defining function u
//   H = -div(grad_H u / W) = -L u / W + sum_ij X_i u X_j u X_i X_j u / W^3,
//   L u = sum_i X_i X_i u + sum_i X_i u div(X_i).
// For the Heisenberg frame div(X_i) = 0 and L is the usual sub-Laplacian.

#include <array>

#include "charpt/expr.hpp"
#include "charpt/jet.hpp"
#include "charpt/surface.hpp"
#include "charpt/types.hpp"

namespace charpt {

enum class FrameKind { heisenberg, contact_normal_form };

class FrameModel {
public:
  // X = d_x - (y/2) d_z, Y = d_y + (x/2) d_z, optionally rotated by theta:
  // X_1 = cos(theta) X + sin(theta) Y, X_2 = -sin(theta) X + cos(theta) Y.
  static FrameModel heisenberg(double theta = 0.0);

  // X_1 = d_x - (y/2) d_z + beta y (y d_x - x d_y) + gamma y d_z,
  // X_2 = d_y + (x/2) d_z - beta x (y d_x - x d_y) + gamma x d_z.
  // Throws FrameError unless beta, gamma, d_x gamma and d_y gamma vanish on the
  // z-axis (checked at sampled heights to 1e-10).
  static FrameModel contact(Expr beta, Expr gamma, double theta = 0.0);

  FrameKind kind() const { return kind_; }
  double theta() const { return theta_; }
  const Expr& beta() const { return beta_; }
  const Expr& gamma() const { return gamma_; }
  FrameModel rotated(double dtheta) const;

  // True when the exact Heisenberg fast path applies (no rotation).
  bool plain_heisenberg() const { return kind_ == FrameKind::heisenberg && theta_ == 0.0; }
  // Coefficients depend on z (contact frames); graph evaluation then needs g.
  bool depends_on_height() const { return kind_ == FrameKind::contact_normal_form; }

  // Jets of the coefficients c_ik at p, to the given order.
  std::array<std::array<Jet3, 3>, 2> coefficients(Point3 p, int order) const;

private:
  FrameKind kind_ = FrameKind::heisenberg;
  double theta_ = 0.0;
  Expr beta_;
  Expr gamma_;
};

struct HorizontalData {
  Point2 point{};
  double X1u = 0.0;
  double X2u = 0.0;
  double W = 0.0;
  Mat2 second{}; // second[i][j] = X_i X_j u
  double subLaplacian = 0.0;
  // |det| of the coefficient matrix of {X_1, X_2, d_z}; 1 for Heisenberg.
  double frame_volume = 1.0;
};

// Horizontal data of u = z - g~(v) at chart point v.
HorizontalData horizontal_data(const FrameModel& frame, const GraphSurface& surf, Point2 v);

// Horizontal data of a general defining function u(x,y,z) at p.
// Throws SubmersionError when du(p) = 0.
HorizontalData horizontal_data_implicit(const FrameModel& frame, const Expr& u, Point3 p);

// H from precomputed data; throws CharacteristicPointError when W < w_min.
double mean_curvature(const HorizontalData& hd, double w_min = 1e-300);
double mean_curvature(const FrameModel& frame, const GraphSurface& surf, Point2 v, double w_min = 1e-300);
double mean_curvature_implicit(const FrameModel& frame, const Expr& u, Point3 p, double w_min = 1e-300);

// Densities in graph coordinates: sigma_R = sqrt(1 + W^2) / frame_volume and
// sigma_H = W / frame_volume.
double riemannian_density(const HorizontalData& hd);
double sub_riemannian_density(const HorizontalData& hd);

// sup over a (2^level + 1)^2 grid on region of |L u| + sum_ij |X_i X_j u|; an
// estimate of C0 in |H| <= C0 / W. Finer levels contain the coarser grids.
double c0_bound(const FrameModel& frame, const GraphSurface& surf, const Window& region, int level = 6);

} // namespace charpt
