#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "cloaklab/errors.hpp"

namespace cloaklab {

// Angle pair on the 2-torus, each in [0, 2*pi).
struct TorusAngles {
  double theta = 0.0;
  double s = 0.0;
};

// Invertible smooth self-map of the boundary 2-torus, either an integer
// unimodular matrix acting linearly on the angles or a user-supplied pair of
// smooth maps.
class BoundaryGluing {
 public:
  using AngleMap = std::function<TorusAngles(const TorusAngles&)>;

  static BoundaryGluing from_matrix(const Eigen::Matrix2i& m);
  static BoundaryGluing from_functions(AngleMap forward, AngleMap inverse);
  static BoundaryGluing identity();
  static BoundaryGluing dehn_twist();  // [[1,1],[0,1]]

  TorusAngles apply(const TorusAngles& a) const;
  TorusAngles apply_inverse(const TorusAngles& a) const;

  // Sampled round-trip check on an n x n grid; throws if h'^{-1} o h' fails
  // to be the identity to tol.
  void verify_bijective(int n = 64, double tol = 1e-10) const;

 private:
  BoundaryGluing() = default;
  bool is_matrix_ = false;
  Eigen::Matrix2i mat_ = Eigen::Matrix2i::Identity();
  Eigen::Matrix2i mat_inv_ = Eigen::Matrix2i::Identity();
  AngleMap fwd_, inv_;
};

// Point of the punctured solid torus in (radius, angles, component) form.
struct SolidTorusPoint {
  double r = 0.0;  // (0, 1]
  TorusAngles angles;
  int j = 0;
};

// Radius-preserving extension H(r, theta, s, j) = (r, h'(theta, s), j) of a
// boundary gluing into the punctured solid torus.
struct RadialExtension {
  BoundaryGluing gluing;

  SolidTorusPoint apply(const SolidTorusPoint& p) const;
  SolidTorusPoint apply_inverse(const SolidTorusPoint& p) const;
};

struct PartialBound {
  double r = 0.0;
  std::string name;  // e.g. "d(pi_r)/d(r)"
  double max_abs = 0.0;
};

struct DerivativeControlReport {
  // One row per (radius, partial) pair.
  std::vector<PartialBound> rows;
  // Max over all samples of |d(pi_r)/dr - 1|.
  double radial_derivative_deviation = 0.0;
  // Max absolute value over all nine partials and all samples.
  double global_bound = 0.0;
};

// Central-difference check of all nine partials of H on radii log-spaced
// down to 1e-6.
DerivativeControlReport derivative_control_check(const RadialExtension& H, int n_samples);

// Image of the 2-D handle map of the genus-J cut surface model: a point in
// the closed unit disk attached to one of the two disk faces of handle j.
struct HandleImage {
  Eigen::Vector2d disk_point = Eigen::Vector2d::Zero();
  int face = 0;  // 0 = lower attachment, 1 = upper
  int j = 0;
};

// Cylinder point (x, t), x in the closed unit disk, t in (0,1) \ {1/2}:
// lower-half points go to ((1-t)x, face 0), upper-half to (t x, face 1).
HandleImage handle_map_2d(int J, const Eigen::Vector2d& x, double t, int j);

}  // namespace cloaklab
