#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <vector>

#include "cloaklab/errors.hpp"

namespace cloaklab {

// Flat d-torus (d = 2 or 3) presented in a single periodic Cartesian chart
// [0,P_0) x ... x [0,P_{d-1}). The metric is the identity in this chart.
struct ManifoldModel {
  int dim = 2;
  std::array<double, 3> periods{2 * 3.14159265358979323846, 2 * 3.14159265358979323846,
                                2 * 3.14159265358979323846};

  static ManifoldModel torus2(double px, double py);
  static ManifoldModel torus3(double px, double py, double pz);
  void validate() const;

  double period(int axis) const { return periods[static_cast<size_t>(axis)]; }
  // Reduce a coordinate into [0, P_axis).
  double wrap(int axis, double x) const;
  Eigen::VectorXd wrap_point(const Eigen::VectorXd& x) const;
  // Signed minimal periodic difference a - b, in [-P/2, P/2).
  double periodic_delta(int axis, double a, double b) const;
};

// Symmetric positive definite metric at a chart point, with cached inverse
// and determinant.
struct MetricTensor {
  Eigen::MatrixXd components;
  Eigen::MatrixXd inverse;
  double det = 1.0;

  static MetricTensor from_components(const Eigen::MatrixXd& g);
};

// A link in the model: for dim 3, J straight coordinate circles sharing one
// axis, each given by a base point in the transverse 2-torus; for dim 2, J
// points (the codimension-2 analogue).
struct Link {
  int dim = 2;
  int axis = 2;  // circle direction, dim 3 only
  // Transverse base points: (x, y) components in the transverse chart
  // (dim 2: the chart itself).
  std::vector<Eigen::Vector2d> base_points;
  double R = 0.0;  // tube radius bound, 0 < R <= 1

  static Link points_2d(const ManifoldModel& model, std::vector<Eigen::Vector2d> pts,
                        double R = 0.0);
  static Link circles_3d(const ManifoldModel& model, int axis,
                         std::vector<Eigen::Vector2d> transverse_pts, double R = 0.0);

  int components() const { return static_cast<int>(base_points.size()); }
  // Axes of the transverse plane in the ambient chart.
  std::array<int, 2> transverse_axes() const;
  // Periodic distance from the chart point x to component j.
  double distance_to(const ManifoldModel& model, const Eigen::VectorXd& x, int j) const;
  // Distance to the whole link and the index of the nearest component
  // (ties broken by lowest index).
  std::pair<double, int> nearest_component(const ManifoldModel& model,
                                           const Eigen::VectorXd& x) const;
  // Minimal pairwise periodic gap between transverse base points.
  double min_pairwise_gap(const ManifoldModel& model) const;
};

struct TubularNeighborhood {
  const Link* link = nullptr;
  double radius = 0.0;  // 0 < radius < link->R

  TubularNeighborhood(const Link& L, double eps);
  bool contains(const ManifoldModel& model, const Eigen::VectorXd& x) const;
};

// Normal coordinates adapted to the link: radius, transverse angle,
// arclength along the component (0 for dim 2), component index.
struct NormalCoords {
  double r = 0.0;
  double theta = 0.0;
  double s = 0.0;
  int j = 0;
};

MetricTensor metric_at(const ManifoldModel& model, const Eigen::VectorXd& x);

// sigma = sqrt(|det g|) g^{-1} evaluated at x.
Eigen::MatrixXd conductivity_at(const ManifoldModel& model, const Eigen::VectorXd& x);

// Metric of the flat model expressed in the normal-coordinate chart
// (r, theta[, s]) about a straight component: diag(1, r^2[, 1]).
MetricTensor normal_chart_metric(double r, int dim);
Eigen::MatrixXd normal_chart_conductivity(double r, int dim);

// Requires dist(x, L) < R and x not on the link.
NormalCoords to_normal_coords(const ManifoldModel& model, const Link& link,
                              const Eigen::VectorXd& x);
// Requires 0 < r <= R. Returns the chart point, wrapped into the chart box.
Eigen::VectorXd from_normal_coords(const ManifoldModel& model, const Link& link,
                                   const NormalCoords& nc);

}  // namespace cloaklab
