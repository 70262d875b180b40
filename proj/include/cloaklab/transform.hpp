#pragma once

#include <functional>
#include <vector>

#include "cloaklab/geometry.hpp"

namespace cloaklab {

// Radial blow-up profile rho(r) = (R + r)/2 on (0, R]. It is the identity at
// r = R, so the transformation glues continuously to the identity outside
// T(R), and sends r -> 0 to the cloaking-surface radius R/2. The singular
// factor throughout is t = 2*r_tilde - R.
struct RadialProfile {
  double R = 0.0;

  explicit RadialProfile(double R_);
  double forward(double r) const;   // r in (0, R] -> r_tilde in (R/2, R]
  double inverse(double rt) const;  // r_tilde in (R/2, R] -> r
};

// Do not evaluate singular tensors below this value of 2*r_tilde - R.
inline constexpr double kSingularCutoff = 1e-6;

// Diagonal components of a tensor in the normal-coordinate frame
// (r_tilde, theta[, s]); for dim 2 the s entry is unused.
struct NormalFrameTensor {
  double rr = 0.0;
  double thth = 0.0;
  double ss = 0.0;
  double sqrt_det = 0.0;
};

// Blow-up transformation of the virtual model: identity outside T(R);
// (r, theta, s, j) -> (rho(r), theta, s, j) inside.
struct TransformationMap {
  const ManifoldModel* model = nullptr;
  const Link* link = nullptr;
  RadialProfile profile;

  TransformationMap(const ManifoldModel& m, const Link& l);

  Eigen::VectorXd map_forward(const Eigen::VectorXd& x) const;
  Eigen::VectorXd map_inverse(const Eigen::VectorXd& x_phys) const;

  // Pushforward metric at a physical point with radius r_tilde > R/2, in the
  // normal frame: diag(4, t^2, 1), t = 2*r_tilde - R. Outside T(R): the flat
  // metric, diag(1, r^2, 1) in the same frame.
  NormalFrameTensor pushforward_metric_normal(double r_tilde) const;
  // Conductivity sqrt(det g~) g~^{-1}: diag(t/2, 2/t, 2t) inside the shell.
  NormalFrameTensor pushforward_conductivity_normal(double r_tilde) const;

  // Chart-coordinate versions at a physical chart point.
  MetricTensor pushforward_metric(const Eigen::VectorXd& x_phys) const;
  Eigen::MatrixXd pushforward_conductivity(const Eigen::VectorXd& x_phys) const;

  using ScalarField = std::function<double(const Eigen::VectorXd&)>;
  ScalarField pushforward_function(ScalarField u) const;  // u~ = u o Psi^{-1}
  ScalarField pullback_function(ScalarField u_tilde) const;
};

struct SingularitySample {
  double r_tilde = 0.0;
  double sqrt_det = 0.0;
  double sigma_rr = 0.0;
  double sigma_thth = 0.0;
  double sigma_ss = 0.0;
};

// Fitted log-log slopes of each family against t = 2*r_tilde - R, the fitted
// bound constants, and a flag that the singularity estimates held at every
// sample.
struct SingularityProfile {
  std::vector<SingularitySample> samples;
  double slope_sqrt_det = 0.0;
  double slope_sigma_rr = 0.0;
  double slope_sigma_thth = 0.0;
  double slope_sigma_ss = 0.0;
  double C_linear = 0.0;   // bound constant for sqrt_det, sigma_rr, sigma_ss
  double C_inverse = 0.0;  // bound constant for sigma_thth
  bool bounds_hold = false;
};

SingularityProfile singularity_profile(const TransformationMap& map, int n_samples);

// Stereographic projection from the unit sphere minus the north pole onto
// the equatorial plane, and its inverse. Not on the verification path.
Eigen::Vector2d stereographic_project(const Eigen::Vector3d& p);
Eigen::Vector3d stereographic_unproject(const Eigen::Vector2d& q);

// Independent L2 norms of a scalar field over the tube/shell about component
// j, by tensor Gauss-Legendre quadrature in normal coordinates. The field is
// given in normal coordinates u(r, theta, s). The virtual integral runs over
// r in (0, R], the physical one over r_tilde in (R/2, R], each with its own
// volume factor.
double shell_l2_norm_virtual(const TransformationMap& map, int j,
                             const std::function<double(double, double, double)>& u,
                             int n_radial, int n_angular);
double shell_l2_norm_physical(const TransformationMap& map, int j,
                              const std::function<double(double, double, double)>& u_tilde,
                              int n_radial, int n_angular);

}  // namespace cloaklab
