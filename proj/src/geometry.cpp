#include "cloaklab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cloaklab {

namespace {
constexpr double kTiny = 1e-12;
}

ManifoldModel ManifoldModel::torus2(double px, double py) {
  ManifoldModel m;
  m.dim = 2;
  m.periods = {px, py, 0.0};
  m.validate();
  return m;
}

ManifoldModel ManifoldModel::torus3(double px, double py, double pz) {
  ManifoldModel m;
  m.dim = 3;
  m.periods = {px, py, pz};
  m.validate();
  return m;
}

void ManifoldModel::validate() const {
  if (dim != 2 && dim != 3) throw ValidationError("ManifoldModel: dimension must be 2 or 3");
  for (int a = 0; a < dim; ++a)
    if (!(periods[static_cast<size_t>(a)] > 0.0))
      throw ValidationError("ManifoldModel: all periods must be positive");
}

double ManifoldModel::wrap(int axis, double x) const {
  const double p = period(axis);
  double y = std::fmod(x, p);
  if (y < 0.0) y += p;
  if (y >= p) y -= p;  // fmod can return exactly p after the += above
  return y;
}

Eigen::VectorXd ManifoldModel::wrap_point(const Eigen::VectorXd& x) const {
  if (x.size() != dim) throw ValidationError("wrap_point: dimension mismatch");
  Eigen::VectorXd y(dim);
  for (int a = 0; a < dim; ++a) y[a] = wrap(a, x[a]);
  return y;
}

double ManifoldModel::periodic_delta(int axis, double a, double b) const {
  const double p = period(axis);
  double d = std::fmod(a - b, p);
  if (d < -p / 2) d += p;
  if (d >= p / 2) d -= p;
  return d;
}

MetricTensor MetricTensor::from_components(const Eigen::MatrixXd& g) {
  MetricTensor t;
  t.components = g;
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > kTiny)
    throw ValidationError("MetricTensor: components not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success)
    throw ValidationError("MetricTensor: components not positive definite");
  t.det = g.determinant();
  t.inverse = g.inverse();
  return t;
}

namespace {

double default_R(const ManifoldModel& model, const Link& link) {
  double gap = link.min_pairwise_gap(model);
  // A lone component is limited only by self-overlap around the periods.
  std::array<int, 2> ta = link.transverse_axes();
  gap = std::min({gap, model.period(ta[0]), model.period(ta[1])});
  return std::min(0.45 * gap, 1.0);
}

void validate_link(const ManifoldModel& model, Link& link, double R) {
  if (link.base_points.empty()) throw ValidationError("Link: needs at least one component");
  std::array<int, 2> ta = link.transverse_axes();
  for (auto& p : link.base_points) {
    p[0] = model.wrap(ta[0], p[0]);
    p[1] = model.wrap(ta[1], p[1]);
  }
  const double gap = link.min_pairwise_gap(model);
  if (link.components() > 1 && gap < kTiny)
    throw ValidationError("Link: components must be pairwise disjoint");
  link.R = (R > 0.0) ? R : default_R(model, link);
  if (!(link.R > 0.0) || link.R > 1.0) throw ValidationError("Link: R must satisfy 0 < R <= 1");
  if (link.components() > 1 && link.R > gap / 2 + kTiny)
    throw ValidationError("Link: tubular neighborhoods of radius R overlap");
}

}  // namespace

Link Link::points_2d(const ManifoldModel& model, std::vector<Eigen::Vector2d> pts, double R) {
  if (model.dim != 2) throw ValidationError("Link::points_2d: model must be 2-dimensional");
  Link L;
  L.dim = 2;
  L.axis = -1;
  L.base_points = std::move(pts);
  validate_link(model, L, R);
  return L;
}

Link Link::circles_3d(const ManifoldModel& model, int axis,
                      std::vector<Eigen::Vector2d> transverse_pts, double R) {
  if (model.dim != 3) throw ValidationError("Link::circles_3d: model must be 3-dimensional");
  if (axis < 0 || axis > 2) throw ValidationError("Link::circles_3d: axis must be 0, 1 or 2");
  Link L;
  L.dim = 3;
  L.axis = axis;
  L.base_points = std::move(transverse_pts);
  validate_link(model, L, R);
  return L;
}

std::array<int, 2> Link::transverse_axes() const {
  if (dim == 2) return {0, 1};
  switch (axis) {
    case 0: return {1, 2};
    case 1: return {2, 0};
    default: return {0, 1};
  }
}

double Link::distance_to(const ManifoldModel& model, const Eigen::VectorXd& x, int j) const {
  const auto ta = transverse_axes();
  const Eigen::Vector2d& c = base_points[static_cast<size_t>(j)];
  const double dx = model.periodic_delta(ta[0], x[ta[0]], c[0]);
  const double dy = model.periodic_delta(ta[1], x[ta[1]], c[1]);
  return std::hypot(dx, dy);
}

std::pair<double, int> Link::nearest_component(const ManifoldModel& model,
                                               const Eigen::VectorXd& x) const {
  double best = std::numeric_limits<double>::infinity();
  int jbest = 0;
  for (int j = 0; j < components(); ++j) {
    const double d = distance_to(model, x, j);
    if (d < best) {  // strict: ties resolve to the lowest index
      best = d;
      jbest = j;
    }
  }
  return {best, jbest};
}

double Link::min_pairwise_gap(const ManifoldModel& model) const {
  const auto ta = transverse_axes();
  double gap = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < base_points.size(); ++i)
    for (size_t k = i + 1; k < base_points.size(); ++k) {
      const double dx = model.periodic_delta(ta[0], base_points[i][0], base_points[k][0]);
      const double dy = model.periodic_delta(ta[1], base_points[i][1], base_points[k][1]);
      gap = std::min(gap, std::hypot(dx, dy));
    }
  return gap;
}

TubularNeighborhood::TubularNeighborhood(const Link& L, double eps) : link(&L), radius(eps) {
  if (!(eps > 0.0 && eps < L.R))
    throw ValidationError("TubularNeighborhood: radius must satisfy 0 < eps < R");
}

bool TubularNeighborhood::contains(const ManifoldModel& model, const Eigen::VectorXd& x) const {
  return link->nearest_component(model, x).first < radius;
}

MetricTensor metric_at(const ManifoldModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.dim) throw ValidationError("metric_at: dimension mismatch");
  for (int a = 0; a < model.dim; ++a)
    if (!std::isfinite(x[a])) throw ValidationError("metric_at: non-finite chart point");
  MetricTensor t;
  t.components = Eigen::MatrixXd::Identity(model.dim, model.dim);
  t.inverse = t.components;
  t.det = 1.0;
  return t;
}

Eigen::MatrixXd conductivity_at(const ManifoldModel& model, const Eigen::VectorXd& x) {
  const MetricTensor g = metric_at(model, x);
  return std::sqrt(std::abs(g.det)) * g.inverse;
}

MetricTensor normal_chart_metric(double r, int dim) {
  if (!(r > 0.0)) throw ValidationError("normal_chart_metric: r must be positive");
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(dim, dim);
  g(1, 1) = r * r;
  return MetricTensor::from_components(g);
}

Eigen::MatrixXd normal_chart_conductivity(double r, int dim) {
  const MetricTensor g = normal_chart_metric(r, dim);
  return std::sqrt(std::abs(g.det)) * g.inverse;
}

NormalCoords to_normal_coords(const ManifoldModel& model, const Link& link,
                              const Eigen::VectorXd& x) {
  auto [dist, j] = link.nearest_component(model, x);
  if (dist >= link.R) throw ValidationError("to_normal_coords: point outside T(R)");
  if (dist < 1e-14) throw ValidationError("to_normal_coords: on-link point, theta undefined");
  const auto ta = link.transverse_axes();
  const Eigen::Vector2d& c = link.base_points[static_cast<size_t>(j)];
  const double dx = model.periodic_delta(ta[0], x[ta[0]], c[0]);
  const double dy = model.periodic_delta(ta[1], x[ta[1]], c[1]);
  NormalCoords nc;
  nc.r = dist;
  nc.theta = std::atan2(dy, dx);
  if (nc.theta < 0.0) nc.theta += 2 * M_PI;
  nc.s = (link.dim == 3) ? x[link.axis] : 0.0;
  nc.j = j;
  return nc;
}

Eigen::VectorXd from_normal_coords(const ManifoldModel& model, const Link& link,
                                   const NormalCoords& nc) {
  if (!(nc.r > 0.0 && nc.r <= link.R))
    throw ValidationError("from_normal_coords: r must lie in (0, R]");
  if (nc.j < 0 || nc.j >= link.components())
    throw ValidationError("from_normal_coords: component index out of range");
  const auto ta = link.transverse_axes();
  const Eigen::Vector2d& c = link.base_points[static_cast<size_t>(nc.j)];
  Eigen::VectorXd x(model.dim);
  x.setZero();
  x[ta[0]] = c[0] + nc.r * std::cos(nc.theta);
  x[ta[1]] = c[1] + nc.r * std::sin(nc.theta);
  if (link.dim == 3) x[link.axis] = nc.s;
  return model.wrap_point(x);
}

}  // namespace cloaklab
