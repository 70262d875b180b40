#include "cloaklab/transform.hpp"

#include <cmath>

namespace cloaklab {

RadialProfile::RadialProfile(double R_) : R(R_) {
  if (!(R > 0.0 && R <= 1.0)) throw ValidationError("RadialProfile: R must satisfy 0 < R <= 1");
}

double RadialProfile::forward(double r) const {
  if (!(r > 0.0 && r <= R)) throw ValidationError("RadialProfile::forward: r must lie in (0, R]");
  return 0.5 * (R + r);
}

double RadialProfile::inverse(double rt) const {
  if (!(rt > R / 2 && rt <= R))
    throw ValidationError("RadialProfile::inverse: r_tilde must lie in (R/2, R]");
  return 2.0 * rt - R;
}

TransformationMap::TransformationMap(const ManifoldModel& m, const Link& l)
    : model(&m), link(&l), profile(l.R) {}

Eigen::VectorXd TransformationMap::map_forward(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd xw = model->wrap_point(x);
  const auto [dist, j] = link->nearest_component(*model, xw);
  if (dist >= link->R) return xw;
  if (dist < 1e-14) throw ValidationError("map_forward: point lies on the link");
  NormalCoords nc = to_normal_coords(*model, *link, xw);
  nc.r = profile.forward(nc.r);
  return from_normal_coords(*model, *link, nc);
}

Eigen::VectorXd TransformationMap::map_inverse(const Eigen::VectorXd& x_phys) const {
  const Eigen::VectorXd xw = model->wrap_point(x_phys);
  const auto [dist, j] = link->nearest_component(*model, xw);
  if (dist >= link->R) return xw;
  if (dist <= link->R / 2 + 1e-15)
    throw ValidationError("map_inverse: point at or inside the cloaking surface radius R/2");
  NormalCoords nc = to_normal_coords(*model, *link, xw);
  nc.r = profile.inverse(nc.r);
  return from_normal_coords(*model, *link, nc);
}

NormalFrameTensor TransformationMap::pushforward_metric_normal(double r_tilde) const {
  const double R = profile.R;
  NormalFrameTensor t;
  if (r_tilde >= R) {  // identity region: the flat metric itself
    t.rr = 1.0;
    t.thth = r_tilde * r_tilde;
    t.ss = 1.0;
    t.sqrt_det = r_tilde;
    return t;
  }
  const double s = 2.0 * r_tilde - R;
  // Relative slack so that a sample computed as (t + R)/2 and mapped back
  // does not trip the cutoff through rounding alone.
  if (s < kSingularCutoff * (1.0 - 1e-9))
    throw NumericalError("pushforward_metric: 2*r_tilde - R below singular cutoff");
  t.rr = 4.0;
  t.thth = s * s;
  t.ss = 1.0;
  t.sqrt_det = 2.0 * s;
  return t;
}

NormalFrameTensor TransformationMap::pushforward_conductivity_normal(double r_tilde) const {
  const NormalFrameTensor g = pushforward_metric_normal(r_tilde);
  NormalFrameTensor s;
  s.rr = g.sqrt_det / g.rr;
  s.thth = g.sqrt_det / g.thth;
  s.ss = g.sqrt_det / g.ss;
  s.sqrt_det = g.sqrt_det;
  return s;
}

namespace {

// Unit radial/angular frame at a physical chart point, relative to the
// nearest component.
struct Frame {
  double r_tilde;
  Eigen::VectorXd e_r, e_th, e_s;
  int dim;
};

Frame frame_at(const ManifoldModel& model, const Link& link, const Eigen::VectorXd& x) {
  Frame f;
  f.dim = model.dim;
  const Eigen::VectorXd xw = model.wrap_point(x);
  const auto [dist, j] = link.nearest_component(model, xw);
  f.r_tilde = dist;
  const auto ta = link.transverse_axes();
  const Eigen::Vector2d& c = link.base_points[static_cast<size_t>(j)];
  const double dx = model.periodic_delta(ta[0], xw[ta[0]], c[0]);
  const double dy = model.periodic_delta(ta[1], xw[ta[1]], c[1]);
  const double r = std::hypot(dx, dy);
  if (r < 1e-14) throw ValidationError("pushforward tensor: point on the link axis");
  f.e_r = Eigen::VectorXd::Zero(model.dim);
  f.e_th = Eigen::VectorXd::Zero(model.dim);
  f.e_s = Eigen::VectorXd::Zero(model.dim);
  f.e_r[ta[0]] = dx / r;
  f.e_r[ta[1]] = dy / r;
  f.e_th[ta[0]] = -dy / r;
  f.e_th[ta[1]] = dx / r;
  if (model.dim == 3) f.e_s[link.axis] = 1.0;
  return f;
}

}  // namespace

MetricTensor TransformationMap::pushforward_metric(const Eigen::VectorXd& x_phys) const {
  const Frame f = frame_at(*model, *link, x_phys);
  if (f.r_tilde >= link->R) return metric_at(*model, model->wrap_point(x_phys));
  const NormalFrameTensor gn = pushforward_metric_normal(f.r_tilde);
  Eigen::MatrixXd g = gn.rr * f.e_r * f.e_r.transpose() +
                      gn.thth / (f.r_tilde * f.r_tilde) * f.e_th * f.e_th.transpose();
  if (model->dim == 3) g += gn.ss * f.e_s * f.e_s.transpose();
  return MetricTensor::from_components(g);
}

Eigen::MatrixXd TransformationMap::pushforward_conductivity(const Eigen::VectorXd& x_phys) const {
  const MetricTensor g = pushforward_metric(x_phys);
  return std::sqrt(std::abs(g.det)) * g.inverse;
}

TransformationMap::ScalarField TransformationMap::pushforward_function(ScalarField u) const {
  return [this, u = std::move(u)](const Eigen::VectorXd& x_phys) {
    return u(map_inverse(x_phys));
  };
}

TransformationMap::ScalarField TransformationMap::pullback_function(ScalarField u_tilde) const {
  return [this, u = std::move(u_tilde)](const Eigen::VectorXd& x) { return u(map_forward(x)); };
}

namespace {

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

SingularityProfile singularity_profile(const TransformationMap& map, int n_samples) {
  if (n_samples < 10) throw ValidationError("singularity_profile: n_samples must be >= 10");
  const double R = map.profile.R;
  const double t_lo = kSingularCutoff;
  const double t_hi = R;
  SingularityProfile out;
  std::vector<double> ts, sd, srr, sthth, sss;
  for (int i = 0; i < n_samples; ++i) {
    const double a = static_cast<double>(i) / (n_samples - 1);
    const double t = std::exp(std::log(t_lo) + a * (std::log(t_hi) - std::log(t_lo)));
    const double rt = 0.5 * (t + R);
    SingularitySample s;
    s.r_tilde = rt;
    const NormalFrameTensor g =
        (i + 1 == n_samples) ? map.pushforward_metric_normal(rt - 1e-12)
                             : map.pushforward_metric_normal(rt);
    const NormalFrameTensor sig =
        (i + 1 == n_samples) ? map.pushforward_conductivity_normal(rt - 1e-12)
                             : map.pushforward_conductivity_normal(rt);
    s.sqrt_det = g.sqrt_det;
    s.sigma_rr = sig.rr;
    s.sigma_thth = sig.thth;
    s.sigma_ss = sig.ss;
    out.samples.push_back(s);
    ts.push_back(t);
    sd.push_back(s.sqrt_det);
    srr.push_back(s.sigma_rr);
    sthth.push_back(s.sigma_thth);
    sss.push_back(s.sigma_ss);
  }
  out.slope_sqrt_det = loglog_slope(ts, sd);
  out.slope_sigma_rr = loglog_slope(ts, srr);
  out.slope_sigma_thth = loglog_slope(ts, sthth);
  out.slope_sigma_ss = loglog_slope(ts, sss);
  out.C_linear = 0.0;
  out.C_inverse = 0.0;
  for (size_t i = 0; i < ts.size(); ++i) {
    out.C_linear = std::max({out.C_linear, sd[i] / ts[i], srr[i] / ts[i], sss[i] / ts[i]});
    out.C_inverse = std::max(out.C_inverse, sthth[i] * ts[i]);
  }
  out.bounds_hold = true;
  const double slack = 1.0 + 1e-12;
  for (size_t i = 0; i < ts.size(); ++i) {
    if (sd[i] > slack * out.C_linear * ts[i] || srr[i] > slack * out.C_linear * ts[i] ||
        sss[i] > slack * out.C_linear * ts[i] || sthth[i] > slack * out.C_inverse / ts[i]) {
      out.bounds_hold = false;
    }
  }
  return out;
}

Eigen::Vector2d stereographic_project(const Eigen::Vector3d& p) {
  if (std::abs(p.norm() - 1.0) > 1e-10)
    throw ValidationError("stereographic_project: point not on the unit sphere");
  if (std::abs(1.0 - p[2]) < 1e-14)
    throw ValidationError("stereographic_project: projection undefined at the north pole");
  return Eigen::Vector2d(p[0], p[1]) / (1.0 - p[2]);
}

Eigen::Vector3d stereographic_unproject(const Eigen::Vector2d& q) {
  const double n2 = q.squaredNorm();
  return Eigen::Vector3d(2 * q[0], 2 * q[1], n2 - 1.0) / (n2 + 1.0);
}

namespace {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(static_cast<size_t>(n), 0.0);
  weights.assign(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2 * k + 1) * x * p1 - k * p2) / (k + 1);
      }
      const double dp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = 0.0;
    for (int k = 0; k < n; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2 * k + 1) * x * p1 - k * p2) / (k + 1);
    }
    const double dp = n * (x * p0 - p1) / (x * x - 1.0);
    nodes[static_cast<size_t>(i)] = x;
    weights[static_cast<size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

double shell_l2_sq(const TransformationMap& map, int, bool physical,
                   const std::function<double(double, double, double)>& u, int n_radial,
                   int n_angular) {
  const double R = map.profile.R;
  const double r_lo = physical ? R / 2 : 0.0;
  std::vector<double> gr, gw;
  gauss_legendre(n_radial, gr, gw);
  const int dim = map.model->dim;
  const int n_s = (dim == 3) ? n_angular : 1;
  const double Ps = (dim == 3) ? map.model->period(map.link->axis) : 1.0;
  double total = 0.0;
  for (int ir = 0; ir < n_radial; ++ir) {
    const double r = 0.5 * (r_lo + R) + 0.5 * (R - r_lo) * gr[static_cast<size_t>(ir)];
    const double wr = 0.5 * (R - r_lo) * gw[static_cast<size_t>(ir)];
    // Volume densities in normal coordinates: sqrt(det g) = r on the virtual
    // side, sqrt(det g~) = 2(2r~ - R) on the physical side.
    const double vol = physical ? 2.0 * (2.0 * r - R) : r;
    for (int ith = 0; ith < n_angular; ++ith) {
      const double th = 2 * M_PI * ith / n_angular;
      const double wth = 2 * M_PI / n_angular;
      for (int is = 0; is < n_s; ++is) {
        const double s = Ps * is / n_s;
        const double ws = Ps / n_s;
        const double val = u(r, th, s);
        total += wr * wth * (dim == 3 ? ws : 1.0) * val * val * vol;
      }
    }
  }
  return total;
}

}  // namespace

double shell_l2_norm_virtual(const TransformationMap& map, int j,
                             const std::function<double(double, double, double)>& u,
                             int n_radial, int n_angular) {
  return std::sqrt(shell_l2_sq(map, j, false, u, n_radial, n_angular));
}

double shell_l2_norm_physical(const TransformationMap& map, int j,
                              const std::function<double(double, double, double)>& u_tilde,
                              int n_radial, int n_angular) {
  return std::sqrt(shell_l2_sq(map, j, true, u_tilde, n_radial, n_angular));
}

}  // namespace cloaklab
