#include "cloaklab/surgery.hpp"

#include <cmath>

namespace cloaklab {

namespace {

constexpr double kTwoPi = 2 * M_PI;

double wrap_angle(double a) {
  double y = std::fmod(a, kTwoPi);
  if (y < 0.0) y += kTwoPi;
  if (y >= kTwoPi) y -= kTwoPi;
  return y;
}

// Signed angular difference in [-pi, pi).
double angle_delta(double a, double b) {
  double d = std::fmod(a - b, kTwoPi);
  if (d < -M_PI) d += kTwoPi;
  if (d >= M_PI) d -= kTwoPi;
  return d;
}

TorusAngles apply_matrix(const Eigen::Matrix2i& m, const TorusAngles& a) {
  TorusAngles out;
  out.theta = wrap_angle(m(0, 0) * a.theta + m(0, 1) * a.s);
  out.s = wrap_angle(m(1, 0) * a.theta + m(1, 1) * a.s);
  return out;
}

}  // namespace

BoundaryGluing BoundaryGluing::from_matrix(const Eigen::Matrix2i& m) {
  const int det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  if (det != 1 && det != -1)
    throw ValidationError("BoundaryGluing: matrix must be unimodular (|det| = 1)");
  BoundaryGluing g;
  g.is_matrix_ = true;
  g.mat_ = m;
  // Integer inverse of a unimodular matrix: adj(m) / det.
  Eigen::Matrix2i adj;
  adj << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  g.mat_inv_ = det * adj;
  return g;
}

BoundaryGluing BoundaryGluing::from_functions(AngleMap forward, AngleMap inverse) {
  if (!forward || !inverse)
    throw ValidationError("BoundaryGluing: both forward and inverse maps are required");
  BoundaryGluing g;
  g.fwd_ = std::move(forward);
  g.inv_ = std::move(inverse);
  g.verify_bijective();
  return g;
}

BoundaryGluing BoundaryGluing::identity() { return from_matrix(Eigen::Matrix2i::Identity()); }

BoundaryGluing BoundaryGluing::dehn_twist() {
  Eigen::Matrix2i m;
  m << 1, 1, 0, 1;
  return from_matrix(m);
}

TorusAngles BoundaryGluing::apply(const TorusAngles& a) const {
  return is_matrix_ ? apply_matrix(mat_, a) : fwd_(a);
}

TorusAngles BoundaryGluing::apply_inverse(const TorusAngles& a) const {
  return is_matrix_ ? apply_matrix(mat_inv_, a) : inv_(a);
}

void BoundaryGluing::verify_bijective(int n, double tol) const {
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const TorusAngles a{kTwoPi * i / n, kTwoPi * k / n};
      const TorusAngles b = apply_inverse(apply(a));
      if (std::abs(angle_delta(b.theta, a.theta)) > tol ||
          std::abs(angle_delta(b.s, a.s)) > tol)
        throw ValidationError("BoundaryGluing: sampled round trip is not the identity");
    }
  }
}

SolidTorusPoint RadialExtension::apply(const SolidTorusPoint& p) const {
  if (!(p.r > 0.0 && p.r <= 1.0))
    throw ValidationError("RadialExtension: r must lie in (0, 1]");
  SolidTorusPoint out = p;
  out.angles = gluing.apply(p.angles);
  return out;
}

SolidTorusPoint RadialExtension::apply_inverse(const SolidTorusPoint& p) const {
  if (!(p.r > 0.0 && p.r <= 1.0))
    throw ValidationError("RadialExtension: r must lie in (0, 1]");
  SolidTorusPoint out = p;
  out.angles = gluing.apply_inverse(p.angles);
  return out;
}

DerivativeControlReport derivative_control_check(const RadialExtension& H, int n_samples) {
  if (n_samples < 1000)
    throw ValidationError("derivative_control_check: n_samples must be >= 1000");
  const double h_fd = 1e-6;
  // Distribute samples over log-spaced radii and a fixed angular sweep.
  const int n_r = std::max(10, static_cast<int>(std::sqrt(n_samples)));
  const int n_ang = (n_samples + n_r - 1) / n_r;

  const char* names[3][3] = {
      {"d(pi_r)/d(r)", "d(pi_r)/d(theta)", "d(pi_r)/d(s)"},
      {"d(pi_theta)/d(r)", "d(pi_theta)/d(theta)", "d(pi_theta)/d(s)"},
      {"d(pi_s)/d(r)", "d(pi_s)/d(theta)", "d(pi_s)/d(s)"},
  };

  DerivativeControlReport report;
  auto eval = [&](double r, double th, double s) {
    return H.apply({r, {th, s}, 0});
  };
  for (int ir = 0; ir < n_r; ++ir) {
    const double a = static_cast<double>(ir) / (n_r - 1);
    const double r = std::exp(std::log(1e-6) + a * (std::log(1.0 - 2 * h_fd) - std::log(1e-6)));
    double max_abs[3][3] = {{0}};
    for (int ia = 0; ia < n_ang; ++ia) {
      const double th = kTwoPi * ia / n_ang + 0.1;
      const double s = kTwoPi * ((ia * 7) % n_ang) / n_ang + 0.2;
      // Central differences in each argument; angular outputs are compared
      // with wrap-aware deltas.
      for (int arg = 0; arg < 3; ++arg) {
        double rp = r, rm = r, thp = th, thm = th, sp = s, sm = s;
        const double step = (arg == 0) ? std::min(h_fd, r / 2) : h_fd;
        if (arg == 0) {
          rp += step;
          rm -= step;
        } else if (arg == 1) {
          thp += step;
          thm -= step;
        } else {
          sp += step;
          sm -= step;
        }
        const SolidTorusPoint up = eval(rp, thp, sp);
        const SolidTorusPoint um = eval(rm, thm, sm);
        const double d[3] = {
            (up.r - um.r) / (2 * step),
            angle_delta(up.angles.theta, um.angles.theta) / (2 * step),
            angle_delta(up.angles.s, um.angles.s) / (2 * step),
        };
        for (int comp = 0; comp < 3; ++comp)
          max_abs[comp][arg] = std::max(max_abs[comp][arg], std::abs(d[comp]));
        if (arg == 0)
          report.radial_derivative_deviation =
              std::max(report.radial_derivative_deviation, std::abs(d[0] - 1.0));
      }
    }
    for (int comp = 0; comp < 3; ++comp)
      for (int arg = 0; arg < 3; ++arg) {
        report.rows.push_back({r, names[comp][arg], max_abs[comp][arg]});
        report.global_bound = std::max(report.global_bound, max_abs[comp][arg]);
      }
  }
  return report;
}

HandleImage handle_map_2d(int J, const Eigen::Vector2d& x, double t, int j) {
  if (J < 1) throw ValidationError("handle_map_2d: J must be >= 1");
  if (j < 0 || j >= J) throw ValidationError("handle_map_2d: handle index out of range");
  if (x.norm() > 1.0 + 1e-12)
    throw ValidationError("handle_map_2d: x must lie in the closed unit disk");
  if (!(t > 0.0 && t < 1.0)) throw ValidationError("handle_map_2d: t must lie in (0, 1)");
  if (std::abs(t - 0.5) < 1e-12)
    throw ValidationError("handle_map_2d: t = 1/2 lies on the removed link circle");
  HandleImage img;
  img.j = j;
  if (t < 0.5) {
    img.disk_point = (1.0 - t) * x;
    img.face = 0;
  } else {
    img.disk_point = t * x;
    img.face = 1;
  }
  return img;
}

}  // namespace cloaklab
