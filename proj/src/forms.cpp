#include "cloaklab/forms.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>

namespace cloaklab {

namespace {

// Element contributions for a P1 triangle with a constant material tensor
// (stiffness) and a constant volume density (mass).
void element_matrices(const std::array<Eigen::Vector2d, 3>& p, const Eigen::Matrix2d& sigma,
                      double density, Eigen::Matrix3d& Ke, Eigen::Matrix3d& Me) {
  const Eigen::Vector2d e1 = p[1] - p[0];
  const Eigen::Vector2d e2 = p[2] - p[0];
  const double det = e1.x() * e2.y() - e1.y() * e2.x();
  if (det <= 0.0) throw NumericalError("assemble: degenerate triangle encountered");
  const double area = 0.5 * det;
  // Barycentric gradients.
  Eigen::Matrix<double, 2, 3> G;
  G.col(1) = Eigen::Vector2d(e2.y(), -e2.x()) / det;
  G.col(2) = Eigen::Vector2d(-e1.y(), e1.x()) / det;
  G.col(0) = -G.col(1) - G.col(2);
  Ke = area * G.transpose() * sigma * G;
  Me = density * area / 12.0 * (Eigen::Matrix3d::Ones() + Eigen::Matrix3d::Identity());
}

AssembledForms assemble_impl(
    const Mesh& mesh,
    const std::function<void(int, std::array<Eigen::Vector2d, 3>&, Eigen::Matrix2d&, double&)>&
        element_data) {
  const int n = mesh.n_vertices();
  std::vector<Eigen::Triplet<double>> kt, mt;
  kt.reserve(static_cast<size_t>(9 * mesh.n_triangles()));
  mt.reserve(static_cast<size_t>(9 * mesh.n_triangles()));
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    std::array<Eigen::Vector2d, 3> p = mesh.triangle_coords(t);
    Eigen::Matrix2d sigma = Eigen::Matrix2d::Identity();
    double density = 1.0;
    element_data(t, p, sigma, density);
    Eigen::Matrix3d Ke, Me;
    element_matrices(p, sigma, density, Ke, Me);
    const auto& tri = mesh.triangles[static_cast<size_t>(t)];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        kt.emplace_back(tri[i], tri[j], Ke(i, j));
        mt.emplace_back(tri[i], tri[j], Me(i, j));
      }
  }
  AssembledForms f;
  f.epsilon = mesh.epsilon;
  f.stiffness.resize(n, n);
  f.mass.resize(n, n);
  f.stiffness.setFromTriplets(kt.begin(), kt.end());
  f.mass.setFromTriplets(mt.begin(), mt.end());
  return f;
}

}  // namespace

AssembledForms assemble(const Mesh& mesh, const ManifoldModel& model) {
  return assemble_impl(mesh, [&](int, std::array<Eigen::Vector2d, 3>& p, Eigen::Matrix2d& sigma,
                                 double& density) {
    const Eigen::Vector2d b = (p[0] + p[1] + p[2]) / 3.0;
    Eigen::VectorXd bx(2);
    bx << mesh.model.wrap(0, b[0]), mesh.model.wrap(1, b[1]);
    sigma = conductivity_at(model, bx);
    density = std::sqrt(std::abs(metric_at(model, bx).det));
  });
}

std::vector<Eigen::Vector2d> physical_vertices(const Mesh& mesh, const TransformationMap& map) {
  std::vector<Eigen::Vector2d> out(mesh.vertices.size());
  for (size_t v = 0; v < mesh.vertices.size(); ++v) {
    Eigen::VectorXd x(2);
    x << mesh.vertices[v][0], mesh.vertices[v][1];
    const Eigen::VectorXd y = map.map_forward(x);
    out[v] = Eigen::Vector2d(y[0], y[1]);
  }
  return out;
}

AssembledForms assemble_physical(const Mesh& mesh, const TransformationMap& map) {
  const std::vector<Eigen::Vector2d> phys = physical_vertices(mesh, map);
  return assemble_impl(mesh, [&](int t, std::array<Eigen::Vector2d, 3>& p, Eigen::Matrix2d& sigma,
                                 double& density) {
    const std::array<Eigen::Vector2d, 3> pv = p;  // virtual, unwrapped
    const auto& tri = mesh.triangles[static_cast<size_t>(t)];
    // Physical corners, unwrapped relative to corner 0.
    std::array<Eigen::Vector2d, 3> q;
    q[0] = phys[static_cast<size_t>(tri[0])];
    for (int c = 1; c < 3; ++c) {
      Eigen::Vector2d qc = phys[static_cast<size_t>(tri[c])];
      for (int a = 0; a < 2; ++a)
        qc[a] = q[0][a] + mesh.model.periodic_delta(a, qc[a], q[0][a]);
      q[static_cast<size_t>(c)] = qc;
    }
    // Affine Jacobian of the per-element vertex map.
    Eigen::Matrix2d DP, DQ;
    DP.col(0) = pv[1] - pv[0];
    DP.col(1) = pv[2] - pv[0];
    DQ.col(0) = q[1] - q[0];
    DQ.col(1) = q[2] - q[0];
    const Eigen::Matrix2d B = DQ * DP.inverse();
    const double detB = B.determinant();
    if (detB <= 0.0) throw NumericalError("assemble_physical: element map not orientation-preserving");
    // Discrete pushforward of the identity conductivity and unit density.
    sigma = B * B.transpose() / detB;
    density = 1.0 / detB;
    p = q;
  });
}

double eval_q1(const AssembledForms& forms, const Eigen::VectorXd& u) {
  if (u.size() != forms.stiffness.rows()) throw ValidationError("eval_q1: dimension mismatch");
  return u.dot(forms.stiffness * u);
}

double eval_q2(const AssembledForms& forms, const Eigen::VectorXd& u, double lambda) {
  if (u.size() != forms.mass.rows()) throw ValidationError("eval_q2: dimension mismatch");
  return lambda * u.dot(forms.mass * u);
}

SparseMat mass_on(const Mesh& mesh, const std::vector<int>& tri_set) {
  const int n = mesh.n_vertices();
  std::vector<Eigen::Triplet<double>> mt;
  for (int t : tri_set) {
    const auto p = mesh.triangle_coords(t);
    Eigen::Matrix3d Ke, Me;
    element_matrices(p, Eigen::Matrix2d::Identity(), 1.0, Ke, Me);
    const auto& tri = mesh.triangles[static_cast<size_t>(t)];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) mt.emplace_back(tri[i], tri[j], Me(i, j));
  }
  SparseMat M(n, n);
  M.setFromTriplets(mt.begin(), mt.end());
  return M;
}

double capacity(const ManifoldModel& model, const Link& link, double eps, double r0, double h) {
  if (!(eps > 0.0 && eps < r0 && r0 <= link.R))
    throw ValidationError("capacity: need 0 < eps < r0 <= R");
  if (h > eps / 4)
    throw ValidationError("capacity: mesh resolution insufficient (h > eps/4)");
  (void)model;

  // Dedicated graded polar mesh of the annulus eps <= r <= r0. Radial
  // positions follow a geometric progression with first step ~ h.
  const int n_th = std::max(64, static_cast<int>(std::ceil(2 * M_PI * eps / h)));
  const double q = 1.0 + h / eps;
  const int K = std::max(8, static_cast<int>(std::ceil(std::log(r0 / eps) / std::log(q))));
  std::vector<double> radius(static_cast<size_t>(K + 1));
  for (int i = 0; i <= K; ++i)
    radius[static_cast<size_t>(i)] = eps * std::pow(r0 / eps, static_cast<double>(i) / K);

  const int n = (K + 1) * n_th;
  auto vid = [&](int lvl, int k) { return lvl * n_th + ((k % n_th + n_th) % n_th); };
  std::vector<Eigen::Vector2d> pts(static_cast<size_t>(n));
  for (int lvl = 0; lvl <= K; ++lvl)
    for (int k = 0; k < n_th; ++k) {
      const double th = 2 * M_PI * k / n_th;
      pts[static_cast<size_t>(vid(lvl, k))] =
          radius[static_cast<size_t>(lvl)] * Eigen::Vector2d(std::cos(th), std::sin(th));
    }

  std::vector<Eigen::Triplet<double>> kt;
  for (int lvl = 0; lvl < K; ++lvl)
    for (int k = 0; k < n_th; ++k) {
      const int ids[2][3] = {{vid(lvl, k), vid(lvl + 1, k + 1), vid(lvl, k + 1)},
                             {vid(lvl, k), vid(lvl + 1, k), vid(lvl + 1, k + 1)}};
      for (const auto& tri : ids) {
        const std::array<Eigen::Vector2d, 3> p = {pts[static_cast<size_t>(tri[0])],
                                                  pts[static_cast<size_t>(tri[1])],
                                                  pts[static_cast<size_t>(tri[2])]};
        Eigen::Matrix3d Ke, Me;
        element_matrices(p, Eigen::Matrix2d::Identity(), 1.0, Ke, Me);
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) kt.emplace_back(tri[i], tri[j], Ke(i, j));
      }
    }
  SparseMat Kfull(n, n);
  Kfull.setFromTriplets(kt.begin(), kt.end());

  // Boundary data: 1 on the inner circle, 0 on the outer one; interior nodes
  // are the remaining levels.
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < n_th; ++k) u[vid(0, k)] = 1.0;
  const int n_int = (K - 1) * n_th;
  std::vector<int> to_int(static_cast<size_t>(n), -1);
  for (int lvl = 1; lvl < K; ++lvl)
    for (int k = 0; k < n_th; ++k) to_int[static_cast<size_t>(vid(lvl, k))] = vid(lvl - 1, k);
  SparseMat Kii(n_int, n_int);
  std::vector<Eigen::Triplet<double>> it;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_int);
  for (int col = 0; col < n; ++col)
    for (SparseMat::InnerIterator iter(Kfull, col); iter; ++iter) {
      const int i = static_cast<int>(iter.row());
      const int j = col;
      if (to_int[static_cast<size_t>(i)] >= 0 && to_int[static_cast<size_t>(j)] >= 0)
        it.emplace_back(to_int[static_cast<size_t>(i)], to_int[static_cast<size_t>(j)],
                        iter.value());
      else if (to_int[static_cast<size_t>(i)] >= 0)
        rhs[to_int[static_cast<size_t>(i)]] -= iter.value() * u[j];
    }
  Kii.setFromTriplets(it.begin(), it.end());
  Eigen::SimplicialLDLT<SparseMat> solver(Kii);
  if (solver.info() != Eigen::Success)
    throw NumericalError("capacity: factorization of the interior system failed");
  const Eigen::VectorXd ui = solver.solve(rhs);
  for (int i = 0; i < n; ++i)
    if (to_int[static_cast<size_t>(i)] >= 0) u[i] = ui[to_int[static_cast<size_t>(i)]];
  return u.dot(Kfull * u);
}

Eigen::VectorXd evaluate_nodal(const Mesh& mesh, const NodalField& u) {
  Eigen::VectorXd v(mesh.n_vertices());
  for (int i = 0; i < mesh.n_vertices(); ++i) v[i] = u(mesh.vertices[static_cast<size_t>(i)]);
  return v;
}

GammaCheckReport gamma_checks(const ManifoldModel& model, const Link& link,
                              const std::vector<NodalField>& u_samples,
                              const std::vector<double>& eps_list, double h, double lambda) {
  for (size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1]))
      throw ValidationError("gamma_checks: eps_list must be strictly decreasing");
  GammaCheckReport report;
  report.lambda = lambda;

  auto run_one = [&](double eps) {
    const Mesh mesh = build_mesh(model, eps > 0 ? &link : nullptr, eps, h);
    const AssembledForms f = assemble(mesh, model);
    GammaCheckEntry e;
    e.epsilon = eps;
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.n_vertices());
    e.area = ones.dot(f.mass * ones);
    for (const auto& u : u_samples) {
      const Eigen::VectorXd un = evaluate_nodal(mesh, u);
      e.q1.push_back(eval_q1(f, un));
      e.q2.push_back(eval_q2(f, un, lambda));
    }
    return e;
  };
  for (double eps : eps_list) report.entries.push_back(run_one(eps));
  report.entries.push_back(run_one(0.0));

  const size_t ns = u_samples.size();
  const size_t ne = eps_list.size();
  const GammaCheckEntry& limit = report.entries.back();
  report.q1_monotone = true;
  report.q2_monotone = true;
  report.q1_converges = true;
  for (size_t s = 0; s < ns; ++s) {
    const double scale = std::max(1.0, std::abs(limit.q1[s]));
    for (size_t i = 1; i < ne; ++i) {
      if (report.entries[i].q1[s] < report.entries[i - 1].q1[s] - 1e-10 * scale)
        report.q1_monotone = false;
      if (lambda < 0 && report.entries[i].q2[s] > report.entries[i - 1].q2[s] + 1e-10 * scale)
        report.q2_monotone = false;
    }
    const double gap_first = std::abs(report.entries.front().q1[s] - limit.q1[s]);
    const double gap_last = std::abs(report.entries[ne - 1].q1[s] - limit.q1[s]);
    if (gap_last > gap_first + 1e-10 * scale) report.q1_converges = false;
    report.max_q1_gap_final = std::max(report.max_q1_gap_final, gap_last / scale);
  }

  // Least-squares fit of q1_0 - q1_eps against eps^2 (one constant per
  // sample), aggregated as the worst relative residual.
  double worst = 0.0;
  for (size_t s = 0; s < ns; ++s) {
    double num = 0.0, den = 0.0, norm2 = 0.0;
    for (size_t i = 0; i < ne; ++i) {
      const double d = limit.q1[s] - report.entries[i].q1[s];
      const double x = eps_list[i] * eps_list[i];
      num += d * x;
      den += x * x;
      norm2 += d * d;
    }
    if (norm2 <= 0.0) continue;
    const double c = num / den;
    double res2 = 0.0;
    for (size_t i = 0; i < ne; ++i) {
      const double d = limit.q1[s] - report.entries[i].q1[s];
      const double r = d - c * eps_list[i] * eps_list[i];
      res2 += r * r;
    }
    worst = std::max(worst, std::sqrt(res2 / norm2));
  }
  report.eps2_fit_residual = worst;
  return report;
}

}  // namespace cloaklab
