#include "cloaklab/convergence.hpp"

#include <cmath>
#include <future>

namespace cloaklab {

namespace {

struct WindowData {
  std::vector<int> tri_set;       // triangles of V on the reference mesh
  SparseMat Mv;                   // mass restricted to V
  std::vector<int> verts;         // vertices touched by V triangles
};

WindowData window_data(const Mesh& ref, const RegionWindow& window, const Link& link) {
  WindowData w;
  w.tri_set = restrict_triangles(ref, window);
  w.Mv = mass_on(ref, w.tri_set);
  std::vector<bool> seen(static_cast<size_t>(ref.n_vertices()), false);
  for (int t : w.tri_set)
    for (int c = 0; c < 3; ++c) {
      const int v = ref.triangles[static_cast<size_t>(t)][static_cast<size_t>(c)];
      if (!seen[static_cast<size_t>(v)]) {
        seen[static_cast<size_t>(v)] = true;
        w.verts.push_back(v);
      }
    }
  for (int v : w.verts) {
    Eigen::VectorXd x(2);
    x << ref.vertices[static_cast<size_t>(v)][0], ref.vertices[static_cast<size_t>(v)][1];
    if (link.nearest_component(ref.model, x).first < link.R)
      throw ValidationError("window must be disjoint from T(R)");
  }
  return w;
}

// Difference of a solution on an eps-mesh against the reference solution,
// expressed on the reference vertex numbering. The two meshes share the
// background grid, so window vertices correspond through grid indices.
Eigen::VectorXd window_diff(const Mesh& ref, const Eigen::VectorXd& u0, const Mesh& holed,
                            const Eigen::VectorXd& ue, const WindowData& w) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(ref.n_vertices());
  for (int v : w.verts) {
    // Reference vertex -> grid cell -> eps-mesh vertex.
    const Eigen::Vector2d& p = ref.vertices[static_cast<size_t>(v)];
    const int i = static_cast<int>(std::lround(p[0] / ref.hx));
    const int j = static_cast<int>(std::lround(p[1] / ref.hy));
    const int v2 = holed.grid_index(i, j);
    if (v2 < 0)
      throw ValidationError("window overlaps a hole patch; move V away from the link");
    d[v] = ue[v2] - u0[v];
  }
  return d;
}

double sup_on(const Eigen::VectorXd& d, const WindowData& w) {
  double m = 0.0;
  for (int v : w.verts) m = std::max(m, std::abs(d[v]));
  return m;
}

void validate_sweep(const SweepConfig& config) {
  if (config.eps_list.empty()) throw ValidationError("eps_sweep: empty eps_list");
  for (size_t i = 0; i < config.eps_list.size(); ++i) {
    if (!(config.eps_list[i] > 0.0 && config.eps_list[i] < config.link.R))
      throw ValidationError("eps_sweep: eps values must lie in (0, R)");
    if (i > 0 && !(config.eps_list[i] < config.eps_list[i - 1]))
      throw ValidationError("eps_sweep: eps_list must be strictly decreasing");
  }
  // The source must vanish on T(R).
  for (int j = 0; j < config.link.components(); ++j)
    for (int ir = 1; ir <= 4; ++ir)
      for (int ith = 0; ith < 8; ++ith) {
        NormalCoords nc{config.link.R * ir / 4.5, 2 * M_PI * ith / 8, 0.0, j};
        const Eigen::VectorXd x = from_normal_coords(config.model, config.link, nc);
        if (std::abs(config.source(Eigen::Vector2d(x[0], x[1]))) > 0.0)
          throw ValidationError("eps_sweep: source support must be disjoint from T(R)");
      }
}

}  // namespace

LogFit fit_log_rate(const std::vector<double>& errors, const std::vector<double>& eps_list) {
  if (errors.size() != eps_list.size() || errors.size() < 3)
    throw ValidationError("fit_log_rate: need at least 3 points");
  const int n = static_cast<int>(errors.size());
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    if (!(eps_list[static_cast<size_t>(i)] > 0.0 && eps_list[static_cast<size_t>(i)] < 1.0))
      throw ValidationError("fit_log_rate: eps values must lie in (0, 1)");
    A(i, 0) = 1.0 / std::log(1.0 / eps_list[static_cast<size_t>(i)]);
    A(i, 1) = 1.0;
    y[i] = errors[static_cast<size_t>(i)];
  }
  const Eigen::Matrix2d AtA = A.transpose() * A;
  if (std::abs(AtA.determinant()) < 1e-14 * AtA.norm() * AtA.norm())
    throw ValidationError("fit_log_rate: degenerate design matrix");
  const Eigen::Vector2d coef = AtA.ldlt().solve(A.transpose() * y);
  LogFit fit;
  fit.a = coef[0];
  fit.b = coef[1];
  const double ynorm = y.norm();
  fit.residual = (ynorm > 0.0) ? (A * coef - y).norm() / ynorm : 0.0;
  return fit;
}

ConvergenceReport eps_sweep(const SweepConfig& config) {
  validate_sweep(config);
  const ManifoldModel& model = config.model;

  const Mesh ref = build_mesh(model, nullptr, 0.0, config.h);
  const AssembledForms forms0 = assemble(ref, model);
  const Eigen::VectorXd u0 =
      solve_helmholtz(forms0, ref, config.k2, config.source, config.solve_opts);
  const WindowData w = window_data(ref, config.window, config.link);

  ConvergenceReport rep;
  rep.eps_list = config.eps_list;
  rep.h = config.h;

  auto run_case = [&](double eps) {
    Mesh mesh;
    try {
      mesh = build_mesh(model, &config.link, eps, config.h);
      const AssembledForms f = assemble(mesh, model);
      const Eigen::VectorXd ue =
          solve_helmholtz(f, mesh, config.k2, config.source, config.solve_opts);
      const Eigen::VectorXd d = window_diff(ref, u0, mesh, ue, w);
      return std::pair<double, double>{std::sqrt(d.dot(w.Mv * d)), sup_on(d, w)};
    } catch (const NumericalError& e) {
      throw NumericalError("eps = " + std::to_string(eps) + ": " + e.what());
    }
  };

  if (config.threads > 1) {
    std::vector<std::future<std::pair<double, double>>> futs;
    for (double eps : config.eps_list)
      futs.push_back(std::async(std::launch::async, run_case, eps));
    for (auto& fu : futs) {
      auto [l2, sup] = fu.get();
      rep.l2_errors.push_back(l2);
      rep.sup_errors.push_back(sup);
    }
  } else {
    for (double eps : config.eps_list) {
      auto [l2, sup] = run_case(eps);
      rep.l2_errors.push_back(l2);
      rep.sup_errors.push_back(sup);
    }
  }

  auto monotone10 = [](const std::vector<double>& e) {
    for (size_t i = 1; i < e.size(); ++i)
      if (!(e[i] < 1.1 * e[i - 1] + 1e-300)) return false;
    return e.size() < 2 || e.back() <= e.front();
  };
  rep.l2_monotone = monotone10(rep.l2_errors);
  rep.sup_monotone = monotone10(rep.sup_errors);
  rep.final_below_half =
      rep.l2_errors.size() < 2 || rep.l2_errors.back() < 0.5 * rep.l2_errors.front();

  if (rep.l2_errors.size() >= 3) {
    rep.fit = fit_log_rate(rep.l2_errors, rep.eps_list);
    rep.has_fit = true;
  }

  if (config.reference_check) {
    const Mesh fine = build_mesh(model, nullptr, 0.0, config.h / 2);
    const AssembledForms ffine = assemble(fine, model);
    const Eigen::VectorXd uf =
        solve_helmholtz(ffine, fine, config.k2, config.source, config.solve_opts);
    Eigen::VectorXd d = Eigen::VectorXd::Zero(ref.n_vertices());
    std::vector<double> nodal(uf.data(), uf.data() + uf.size());
    for (int v : w.verts) {
      const auto val = fine.interpolate(nodal, ref.vertices[static_cast<size_t>(v)]);
      if (!val) throw NumericalError("eps_sweep: reference interpolation failed");
      d[v] = u0[v] - *val;
    }
    rep.reference_gap = std::sqrt(d.dot(w.Mv * d));
    double min_err = std::numeric_limits<double>::infinity();
    for (double e : rep.l2_errors)
      if (e > 0.0) min_err = std::min(min_err, e);
    rep.reference_limited =
        std::isfinite(min_err) && rep.reference_gap > 0.1 * min_err;
  }
  return rep;
}

ResolventSweepReport resolvent_sweep(const SweepConfig& config,
                                     const std::vector<double>& lambda_grid) {
  if (lambda_grid.empty()) throw ValidationError("resolvent_sweep: empty grid");
  validate_sweep(config);
  const ManifoldModel& model = config.model;

  const Mesh ref = build_mesh(model, nullptr, 0.0, config.h);
  const AssembledForms forms0 = assemble(ref, model);
  const WindowData w = window_data(ref, config.window, config.link);
  const Eigen::VectorXd f0 = evaluate_nodal(ref, config.source);

  std::vector<Eigen::VectorXd> u0;
  for (double lam : lambda_grid)
    u0.push_back(resolvent(forms0, lam, f0, config.solve_opts));

  ResolventSweepReport rep;
  rep.eps_list = config.eps_list;
  rep.lambda_grid = lambda_grid;
  for (double eps : config.eps_list) {
    const Mesh mesh = build_mesh(model, &config.link, eps, config.h);
    const AssembledForms f = assemble(mesh, model);
    const Eigen::VectorXd fe = evaluate_nodal(mesh, config.source);
    std::vector<double> row;
    double worst = 0.0;
    for (size_t l = 0; l < lambda_grid.size(); ++l) {
      const Eigen::VectorXd ue = resolvent(f, lambda_grid[l], fe, config.solve_opts);
      const Eigen::VectorXd d = window_diff(ref, u0[l], mesh, ue, w);
      const double err = std::sqrt(d.dot(w.Mv * d));
      row.push_back(err);
      worst = std::max(worst, err);
    }
    rep.errors.push_back(std::move(row));
    rep.max_over_grid.push_back(worst);
  }
  rep.uniform_decreasing = true;
  for (size_t i = 1; i < rep.max_over_grid.size(); ++i)
    if (!(rep.max_over_grid[i] < 1.1 * rep.max_over_grid[i - 1]))
      rep.uniform_decreasing = false;
  if (rep.max_over_grid.size() >= 2 &&
      !(rep.max_over_grid.back() <= rep.max_over_grid.front()))
    rep.uniform_decreasing = false;
  return rep;
}

}  // namespace cloaklab
