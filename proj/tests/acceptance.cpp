// Acceptance gate: each criterion prints exactly one PASS/FAIL line.
// Usage: acceptance [N]   (run only criterion N in 1..10; default all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cloaklab/config.hpp"
#include "cloaklab/surgery.hpp"

using namespace cloaklab;

namespace {

struct Check {
  bool ok = true;
  void require(bool cond) { ok = ok && cond; }
};

double now_minus(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ManifoldModel flat_torus() { return ManifoldModel::torus2(2 * M_PI, 2 * M_PI); }

Link center_link(const ManifoldModel& model) {
  return Link::points_2d(model, {{M_PI, M_PI}}, 1.0);
}

double l2_error(const AssembledForms& forms, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::VectorXd d = a - b;
  return std::sqrt(d.dot(forms.mass * d));
}

// --- criterion 1: Fourier-oracle agreement at eps = 0 ------------------------
bool criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const ManifoldModel model = flat_torus();
  const std::vector<std::vector<FourierMode>> sources = {
      {{{1, 0, 0}, 1.0, 0.0}},
      {{{0, 1, 0}, 0.0, 1.0}},
      {{{2, 0, 0}, 1.0, 0.5}},
      {{{1, 1, 0}, 0.7, -0.3}},
      {{{2, 1, 0}, 0.0, 1.0}},
  };
  const double k2 = 0.5;
  Check c;
  for (const auto& modes : sources) {
    const ScalarFieldN f = fourier_field(model, modes);
    const ScalarFieldN exact = fourier_oracle(model, modes, k2);
    std::vector<double> errs;
    for (double h : {0.1, 0.05, 0.025}) {
      const Mesh mesh = build_mesh(model, nullptr, 0.0, h);
      const AssembledForms forms = assemble(mesh, model);
      const Eigen::VectorXd u = solve_helmholtz(
          forms, mesh, k2, [&f](const Eigen::Vector2d& x) { return f(x); });
      const Eigen::VectorXd uo = evaluate_nodal(
          mesh, [&exact](const Eigen::Vector2d& x) { return exact(x); });
      errs.push_back(l2_error(forms, u, uo));
    }
    const double slope = std::log(errs[0] / errs[2]) / std::log(4.0);
    c.require(slope >= 1.8);
  }
  c.require(now_minus(t0) < 60.0);
  return c.ok;
}

// --- criterion 2: capacity decay --------------------------------------------
bool criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  const ManifoldModel model = flat_torus();
  const Link link = center_link(model);
  const double r0 = 0.5;
  const std::vector<double> eps_list = {0.1, 0.05, 0.025, 0.0125};
  Check c;
  std::vector<double> caps;
  for (double eps : eps_list) {
    const double cap = capacity(model, link, eps, r0, eps / 4.0);
    const double exact = 2 * M_PI / std::log(r0 / eps);
    c.require(std::abs(cap - exact) <= 0.05 * exact);
    caps.push_back(cap);
  }
  for (size_t i = 1; i < caps.size(); ++i) c.require(caps[i] < caps[i - 1]);
  // One-parameter fit cap ~ a / ln(r0 / eps); report the relative residual.
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < caps.size(); ++i) {
    const double x = 1.0 / std::log(r0 / eps_list[i]);
    num += x * caps[i];
    den += x * x;
  }
  const double a = num / den;
  double res2 = 0.0, nrm2 = 0.0;
  for (size_t i = 0; i < caps.size(); ++i) {
    const double fit = a / std::log(r0 / eps_list[i]);
    res2 += (caps[i] - fit) * (caps[i] - fit);
    nrm2 += caps[i] * caps[i];
  }
  c.require(std::sqrt(res2 / nrm2) <= 0.05);
  c.require(now_minus(t0) < 120.0);
  return c.ok;
}

SweepConfig acceptance_sweep_config() {
  SweepConfig cfg;
  cfg.model = flat_torus();
  cfg.link = center_link(cfg.model);
  cfg.eps_list = {0.2, 0.1, 0.05, 0.025};
  cfg.h = 0.02;
  cfg.k2 = 0.5;
  const ScalarFieldN bump = bump_field(cfg.model, Eigen::Vector2d(1.2, 1.2), 0.5, 1.0);
  cfg.source = [bump](const Eigen::Vector2d& x) { return bump(x); };
  cfg.window = RegionWindow::box({0.3, 0.3}, {2.1, 2.1});  // distance > 0.5 from the link
  cfg.reference_check = false;
  return cfg;
}

// --- criterion 3: source-to-solution convergence ----------------------------
bool criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  const ConvergenceReport rep = eps_sweep(acceptance_sweep_config());
  Check c;
  c.require(rep.l2_monotone);
  c.require(rep.sup_monotone);
  c.require(rep.final_below_half);
  c.require(now_minus(t0) < 300.0);
  return c.ok;
}

// --- criterion 4: Gamma-convergence precursors ------------------------------
bool criterion4() {
  const ManifoldModel model = flat_torus();
  const Link link = center_link(model);
  const std::vector<double> eps_list = {0.2, 0.1, 0.05, 0.025};
  const double h = 0.05, lambda = -1.0;

  std::mt19937_64 rng(20240817);
  std::uniform_int_distribution<int> um(0, 2);
  std::uniform_real_distribution<double> ua(-1.0, 1.0), up(0.0, 2 * M_PI);
  std::vector<NodalField> samples;
  while (samples.size() < 20) {
    struct Term {
      int mx, my;
      double amp, px, py;
    };
    std::vector<Term> terms;
    for (int t = 0; t < 3; ++t) terms.push_back({um(rng), um(rng), ua(rng), up(rng), up(rng)});
    // The leading term of the energy gap is pi * |grad u(p)|^2 * eps^2, so the
    // C eps^2 fit is only meaningful for samples whose gradient does not
    // degenerate at the link point; redraw the rare degenerate ones.
    double gx = 0.0, gy = 0.0;
    for (const auto& t : terms) {
      gx += -t.amp * t.mx * std::sin(t.mx * M_PI + t.px) * std::cos(t.my * M_PI + t.py);
      gy += -t.amp * t.my * std::cos(t.mx * M_PI + t.px) * std::sin(t.my * M_PI + t.py);
    }
    if (gx * gx + gy * gy < 0.25) continue;
    samples.push_back([terms](const Eigen::Vector2d& x) {
      double v = 0.0;
      for (const auto& t : terms)
        v += t.amp * std::cos(t.mx * x[0] + t.px) * std::cos(t.my * x[1] + t.py);
      return v;
    });
  }

  Check c;
  const GammaCheckReport rep = gamma_checks(model, link, samples, eps_list, h, lambda);
  c.require(rep.q1_monotone);
  c.require(rep.q1_converges);
  c.require(rep.eps2_fit_residual <= 0.10);

  // q2 on the constant field against the analytic hole-area formula, with the
  // hole area measured two independent ways: the mass form and the polygonal
  // (shoelace) area of the boundary loop.
  for (double eps : eps_list) {
    const Mesh mesh = build_mesh(model, &link, eps, h);
    const AssembledForms forms = assemble(mesh, model);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.n_vertices());
    const double q2 = eval_q2(forms, ones, lambda);
    double hole = 0.0;
    for (const auto& loop : mesh.boundary_loops) {
      double twice = 0.0;
      for (size_t i = 0; i < loop.size(); ++i) {
        const Eigen::Vector2d& p = mesh.vertices[static_cast<size_t>(loop[i])];
        const Eigen::Vector2d& q = mesh.vertices[static_cast<size_t>(loop[(i + 1) % loop.size()])];
        twice += p[0] * q[1] - q[0] * p[1];
      }
      hole += std::abs(twice) / 2.0;
    }
    const double analytic = lambda * (model.periods[0] * model.periods[1] - hole);
    c.require(std::abs(q2 - analytic) <= 1e-6);
  }
  return c.ok;
}

// --- criterion 5: uniform resolvent convergence -----------------------------
bool criterion5() {
  SweepConfig cfg = acceptance_sweep_config();
  cfg.eps_list = {0.2, 0.1, 0.05};
  cfg.h = 0.05;
  const std::vector<double> lambda_grid = {-0.5, -1.0, -2.0, -5.0};
  Check c;
  const ResolventSweepReport rep = resolvent_sweep(cfg, lambda_grid);
  c.require(rep.uniform_decreasing);
  for (size_t i = 1; i < rep.max_over_grid.size(); ++i)
    c.require(rep.max_over_grid[i] < rep.max_over_grid[i - 1]);

  // First resolvent identity R(l1) - R(l2) = (l1 - l2) R(l1) R(l2), relative 1e-8.
  const Mesh mesh = build_mesh(cfg.model, nullptr, 0.0, 0.05);
  const AssembledForms forms = assemble(mesh, cfg.model);
  const Eigen::VectorXd f = evaluate_nodal(mesh, cfg.source);
  const double l1 = -0.5, l2 = -5.0;
  const Eigen::VectorXd lhs = resolvent(forms, l1, f) - resolvent(forms, l2, f);
  const Eigen::VectorXd rhs = (l1 - l2) * resolvent(forms, l1, resolvent(forms, l2, f));
  const Eigen::VectorXd d = lhs - rhs;
  const double scale = std::sqrt(lhs.dot(forms.mass * lhs));
  c.require(std::sqrt(d.dot(forms.mass * d)) <= 1e-8 * std::max(scale, 1e-300));
  return c.ok;
}

// --- criterion 6: spectrum convergence --------------------------------------
bool criterion6() {
  const ManifoldModel model = flat_torus();
  const Link link = center_link(model);
  const Mesh mesh = build_mesh(model, &link, 0.025, 0.025);
  const AssembledForms forms = assemble(mesh, model);
  const SpectrumReport sp = spectrum(forms, mesh, 6);
  Check c;
  c.require(std::abs(sp.eigenvalues[0]) <= 1e-8);
  const std::vector<double> target = {1, 1, 1, 1, 2};
  for (size_t i = 0; i < target.size(); ++i)
    c.require(std::abs(sp.eigenvalues[i + 1] - target[i]) <= 0.05 * target[i]);
  return c.ok;
}

// --- criterion 7: singularity exponents -------------------------------------
bool criterion7() {
  const ManifoldModel model = flat_torus();
  const Link link = center_link(model);
  const TransformationMap map(model, link);
  const SingularityProfile prof = singularity_profile(map, 10000);
  Check c;
  c.require(std::abs(prof.slope_sigma_thth - (-1.0)) <= 0.01);
  c.require(std::abs(prof.slope_sigma_rr - 1.0) <= 0.01);
  c.require(std::abs(prof.slope_sigma_ss - 1.0) <= 0.01);
  c.require(std::abs(prof.slope_sqrt_det - 1.0) <= 0.01);
  c.require(prof.bounds_hold);
  c.require(prof.samples.size() == 10000);
  return c.ok;
}

// --- criterion 8: physical / virtual equivalence ----------------------------
bool criterion8() {
  const ManifoldModel model = flat_torus();
  const Link link = center_link(model);
  const TransformationMap map(model, link);
  const ScalarFieldN bump = bump_field(model, Eigen::Vector2d(1.2, 1.2), 0.5, 1.0);
  const std::vector<NodalField> sources = {
      [](const Eigen::Vector2d& x) { return std::cos(x[0]); },
      [](const Eigen::Vector2d& x) { return std::cos(x[1]) + 0.3 * std::sin(2 * x[0]); },
      [bump](const Eigen::Vector2d& x) { return bump(x); },
  };
  Check c;
  for (double eps : {0.1, 0.05})
    for (const NodalField& f : sources) {
      const Mesh mesh = build_mesh(model, &link, eps, 0.05);
      const AssembledForms forms = assemble(mesh, model);
      const Eigen::VectorXd uv = solve_helmholtz(forms, mesh, 0.5, f);
      const Eigen::VectorXd up = solve_physical(mesh, map, 0.5, f);
      c.require((uv - up).norm() <= 1e-8 * uv.norm());
    }
  return c.ok;
}

// --- criterion 9: 3-D reduction ---------------------------------------------
bool criterion9() {
  const ManifoldModel model2 = flat_torus();
  const ManifoldModel model3 = ManifoldModel::torus3(2 * M_PI, 2 * M_PI, 2 * M_PI);
  const double k2 = 0.5;
  Check c;

  // m = 0 slice of an s-independent source against the 3-D Fourier oracle.
  const ScalarFieldN oracle3 = fourier_oracle(model3, {{{1, 0, 0}, 1.0, 0.0}}, k2);
  const NodalField f = [](const Eigen::Vector2d& x) { return std::cos(x[0]); };
  std::vector<double> errs;
  for (double h : {0.1, 0.05, 0.025}) {
    const Mesh mesh = build_mesh(model2, nullptr, 0.0, h);
    const AssembledForms forms = assemble(mesh, model2);
    const Reduced3DSolution sol = reduce_3d(model3, forms, mesh, k2, {{0, true, f}}, 4);
    double worst = 0.0;
    for (int v = 0; v < mesh.n_vertices(); ++v) {
      Eigen::VectorXd p(3);
      p << mesh.vertices[static_cast<size_t>(v)][0], mesh.vertices[static_cast<size_t>(v)][1], 1.7;
      worst = std::max(worst, std::abs(sol.evaluate_at_vertex(v, 1.7) - oracle3(p)));
    }
    errs.push_back(worst);
  }
  c.require(std::log(errs[0] / errs[2]) / std::log(4.0) >= 1.8);

  // Two-mode superposition to 1e-10.
  const Mesh mesh = build_mesh(model2, nullptr, 0.0, 0.05);
  const AssembledForms forms = assemble(mesh, model2);
  const NodalField f2 = [](const Eigen::Vector2d& x) { return std::sin(x[1]); };
  const Reduced3DSolution both = reduce_3d(model3, forms, mesh, k2, {{1, true, f}, {2, false, f2}}, 4);
  const Reduced3DSolution a = reduce_3d(model3, forms, mesh, k2, {{1, true, f}}, 4);
  const Reduced3DSolution b = reduce_3d(model3, forms, mesh, k2, {{2, false, f2}}, 4);
  double worst = 0.0;
  for (int v = 0; v < mesh.n_vertices(); v += 17)
    for (double s : {0.0, 1.1, 4.4})
      worst = std::max(worst, std::abs(both.evaluate_at_vertex(v, s) -
                                       a.evaluate_at_vertex(v, s) - b.evaluate_at_vertex(v, s)));
  c.require(worst <= 1e-10);
  return c.ok;
}

// --- criterion 10: surgery maps ---------------------------------------------
bool criterion10() {
  Check c;
  const DerivativeControlReport rep =
      derivative_control_check(RadialExtension{BoundaryGluing::dehn_twist()}, 1000);
  c.require(rep.radial_derivative_deviation <= 1e-8);
  c.require(rep.global_bound <= 1.0 + 1e-6);

  // Handle-map injectivity sampling on the attachment circles.
  std::vector<HandleImage> images;
  for (int j = 0; j < 2; ++j)
    for (int it = 1; it <= 9; ++it) {
      const double t = it / 10.0;
      if (t == 0.5) continue;
      for (int ia = 0; ia < 48; ++ia) {
        const double ang = 2 * M_PI * ia / 48;
        images.push_back(handle_map_2d(2, {std::cos(ang), std::sin(ang)}, t, j));
      }
    }
  int collisions = 0;
  for (size_t i = 0; i < images.size(); ++i)
    for (size_t k = i + 1; k < images.size(); ++k)
      if (images[i].j == images[k].j && images[i].face == images[k].face &&
          (images[i].disk_point - images[k].disk_point).norm() <= 1e-9)
        ++collisions;
  c.require(collisions == 0);
  return c.ok;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<bool()>>> criteria = {
      {"fourier oracle agreement", criterion1},
      {"capacity decay", criterion2},
      {"source-to-solution convergence", criterion3},
      {"gamma-convergence precursors", criterion4},
      {"uniform resolvent convergence", criterion5},
      {"spectrum convergence", criterion6},
      {"singularity exponents", criterion7},
      {"physical/virtual equivalence", criterion8},
      {"3-d reduction", criterion9},
      {"surgery maps", criterion10},
  };

  int only = 0;
  if (argc > 1) {
    only = std::atoi(argv[1]);
    if (only < 1 || only > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "usage: %s [1..%zu]\n", argv[0], criteria.size());
      return 64;
    }
  }

  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    if (only && static_cast<int>(i + 1) != only) continue;
    bool ok = false;
    try {
      ok = criteria[i].second();
    } catch (const std::exception& e) {
      std::fprintf(stderr, "criterion %zu raised: %s\n", i + 1, e.what());
      ok = false;
    }
    std::printf("criterion %zu (%s): %s\n", i + 1, criteria[i].first.c_str(),
                ok ? "PASS" : "FAIL");
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures;
}
