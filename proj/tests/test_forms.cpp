#include <cmath>
#include <random>

#include "cloaklab/forms.hpp"
#include "doctest.h"

using namespace cloaklab;

namespace {

struct Setup {
  ManifoldModel model = ManifoldModel::torus2(2 * M_PI, 2 * M_PI);
  Link link;
  Setup() { link = Link::points_2d(model, {{M_PI, M_PI}}, 1.0); }
};

double q1_of(const ManifoldModel& model, const Link* link, double eps, double h,
             const NodalField& u) {
  const Mesh mesh = build_mesh(model, link, eps, h);
  const AssembledForms forms = assemble(mesh, model);
  return eval_q1(forms, evaluate_nodal(mesh, u));
}

}  // namespace

TEST_CASE("stiffness annihilates constants, mass integrates them") {
  Setup s;
  const Mesh mesh = build_mesh(s.model, nullptr, 0.0, 0.1);
  const AssembledForms forms = assemble(mesh, s.model);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.n_vertices());
  CHECK(std::abs(eval_q1(forms, ones)) <= 1e-10);
  CHECK(ones.dot(forms.mass * ones) == doctest::Approx(4 * M_PI * M_PI).epsilon(1e-6 / 39.0));
}

TEST_CASE("dirichlet energy of cos x converges to 2 pi^2") {
  Setup s;
  double prev_err = -1.0;
  const NodalField u = [](const Eigen::Vector2d& x) { return std::cos(x[0]); };
  for (double h : {0.2, 0.1, 0.05}) {
    const double err = std::abs(q1_of(s.model, nullptr, 0.0, h, u) - 2 * M_PI * M_PI);
    if (prev_err >= 0.0) CHECK(err < 0.3 * prev_err);  // O(h^2)
    prev_err = err;
  }
  CHECK(prev_err <= 0.01);
}

TEST_CASE("forms are symmetric and positive") {
  Setup s;
  const Mesh mesh = build_mesh(s.model, &s.link, 0.1, 0.1);
  const AssembledForms forms = assemble(mesh, s.model);
  const SparseMat kd = SparseMat(forms.stiffness - SparseMat(forms.stiffness.transpose()));
  const SparseMat md = SparseMat(forms.mass - SparseMat(forms.mass.transpose()));
  CHECK(kd.coeffs().cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(md.coeffs().cwiseAbs().maxCoeff() <= 1e-12);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> dist;
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd u(mesh.n_vertices());
    for (int k = 0; k < u.size(); ++k) u[k] = dist(rng);
    CHECK(eval_q1(forms, u) >= -1e-10 * u.squaredNorm());
    CHECK(u.dot(forms.mass * u) > 0.0);
  }
}

TEST_CASE("q2 values") {
  Setup s;
  const Mesh mesh = build_mesh(s.model, nullptr, 0.0, 0.1);
  const AssembledForms forms = assemble(mesh, s.model);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.n_vertices());
  CHECK(eval_q2(forms, ones, 0.0) == 0.0);
  CHECK(eval_q2(forms, ones, -1.0) == doctest::Approx(-4 * M_PI * M_PI).epsilon(1e-10));
}

TEST_CASE("capacity matches the annulus formula") {
  Setup s;
  const double c1 = capacity(s.model, s.link, 0.05, 0.5, 0.0125);
  CHECK(c1 == doctest::Approx(2 * M_PI / std::log(10.0)).epsilon(0.05));
  const double c2 = capacity(s.model, s.link, 0.005, 0.5, 0.00125);
  CHECK(c2 == doctest::Approx(2 * M_PI / std::log(100.0)).epsilon(0.05));
  CHECK(c2 < c1);  // domain monotonicity
}

TEST_CASE("capacity preconditions") {
  Setup s;
  CHECK_THROWS_WITH_AS(capacity(s.model, s.link, 0.05, 0.5, 0.05),
                       doctest::Contains("insufficient"), ValidationError);
  CHECK_THROWS_AS(capacity(s.model, s.link, 0.6, 0.5, 0.01), ValidationError);
  CHECK_THROWS_AS(capacity(s.model, s.link, 0.0, 0.5, 0.01), ValidationError);
}

TEST_CASE("q1 is unchanged by holes when u vanishes near the link") {
  Setup s;
  const NodalField u = [](const Eigen::Vector2d& x) {
    const double d2 = (x[0] - 1.0) * (x[0] - 1.0) + (x[1] - 1.0) * (x[1] - 1.0);
    return d2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - d2)) : 0.0;
  };
  const double q0 = q1_of(s.model, nullptr, 0.0, 0.1, u);
  for (double eps : {0.2, 0.1}) {
    const double qe = q1_of(s.model, &s.link, eps, 0.1, u);
    CHECK(qe == doctest::Approx(q0).epsilon(1e-12));
  }
}

TEST_CASE("removed-disk energy gap scales like eps^2 for cos x") {
  Setup s;
  const NodalField u = [](const Eigen::Vector2d& x) { return std::cos(x[0]); };
  const double h = 0.05;
  const double q0 = q1_of(s.model, nullptr, 0.0, h, u);
  std::vector<double> gaps, eps_list = {0.2, 0.1, 0.05};
  for (double eps : eps_list) gaps.push_back(std::abs(q0 - q1_of(s.model, &s.link, eps, h, u)));
  CHECK(gaps[1] < gaps[0]);
  CHECK(gaps[2] < gaps[1]);
  for (size_t i = 0; i < gaps.size(); ++i) {
    const double c = gaps[i] / (eps_list[i] * eps_list[i]);
    CHECK(c <= 10.0 * gaps[0] / 0.04);  // single uniform constant
  }
}

TEST_CASE("q2 hole-area identity for the constant field") {
  Setup s;
  const double lambda = -1.0;
  for (double eps : {0.2, 0.1}) {
    const Mesh mesh = build_mesh(s.model, &s.link, eps, 0.05);
    const AssembledForms forms = assemble(mesh, s.model);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.n_vertices());
    // Two routes to the punctured area: the mass form and the triangle sum.
    CHECK(std::abs(eval_q2(forms, ones, lambda) - lambda * mesh.total_area()) <= 1e-6);
  }
}

TEST_CASE("gamma checks report monotone approach") {
  Setup s;
  std::vector<NodalField> samples;
  for (int k = 1; k <= 5; ++k)
    samples.push_back([k](const Eigen::Vector2d& x) {
      return std::cos(k * x[0]) + 0.5 * std::sin(k * x[1]);
    });
  const GammaCheckReport rep =
      gamma_checks(s.model, s.link, samples, {0.2, 0.1, 0.05}, 0.05, -1.0);
  CHECK(rep.q1_monotone);
  CHECK(rep.q1_converges);
  CHECK(rep.q2_monotone);
  CHECK(rep.eps2_fit_residual <= 0.1);
}

TEST_CASE("physical assembly agrees with virtual assembly through the map") {
  Setup s;
  const TransformationMap map(s.model, s.link);
  const Mesh mesh = build_mesh(s.model, &s.link, 0.1, 0.1);
  const AssembledForms virt = assemble(mesh, s.model);
  const AssembledForms phys = assemble_physical(mesh, map);
  // The energy of any nodal field is preserved by the piecewise-linear
  // transport (the element maps are exact changes of variables).
  std::mt19937_64 rng(17);
  std::normal_distribution<double> dist;
  for (int i = 0; i < 20; ++i) {
    Eigen::VectorXd u(mesh.n_vertices());
    for (int k = 0; k < u.size(); ++k) u[k] = dist(rng);
    const double a = eval_q1(virt, u), b = eval_q1(phys, u);
    CHECK(std::abs(a - b) <= 1e-9 * std::abs(a));
    const double ma = u.dot(virt.mass * u), mb = u.dot(phys.mass * u);
    CHECK(std::abs(ma - mb) <= 1e-9 * ma);
  }
}
