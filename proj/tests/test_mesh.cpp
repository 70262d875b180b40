#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "cloaklab/mesh.hpp"
#include "doctest.h"

using namespace cloaklab;

namespace {

struct Setup {
  ManifoldModel model = ManifoldModel::torus2(2 * M_PI, 2 * M_PI);
  Link link1;
  Link link2;
  Setup() {
    link1 = Link::points_2d(model, {{M_PI, M_PI}}, 1.0);
    link2 = Link::points_2d(model, {{1.5, 1.5}, {4.5, 4.5}}, 1.0);
  }
};

// Edge -> number of adjacent triangles.
std::map<std::pair<int, int>, int> edge_counts(const Mesh& m) {
  std::map<std::pair<int, int>, int> counts;
  for (const auto& t : m.triangles)
    for (int c = 0; c < 3; ++c) {
      int a = t[static_cast<size_t>(c)], b = t[static_cast<size_t>((c + 1) % 3)];
      if (a > b) std::swap(a, b);
      ++counts[{a, b}];
    }
  return counts;
}

}  // namespace

TEST_CASE("euler characteristic of the torus and punctured tori") {
  Setup s;
  CHECK(build_mesh(s.model, nullptr, 0.0, 0.1).euler_characteristic() == 0);
  CHECK(build_mesh(s.model, &s.link1, 0.1, 0.1).euler_characteristic() == -1);
  CHECK(build_mesh(s.model, &s.link2, 0.1, 0.1).euler_characteristic() == -2);
}

TEST_CASE("mesh is conforming with one boundary cycle per hole") {
  Setup s;
  const Mesh m = build_mesh(s.model, &s.link2, 0.1, 0.1);
  REQUIRE(m.boundary_loops.size() == 2);
  std::set<std::pair<int, int>> boundary_edges;
  for (const auto& loop : m.boundary_loops)
    for (size_t i = 0; i < loop.size(); ++i) {
      int a = loop[i], b = loop[(i + 1) % loop.size()];
      if (a > b) std::swap(a, b);
      boundary_edges.insert({a, b});
    }
  for (const auto& [edge, count] : edge_counts(m)) {
    if (boundary_edges.count(edge))
      CHECK(count == 1);
    else
      CHECK(count == 2);
  }
}

TEST_CASE("triangle quality and boundary placement") {
  Setup s;
  for (const auto [eps, h] : {std::pair{0.1, 0.1}, {0.05, 0.05}, {0.025, 0.025}, {0.2, 0.05}}) {
    const Mesh m = build_mesh(s.model, &s.link1, eps, h);
    CHECK(m.min_angle_deg() >= 20.0);
    for (int t = 0; t < m.n_triangles(); ++t) CHECK(m.triangle_area(t) > 0.0);
    for (int v : m.boundary_loops.at(0)) {
      const double d = (m.vertices[static_cast<size_t>(v)] - Eigen::Vector2d(M_PI, M_PI)).norm();
      CHECK(std::abs(d - eps) <= 1e-10);
    }
  }
}

TEST_CASE("total area converges to the punctured-torus area") {
  Setup s;
  const double eps = 0.2;
  const double exact = 4 * M_PI * M_PI - M_PI * eps * eps;
  std::vector<double> errs, hs;
  for (double h : {0.05, 0.025, 0.0125}) {
    const Mesh m = build_mesh(s.model, &s.link1, eps, h);
    errs.push_back(std::abs(m.total_area() - exact));
    hs.push_back(h);
  }
  CHECK(errs[1] < errs[0]);
  CHECK(errs[2] < errs[1]);
  // Fitted log-log slope; the polygon vertex count is quantized to whole
  // grid cells, so the measured rate at these resolutions sits below the
  // asymptotic 2.
  const double slope = std::log(errs[0] / errs[2]) / std::log(hs[0] / hs[2]);
  CHECK(slope >= 1.5);
  // Without holes the chart box is tiled exactly.
  const Mesh m0 = build_mesh(s.model, nullptr, 0.0, 0.05);
  CHECK(m0.total_area() == doctest::Approx(4 * M_PI * M_PI).epsilon(1e-12));
}

TEST_CASE("mesh construction is reproducible") {
  Setup s;
  const Mesh a = build_mesh(s.model, &s.link1, 0.1, 0.05);
  const Mesh b = build_mesh(s.model, &s.link1, 0.1, 0.05);
  REQUIRE(a.n_vertices() == b.n_vertices());
  REQUIRE(a.triangles == b.triangles);
  for (int v = 0; v < a.n_vertices(); ++v)
    CHECK(a.vertices[static_cast<size_t>(v)] == b.vertices[static_cast<size_t>(v)]);
}

TEST_CASE("background grid vertices are shared across epsilon") {
  Setup s;
  const Mesh holed = build_mesh(s.model, &s.link1, 0.1, 0.1);
  const Mesh full = build_mesh(s.model, nullptr, 0.0, 0.1);
  REQUIRE(holed.nx == full.nx);
  int shared = 0;
  for (int j = 0; j < full.ny; ++j)
    for (int i = 0; i < full.nx; ++i) {
      const int vh = holed.grid_index(i, j);
      if (vh < 0) continue;
      const int vf = full.grid_index(i, j);
      REQUIRE(vf >= 0);
      CHECK((holed.vertices[static_cast<size_t>(vh)] - full.vertices[static_cast<size_t>(vf)])
                .norm() == 0.0);
      ++shared;
    }
  CHECK(shared > 0.9 * full.n_vertices());
}

TEST_CASE("build_mesh preconditions") {
  Setup s;
  CHECK_THROWS_AS(build_mesh(s.model, &s.link1, 0.1, 1.0), ValidationError);   // h > period/16
  CHECK_THROWS_AS(build_mesh(s.model, &s.link1, 0.05, 0.2), ValidationError);  // h > 2 eps
  CHECK_THROWS_AS(build_mesh(s.model, &s.link1, 1.5, 0.1), ValidationError);   // eps >= R
  CHECK_THROWS_AS(build_mesh(s.model, nullptr, 0.1, 0.1), ValidationError);    // no link
  // Holes too close for disjoint patches under periodicity.
  const Link tight = Link::points_2d(s.model, {{1.0, 1.0}, {1.5, 1.0}}, 0.2);
  CHECK_THROWS_AS(build_mesh(s.model, &tight, 0.15, 0.1), ValidationError);
}

TEST_CASE("window restriction") {
  Setup s;
  const Mesh full = build_mesh(s.model, nullptr, 0.0, 0.05);

  SUBCASE("whole torus returns every triangle") {
    CHECK(restrict_triangles(full, RegionWindow::all()).size() ==
          static_cast<size_t>(full.n_triangles()));
  }

  SUBCASE("empty annulus errors") {
    CHECK_THROWS_WITH_AS(RegionWindow::annulus(s.link1, 0, 0.5, 0.2),
                         doctest::Contains("empty window"), ValidationError);
  }

  SUBCASE("box window area matches its triangles within 2%") {
    const RegionWindow w = RegionWindow::box({0.5, 0.5}, {2.0, 1.75});
    const auto tris = restrict_triangles(full, w);
    double area = 0.0;
    for (int t : tris) area += full.triangle_area(t);
    CHECK(area == doctest::Approx(1.5 * 1.25).epsilon(0.02));
  }

  SUBCASE("annulus window area matches its triangles within 2%") {
    const RegionWindow w = RegionWindow::annulus(s.link1, 0, 0.4, 0.8);
    const auto tris = restrict_triangles(full, w);
    double area = 0.0;
    for (int t : tris) area += full.triangle_area(t);
    CHECK(area == doctest::Approx(M_PI * (0.64 - 0.16)).epsilon(0.02));
  }
}

TEST_CASE("nodal interpolation reproduces nodal values and rejects holes") {
  Setup s;
  const Mesh m = build_mesh(s.model, &s.link1, 0.1, 0.1);
  std::vector<double> nodal(static_cast<size_t>(m.n_vertices()));
  for (int v = 0; v < m.n_vertices(); ++v)
    nodal[static_cast<size_t>(v)] = std::sin(m.vertices[static_cast<size_t>(v)][0]);
  for (int v = 0; v < m.n_vertices(); v += 17) {
    const auto got = m.interpolate(nodal, m.vertices[static_cast<size_t>(v)]);
    REQUIRE(got.has_value());
    CHECK(*got == doctest::Approx(nodal[static_cast<size_t>(v)]).epsilon(1e-10));
  }
  CHECK(!m.interpolate(nodal, Eigen::Vector2d(M_PI, M_PI)).has_value());
}

TEST_CASE("mesh dump format") {
  Setup s;
  const Mesh m = build_mesh(s.model, &s.link1, 0.2, 0.2);
  std::ostringstream os;
  m.dump(os);
  std::istringstream in(os.str());
  std::string tag;
  int n = 0;
  in >> tag >> n;
  CHECK(tag == "VERTICES");
  CHECK(n == m.n_vertices());
}
