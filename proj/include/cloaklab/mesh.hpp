#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

#include "cloaklab/geometry.hpp"

namespace cloaklab {

// Periodic conforming triangulation of the 2-torus minus J polygonal disks
// of radius epsilon. Built from a uniform background grid with a graded
// annular patch stitched around each hole; fully deterministic.
struct Mesh {
  ManifoldModel model;
  int nx = 0, ny = 0;      // background grid resolution
  double hx = 0.0, hy = 0.0;
  double h = 0.0;          // requested target edge length
  double epsilon = 0.0;    // hole radius, 0 = no holes

  std::vector<Eigen::Vector2d> vertices;          // wrapped into the chart box
  std::vector<std::array<int, 3>> triangles;      // CCW vertex index triples
  std::vector<std::vector<int>> boundary_loops;   // one CCW cycle per hole

  // Mesh vertex index of background grid node (i, j), or -1 if removed.
  std::vector<int> grid_vertex;
  int grid_index(int i, int j) const;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }

  // Corner coordinates unwrapped so the triangle is geometrically contiguous
  // (each corner within half a period of corner 0).
  std::array<Eigen::Vector2d, 3> triangle_coords(int t) const;
  double triangle_area(int t) const;
  Eigen::Vector2d barycenter(int t) const;  // wrapped

  double total_area() const;
  double min_angle_deg() const;
  int euler_characteristic() const;

  // P1 interpolation of a nodal field at a chart point. Fails (nullopt) only
  // for points inside a hole.
  std::optional<double> interpolate(const std::vector<double>& nodal,
                                    const Eigen::Vector2d& x) const;

  void dump(std::ostream& os) const;

  // Internal point-location data: cell -> -2 background, or patch id.
  std::vector<int> cell_owner;
  std::vector<std::pair<int, int>> patch_triangle_range;
  std::vector<std::pair<int, int>> cell_triangles;  // background cell -> 2 triangles
};

// Measurement / source-support set: an annulus about one link component or
// an axis-aligned periodic box.
struct RegionWindow {
  enum class Kind { Annulus, Box, All };
  Kind kind = Kind::All;
  // Annulus.
  const Link* link = nullptr;
  int component = 0;
  double a = 0.0, b = 0.0;
  // Box: [lo, hi] per axis; hi < lo means the interval wraps around.
  Eigen::Vector2d lo = Eigen::Vector2d::Zero();
  Eigen::Vector2d hi = Eigen::Vector2d::Zero();

  static RegionWindow all();
  static RegionWindow annulus(const Link& L, int component, double a, double b);
  static RegionWindow box(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi);

  bool contains(const ManifoldModel& model, const Eigen::Vector2d& x) const;
};

// Builds the periodic mesh. Requires h <= period/16; for epsilon > 0 also
// a link, epsilon < R, and h <= 2*epsilon (the graded patch supplies the
// near-hole resolution).
Mesh build_mesh(const ManifoldModel& model, const Link* link, double epsilon, double h);

// Indices of triangles whose barycenter lies in the window.
std::vector<int> restrict_triangles(const Mesh& mesh, const RegionWindow& window);

}  // namespace cloaklab
