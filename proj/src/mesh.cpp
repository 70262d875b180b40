#include "cloaklab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>

namespace cloaklab {

namespace {

int imod(int a, int n) {
  int r = a % n;
  return (r < 0) ? r + n : r;
}

struct Patch {
  int x0 = 0, y0 = 0;  // lowest cell index (unwrapped)
  int w = 0, hgt = 0;  // cells per side
  Eigen::Vector2d center;  // unwrapped, inside the patch rectangle
};

}  // namespace

int Mesh::grid_index(int i, int j) const {
  return grid_vertex[static_cast<size_t>(imod(i, nx) + nx * imod(j, ny))];
}

std::array<Eigen::Vector2d, 3> Mesh::triangle_coords(int t) const {
  const auto& tri = triangles[static_cast<size_t>(t)];
  std::array<Eigen::Vector2d, 3> p;
  p[0] = vertices[static_cast<size_t>(tri[0])];
  for (int c = 1; c < 3; ++c) {
    Eigen::Vector2d q = vertices[static_cast<size_t>(tri[c])];
    for (int a = 0; a < 2; ++a) q[a] = p[0][a] + model.periodic_delta(a, q[a], p[0][a]);
    p[static_cast<size_t>(c)] = q;
  }
  return p;
}

double Mesh::triangle_area(int t) const {
  const auto p = triangle_coords(t);
  return 0.5 * ((p[1] - p[0]).x() * (p[2] - p[0]).y() - (p[1] - p[0]).y() * (p[2] - p[0]).x());
}

Eigen::Vector2d Mesh::barycenter(int t) const {
  const auto p = triangle_coords(t);
  Eigen::Vector2d b = (p[0] + p[1] + p[2]) / 3.0;
  b[0] = model.wrap(0, b[0]);
  b[1] = model.wrap(1, b[1]);
  return b;
}

double Mesh::total_area() const {
  double a = 0.0;
  for (int t = 0; t < n_triangles(); ++t) a += triangle_area(t);
  return a;
}

double Mesh::min_angle_deg() const {
  double worst = 180.0;
  for (int t = 0; t < n_triangles(); ++t) {
    const auto p = triangle_coords(t);
    for (int c = 0; c < 3; ++c) {
      const Eigen::Vector2d u = p[(c + 1) % 3] - p[c];
      const Eigen::Vector2d v = p[(c + 2) % 3] - p[c];
      const double cosang = u.dot(v) / (u.norm() * v.norm());
      worst = std::min(worst, std::acos(std::clamp(cosang, -1.0, 1.0)) * 180.0 / M_PI);
    }
  }
  return worst;
}

int Mesh::euler_characteristic() const {
  std::set<std::pair<int, int>> edges;
  for (const auto& t : triangles)
    for (int c = 0; c < 3; ++c) {
      int a = t[c], b = t[(c + 1) % 3];
      if (a > b) std::swap(a, b);
      edges.insert({a, b});
    }
  return n_vertices() - static_cast<int>(edges.size()) + n_triangles();
}

namespace {

bool point_in_triangle(const std::array<Eigen::Vector2d, 3>& p, const Eigen::Vector2d& x,
                       double& l0, double& l1, double& l2, double tol) {
  const double det = (p[1] - p[0]).x() * (p[2] - p[0]).y() - (p[1] - p[0]).y() * (p[2] - p[0]).x();
  l1 = ((x - p[0]).x() * (p[2] - p[0]).y() - (x - p[0]).y() * (p[2] - p[0]).x()) / det;
  l2 = ((p[1] - p[0]).x() * (x - p[0]).y() - (p[1] - p[0]).y() * (x - p[0]).x()) / det;
  l0 = 1.0 - l1 - l2;
  return l0 >= -tol && l1 >= -tol && l2 >= -tol;
}

}  // namespace

std::optional<double> Mesh::interpolate(const std::vector<double>& nodal,
                                        const Eigen::Vector2d& x) const {
  Eigen::Vector2d xw(model.wrap(0, x[0]), model.wrap(1, x[1]));
  auto try_tri = [&](int t) -> std::optional<double> {
    auto p = triangle_coords(t);
    // Shift the triangle near the query point.
    Eigen::Vector2d shift = Eigen::Vector2d::Zero();
    for (int a = 0; a < 2; ++a)
      shift[a] = model.periodic_delta(a, xw[a], p[0][a]) - (xw[a] - p[0][a]);
    for (auto& q : p) q += shift;
    double l0, l1, l2;
    if (!point_in_triangle(p, xw, l0, l1, l2, 1e-10)) return std::nullopt;
    const auto& tri = triangles[static_cast<size_t>(t)];
    return l0 * nodal[static_cast<size_t>(tri[0])] + l1 * nodal[static_cast<size_t>(tri[1])] +
           l2 * nodal[static_cast<size_t>(tri[2])];
  };
  const int ci = imod(static_cast<int>(std::floor(xw[0] / hx)), nx);
  const int cj = imod(static_cast<int>(std::floor(xw[1] / hy)), ny);
  // Test the containing cell and its 8 neighbours.
  for (int dj = -1; dj <= 1; ++dj)
    for (int di = -1; di <= 1; ++di) {
      const int cell = imod(ci + di, nx) + nx * imod(cj + dj, ny);
      const int owner = cell_owner[static_cast<size_t>(cell)];
      if (owner == -2) {
        const auto [t0, t1] = cell_triangles[static_cast<size_t>(cell)];
        if (auto v = try_tri(t0)) return v;
        if (auto v = try_tri(t1)) return v;
      } else if (owner >= 0) {
        const auto [b, e] = patch_triangle_range[static_cast<size_t>(owner)];
        for (int t = b; t < e; ++t)
          if (auto v = try_tri(t)) return v;
      }
    }
  return std::nullopt;
}

void Mesh::dump(std::ostream& os) const {
  os << "VERTICES " << n_vertices() << "\n";
  for (int v = 0; v < n_vertices(); ++v)
    os << v << " " << vertices[static_cast<size_t>(v)][0] << " "
       << vertices[static_cast<size_t>(v)][1] << "\n";
  os << "TRIANGLES " << n_triangles() << "\n";
  for (const auto& t : triangles) os << t[0] << " " << t[1] << " " << t[2] << "\n";
  os << "BOUNDARY " << boundary_loops.size() << "\n";
  for (size_t l = 0; l < boundary_loops.size(); ++l) {
    os << l;
    for (int v : boundary_loops[l]) os << " " << v;
    os << "\n";
  }
}

RegionWindow RegionWindow::all() { return RegionWindow{}; }

RegionWindow RegionWindow::annulus(const Link& L, int component, double a, double b) {
  if (b < a) throw ValidationError("RegionWindow: empty window (b < a)");
  if (component < 0 || component >= L.components())
    throw ValidationError("RegionWindow: component index out of range");
  RegionWindow w;
  w.kind = Kind::Annulus;
  w.link = &L;
  w.component = component;
  w.a = a;
  w.b = b;
  return w;
}

RegionWindow RegionWindow::box(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi) {
  RegionWindow w;
  w.kind = Kind::Box;
  w.lo = lo;
  w.hi = hi;
  return w;
}

bool RegionWindow::contains(const ManifoldModel& model, const Eigen::Vector2d& x) const {
  switch (kind) {
    case Kind::All:
      return true;
    case Kind::Annulus: {
      Eigen::VectorXd p(2);
      p << x[0], x[1];
      const double r = link->distance_to(model, p, component);
      return r >= a && r <= b;
    }
    case Kind::Box:
      for (int axis = 0; axis < 2; ++axis) {
        const double l = model.wrap(axis, lo[axis]);
        const double u = model.wrap(axis, hi[axis]);
        const double v = model.wrap(axis, x[axis]);
        const bool inside = (l <= u) ? (v >= l && v <= u) : (v >= l || v <= u);
        if (!inside) return false;
      }
      return true;
  }
  return false;
}

namespace {

void check_patches_disjoint(const std::vector<Patch>& patches, int nx, int ny) {
  auto ranges_overlap = [](int a0, int aw, int b0, int bw, int n) {
    // Cell ranges on a circle of n cells, expanded by a 1-cell margin.
    for (int d = -1; d <= aw; ++d) {
      const int c = imod(a0 + d, n);
      const int rel = imod(c - b0, n);
      if (rel >= 0 && rel < bw) return true;
    }
    return false;
  };
  for (size_t i = 0; i < patches.size(); ++i)
    for (size_t k = i + 1; k < patches.size(); ++k)
      if (ranges_overlap(patches[i].x0, patches[i].w, patches[k].x0, patches[k].w, nx) &&
          ranges_overlap(patches[i].y0, patches[i].hgt, patches[k].y0, patches[k].hgt, ny))
        throw ValidationError("build_mesh: degenerate configuration, holes overlap under periodicity");
}

}  // namespace

Mesh build_mesh(const ManifoldModel& model, const Link* link, double epsilon, double h) {
  if (model.dim != 2) throw ValidationError("build_mesh: only 2-D meshing is supported");
  if (!(h > 0.0)) throw ValidationError("build_mesh: h must be positive");
  if (h > std::min(model.period(0), model.period(1)) / 16)
    throw ValidationError("build_mesh: h must be at most period/16");
  if (epsilon < 0.0) throw ValidationError("build_mesh: epsilon must be nonnegative");
  if (epsilon > 0.0) {
    if (!link) throw ValidationError("build_mesh: holes requested but no link given");
    if (!(epsilon < link->R)) throw ValidationError("build_mesh: epsilon must be < R");
    if (h > 2 * epsilon) throw ValidationError("build_mesh: h too coarse for hole radius");
  }

  Mesh mesh;
  mesh.model = model;
  mesh.h = h;
  mesh.epsilon = epsilon;
  mesh.nx = static_cast<int>(std::ceil(model.period(0) / h));
  mesh.ny = static_cast<int>(std::ceil(model.period(1) / h));
  mesh.hx = model.period(0) / mesh.nx;
  mesh.hy = model.period(1) / mesh.ny;
  const int nx = mesh.nx, ny = mesh.ny;
  const double hx = mesh.hx, hy = mesh.hy;

  std::vector<Patch> patches;
  if (epsilon > 0.0) {
    for (int j = 0; j < link->components(); ++j) {
      const Eigen::Vector2d& c = link->base_points[static_cast<size_t>(j)];
      const int icx = static_cast<int>(std::floor(c[0] / hx));
      const int icy = static_cast<int>(std::floor(c[1] / hy));
      const int mx = std::max(4, static_cast<int>(std::ceil(1.3 * epsilon / hx)));
      const int my = std::max(4, static_cast<int>(std::ceil(1.3 * epsilon / hy)));
      Patch p;
      p.x0 = icx - mx;
      p.y0 = icy - my;
      p.w = 2 * mx + 1;
      p.hgt = 2 * my + 1;
      p.center = c;
      if (p.w + 2 >= nx || p.hgt + 2 >= ny)
        throw ValidationError("build_mesh: h too coarse, hole patch wraps the torus");
      patches.push_back(p);
    }
    check_patches_disjoint(patches, nx, ny);
  }

  // Which cells belong to which patch.
  mesh.cell_owner.assign(static_cast<size_t>(nx * ny), -2);
  for (size_t pid = 0; pid < patches.size(); ++pid) {
    const Patch& p = patches[pid];
    for (int dj = 0; dj < p.hgt; ++dj)
      for (int di = 0; di < p.w; ++di)
        mesh.cell_owner[static_cast<size_t>(imod(p.x0 + di, nx) + nx * imod(p.y0 + dj, ny))] =
            static_cast<int>(pid);
  }

  // Grid vertices strictly inside a patch rectangle are removed.
  std::vector<bool> keep(static_cast<size_t>(nx * ny), true);
  for (const Patch& p : patches)
    for (int dj = 1; dj < p.hgt; ++dj)
      for (int di = 1; di < p.w; ++di)
        keep[static_cast<size_t>(imod(p.x0 + di, nx) + nx * imod(p.y0 + dj, ny))] = false;

  mesh.grid_vertex.assign(static_cast<size_t>(nx * ny), -1);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const size_t id = static_cast<size_t>(i + nx * j);
      if (keep[id]) {
        mesh.grid_vertex[id] = mesh.n_vertices();
        mesh.vertices.emplace_back(i * hx, j * hy);
      }
    }

  // Background cells.
  mesh.cell_triangles.assign(static_cast<size_t>(nx * ny), {-1, -1});
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const size_t cell = static_cast<size_t>(i + nx * j);
      if (mesh.cell_owner[cell] != -2) continue;
      const int v00 = mesh.grid_index(i, j);
      const int v10 = mesh.grid_index(i + 1, j);
      const int v11 = mesh.grid_index(i + 1, j + 1);
      const int v01 = mesh.grid_index(i, j + 1);
      mesh.cell_triangles[cell] = {mesh.n_triangles(), mesh.n_triangles() + 1};
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }

  // Annular patches: graded rings from the polygonal hole boundary out to
  // the rectangle of grid vertices.
  for (const Patch& p : patches) {
    const int tri_begin = mesh.n_triangles();
    // Rectangle boundary cycle, CCW from the lower-left corner.
    std::vector<std::pair<int, int>> cycle;
    for (int i = 0; i < p.w; ++i) cycle.push_back({p.x0 + i, p.y0});
    for (int j = 0; j < p.hgt; ++j) cycle.push_back({p.x0 + p.w, p.y0 + j});
    for (int i = 0; i < p.w; ++i) cycle.push_back({p.x0 + p.w - i, p.y0 + p.hgt});
    for (int j = 0; j < p.hgt; ++j) cycle.push_back({p.x0, p.y0 + p.hgt - j});
    const int N = static_cast<int>(cycle.size());

    std::vector<double> th(static_cast<size_t>(N)), d(static_cast<size_t>(N));
    std::vector<int> outer(static_cast<size_t>(N));
    double d_min = std::numeric_limits<double>::infinity();
    for (int k = 0; k < N; ++k) {
      const Eigen::Vector2d q(cycle[static_cast<size_t>(k)].first * hx,
                              cycle[static_cast<size_t>(k)].second * hy);
      const Eigen::Vector2d delta = q - p.center;
      th[static_cast<size_t>(k)] = std::atan2(delta[1], delta[0]);
      d[static_cast<size_t>(k)] = delta.norm();
      d_min = std::min(d_min, d[static_cast<size_t>(k)]);
      outer[static_cast<size_t>(k)] = mesh.grid_index(cycle[static_cast<size_t>(k)].first,
                                                      cycle[static_cast<size_t>(k)].second);
    }
    const double ratio = 1.0 + 2 * M_PI / N;
    const int K =
        std::max(3, static_cast<int>(std::lround(std::log(d_min / epsilon) / std::log(ratio))));

    // O-grid spokes: straight segments from a uniform-angle circle of radius
    // epsilon to the rectangle vertices, graded geometrically so the first
    // layer thickness matches the boundary arc spacing.
    std::vector<double> frac(static_cast<size_t>(K + 1));
    for (int i = 0; i <= K; ++i)
      frac[static_cast<size_t>(i)] = (std::pow(ratio, i) - 1.0) / (std::pow(ratio, K) - 1.0);

    // Ring vertices: level 0 is the hole boundary, level K the rectangle.
    std::vector<std::vector<int>> ring(static_cast<size_t>(K + 1),
                                       std::vector<int>(static_cast<size_t>(N)));
    std::vector<int> loop;
    for (int lvl = 0; lvl < K; ++lvl)
      for (int k = 0; k < N; ++k) {
        const double phi = th[0] + 2 * M_PI * k / N;
        const Eigen::Vector2d inner =
            p.center + epsilon * Eigen::Vector2d(std::cos(phi), std::sin(phi));
        const Eigen::Vector2d q(cycle[static_cast<size_t>(k)].first * hx,
                                cycle[static_cast<size_t>(k)].second * hy);
        const double f = frac[static_cast<size_t>(lvl)];
        Eigen::Vector2d v = (1.0 - f) * inner + f * q;
        v[0] = model.wrap(0, v[0]);
        v[1] = model.wrap(1, v[1]);
        ring[static_cast<size_t>(lvl)][static_cast<size_t>(k)] = mesh.n_vertices();
        mesh.vertices.push_back(v);
        if (lvl == 0) loop.push_back(ring[0][static_cast<size_t>(k)]);
      }
    ring[static_cast<size_t>(K)].assign(outer.begin(), outer.end());
    mesh.boundary_loops.push_back(std::move(loop));

    for (int lvl = 0; lvl < K; ++lvl)
      for (int k = 0; k < N; ++k) {
        const int kn = (k + 1) % N;
        const int a = ring[static_cast<size_t>(lvl)][static_cast<size_t>(k)];
        const int b = ring[static_cast<size_t>(lvl)][static_cast<size_t>(kn)];
        const int A = ring[static_cast<size_t>(lvl + 1)][static_cast<size_t>(k)];
        const int B = ring[static_cast<size_t>(lvl + 1)][static_cast<size_t>(kn)];
        // Split each quad along its shorter diagonal.
        auto pos = [&](int v) {
          Eigen::Vector2d q = mesh.vertices[static_cast<size_t>(v)];
          for (int ax = 0; ax < 2; ++ax)
            q[ax] = p.center[ax] + model.periodic_delta(ax, q[ax], p.center[ax]);
          return q;
        };
        if ((pos(a) - pos(B)).squaredNorm() <= (pos(b) - pos(A)).squaredNorm()) {
          mesh.triangles.push_back({a, B, b});
          mesh.triangles.push_back({a, A, B});
        } else {
          mesh.triangles.push_back({a, A, b});
          mesh.triangles.push_back({b, A, B});
        }
      }
    mesh.patch_triangle_range.push_back({tri_begin, mesh.n_triangles()});
  }

  return mesh;
}

std::vector<int> restrict_triangles(const Mesh& mesh, const RegionWindow& window) {
  if (window.kind == RegionWindow::Kind::Annulus && window.b < window.a)
    throw ValidationError("restrict_triangles: empty window");
  std::vector<int> out;
  for (int t = 0; t < mesh.n_triangles(); ++t)
    if (window.contains(mesh.model, mesh.barycenter(t))) out.push_back(t);
  if (out.empty()) throw ValidationError("restrict_triangles: empty window");
  return out;
}

}  // namespace cloaklab
