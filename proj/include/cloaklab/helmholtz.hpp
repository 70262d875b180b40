#pragma once

#include <functional>
#include <vector>

#include "cloaklab/forms.hpp"

namespace cloaklab {

// One real Fourier mode a*cos(m.w x) + b*sin(m.w x), w_i = 2*pi/P_i.
struct FourierMode {
  Eigen::Vector3i m = Eigen::Vector3i::Zero();
  double amp_cos = 0.0;
  double amp_sin = 0.0;
};

using ScalarFieldN = std::function<double(const Eigen::VectorXd&)>;

// Laplacian eigenvalue |m.w|^2 of the mode on the flat torus.
double mode_eigenvalue(const ManifoldModel& model, const Eigen::Vector3i& m);

ScalarFieldN fourier_field(const ManifoldModel& model, const std::vector<FourierMode>& modes);

// Exact Helmholtz solution on the full flat torus: each mode is divided by
// (k^2 - |m.w|^2). Throws NumericalError on a resonant mode.
ScalarFieldN fourier_oracle(const ManifoldModel& model, const std::vector<FourierMode>& modes,
                            double k2);

// C-infinity bump of compact support: amp * exp(1 - 1/(1 - |x-c|^2/rho^2))
// inside the periodic ball of radius rho, 0 outside.
ScalarFieldN bump_field(const ManifoldModel& model, const Eigen::VectorXd& center, double rho,
                       double amplitude);

struct SolveOptions {
  double delta_spec = 0.05;    // refuse to solve nearer to the spectrum
  bool check_spectrum = true;
  double rel_residual = 1e-10;
};

// Discrete Helmholtz solve on M \ T(eps): (K - k^2 M) u = -M f, the natural
// boundary condition realizing the Neumann condition on the hole boundaries.
Eigen::VectorXd solve_helmholtz(const AssembledForms& forms, const Mesh& mesh, double k2,
                                const NodalField& f, const SolveOptions& opts = {});

// Resolvent (Q - lambda)^{-1} f: solves (K - lambda M) u = M f.
Eigen::VectorXd resolvent(const AssembledForms& forms, double lambda,
                          const Eigen::VectorXd& f_nodal, const SolveOptions& opts = {});

struct SpectrumReport {
  double epsilon = 0.0;
  double h = 0.0;
  std::vector<double> eigenvalues;  // lowest n, nondecreasing
};

// Lowest n generalized eigenvalues of K v = lambda M v by shift-invert
// subspace iteration. n <= 50.
SpectrumReport spectrum(const AssembledForms& forms, const Mesh& mesh, int n);

struct Restriction {
  Eigen::VectorXd u;            // full nodal solution
  std::vector<int> tri_set;     // triangles of V
  double l2_norm = 0.0;         // L2(V) norm of u
};

Restriction source_to_solution(const AssembledForms& forms, const Mesh& mesh, double k2,
                               const NodalField& f, const RegionWindow& window,
                               const SolveOptions& opts = {});

// Physical-space solve with the singular transformed material: the physical
// mesh is the vertex-wise image of the virtual one and the coefficients are
// the discrete pushforwards. The returned nodal vector is indexed like the
// virtual mesh, so it is simultaneously the pulled-back field.
Eigen::VectorXd solve_physical(const Mesh& mesh, const TransformationMap& map, double k2,
                               const NodalField& f_virtual, const SolveOptions& opts = {});

// One axial Fourier factor of a separable 3-D source on the flat T^3 with a
// straight link: transverse(x) * cos/sin(2*pi*m*s/P_s).
struct AxialMode {
  int m = 0;
  bool cosine = true;
  NodalField transverse;
};

struct Reduced3DSolution {
  std::vector<AxialMode> modes;
  std::vector<Eigen::VectorXd> slice_solutions;  // nodal on the 2-D mesh, per mode
  double k2 = 0.0;
  double period_s = 0.0;

  // u(x, s) reassembled from the slices at a 2-D mesh vertex.
  double evaluate_at_vertex(int vertex, double s) const;
};

// Exact separation of variables: Fourier in the link direction turns the
// 3-D problem into 2-D problems with k^2 replaced by k^2 - (2*pi*m/P_s)^2.
Reduced3DSolution reduce_3d(const ManifoldModel& model3, const AssembledForms& forms2,
                            const Mesh& mesh2, double k2, const std::vector<AxialMode>& source,
                            int m_max, const SolveOptions& opts = {});

}  // namespace cloaklab
