#pragma once

#include <Eigen/Sparse>
#include <functional>

#include "cloaklab/mesh.hpp"
#include "cloaklab/transform.hpp"

namespace cloaklab {

using SparseMat = Eigen::SparseMatrix<double>;

// Galerkin realization of the energy form over M \ T(eps) (stiffness, with
// the Neumann condition entering naturally) and the L2 pairing (mass).
struct AssembledForms {
  SparseMat stiffness;
  SparseMat mass;
  double epsilon = 0.0;
};

// P1 assembly with the model's conductivity and volume density. For the
// built-in flat models the element tensor is the identity and the density 1.
AssembledForms assemble(const Mesh& mesh, const ManifoldModel& model);

// Assembly on the image mesh of a transformation: element coordinates are
// the mapped vertices and the material tensor / volume density are the
// discrete pushforwards through the per-element affine map.
AssembledForms assemble_physical(const Mesh& mesh, const TransformationMap& map);

// Mapped vertex positions of the virtual mesh (the physical mesh shares the
// connectivity of the virtual one).
std::vector<Eigen::Vector2d> physical_vertices(const Mesh& mesh, const TransformationMap& map);

double eval_q1(const AssembledForms& forms, const Eigen::VectorXd& u);
double eval_q2(const AssembledForms& forms, const Eigen::VectorXd& u, double lambda);

// Mass matrix restricted to a set of triangles (for L2(V) norms).
SparseMat mass_on(const Mesh& mesh, const std::vector<int>& tri_set);

// Discrete capacitary energy of the annulus eps < r < r0: the Dirichlet
// energy of the potential with u = 1 on the inner circle and u = 0 on the
// outer one, on a dedicated graded polar mesh. Requires h <= eps/4.
double capacity(const ManifoldModel& model, const Link& link, double eps, double r0, double h);

struct GammaCheckEntry {
  double epsilon = 0.0;
  std::vector<double> q1;        // per sample field
  std::vector<double> q2;        // per sample field, at the given lambda
  double area = 0.0;             // quadrature area of M \ T(eps)
};

struct GammaCheckReport {
  std::vector<GammaCheckEntry> entries;  // ordered as eps_list, plus eps = 0 last
  double lambda = 0.0;
  bool q1_monotone = false;            // q1 nondecreasing as eps decreases
  bool q1_converges = false;           // |q1_eps - q1_0| -> 0
  bool q2_monotone = false;            // for lambda < 0: decreasing toward the limit
  double max_q1_gap_final = 0.0;       // |q1_{eps_min} - q1_0| over samples
  double eps2_fit_residual = 0.0;      // relative residual of |q1_0 - q1_eps| ~ C eps^2
};

using NodalField = std::function<double(const Eigen::Vector2d&)>;

// Evaluates q1 and q2 for each sample field on meshes at each eps and at
// eps = 0, and checks the monotonicity / pointwise-convergence properties.
GammaCheckReport gamma_checks(const ManifoldModel& model, const Link& link,
                              const std::vector<NodalField>& u_samples,
                              const std::vector<double>& eps_list, double h, double lambda);

// Nodal evaluation helper.
Eigen::VectorXd evaluate_nodal(const Mesh& mesh, const NodalField& u);

}  // namespace cloaklab
