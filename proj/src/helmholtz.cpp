#include "cloaklab/helmholtz.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <sstream>

namespace cloaklab {

double mode_eigenvalue(const ManifoldModel& model, const Eigen::Vector3i& m) {
  double nu = 0.0;
  for (int a = 0; a < model.dim; ++a) {
    const double w = 2 * M_PI * m[a] / model.period(a);
    nu += w * w;
  }
  return nu;
}

ScalarFieldN fourier_field(const ManifoldModel& model, const std::vector<FourierMode>& modes) {
  return [model, modes](const Eigen::VectorXd& x) {
    double v = 0.0;
    for (const auto& mode : modes) {
      double phase = 0.0;
      for (int a = 0; a < model.dim; ++a) phase += 2 * M_PI * mode.m[a] / model.period(a) * x[a];
      v += mode.amp_cos * std::cos(phase) + mode.amp_sin * std::sin(phase);
    }
    return v;
  };
}

ScalarFieldN fourier_oracle(const ManifoldModel& model, const std::vector<FourierMode>& modes,
                            double k2) {
  std::vector<FourierMode> scaled;
  for (const auto& mode : modes) {
    const double nu = mode_eigenvalue(model, mode.m);
    const double denom = k2 - nu;
    if (std::abs(denom) < 1e-9 && (mode.amp_cos != 0.0 || mode.amp_sin != 0.0)) {
      std::ostringstream os;
      os << "fourier_oracle: resonant mode, k^2 = " << k2 << " equals |m|^2 = " << nu;
      throw NumericalError(os.str());
    }
    FourierMode s = mode;
    s.amp_cos /= denom;
    s.amp_sin /= denom;
    scaled.push_back(s);
  }
  return fourier_field(model, scaled);
}

ScalarFieldN bump_field(const ManifoldModel& model, const Eigen::VectorXd& center, double rho,
                        double amplitude) {
  if (!(rho > 0.0)) throw ValidationError("bump_field: radius must be positive");
  return [model, center, rho, amplitude](const Eigen::VectorXd& x) {
    double d2 = 0.0;
    for (int a = 0; a < model.dim; ++a) {
      const double d = model.periodic_delta(a, x[a], center[a]);
      d2 += d * d;
    }
    const double q = d2 / (rho * rho);
    if (q >= 1.0) return 0.0;
    return amplitude * std::exp(1.0 - 1.0 / (1.0 - q));
  };
}

namespace {

// Factorization wrapper: Cholesky-type LDLT first, LU fallback.
class ShiftedSolver {
 public:
  ShiftedSolver(const SparseMat& A) {
    ldlt_ = std::make_unique<Eigen::SimplicialLDLT<SparseMat>>(A);
    if (ldlt_->info() == Eigen::Success) return;
    ldlt_.reset();
    lu_ = std::make_unique<Eigen::SparseLU<SparseMat>>(A);
    if (lu_->info() != Eigen::Success)
      throw NumericalError("linear solve: factorization failed");
  }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    if (ldlt_) return ldlt_->solve(b);
    return lu_->solve(b);
  }

 private:
  std::unique_ptr<Eigen::SimplicialLDLT<SparseMat>> ldlt_;
  std::unique_ptr<Eigen::SparseLU<SparseMat>> lu_;
};

// Distance from the shift to the discrete spectrum, as 1 over the M-norm
// growth factor of (K - shift M)^{-1} M under inverse iteration. The growth
// factor converges to max 1/|lambda - shift| even when two eigenvalues are
// equidistant from the shift (a Rayleigh quotient would not).
double spectral_distance(const ShiftedSolver& solver, const SparseMat& M, double shift) {
  (void)shift;
  std::mt19937_64 rng(20240817);
  std::normal_distribution<double> dist;
  Eigen::VectorXd v(M.rows());
  for (int i = 0; i < v.size(); ++i) v[i] = dist(rng);
  v /= std::sqrt(v.dot(M * v));
  double growth = 0.0;
  for (int it = 0; it < 30; ++it) {
    Eigen::VectorXd w = solver.solve(M * v);
    const double nrm = std::sqrt(w.dot(M * w));
    if (!std::isfinite(nrm) || nrm == 0.0) break;
    w /= nrm;
    const bool done = it >= 3 && std::abs(nrm - growth) < 1e-8 * (1.0 + nrm);
    growth = nrm;
    v = w;
    if (done) break;
  }
  return growth > 0.0 ? 1.0 / growth : std::numeric_limits<double>::infinity();
}

Eigen::VectorXd solve_shifted(const AssembledForms& forms, double shift,
                              const Eigen::VectorXd& rhs, const SolveOptions& opts) {
  const SparseMat A = forms.stiffness - shift * forms.mass;
  ShiftedSolver solver(A);
  if (opts.check_spectrum) {
    const double dist = spectral_distance(solver, forms.mass, shift);
    if (dist < opts.delta_spec) {
      std::ostringstream os;
      os << "solve: shift " << shift << " is within " << dist << " of the discrete spectrum";
      throw NumericalError(os.str());
    }
  }
  Eigen::VectorXd u = solver.solve(rhs);
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) return Eigen::VectorXd::Zero(rhs.size());
  double res = (A * u - rhs).norm() / bnorm;
  for (int refine = 0; refine < 3 && res > opts.rel_residual; ++refine) {
    u += solver.solve(rhs - A * u);
    res = (A * u - rhs).norm() / bnorm;
  }
  if (!(res <= opts.rel_residual)) {
    std::ostringstream os;
    os << "solve: relative residual " << res << " above tolerance " << opts.rel_residual;
    throw NumericalError(os.str());
  }
  return u;
}

}  // namespace

Eigen::VectorXd solve_helmholtz(const AssembledForms& forms, const Mesh& mesh, double k2,
                                const NodalField& f, const SolveOptions& opts) {
  const Eigen::VectorXd fn = evaluate_nodal(mesh, f);
  return solve_shifted(forms, k2, -(forms.mass * fn), opts);
}

Eigen::VectorXd resolvent(const AssembledForms& forms, double lambda,
                          const Eigen::VectorXd& f_nodal, const SolveOptions& opts) {
  if (f_nodal.size() != forms.mass.rows()) throw ValidationError("resolvent: dimension mismatch");
  return solve_shifted(forms, lambda, forms.mass * f_nodal, opts);
}

SpectrumReport spectrum(const AssembledForms& forms, const Mesh& mesh, int n) {
  if (n < 1 || n > 50) throw ValidationError("spectrum: n must lie in [1, 50]");
  const int N = static_cast<int>(forms.stiffness.rows());
  const int block = std::min(N, n + 10);
  const double sigma = -0.5;
  ShiftedSolver solver(forms.stiffness - sigma * forms.mass);

  std::mt19937_64 rng(46170412);
  std::normal_distribution<double> dist;
  Eigen::MatrixXd X(N, block);
  for (int j = 0; j < block; ++j)
    for (int i = 0; i < N; ++i) X(i, j) = dist(rng);

  Eigen::VectorXd prev = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  Eigen::VectorXd vals;
  for (int it = 0; it < 300; ++it) {
    Eigen::MatrixXd Y(N, block);
    for (int j = 0; j < block; ++j) Y.col(j) = solver.solve(forms.mass * X.col(j));
    // M-orthonormalize by modified Gram-Schmidt.
    for (int j = 0; j < block; ++j) {
      for (int k = 0; k < j; ++k)
        Y.col(j) -= (Y.col(k).dot(forms.mass * Y.col(j))) * Y.col(k);
      const double nrm = std::sqrt(Y.col(j).dot(forms.mass * Y.col(j)));
      if (!(nrm > 1e-300)) throw NumericalError("spectrum: subspace collapsed");
      Y.col(j) /= nrm;
    }
    // Rayleigh-Ritz on the subspace.
    Eigen::MatrixXd Kr = Y.transpose() * (forms.stiffness * Y).eval();
    Eigen::MatrixXd Mr = Y.transpose() * (forms.mass * Y).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Kr, Mr);
    if (es.info() != Eigen::Success) throw NumericalError("spectrum: dense eigensolver failed");
    X = Y * es.eigenvectors();
    vals = es.eigenvalues().head(n);
    if ((vals - prev).cwiseAbs().maxCoeff() < 1e-11 * (1.0 + vals.cwiseAbs().maxCoeff())) break;
    prev = vals;
    if (it + 1 == 300) throw NumericalError("spectrum: subspace iteration did not converge");
  }
  SpectrumReport rep;
  rep.epsilon = forms.epsilon;
  rep.h = mesh.h;
  rep.eigenvalues.assign(vals.data(), vals.data() + n);
  return rep;
}

Restriction source_to_solution(const AssembledForms& forms, const Mesh& mesh, double k2,
                               const NodalField& f, const RegionWindow& window,
                               const SolveOptions& opts) {
  Restriction r;
  r.u = solve_helmholtz(forms, mesh, k2, f, opts);
  r.tri_set = restrict_triangles(mesh, window);
  const SparseMat Mv = mass_on(mesh, r.tri_set);
  r.l2_norm = std::sqrt(r.u.dot(Mv * r.u));
  return r;
}

Eigen::VectorXd solve_physical(const Mesh& mesh, const TransformationMap& map, double k2,
                               const NodalField& f_virtual, const SolveOptions& opts) {
  const AssembledForms phys = assemble_physical(mesh, map);
  // The physical source f~ = f o Psi^{-1} has the same nodal values on the
  // transported vertices as f on the virtual ones.
  const Eigen::VectorXd fn = evaluate_nodal(mesh, f_virtual);
  return solve_shifted(phys, k2, -(phys.mass * fn), opts);
}

double Reduced3DSolution::evaluate_at_vertex(int vertex, double s) const {
  double v = 0.0;
  for (size_t i = 0; i < modes.size(); ++i) {
    const double w = 2 * M_PI * modes[i].m / period_s;
    const double trig = modes[i].cosine ? std::cos(w * s) : std::sin(w * s);
    v += slice_solutions[i][vertex] * trig;
  }
  return v;
}

Reduced3DSolution reduce_3d(const ManifoldModel& model3, const AssembledForms& forms2,
                            const Mesh& mesh2, double k2, const std::vector<AxialMode>& source,
                            int m_max, const SolveOptions& opts) {
  if (model3.dim != 3) throw ValidationError("reduce_3d: requires a 3-D model");
  Reduced3DSolution out;
  out.k2 = k2;
  out.period_s = model3.period(2);
  for (const auto& mode : source) {
    if (std::abs(mode.m) > m_max)
      throw ValidationError("reduce_3d: axial mode exceeds the stated cutoff");
    const double w = 2 * M_PI * mode.m / out.period_s;
    const double k2_slice = k2 - w * w;
    out.modes.push_back(mode);
    out.slice_solutions.push_back(
        solve_helmholtz(forms2, mesh2, k2_slice, mode.transverse, opts));
  }
  return out;
}

}  // namespace cloaklab
