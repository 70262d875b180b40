#pragma once

#include "cloaklab/helmholtz.hpp"

namespace cloaklab {

struct SweepConfig {
  ManifoldModel model;
  Link link;
  std::vector<double> eps_list;  // strictly decreasing, all < R
  double h = 0.0;
  double k2 = 0.0;
  NodalField source;
  RegionWindow window;
  SolveOptions solve_opts;
  bool reference_check = true;   // recompute the eps = 0 reference refined
  int threads = 1;
};

struct LogFit {
  double a = 0.0;         // coefficient of 1/ln(1/eps)
  double b = 0.0;         // constant offset
  double residual = 0.0;  // relative residual
};

struct ConvergenceReport {
  std::vector<double> eps_list;
  double h = 0.0;
  std::vector<double> l2_errors;   // per eps, against the eps = 0 reference
  std::vector<double> sup_errors;
  LogFit fit;                      // only filled for >= 3 sweep points
  bool has_fit = false;
  bool l2_monotone = false;        // decreasing with 10% jitter allowance
  bool sup_monotone = false;
  bool final_below_half = false;   // last L2 error < half the first
  bool reference_limited = false;
  double reference_gap = 0.0;      // L2(V) distance between the two references
};

// Least squares of error against a / ln(1/eps) + b. Needs >= 3 points.
LogFit fit_log_rate(const std::vector<double>& errors, const std::vector<double>& eps_list);

// Epsilon sweep for the source-to-solution convergence: solve at each eps,
// compare to the eps = 0 reference on the common background vertices of the
// window V.
ConvergenceReport eps_sweep(const SweepConfig& config);

struct ResolventSweepReport {
  std::vector<double> eps_list;
  std::vector<double> lambda_grid;
  // errors[e][l]: L2(V) error of R_eps(lambda) f against R_0(lambda) f.
  std::vector<std::vector<double>> errors;
  std::vector<double> max_over_grid;  // per eps
  bool uniform_decreasing = false;
};

ResolventSweepReport resolvent_sweep(const SweepConfig& config,
                                     const std::vector<double>& lambda_grid);

}  // namespace cloaklab
