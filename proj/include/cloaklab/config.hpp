#pragma once

#include <string>
#include <vector>

#include "cloaklab/convergence.hpp"

namespace cloaklab {

struct Verdict {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tolerance = 0.0;
};

struct SourceSpec {
  enum class Type { Fourier, Bump };
  Type type = Type::Bump;
  std::vector<FourierMode> modes;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 0.5;
  double amplitude = 1.0;
};

struct WindowSpec {
  enum class Type { Annulus, Box, All };
  Type type = Type::Box;
  int component = 0;
  double a = 0.0, b = 0.0;
  Eigen::Vector2d lo = Eigen::Vector2d::Zero();
  Eigen::Vector2d hi = Eigen::Vector2d::Zero();
};

struct ExperimentConfig {
  std::string suite = "all";
  std::string manifold = "t2";  // "t2" | "t3"
  std::vector<double> periods;
  int link_axis = 2;
  std::vector<Eigen::Vector2d> link_points;
  double R = 0.0;  // 0 = default choice
  std::vector<double> eps_list;
  double mesh_h = 0.05;
  double k2 = 0.5;
  std::vector<double> lambda_list;
  SourceSpec source;
  WindowSpec window;
  std::string output_dir = "out";
  unsigned long long seed = 1;
  int threads = 1;

  ManifoldModel make_model() const;            // the 2-D working model
  Link make_link(const ManifoldModel&) const;  // 2-D link
  NodalField make_source(const ManifoldModel&) const;
  RegionWindow make_window(const Link&) const;
  void validate() const;
};

// Parses a JSON config or the plain key/value text format (sections in
// [brackets], `key = value` lines, comma-separated lists). Throws
// std::runtime_error on malformed input.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& contents);

// Runs the configured suites, writes CSV reports and a JSON summary into
// output_dir. Returns the process exit status: 0 all verdicts pass,
// 1 verdict failure, 2 parse error, 3 validation error, 4 numerical error.
int run_experiment(const std::string& config_path, const std::string& suite_override,
                   const std::string& out_override, int threads_override);

// Suite bodies (exposed for tests).
std::vector<Verdict> run_suite(const ExperimentConfig& config, const std::string& suite,
                               const std::string& out_dir);

}  // namespace cloaklab
