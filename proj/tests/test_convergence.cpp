#include <cmath>

#include "cloaklab/convergence.hpp"
#include "doctest.h"

using namespace cloaklab;

namespace {

SweepConfig base_config() {
  SweepConfig cfg;
  cfg.model = ManifoldModel::torus2(2 * M_PI, 2 * M_PI);
  cfg.link = Link::points_2d(cfg.model, {{M_PI, M_PI}}, 1.0);
  cfg.eps_list = {0.2, 0.1, 0.05};
  cfg.h = 0.1;
  cfg.k2 = 0.5;
  const ScalarFieldN bump = bump_field(cfg.model, Eigen::Vector2d(1.2, 1.2), 0.5, 1.0);
  cfg.source = [bump](const Eigen::Vector2d& x) { return bump(x); };
  cfg.window = RegionWindow::box({0.3, 0.3}, {2.1, 2.1});
  cfg.reference_check = false;
  return cfg;
}

}  // namespace

TEST_CASE("fit_log_rate recovers synthetic rates") {
  const std::vector<double> eps = {0.2, 0.1, 0.05, 0.025};

  SUBCASE("exact a / ln(1/eps) data") {
    std::vector<double> errs;
    for (double e : eps) errs.push_back(3.7 / std::log(1.0 / e) + 0.01);
    const LogFit fit = fit_log_rate(errs, eps);
    CHECK(fit.a == doctest::Approx(3.7).epsilon(1e-10));
    CHECK(fit.b == doctest::Approx(0.01).epsilon(1e-8));
    CHECK(fit.residual <= 1e-12);
  }

  SUBCASE("constant data gives a vanishing coefficient") {
    const LogFit fit = fit_log_rate({0.5, 0.5, 0.5, 0.5}, eps);
    CHECK(std::abs(fit.a) <= 1e-10);
    CHECK(fit.b == doctest::Approx(0.5));
  }

  SUBCASE("fewer than three points are rejected") {
    CHECK_THROWS_AS(fit_log_rate({1.0, 0.5}, {0.2, 0.1}), ValidationError);
  }
}

TEST_CASE("eps sweep basics") {
  SUBCASE("zero source gives zero errors") {
    SweepConfig cfg = base_config();
    cfg.source = [](const Eigen::Vector2d&) { return 0.0; };
    const ConvergenceReport rep = eps_sweep(cfg);
    for (double e : rep.l2_errors) CHECK(e == 0.0);
    for (double e : rep.sup_errors) CHECK(e == 0.0);
  }

  SUBCASE("single epsilon produces no fit") {
    SweepConfig cfg = base_config();
    cfg.eps_list = {0.1};
    const ConvergenceReport rep = eps_sweep(cfg);
    REQUIRE(rep.l2_errors.size() == 1);
    CHECK(rep.l2_errors[0] > 0.0);
    CHECK_FALSE(rep.has_fit);
  }

  SUBCASE("errors decrease along the sweep") {
    const ConvergenceReport rep = eps_sweep(base_config());
    REQUIRE(rep.l2_errors.size() == 3);
    CHECK(rep.l2_errors[1] < rep.l2_errors[0]);
    CHECK(rep.l2_errors[2] < rep.l2_errors[1]);
    CHECK(rep.l2_monotone);
    CHECK(rep.sup_monotone);
    CHECK(rep.has_fit);
  }

  SUBCASE("shrinking the window cannot grow the L2 error") {
    SweepConfig wide = base_config();
    SweepConfig narrow = base_config();
    narrow.window = RegionWindow::box({0.5, 0.5}, {1.9, 1.9});
    const ConvergenceReport r_wide = eps_sweep(wide);
    const ConvergenceReport r_narrow = eps_sweep(narrow);
    for (size_t i = 0; i < r_wide.l2_errors.size(); ++i)
      CHECK(r_narrow.l2_errors[i] <= r_wide.l2_errors[i] * (1 + 1e-12));
  }
}

TEST_CASE("sweep validation") {
  SUBCASE("source support overlapping the tube is rejected") {
    SweepConfig cfg = base_config();
    const ScalarFieldN bump = bump_field(cfg.model, Eigen::Vector2d(M_PI, M_PI), 0.5, 1.0);
    cfg.source = [bump](const Eigen::Vector2d& x) { return bump(x); };
    CHECK_THROWS_AS(eps_sweep(cfg), ValidationError);
  }

  SUBCASE("window intersecting the tube is rejected") {
    SweepConfig cfg = base_config();
    cfg.window = RegionWindow::box({2.0, 2.0}, {4.0, 4.0});
    CHECK_THROWS_WITH_AS(eps_sweep(cfg), doctest::Contains("disjoint"), ValidationError);
  }

  SUBCASE("eps list must be strictly decreasing and below R") {
    SweepConfig cfg = base_config();
    cfg.eps_list = {0.1, 0.2};
    CHECK_THROWS_AS(eps_sweep(cfg), ValidationError);
    cfg.eps_list = {1.5};
    CHECK_THROWS_AS(eps_sweep(cfg), ValidationError);
    cfg.eps_list.clear();
    CHECK_THROWS_AS(eps_sweep(cfg), ValidationError);
  }
}

TEST_CASE("resolvent sweep") {
  SUBCASE("uniform decrease over a negative-lambda grid") {
    const ResolventSweepReport rep = resolvent_sweep(base_config(), {-0.5, -1.0, -2.0});
    REQUIRE(rep.max_over_grid.size() == 3);
    CHECK(rep.max_over_grid[1] < rep.max_over_grid[0]);
    CHECK(rep.max_over_grid[2] < rep.max_over_grid[1]);
    CHECK(rep.uniform_decreasing);
    for (const auto& row : rep.errors) CHECK(row.size() == 3);
  }

  SUBCASE("empty lambda grid is rejected") {
    CHECK_THROWS_AS(resolvent_sweep(base_config(), {}), ValidationError);
  }
}
