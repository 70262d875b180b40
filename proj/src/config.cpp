#include "cloaklab/config.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "cloaklab/surgery.hpp"
#include "json.hpp"

namespace cloaklab {

using nlohmann::json;

namespace {

const std::vector<std::string> kSuites = {"sweep",        "spectrum", "capacity",
                                          "conductivity", "surgery",  "all"};

bool known_suite(const std::string& s) {
  for (const auto& k : kSuites)
    if (k == s) return true;
  return false;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

json text_to_json(const std::string& contents) {
  json root = json::object();
  json* section = &root;
  std::istringstream in(contents);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParseError("config line " + std::to_string(lineno) + ": malformed section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      root[name] = json::object();
      section = &root[name];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ParseError("config line " + std::to_string(lineno) + ": empty key or value");
    // Value forms: scalar, comma-separated list, or semicolon-separated list
    // of space-separated groups (used for Fourier mode tables).
    auto parse_scalar = [&](const std::string& tok) -> json {
      char* end = nullptr;
      const double d = std::strtod(tok.c_str(), &end);
      if (end && *end == '\0') return json(d);
      return json(tok);
    };
    if (value.find(';') != std::string::npos) {
      json groups = json::array();
      std::istringstream gs(value);
      std::string group;
      while (std::getline(gs, group, ';')) {
        json row = json::array();
        std::istringstream ts(group);
        std::string tok;
        while (ts >> tok) row.push_back(parse_scalar(tok));
        groups.push_back(row);
      }
      (*section)[key] = groups;
    } else if (value.find(',') != std::string::npos) {
      json arr = json::array();
      std::istringstream ts(value);
      std::string tok;
      while (std::getline(ts, tok, ',')) arr.push_back(parse_scalar(trim(tok)));
      (*section)[key] = arr;
    } else {
      (*section)[key] = parse_scalar(value);
    }
  }
  return root;
}

std::vector<double> as_list(const json& v) {
  if (v.is_number()) return {v.get<double>()};
  return v.get<std::vector<double>>();
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  try {
    if (j.contains("suite")) c.suite = j.at("suite").get<std::string>();
    if (!known_suite(c.suite)) throw ParseError("unknown suite name: " + c.suite);
    if (j.contains("manifold")) c.manifold = j.at("manifold").get<std::string>();
    if (c.manifold != "t2" && c.manifold != "t3")
      throw ParseError("manifold must be \"t2\" or \"t3\"");
    if (j.contains("periods"))
      c.periods = as_list(j.at("periods"));
    if (j.contains("eps_list")) c.eps_list = as_list(j.at("eps_list"));
    if (j.contains("mesh_h")) c.mesh_h = j.at("mesh_h").get<double>();
    if (j.contains("k2")) c.k2 = j.at("k2").get<double>();
    if (j.contains("lambda_list"))
      c.lambda_list = as_list(j.at("lambda_list"));
    if (j.contains("R")) c.R = j.at("R").get<double>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("seed")) c.seed = j.at("seed").get<unsigned long long>();
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();

    if (j.contains("link")) {
      const json& l = j.at("link");
      if (l.contains("axis")) c.link_axis = static_cast<int>(l.at("axis").get<double>());
      if (l.contains("R")) c.R = l.at("R").get<double>();
      if (l.contains("points")) {
        const json& pts = l.at("points");
        if (pts.is_array() && !pts.empty() && pts.front().is_array()) {
          for (const auto& p : pts)
            c.link_points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
        } else {
          // Flat list: consecutive (x, y) pairs.
          std::vector<double> flat = pts.get<std::vector<double>>();
          if (flat.size() % 2 != 0) throw ParseError("link.points: odd number of coordinates");
          for (size_t i = 0; i + 1 < flat.size(); i += 2)
            c.link_points.emplace_back(flat[i], flat[i + 1]);
        }
      }
    }
    if (j.contains("source")) {
      const json& s = j.at("source");
      const std::string type = s.at("type").get<std::string>();
      if (type == "fourier") {
        c.source.type = SourceSpec::Type::Fourier;
        for (const auto& m : s.at("modes")) {
          FourierMode mode;
          if (m.is_array()) {
            // [m0, m1, m2, amp_cos, amp_sin]
            if (m.size() < 5) throw ParseError("source mode rows need 5 entries");
            mode.m = Eigen::Vector3i(static_cast<int>(m.at(0).get<double>()),
                                     static_cast<int>(m.at(1).get<double>()),
                                     static_cast<int>(m.at(2).get<double>()));
            mode.amp_cos = m.at(3).get<double>();
            mode.amp_sin = m.at(4).get<double>();
          } else {
            const std::vector<double> mm = m.at("m").get<std::vector<double>>();
            for (size_t a = 0; a < std::min<size_t>(3, mm.size()); ++a)
              mode.m[static_cast<int>(a)] = static_cast<int>(mm[a]);
            mode.amp_cos = m.value("amp_cos", 0.0);
            mode.amp_sin = m.value("amp_sin", 0.0);
          }
          c.source.modes.push_back(mode);
        }
      } else if (type == "bump") {
        c.source.type = SourceSpec::Type::Bump;
        const std::vector<double> ctr = s.at("center").get<std::vector<double>>();
        c.source.center = Eigen::Vector2d(ctr.at(0), ctr.at(1));
        c.source.radius = s.at("radius").get<double>();
        c.source.amplitude = s.value("amplitude", 1.0);
      } else {
        throw ParseError("source.type must be \"fourier\" or \"bump\"");
      }
    }
    if (j.contains("window")) {
      const json& w = j.at("window");
      const std::string type = w.at("type").get<std::string>();
      if (type == "annulus") {
        c.window.type = WindowSpec::Type::Annulus;
        c.window.component = static_cast<int>(w.value("component", 0.0));
        c.window.a = w.at("a").get<double>();
        c.window.b = w.at("b").get<double>();
      } else if (type == "box") {
        c.window.type = WindowSpec::Type::Box;
        const std::vector<double> lo = w.at("lo").get<std::vector<double>>();
        const std::vector<double> hi = w.at("hi").get<std::vector<double>>();
        c.window.lo = Eigen::Vector2d(lo.at(0), lo.at(1));
        c.window.hi = Eigen::Vector2d(hi.at(0), hi.at(1));
      } else if (type == "all") {
        c.window.type = WindowSpec::Type::All;
      } else {
        throw ParseError("window.type must be \"annulus\", \"box\" or \"all\"");
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return c;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& contents) {
  return config_from_json(text_to_json(contents));
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string contents = buf.str();
  // JSON if it starts with '{', the key/value text format otherwise.
  const auto first = contents.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && contents[first] == '{') {
    json j;
    try {
      j = json::parse(contents);
    } catch (const json::exception& e) {
      throw ParseError(std::string("config: ") + e.what());
    }
    return config_from_json(j);
  }
  return parse_config_text(contents);
}

ManifoldModel ExperimentConfig::make_model() const {
  const double def = 2 * M_PI;
  const double px = periods.size() > 0 ? periods[0] : def;
  const double py = periods.size() > 1 ? periods[1] : def;
  return ManifoldModel::torus2(px, py);
}

Link ExperimentConfig::make_link(const ManifoldModel& model) const {
  std::vector<Eigen::Vector2d> pts = link_points;
  if (pts.empty()) pts.emplace_back(model.period(0) / 2, model.period(1) / 2);
  return Link::points_2d(model, pts, R);
}

NodalField ExperimentConfig::make_source(const ManifoldModel& model) const {
  if (source.type == SourceSpec::Type::Fourier) {
    ScalarFieldN f = fourier_field(model, source.modes);
    return [f](const Eigen::Vector2d& x) {
      Eigen::VectorXd p(2);
      p << x[0], x[1];
      return f(p);
    };
  }
  Eigen::VectorXd ctr(2);
  ctr << source.center[0], source.center[1];
  ScalarFieldN f = bump_field(model, ctr, source.radius, source.amplitude);
  return [f](const Eigen::Vector2d& x) {
    Eigen::VectorXd p(2);
    p << x[0], x[1];
    return f(p);
  };
}

RegionWindow ExperimentConfig::make_window(const Link& link) const {
  switch (window.type) {
    case WindowSpec::Type::Annulus:
      return RegionWindow::annulus(link, window.component, window.a, window.b);
    case WindowSpec::Type::Box:
      return RegionWindow::box(window.lo, window.hi);
    case WindowSpec::Type::All:
      return RegionWindow::all();
  }
  return RegionWindow::all();
}

void ExperimentConfig::validate() const {
  const ManifoldModel model = make_model();
  const Link link = make_link(model);
  if (eps_list.empty()) throw ValidationError("config: eps_list must not be empty");
  for (size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0 && eps_list[i] < link.R))
      throw ValidationError("config: eps values must lie in (0, R)");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
      throw ValidationError("config: eps_list must be strictly decreasing");
  }
  if (!(mesh_h > 0.0)) throw ValidationError("config: mesh_h must be positive");
  if (threads < 1) throw ValidationError("config: threads must be >= 1");
  if (source.type == SourceSpec::Type::Bump) {
    Eigen::VectorXd c(2);
    c << source.center[0], source.center[1];
    const double d = link.nearest_component(model, c).first;
    if (d - source.radius < link.R)
      throw ValidationError("config: source support must be disjoint from T(R)");
  }
}

namespace {

struct SuiteContext {
  const ExperimentConfig& cfg;
  std::string out_dir;
  std::vector<Verdict> verdicts;

  void verdict(const std::string& name, bool pass, double value, double tol) {
    verdicts.push_back({name, pass, value, tol});
  }
  std::ofstream open_csv(const std::string& name, const std::string& header) {
    std::filesystem::create_directories(out_dir);
    std::ofstream os(out_dir + "/" + name);
    if (!os) throw NumericalError("cannot open output file " + name);
    os << header << "\n";
    return os;
  }
};

void suite_sweep(SuiteContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  SweepConfig sc{cfg.make_model(), Link{}, cfg.eps_list, cfg.mesh_h, cfg.k2,
                 nullptr,          RegionWindow{},       {},       true,  cfg.threads};
  sc.link = cfg.make_link(sc.model);
  sc.source = cfg.make_source(sc.model);
  sc.window = cfg.make_window(sc.link);

  const ConvergenceReport rep = eps_sweep(sc);
  auto os = ctx.open_csv("sweep.csv", "epsilon,h,l2_error,sup_error");
  for (size_t i = 0; i < rep.eps_list.size(); ++i)
    os << fmt(rep.eps_list[i]) << "," << fmt(rep.h) << "," << fmt(rep.l2_errors[i]) << ","
       << fmt(rep.sup_errors[i]) << "\n";
  ctx.verdict("sweep_l2_monotone", rep.l2_monotone, rep.l2_monotone ? 1.0 : 0.0, 1.0);
  ctx.verdict("sweep_final_below_half", rep.final_below_half,
              rep.l2_errors.empty() ? 0.0 : rep.l2_errors.back(),
              rep.l2_errors.empty() ? 0.0 : 0.5 * rep.l2_errors.front());
  ctx.verdict("sweep_sup_monotone", rep.sup_monotone, rep.sup_monotone ? 1.0 : 0.0, 1.0);
  if (rep.reference_limited)
    std::cout << "note: sweep is reference-limited (reference gap " << fmt(rep.reference_gap)
              << " exceeds 10% of the smallest error)\n";

  if (!cfg.lambda_list.empty()) {
    const ResolventSweepReport rr = resolvent_sweep(sc, cfg.lambda_list);
    auto os2 = ctx.open_csv("resolvent.csv", "lambda,epsilon,l2_error");
    for (size_t e = 0; e < rr.eps_list.size(); ++e)
      for (size_t l = 0; l < rr.lambda_grid.size(); ++l)
        os2 << fmt(rr.lambda_grid[l]) << "," << fmt(rr.eps_list[e]) << ","
            << fmt(rr.errors[e][l]) << "\n";
    ctx.verdict("resolvent_uniform_decreasing", rr.uniform_decreasing,
                rr.uniform_decreasing ? 1.0 : 0.0, 1.0);

    // Resolvent identity R(l1) - R(l2) = (l1 - l2) R(l1) R(l2) on the
    // reference mesh.
    const Mesh ref = build_mesh(sc.model, nullptr, 0.0, cfg.mesh_h);
    const AssembledForms forms0 = assemble(ref, sc.model);
    const Eigen::VectorXd f0 = evaluate_nodal(ref, sc.source);
    const double l1 = cfg.lambda_list.front();
    const double l2 = cfg.lambda_list.size() > 1 ? cfg.lambda_list[1] : l1 - 1.0;
    const Eigen::VectorXd r1 = resolvent(forms0, l1, f0, sc.solve_opts);
    const Eigen::VectorXd r2 = resolvent(forms0, l2, f0, sc.solve_opts);
    const Eigen::VectorXd r12 = resolvent(forms0, l1, r2, sc.solve_opts);
    const Eigen::VectorXd lhs = r1 - r2;
    const Eigen::VectorXd rhs = (l1 - l2) * r12;
    const double rel = std::sqrt((lhs - rhs).dot(forms0.mass * (lhs - rhs))) /
                       std::sqrt(r1.dot(forms0.mass * r1));
    ctx.verdict("resolvent_identity", rel <= 1e-8, rel, 1e-8);
  }
}

void suite_spectrum(SuiteContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const ManifoldModel model = cfg.make_model();
  const Link link = cfg.make_link(model);
  const int n_eigs = 10;

  // Exact flat-torus Laplacian eigenvalues for comparison.
  std::vector<double> exact;
  for (int mx = -8; mx <= 8; ++mx)
    for (int my = -8; my <= 8; ++my)
      exact.push_back(mode_eigenvalue(model, Eigen::Vector3i(mx, my, 0)));
  std::sort(exact.begin(), exact.end());

  auto os = ctx.open_csv("spectrum.csv", "epsilon,index,eigenvalue");
  std::vector<double> eps_all = {0.0};
  for (double e : cfg.eps_list) eps_all.push_back(e);
  SpectrumReport at_zero, at_min_eps;
  for (double eps : eps_all) {
    const Mesh mesh = build_mesh(model, eps > 0 ? &link : nullptr, eps, cfg.mesh_h);
    const AssembledForms forms = assemble(mesh, model);
    const SpectrumReport rep = spectrum(forms, mesh, n_eigs);
    for (int i = 0; i < n_eigs; ++i)
      os << fmt(eps) << "," << i << "," << fmt(rep.eigenvalues[static_cast<size_t>(i)]) << "\n";
    if (eps == 0.0) at_zero = rep;
    at_min_eps = rep;
  }

  ctx.verdict("spectrum_zero_simple",
              std::abs(at_zero.eigenvalues[0]) <= 1e-8 && at_zero.eigenvalues[1] > 1e-4,
              at_zero.eigenvalues[0], 1e-8);
  double worst0 = 0.0;
  for (int i = 1; i < n_eigs - 1; ++i) {
    const double ex = exact[static_cast<size_t>(i)];
    if (ex <= 0.0) continue;
    worst0 = std::max(worst0, std::abs(at_zero.eigenvalues[static_cast<size_t>(i)] - ex) / ex);
  }
  ctx.verdict("spectrum_eps0_match", worst0 <= 0.05, worst0, 0.05);
  double worst_eps = 0.0;
  for (int i = 1; i <= 5; ++i) {
    const double ex = exact[static_cast<size_t>(i)];
    if (ex <= 0.0) continue;
    worst_eps =
        std::max(worst_eps, std::abs(at_min_eps.eigenvalues[static_cast<size_t>(i)] - ex) / ex);
  }
  ctx.verdict("spectrum_eps_match", worst_eps <= 0.05, worst_eps, 0.05);
}

void suite_capacity(SuiteContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const ManifoldModel model = cfg.make_model();
  const Link link = cfg.make_link(model);
  const double r0 = std::min(0.5, link.R);

  auto os = ctx.open_csv("capacity.csv", "epsilon,capacity,analytic,rel_err");
  std::vector<double> caps, xs;
  double worst = 0.0;
  bool decreasing = true;
  double prev = std::numeric_limits<double>::infinity();
  for (double eps : cfg.eps_list) {
    const double h_cap = std::min(cfg.mesh_h, eps / 4);
    const double cap = capacity(model, link, eps, r0, h_cap);
    const double analytic = 2 * M_PI / std::log(r0 / eps);
    const double rel = std::abs(cap - analytic) / analytic;
    os << fmt(eps) << "," << fmt(cap) << "," << fmt(analytic) << "," << fmt(rel) << "\n";
    worst = std::max(worst, rel);
    if (!(cap < prev)) decreasing = false;
    prev = cap;
    caps.push_back(cap);
    xs.push_back(1.0 / std::log(r0 / eps));
  }
  ctx.verdict("capacity_rel_err", worst <= 0.05, worst, 0.05);
  ctx.verdict("capacity_decreasing", decreasing, decreasing ? 1.0 : 0.0, 1.0);
  // One-parameter fit cap ~ a / ln(r0/eps).
  double num = 0.0, den = 0.0, nrm = 0.0;
  for (size_t i = 0; i < caps.size(); ++i) {
    num += caps[i] * xs[i];
    den += xs[i] * xs[i];
    nrm += caps[i] * caps[i];
  }
  const double a = num / den;
  double res = 0.0;
  for (size_t i = 0; i < caps.size(); ++i) {
    const double r = caps[i] - a * xs[i];
    res += r * r;
  }
  const double rel_res = std::sqrt(res / nrm);
  ctx.verdict("capacity_fit_residual", rel_res <= 0.05, rel_res, 0.05);
}

void suite_conductivity(SuiteContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const ManifoldModel model = cfg.make_model();
  const Link link = cfg.make_link(model);
  const TransformationMap map(model, link);
  const SingularityProfile prof = singularity_profile(map, 10000);

  auto os = ctx.open_csv("conductivity.csv", "r_tilde,sqrt_det,sigma_rr,sigma_thth,sigma_ss");
  for (const auto& s : prof.samples)
    os << fmt(s.r_tilde) << "," << fmt(s.sqrt_det) << "," << fmt(s.sigma_rr) << ","
       << fmt(s.sigma_thth) << "," << fmt(s.sigma_ss) << "\n";
  ctx.verdict("conductivity_slope_sqrt_det", std::abs(prof.slope_sqrt_det - 1.0) <= 0.01,
              prof.slope_sqrt_det, 0.01);
  ctx.verdict("conductivity_slope_sigma_rr", std::abs(prof.slope_sigma_rr - 1.0) <= 0.01,
              prof.slope_sigma_rr, 0.01);
  ctx.verdict("conductivity_slope_sigma_thth", std::abs(prof.slope_sigma_thth + 1.0) <= 0.01,
              prof.slope_sigma_thth, 0.01);
  ctx.verdict("conductivity_slope_sigma_ss", std::abs(prof.slope_sigma_ss - 1.0) <= 0.01,
              prof.slope_sigma_ss, 0.01);
  ctx.verdict("conductivity_bounds_hold", prof.bounds_hold, prof.bounds_hold ? 1.0 : 0.0, 1.0);
}

void suite_surgery(SuiteContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const RadialExtension H{BoundaryGluing::dehn_twist()};
  const DerivativeControlReport rep = derivative_control_check(H, 1000);

  auto os = ctx.open_csv("surgery.csv", "r,partial_name,max_abs");
  for (const auto& row : rep.rows)
    os << fmt(row.r) << "," << row.name << "," << fmt(row.max_abs) << "\n";
  ctx.verdict("surgery_radial_derivative", rep.radial_derivative_deviation <= 1e-8,
              rep.radial_derivative_deviation, 1e-8);
  ctx.verdict("surgery_partials_bounded", rep.global_bound <= 1.0 + 1e-6, rep.global_bound,
              1.0 + 1e-6);

  // Injectivity sampling for the radial extension and the 2-D handle map.
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  int collisions = 0;
  for (int i = 0; i < 10000; ++i) {
    const SolidTorusPoint p{1e-6 + uni(rng) * (1 - 1e-6),
                            {2 * M_PI * uni(rng), 2 * M_PI * uni(rng)}, 0};
    const SolidTorusPoint q{1e-6 + uni(rng) * (1 - 1e-6),
                            {2 * M_PI * uni(rng), 2 * M_PI * uni(rng)}, 0};
    const SolidTorusPoint hp = H.apply(p), hq = H.apply(q);
    const double din = std::hypot(p.r - q.r, std::hypot(p.angles.theta - q.angles.theta,
                                                        p.angles.s - q.angles.s));
    const double dout = std::hypot(hp.r - hq.r, std::hypot(hp.angles.theta - hq.angles.theta,
                                                           hp.angles.s - hq.angles.s));
    if (din > 1e-9 && dout < 1e-12) ++collisions;
  }
  for (int i = 0; i < 10000; ++i) {
    auto sample = [&]() {
      double t = uni(rng);
      if (std::abs(t - 0.5) < 1e-6) t += 2e-6;
      const double phi = 2 * M_PI * uni(rng);
      return std::pair<Eigen::Vector2d, double>(
          Eigen::Vector2d(std::cos(phi), std::sin(phi)), t);
    };
    const auto [x1, t1] = sample();
    const auto [x2, t2] = sample();
    if ((x1 - x2).norm() + std::abs(t1 - t2) < 1e-9) continue;
    const HandleImage a = handle_map_2d(1, x1, t1, 0);
    const HandleImage b = handle_map_2d(1, x2, t2, 0);
    if (a.face == b.face && (a.disk_point - b.disk_point).norm() < 1e-12) ++collisions;
  }
  ctx.verdict("surgery_injectivity", collisions == 0, static_cast<double>(collisions), 0.0);
}

}  // namespace

std::vector<Verdict> run_suite(const ExperimentConfig& config, const std::string& suite,
                               const std::string& out_dir) {
  SuiteContext ctx{config, out_dir, {}};
  if (suite == "sweep" || suite == "all") suite_sweep(ctx);
  if (suite == "spectrum" || suite == "all") suite_spectrum(ctx);
  if (suite == "capacity" || suite == "all") suite_capacity(ctx);
  if (suite == "conductivity" || suite == "all") suite_conductivity(ctx);
  if (suite == "surgery" || suite == "all") suite_surgery(ctx);
  return ctx.verdicts;
}

int run_experiment(const std::string& config_path, const std::string& suite_override,
                   const std::string& out_override, int threads_override) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig cfg;
  std::string suite;
  try {
    cfg = parse_config_file(config_path);
    if (!suite_override.empty()) {
      if (!known_suite(suite_override)) throw ParseError("unknown suite name: " + suite_override);
      cfg.suite = suite_override;
    }
    if (!out_override.empty()) cfg.output_dir = out_override;
    if (threads_override > 0) cfg.threads = threads_override;
    suite = cfg.suite;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  }

  std::vector<Verdict> verdicts;
  try {
    cfg.validate();
    verdicts = run_suite(cfg, suite, cfg.output_dir);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  }

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json summary;
  summary["suite"] = suite;
  summary["verdicts"] = json::array();
  bool all_pass = true;
  for (const auto& v : verdicts) {
    summary["verdicts"].push_back(
        {{"name", v.name}, {"pass", v.pass}, {"value", v.value}, {"tolerance", v.tolerance}});
    all_pass = all_pass && v.pass;
    std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << v.name << " value=" << fmt(v.value)
              << " tolerance=" << fmt(v.tolerance) << "\n";
  }
  summary["runtime_seconds"] = seconds;
  std::filesystem::create_directories(cfg.output_dir);
  std::ofstream os(cfg.output_dir + "/summary.json");
  os << summary.dump(2) << "\n";
  return all_pass ? 0 : 1;
}

}  // namespace cloaklab
