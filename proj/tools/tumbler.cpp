// Command-line front end: every analysis in the library, exposed as a
// subcommand that writes full-precision CSV (plus a JSON metadata sidecar)
// and, where it makes sense, an SVG scatter.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tumbler/geometry.hpp"
#include "tumbler/io.hpp"
#include "tumbler/manifold.hpp"
#include "tumbler/map.hpp"
#include "tumbler/period_one.hpp"
#include "tumbler/trajectory.hpp"
#include "tumbler/transport.hpp"

namespace {

using namespace tumbler;
using nlohmann::json;

constexpr const char* kToolVersion = "tumbler 1.0.0";

const char* region_name(RegionTag tag) {
  switch (tag) {
    case RegionTag::Bulk: return "bulk";
    case RegionTag::FlowingLayer: return "layer";
    case RegionTag::InterfaceBoundary: return "interface";
    case RegionTag::FreeSurfaceBoundary: return "surface";
    case RegionTag::Outside: return "outside";
  }
  return "unknown";
}

const char* stability_name(StabilityTag tag) {
  switch (tag) {
    case StabilityTag::NormallyHyperbolic: return "hyperbolic";
    case StabilityTag::NormallyElliptic: return "elliptic";
    case StabilityTag::Parabolic: return "parabolic";
    case StabilityTag::NonFixed: return "nonfixed";
  }
  return "unknown";
}

const char* branch_name(CurveBranch b) {
  return b == CurveBranch::BulkBowl ? "bowl" : "cap";
}

const char* connection_name(ConnectionKind k) {
  switch (k) {
    case ConnectionKind::None: return "none";
    case ConnectionKind::Heteroclinic: return "heteroclinic";
    case ConnectionKind::Homoclinic: return "homoclinic";
  }
  return "unknown";
}

// Every run shares these: protocol parameters (angles as literals), the
// composition order, worker cap, and output paths.
struct CommonOpts {
  double eps_z = 0.15;
  double eps_x = 0.15;
  std::string theta_z = "pi";
  std::string theta_x = "pi";
  std::string order = "zfirst";
  int jobs = 0;  // 0: resolve from TUMBLER_JOBS, else 1
  std::string out;
  std::string svg;
  std::string view = "y";
};

void add_common(CLI::App* cmd, CommonOpts& o, const std::string& default_out) {
  cmd->add_option("--eps-z", o.eps_z, "layer depth ratio for the z-axis rotation, in (0, 0.5]")
      ->capture_default_str();
  cmd->add_option("--eps-x", o.eps_x, "layer depth ratio for the x-axis rotation, in (0, 0.5]")
      ->capture_default_str();
  cmd->add_option("--theta-z", o.theta_z,
                  "z rotation angle in (0, 2pi]; accepts pi, 19pi/20, 0.5pi, or radians")
      ->capture_default_str();
  cmd->add_option("--theta-x", o.theta_x, "x rotation angle in (0, 2pi]; same forms as --theta-z")
      ->capture_default_str();
  cmd->add_option("--order", o.order, "which rotation acts first: zfirst or xfirst")
      ->check(CLI::IsMember({"zfirst", "xfirst"}))
      ->capture_default_str();
  cmd->add_option("--jobs", o.jobs, "worker thread cap (default: TUMBLER_JOBS or 1)");
  o.out = default_out;
  cmd->add_option("--out", o.out, "output file path")->capture_default_str();
}

void add_svg(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--svg", o.svg, "also render an orthographic scatter to this SVG file");
  cmd->add_option("--view", o.view, "projection axis for --svg: x, y (from above), or z")
      ->check(CLI::IsMember({"x", "y", "z"}))
      ->capture_default_str();
}

ProtocolParams resolve_params(const CommonOpts& o) {
  ProtocolParams p;
  p.eps_z = o.eps_z;
  p.eps_x = o.eps_x;
  p.theta_z = parse_angle(o.theta_z);
  p.theta_x = parse_angle(o.theta_x);
  p.validate();
  return p;
}

MapOrder resolve_order(const CommonOpts& o) {
  return o.order == "xfirst" ? MapOrder::XFirst : MapOrder::ZFirst;
}

int resolve_jobs(const CommonOpts& o) {
  if (o.jobs > 0) return o.jobs;
  if (const char* env = std::getenv("TUMBLER_JOBS")) {
    const int j = std::atoi(env);
    if (j > 0) return j;
  }
  return 1;
}

std::pair<double, double> project(const Point3& p, const std::string& view) {
  if (view == "x") return {p.z, p.y};
  if (view == "z") return {p.x, p.y};
  return {p.x, p.z};  // seen from above (or below) the free surface
}

void base_config(const CommonOpts& o, const ProtocolParams& p, RunMetadata& meta) {
  meta.config["eps_z"] = format_full(p.eps_z);
  meta.config["eps_x"] = format_full(p.eps_x);
  meta.config["theta_z"] = format_full(p.theta_z);
  meta.config["theta_x"] = format_full(p.theta_x);
  meta.config["order"] = o.order;
  meta.config["jobs"] = std::to_string(resolve_jobs(o));
  meta.config["out"] = o.out;
}

void write_svg_file(const std::string& path, const std::vector<SvgSeries>& series,
                    const std::string& title) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open SVG output: " + path);
  f << render_scatter_svg(series, 800, title);
}

json point_json(const Point3& p) { return json::array({p.x, p.y, p.z}); }

// Parses "x,y,z", tolerating surrounding whitespace but rejecting trailing
// characters and extra components.
Point3 parse_point(const std::string& text) {
  Point3 p;
  int consumed = 0;
  if (std::sscanf(text.c_str(), " %lf , %lf , %lf %n", &p.x, &p.y, &p.z, &consumed) != 3 ||
      static_cast<size_t>(consumed) != text.size()) {
    throw std::invalid_argument("expected a point as x,y,z: " + text);
  }
  return p;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

// ---------------------------------------------------------------- trajectory
int run_trajectory(const CommonOpts& o, const std::string& seed_text, int periods, bool events) {
  Timer timer;
  const ProtocolParams p = resolve_params(o);
  const MapOrder order = resolve_order(o);
  const Point3 seed = project_into_hemisphere(parse_point(seed_text));
  const Axis first = order == MapOrder::ZFirst ? Axis::Z : Axis::X;
  const Axis second = order == MapOrder::ZFirst ? Axis::X : Axis::Z;

  CsvWriter csv(o.out);
  csv.header({"n", "stage", "x", "y", "z", "r"});
  std::optional<CsvWriter> events_csv;
  if (events) {
    events_csv.emplace(o.out + ".events.csv");
    events_csv->header({"n", "stage", "kind", "t", "x", "y", "z"});
  }
  const auto emit_events = [&](int n, Axis stage, const std::vector<InterfaceCrossing>& xs) {
    for (const auto& c : xs) {
      events_csv->row()
          .col(n)
          .col(stage == Axis::Z ? "z" : "x")
          .col(c.kind == CrossingKind::EnterLayer ? "enter" : "exit")
          .col(c.time)
          .col(c.position.x)
          .col(c.position.y)
          .col(c.position.z);
    }
  };

  Point3 cur = seed;
  csv.row().col(0).col("seed").col(cur.x).col(cur.y).col(cur.z).col(norm(cur));
  std::vector<InterfaceCrossing> xs;
  for (int n = 1; n <= periods; ++n) {
    xs.clear();
    cur = advance_single_axis(p, first, cur, p.theta(first), events ? &xs : nullptr);
    if (events) emit_events(n, first, xs);
    csv.row()
        .col(n)
        .col(first == Axis::Z ? "z" : "x")
        .col(cur.x)
        .col(cur.y)
        .col(cur.z)
        .col(norm(cur));
    xs.clear();
    cur = advance_single_axis(p, second, cur, p.theta(second), events ? &xs : nullptr);
    if (events) emit_events(n, second, xs);
    csv.row()
        .col(n)
        .col(second == Axis::Z ? "z" : "x")
        .col(cur.x)
        .col(cur.y)
        .col(cur.z)
        .col(norm(cur));
  }

  RunMetadata meta;
  meta.tool = kToolVersion;
  meta.subcommand = "trajectory";
  base_config(o, p, meta);
  meta.config["seed"] = seed_text;
  meta.config["periods"] = std::to_string(periods);
  meta.config["events"] = events ? "true" : "false";
  meta.rows = csv.rows_written();
  meta.wall_seconds = timer.seconds();
  write_metadata(o.out + ".meta.json", meta);
  return 0;
}

// ------------------------------------------------------------------ poincare
int run_poincare_cmd(const CommonOpts& o, double rbar, double rmin, double rmax, int seeds,
                     int periods, double perturb) {
  Timer timer;
  CommonOpts adjusted = o;
  if (perturb > 0.0) adjusted.eps_x = adjusted.eps_z * perturb;
  const ProtocolParams p = resolve_params(adjusted);
  const MapOrder order = resolve_order(o);
  double lo = rmin, hi = rmax;
  if (rbar > 0.0) lo = hi = rbar;
  const auto seed_pts = seed_transect(p, seeds, lo, hi);
  const auto records = run_poincare(p, seed_pts, periods, order, resolve_jobs(o));

  CsvWriter csv(o.out);
  csv.header({"seed_id", "n", "x", "y", "z", "r", "region"});
  for (const auto& rec : records) {
    csv.row()
        .col(rec.seed_id)
        .col(rec.period)
        .col(rec.position.x)
        .col(rec.position.y)
        .col(rec.position.z)
        .col(rec.r)
        .col(region_name(rec.region));
  }
  if (!o.svg.empty()) {
    std::vector<SvgSeries> series(seed_pts.size());
    for (const auto& rec : records) {
      series[static_cast<size_t>(rec.seed_id)].points.push_back(
          project(rec.position, o.view));
    }
    write_svg_file(o.svg, series, "poincare section");
  }

  RunMetadata meta;
  meta.tool = kToolVersion;
  meta.subcommand = "poincare";
  base_config(adjusted, p, meta);
  meta.config["rbar"] = rbar > 0.0 ? format_full(rbar) : "";
  meta.config["rmin"] = format_full(lo);
  meta.config["rmax"] = format_full(hi);
  meta.config["seeds"] = std::to_string(seeds);
  meta.config["periods"] = std::to_string(periods);
  if (perturb > 0.0) meta.config["perturb"] = format_full(perturb);
  meta.rows = csv.rows_written();
  meta.wall_seconds = timer.seconds();
  write_metadata(o.out + ".meta.json", meta);
  return 0;
}

// ------------------------------------------------------------ radial-history
int run_radial_history(const CommonOpts& o, const std::string& seed_text, int periods) {
  Timer timer;
  const ProtocolParams p = resolve_params(o);
  const Point3 seed = parse_point(seed_text);
  const auto hist = radial_history(p, seed, periods, resolve_order(o));
  const DriftStats st = drift_statistics(hist);

  CsvWriter csv(o.out);
  csv.header({"n", "r", "in_bulk"});
  for (const auto& s : hist) {
    csv.row().col(s.period).col(s.r).col(s.in_bulk ? 1 : 0);
  }

  RunMetadata meta;
  meta.tool = kToolVersion;
  meta.subcommand = "radial-history";
  base_config(o, p, meta);
  meta.config["seed"] = seed_text;
  meta.config["periods"] = std::to_string(periods);
  meta.config["mean_abs_dr"] = format_full(st.mean_abs_dr);
  meta.config["max_abs_dr"] = format_full(st.max_abs_dr);
  meta.config["net_dr"] = format_full(st.net_dr);
  meta.config["bulk_pairs"] = std::to_string(st.pairs);
  meta.rows = csv.rows_written();
  meta.wall_seconds = timer.seconds();
  write_metadata(o.out + ".meta.json", meta);
  std::printf("mean |dr| per period = %s over %d bulk pairs\n", format_full(st.mean_abs_dr).c_str(),
              st.pairs);
  return 0;
}

// ------------------------------------------------------------ switch-analyze
int run_switch_analyze(const CommonOpts& o, const std::string& point_text) {
  const ProtocolParams p = resolve_params(o);
  const MapOrder order = resolve_order(o);
  const Axis second = order == MapOrder::ZFirst ? Axis::X : Axis::Z;
  const SwitchAnalysis sa = analyze_switch(p, parse_point(point_text), second);
  json j;
  j["switch_point"] = point_json(sa.switch_point);
  j["in_layer"] = sa.in_layer;
  j["kappa"] = sa.kappa;
  j["r_exit_predicted"] = sa.r_exit_predicted;
  const std::string text = j.dump(2);
  if (!o.out.empty()) {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output: " + o.out);
    f << text << "\n";
  }
  std::printf("%s\n", text.c_str());
  return 0;
}

// ---------------------------------------------------------------- period-one
int run_period_one(const CommonOpts& o, int samples) {
  Timer timer;
  const ProtocolParams p = resolve_params(o);
  const auto curve = sample_period_one_curves(p, samples);
  CsvWriter csv(o.out);
  csv.header({"branch", "stability", "x", "y", "z"});
  for (const auto& s : curve) {
    csv.row()
        .col(branch_name(s.branch))
        .col(stability_name(s.stability))
        .col(s.position.x)
        .col(s.position.y)
        .col(s.position.z);
  }
  if (!o.svg.empty()) {
    std::vector<SvgSeries> series(2);
    for (const auto& s : curve) {
      series[s.branch == CurveBranch::BulkBowl ? 0 : 1].points.push_back(
          project(s.position, o.view));
    }
    write_svg_file(o.svg, series, "period-one curves");
  }
  RunMetadata meta;
  meta.tool = kToolVersion;
  meta.subcommand = "period-one";
  base_config(o, p, meta);
  meta.config["samples"] = std::to_string(samples);
  meta.rows = csv.rows_written();
  meta.wall_seconds = timer.seconds();
  write_metadata(o.out + ".meta.json", meta);
  return 0;
}

// -------------------------------------------------------------- shell-points
int run_shell_points(const CommonOpts& o, double rbar) {
  Timer timer;
  const ProtocolParams p = resolve_params(o);
  const auto pts = shell_fixed_points(p, rbar);
  CsvWriter csv(o.out);
  csv.header({"stability", "x", "y", "z"});
  for (const auto& sp : pts) {
    csv.row()
        .col(stability_name(sp.stability))
        .col(sp.position.x)
        .col(sp.position.y)
        .col(sp.position.z);
  }
  RunMetadata meta;
  meta.tool = kToolVersion;
  meta.subcommand = "shell-points";
  base_config(o, p, meta);
  meta.config["rbar"] = format_full(rbar);
  meta.rows = csv.rows_written();
  meta.wall_seconds = timer.seconds();
  write_metadata(o.out + ".meta.json", meta);
  std::printf("%zu fixed points on the shell r = %s\n", pts.size(), format_full(rbar).c_str());
  return 0;
}

// -------------------------------------------------------------------- window
int run_window(const CommonOpts& o) {
  const ProtocolParams p = resolve_params(o);
  const ExistenceWindow w = shell_existence_window(p);
  std::printf("(%s, %s)\n", format_full(w.r_lo).c_str(), format_full(w.r_hi).c_str());
  if (!o.out.empty()) {
    CsvWriter csv(o.out);
    csv.header({"r_lo", "r_hi"});
    csv.row().col(w.r_lo).col(w.r_hi);
  }
  return 0;
}

// ------------------------------------------------------------ optimal-angles
int run_optimal_angles(const CommonOpts& o) {
  resolve_params(o);  // range validation only
  const OptimalAngles oz = optimal_angles(o.eps_z);
  const OptimalAngles ox = optimal_angles(o.eps_x);
  std::printf("z axis: theta_min = %s (c = %s), theta_max = %s (c = %s)\n",
              format_full(oz.theta_min).c_str(), format_full(oz.c_min).c_str(),
              format_full(oz.theta_max).c_str(), format_full(oz.c_max).c_str());
  std::printf("x axis: theta_min = %s (c = %s), theta_max = %s (c = %s)\n",
              format_full(ox.theta_min).c_str(), format_full(ox.c_min).c_str(),
              format_full(ox.theta_max).c_str(), format_full(ox.c_max).c_str());
  if (!o.out.empty()) {
    CsvWriter csv(o.out);
    csv.header({"axis", "theta_min", "c_min", "theta_max", "c_max"});
    csv.row().col("z").col(oz.theta_min).col(oz.c_min).col(oz.theta_max).col(oz.c_max);
    csv.row().col("x").col(ox.theta_min).col(ox.c_min).col(ox.theta_max).col(ox.c_max);
  }
  return 0;
}

// ----------------------------------------------------------------- bowl-grid
int run_bowl_grid(const CommonOpts& o, double eps_lo, double eps_hi, int n_eps, double theta_lo,
                  double theta_hi, int n_theta) {
  Timer timer;
  const auto cells =
      bowl_depth_grid(eps_lo, eps_hi, n_eps, theta_lo, theta_hi, n_theta, resolve_jobs(o));
  CsvWriter csv(o.out);
  csv.header({"eps", "theta", "c", "depth_below_layer", "locus"});
  for (const auto& cell : cells) {
    csv.row().col(cell.eps).col(cell.theta).col(cell.c).col(cell.depth_below_layer).col(
        cell.locus);
  }
  RunMetadata meta;
  meta.tool = kToolVersion;
  meta.subcommand = "bowl-grid";
  meta.config["eps_lo"] = format_full(eps_lo);
  meta.config["eps_hi"] = format_full(eps_hi);
  meta.config["n_eps"] = std::to_string(n_eps);
  meta.config["theta_lo"] = format_full(theta_lo);
  meta.config["theta_hi"] = format_full(theta_hi);
  meta.config["n_theta"] = std::to_string(n_theta);
  meta.config["jobs"] = std::to_string(resolve_jobs(o));
  meta.config["out"] = o.out;
  meta.rows = csv.rows_written();
  meta.wall_seconds = timer.seconds();
  write_metadata(o.out + ".meta.json", meta);
  return 0;
}

// ------------------------------------------------------------------ kam-ring
int run_kam_ring(const CommonOpts& o, double rbar, int rays, int periods, double divergence,
                 double s_tol) {
  Timer timer;
  const ProtocolParams p = resolve_params(o);
  const auto ring = kam_island_boundary(p, rbar, resolve_order(o), rays, periods, divergence,
                                        s_tol, resolve_jobs(o));
  if (!ring.has_value()) {
    throw std::domain_error("shell has no elliptic fixed point; no island to trace");
  }
  CsvWriter csv(o.out);
  csv.header({"angle", "s_boundary", "x", "y", "z", "converged"});
  for (const auto& ray : ring->rays) {
    csv.row()
        .col(ray.angle)
        .col(ray.s_boundary)
        .col(ray.boundary.x)
        .col(ray.boundary.y)
        .col(ray.boundary.z)
        .col(ray.converged ? 1 : 0);
  }
  if (!o.svg.empty()) {
    SvgSeries s;
    s.connect = true;
    for (const auto& ray : ring->rays) s.points.push_back(project(ray.boundary, o.view));
    if (!ring->rays.empty()) s.points.push_back(s.points.front());
    write_svg_file(o.svg, {s}, "kam island boundary");
  }
  RunMetadata meta;
  meta.tool = kToolVersion;
  meta.subcommand = "kam-ring";
  base_config(o, p, meta);
  meta.config["rbar"] = format_full(rbar);
  meta.config["rays"] = std::to_string(rays);
  meta.config["periods"] = std::to_string(periods);
  meta.config["divergence_radius"] = format_full(divergence);
  meta.config["s_tol"] = format_full(s_tol);
  meta.config["diameter"] = format_full(ring->diameter);
  meta.config["elliptic_point"] = format_full(ring->elliptic_point.x) + "," +
                                  format_full(ring->elliptic_point.y) + "," +
                                  format_full(ring->elliptic_point.z);
  meta.rows = csv.rows_written();
  meta.wall_seconds = timer.seconds();
  write_metadata(o.out + ".meta.json", meta);
  std::printf("island diameter = %s\n", format_full(ring->diameter).c_str());
  return 0;
}

// ------------------------------------------------------------------ kam-tube
int run_kam_tube(const CommonOpts& o, double rmin, double rmax, int n_shells, int rays,
                 int periods) {
  Timer timer;
  const ProtocolParams p = resolve_params(o);
  std::vector<double> shells;
  for (int i = 0; i < n_shells; ++i) {
    const double t = n_shells > 1 ? static_cast<double>(i) / (n_shells - 1) : 0.0;
    shells.push_back(rmin + (rmax - rmin) * t);
  }
  const auto rings = kam_tube_cloud(p, shells, resolve_order(o), rays, periods, resolve_jobs(o));
  CsvWriter csv(o.out);
  csv.header({"R_bar", "ring_index", "x", "y", "z"});
  for (const auto& ring : rings) {
    for (size_t k = 0; k < ring.rays.size(); ++k) {
      csv.row()
          .col(ring.r_bar)
          .col(static_cast<int>(k))
          .col(ring.rays[k].boundary.x)
          .col(ring.rays[k].boundary.y)
          .col(ring.rays[k].boundary.z);
    }
  }
  RunMetadata meta;
  meta.tool = kToolVersion;
  meta.subcommand = "kam-tube";
  base_config(o, p, meta);
  meta.config["rmin"] = format_full(rmin);
  meta.config["rmax"] = format_full(rmax);
  meta.config["shells"] = std::to_string(n_shells);
  meta.config["shells_with_islands"] = std::to_string(rings.size());
  meta.config["rays"] = std::to_string(rays);
  meta.config["periods"] = std::to_string(periods);
  meta.rows = csv.rows_written();
  meta.wall_seconds = timer.seconds();
  write_metadata(o.out + ".meta.json", meta);
  std::printf("%zu of %d shells carry an island\n", rings.size(), n_shells);
  return 0;
}

// ------------------------------------------------------------------ manifold
int run_manifold(const CommonOpts& o, const std::string& point_text, double rbar,
                 const std::string& kind_text, const std::string& branch_text, int periods,
                 double alpha, double max_gap, double tol) {
  Timer timer;
  const ProtocolParams p = resolve_params(o);
  const MapOrder order = resolve_order(o);
  Point3 fixed_pt;
  std::vector<Point3> targets;
  if (!point_text.empty()) {
    fixed_pt = parse_point(point_text);
    targets.push_back(fixed_pt);
  } else {
    const auto pts = shell_fixed_points(p, rbar);
    bool found = false;
    for (const auto& sp : pts) {
      targets.push_back(sp.position);
      if (sp.stability == StabilityTag::NormallyHyperbolic &&
          (!found || sp.position.x > fixed_pt.x)) {
        fixed_pt = sp.position;
        found = true;
      }
    }
    if (!found) {
      throw std::domain_error("shell carries no hyperbolic fixed point; pass --point instead");
    }
  }
  const ManifoldKind kind =
      kind_text == "stable" ? ManifoldKind::Stable : ManifoldKind::Unstable;
  const BranchSign branch = branch_text == "minus" ? BranchSign::Minus : BranchSign::Plus;
  const auto dom = make_fundamental_domain(p, fixed_pt, kind, branch, order, alpha);
  const auto trace = trace_manifold(p, dom, order, periods, max_gap);
  const auto conn = detect_connection(p, dom, targets, order, tol, periods, max_gap);

  CsvWriter csv(o.out);
  csv.header({"period", "x", "y", "z"});
  size_t next_begin = 1;
  int period = 0;
  for (size_t i = 0; i < trace.polyline.size(); ++i) {
    while (next_begin < trace.period_begin.size() && i >= trace.period_begin[next_begin]) {
      ++period;
      ++next_begin;
    }
    csv.row().col(period).col(trace.polyline[i].x).col(trace.polyline[i].y).col(
        trace.polyline[i].z);
  }
  if (!o.svg.empty()) {
    SvgSeries s;
    s.connect = true;
    for (const auto& q : trace.polyline) s.points.push_back(project(q, o.view));
    write_svg_file(o.svg, {s}, "invariant manifold");
  }

  json cj;
  cj["kind"] = connection_name(conn.kind);
  cj["target_index"] = conn.target_index;
  cj["distance"] = conn.distance;
  cj["period"] = conn.period;
  cj["approach_point"] = point_json(conn.approach_point);
  cj["fixed_point"] = point_json(dom.fixed_point);
  cj["expansion_ratio"] = dom.ratio;
  {
    std::ofstream f(o.out + ".connection.json", std::ios::binary);
    if (!f) throw std::runtime_error("cannot open connection output");
    f << cj.dump(2) << "\n";
  }

  RunMetadata meta;
  meta.tool = kToolVersion;
  meta.subcommand = "manifold";
  base_config(o, p, meta);
  meta.config["point"] = point_text;
  meta.config["rbar"] = point_text.empty() ? format_full(rbar) : "";
  meta.config["kind"] = kind_text;
  meta.config["branch"] = branch_text;
  meta.config["periods"] = std::to_string(periods);
  meta.config["alpha"] = format_full(alpha);
  meta.config["max_gap"] = format_full(max_gap);
  meta.config["tol"] = format_full(tol);
  meta.config["connection"] = connection_name(conn.kind);
  meta.config["truncated"] = trace.truncated ? "true" : "false";
  meta.rows = csv.rows_written();
  meta.wall_seconds = timer.seconds();
  write_metadata(o.out + ".meta.json", meta);
  std::printf("connection: %s (closest approach %s at period %d)\n", connection_name(conn.kind),
              format_full(conn.distance).c_str(), conn.period);
  return 0;
}

// --------------------------------------------------------------- connections
int run_connections(const CommonOpts& o, double rmin, double rmax, int n_shells, int periods,
                    double tol) {
  Timer timer;
  const ProtocolParams p = resolve_params(o);
  const MapOrder order = resolve_order(o);
  CsvWriter csv(o.out);
  csv.header({"rbar", "x", "y", "z", "branch", "kind", "distance", "period"});
  double last_homoclinic = -1.0;
  int homoclinic_count = 0;
  for (int i = 0; i < n_shells; ++i) {
    const double t = n_shells > 1 ? static_cast<double>(i) / (n_shells - 1) : 0.0;
    const double rbar = rmin + (rmax - rmin) * t;
    std::vector<ShellPoint> pts;
    try {
      pts = shell_fixed_points(p, rbar);
    } catch (const std::domain_error&) {
      continue;
    }
    Point3 fwd;
    bool found = false;
    std::vector<Point3> targets;
    for (const auto& sp : pts) {
      targets.push_back(sp.position);
      if (sp.stability == StabilityTag::NormallyHyperbolic &&
          (!found || sp.position.x > fwd.x)) {
        fwd = sp.position;
        found = true;
      }
    }
    if (!found) continue;
    for (const BranchSign branch : {BranchSign::Plus, BranchSign::Minus}) {
      ConnectionResult conn;
      try {
        const auto dom =
            make_fundamental_domain(p, fwd, ManifoldKind::Stable, branch, order);
        conn = detect_connection(p, dom, targets, order, tol, periods);
      } catch (const std::domain_error&) {
        continue;  // pinch-off shells polish to degenerate points; skip them
      }
      csv.row()
          .col(rbar)
          .col(fwd.x)
          .col(fwd.y)
          .col(fwd.z)
          .col(branch == BranchSign::Plus ? "plus" : "minus")
          .col(connection_name(conn.kind))
          .col(conn.distance)
          .col(conn.period);
      if (conn.kind == ConnectionKind::Homoclinic) {
        ++homoclinic_count;
        last_homoclinic = rbar;
      }
    }
  }
  RunMetadata meta;
  meta.tool = kToolVersion;
  meta.subcommand = "connections";
  base_config(o, p, meta);
  meta.config["rmin"] = format_full(rmin);
  meta.config["rmax"] = format_full(rmax);
  meta.config["shells"] = std::to_string(n_shells);
  meta.config["periods"] = std::to_string(periods);
  meta.config["tol"] = format_full(tol);
  meta.config["homoclinic_count"] = std::to_string(homoclinic_count);
  meta.config["last_homoclinic_rbar"] =
      last_homoclinic >= 0.0 ? format_full(last_homoclinic) : "none";
  meta.rows = csv.rows_written();
  meta.wall_seconds = timer.seconds();
  write_metadata(o.out + ".meta.json", meta);
  std::printf("%d homoclinic connections found; last shell with one: %s\n", homoclinic_count,
              last_homoclinic >= 0.0 ? format_full(last_homoclinic).c_str() : "none");
  return 0;
}

// ------------------------------------------------------------------ jacobian
int run_jacobian(const CommonOpts& o, const std::string& point_text, double h) {
  const ProtocolParams p = resolve_params(o);
  const Point3 pt = parse_point(point_text);
  const Mat3 m = jacobian_fd(p, pt, h, resolve_order(o));
  const EigenSystem es = eigen_3x3(m);
  const StabilityTag tag = classify_fixed_point(p, pt, resolve_order(o));
  json j;
  j["point"] = point_json(pt);
  j["h"] = h;
  j["matrix"] = json::array();
  for (int r = 0; r < 3; ++r) {
    j["matrix"].push_back(json::array({m.a[r][0], m.a[r][1], m.a[r][2]}));
  }
  j["eigenvalues"] = json::array();
  for (const auto& l : es.values) {
    j["eigenvalues"].push_back(json{{"re", l.real()}, {"im", l.imag()}});
  }
  j["classification"] = stability_name(tag);
  const std::string text = j.dump(2);
  if (!o.out.empty()) {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output: " + o.out);
    f << text << "\n";
  }
  std::printf("%s\n", text.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"blinking spherical tumbler: exact advection, period-one structure, transport"};
  app.require_subcommand(1);

  // trajectory
  CommonOpts o_traj;
  std::string traj_seed = "0,-0.5,0";
  int traj_periods = 1;
  bool traj_events = false;
  auto* c_traj = app.add_subcommand("trajectory", "advect one tracer and log each half-period");
  add_common(c_traj, o_traj, "trajectory.csv");
  c_traj->add_option("--seed", traj_seed, "tracer start point as x,y,z")->capture_default_str();
  c_traj->add_option("--periods", traj_periods, "protocol iterations")->capture_default_str()->check(CLI::Range(1, 1000000000));
  c_traj->add_flag("--events", traj_events, "also log layer entry/exit events");

  // poincare
  CommonOpts o_poin;
  double poin_rbar = 0.0, poin_rmin = 0.3, poin_rmax = 0.9, poin_perturb = 0.0;
  int poin_seeds = 20, poin_periods = 500;
  auto* c_poin = app.add_subcommand("poincare", "per-period stroboscopic section of many seeds");
  add_common(c_poin, o_poin, "poincare.csv");
  add_svg(c_poin, o_poin);
  c_poin->add_option("--rbar", poin_rbar, "place every seed on this shell radius");
  c_poin->add_option("--rmin", poin_rmin, "lowest seed shell radius")->capture_default_str();
  c_poin->add_option("--rmax", poin_rmax, "highest seed shell radius")->capture_default_str();
  c_poin->add_option("--seeds", poin_seeds, "seed count along the transect")
      ->capture_default_str()->check(CLI::Range(1, 1000000000));
  c_poin->add_option("--periods", poin_periods, "protocol iterations per seed")
      ->capture_default_str()->check(CLI::Range(1, 1000000000));
  c_poin->add_option("--perturb", poin_perturb,
                     "set eps_x to this multiple of eps_z (e.g. 1.10)");

  // radial-history
  CommonOpts o_rad;
  std::string rad_seed = "0.3,-0.6,-0.3";
  int rad_periods = 500;
  auto* c_rad = app.add_subcommand("radial-history", "bulk radius of one tracer per period");
  add_common(c_rad, o_rad, "radial_history.csv");
  c_rad->add_option("--seed", rad_seed, "tracer start point as x,y,z")->capture_default_str();
  c_rad->add_option("--periods", rad_periods, "protocol iterations")->capture_default_str()->check(CLI::Range(1, 1000000000));

  // switch-analyze
  CommonOpts o_sw;
  std::string sw_point = "0.1,-0.05,0.2";
  auto* c_sw = app.add_subcommand("switch-analyze",
                                  "layer membership and exit-radius prediction at a switch");
  add_common(c_sw, o_sw, "");
  c_sw->add_option("--point", sw_point, "switch state as x,y,z")->capture_default_str();

  // period-one
  CommonOpts o_p1;
  int p1_samples = 400;
  auto* c_p1 = app.add_subcommand("period-one", "sample the fixed-point curves of the map");
  add_common(c_p1, o_p1, "period_one.csv");
  add_svg(c_p1, o_p1);
  c_p1->add_option("--samples", p1_samples, "approximate samples per curve piece")
      ->capture_default_str();

  // shell-points
  CommonOpts o_sp;
  double sp_rbar = 0.62;
  auto* c_sp = app.add_subcommand("shell-points", "fixed points on one hemispherical shell");
  add_common(c_sp, o_sp, "shell_points.csv");
  c_sp->add_option("--rbar", sp_rbar, "shell radius")->capture_default_str();

  // window
  CommonOpts o_win;
  double win_eps = -1.0, win_theta = -10.0;
  std::string win_theta_text;
  auto* c_win = app.add_subcommand("window", "shell radii that carry non-degenerate fixed points");
  add_common(c_win, o_win, "");
  c_win->add_option("--eps", win_eps, "set both layer depth ratios at once");
  c_win->add_option("--theta", win_theta_text, "set both rotation angles at once");

  // optimal-angles
  CommonOpts o_oa;
  auto* c_oa = app.add_subcommand("optimal-angles",
                                  "rotation angles that collapse or maximise the bowl");
  add_common(c_oa, o_oa, "");

  // bowl-grid
  CommonOpts o_bg;
  double bg_eps_lo = 0.05, bg_eps_hi = 0.5, bg_theta_lo = 0.1, bg_theta_hi = 2.0 * std::numbers::pi;
  int bg_n_eps = 46, bg_n_theta = 200;
  auto* c_bg = app.add_subcommand("bowl-grid", "bowl constant over an (eps, theta) grid");
  add_common(c_bg, o_bg, "bowl_grid.csv");
  c_bg->add_option("--eps-lo", bg_eps_lo, "lowest layer depth ratio")->capture_default_str();
  c_bg->add_option("--eps-hi", bg_eps_hi, "highest layer depth ratio")->capture_default_str();
  c_bg->add_option("--n-eps", bg_n_eps, "grid rows along eps")->capture_default_str()->check(CLI::Range(1, 1000000000));
  c_bg->add_option("--theta-lo", bg_theta_lo, "lowest rotation angle, radians")
      ->capture_default_str();
  c_bg->add_option("--theta-hi", bg_theta_hi, "highest rotation angle, radians")
      ->capture_default_str();
  c_bg->add_option("--n-theta", bg_n_theta, "grid columns along theta")->capture_default_str()->check(CLI::Range(1, 1000000000));

  // kam-ring
  CommonOpts o_kr;
  double kr_rbar = 0.62, kr_div = 0.0, kr_s_tol = 1e-4;
  int kr_rays = 32, kr_periods = 200;
  auto* c_kr = app.add_subcommand("kam-ring", "island boundary around a shell's elliptic point");
  add_common(c_kr, o_kr, "kam_ring.csv");
  add_svg(c_kr, o_kr);
  c_kr->add_option("--rbar", kr_rbar, "shell radius")->capture_default_str();
  c_kr->add_option("--rays", kr_rays, "boundary rays")->capture_default_str()->check(CLI::Range(1, 1000000000));
  c_kr->add_option("--periods", kr_periods, "averaging periods per probe")
      ->capture_default_str()->check(CLI::Range(1, 1000000000));
  c_kr->add_option("--divergence-radius", kr_div,
                   "explicit escape threshold (default 3x innermost probe)");
  c_kr->add_option("--s-tol", kr_s_tol, "boundary bisection tolerance")->capture_default_str();

  // kam-tube
  CommonOpts o_kt;
  double kt_rmin = 0.55, kt_rmax = 0.66;
  int kt_shells = 12, kt_rays = 32, kt_periods = 200;
  auto* c_kt = app.add_subcommand("kam-tube", "stack of island boundaries across shells");
  add_common(c_kt, o_kt, "kam_tube.csv");
  c_kt->add_option("--rmin", kt_rmin, "lowest shell radius")->capture_default_str();
  c_kt->add_option("--rmax", kt_rmax, "highest shell radius")->capture_default_str();
  c_kt->add_option("--shells", kt_shells, "shell count")->capture_default_str()->check(CLI::Range(1, 1000000000));
  c_kt->add_option("--rays", kt_rays, "boundary rays per shell")->capture_default_str()->check(CLI::Range(1, 1000000000));
  c_kt->add_option("--periods", kt_periods, "averaging periods per probe")
      ->capture_default_str()->check(CLI::Range(1, 1000000000));

  // manifold
  CommonOpts o_mf;
  std::string mf_point, mf_kind = "stable", mf_branch = "minus";
  double mf_rbar = 0.62, mf_alpha = 1e-4, mf_gap = 5e-3, mf_tol = 1e-4;
  int mf_periods = 100;
  auto* c_mf = app.add_subcommand("manifold", "trace a manifold and detect connections");
  add_common(c_mf, o_mf, "manifold.csv");
  add_svg(c_mf, o_mf);
  c_mf->add_option("--point", mf_point, "hyperbolic fixed point as x,y,z");
  c_mf->add_option("--rbar", mf_rbar, "pick the forward hyperbolic point of this shell")
      ->capture_default_str();
  c_mf->add_option("--kind", mf_kind, "stable or unstable")
      ->check(CLI::IsMember({"stable", "unstable"}))
      ->capture_default_str();
  c_mf->add_option("--branch", mf_branch, "plus or minus eigenvector branch")
      ->check(CLI::IsMember({"plus", "minus"}))
      ->capture_default_str();
  c_mf->add_option("--periods", mf_periods, "growth iterations")->capture_default_str()->check(CLI::Range(1, 1000000000));
  c_mf->add_option("--alpha", mf_alpha, "fundamental domain size")->capture_default_str();
  c_mf->add_option("--max-gap", mf_gap, "polyline refinement gap")->capture_default_str();
  c_mf->add_option("--tol", mf_tol, "connection detection distance")->capture_default_str();

  // connections
  CommonOpts o_cn;
  double cn_rmin = 0.55, cn_rmax = 0.62, cn_tol = 1e-4;
  int cn_shells = 8, cn_periods = 100;
  auto* c_cn = app.add_subcommand("connections",
                                  "sweep shells for heteroclinic/homoclinic connections");
  add_common(c_cn, o_cn, "connections.csv");
  c_cn->add_option("--rmin", cn_rmin, "lowest shell radius")->capture_default_str();
  c_cn->add_option("--rmax", cn_rmax, "highest shell radius")->capture_default_str();
  c_cn->add_option("--shells", cn_shells, "shell count")->capture_default_str()->check(CLI::Range(1, 1000000000));
  c_cn->add_option("--periods", cn_periods, "growth iterations per manifold")
      ->capture_default_str()->check(CLI::Range(1, 1000000000));
  c_cn->add_option("--tol", cn_tol, "connection detection distance")->capture_default_str();

  // jacobian
  CommonOpts o_jc;
  std::string jc_point = "0.05,-0.9,0.05";
  double jc_h = 1e-6;
  auto* c_jc = app.add_subcommand("jacobian", "finite-difference Jacobian and its spectrum");
  c_jc->set_help_flag("--help", "print help");  // frees -h for the step size
  add_common(c_jc, o_jc, "");
  c_jc->add_option("--point", jc_point, "evaluation point as x,y,z")->capture_default_str();
  c_jc->add_option("--h", jc_h, "central difference step")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // usage error
  }

  try {
    if (app.got_subcommand(c_win)) {
      if (win_eps > 0.0) {
        o_win.eps_z = win_eps;
        o_win.eps_x = win_eps;
      }
      if (!win_theta_text.empty()) {
        o_win.theta_z = win_theta_text;
        o_win.theta_x = win_theta_text;
      }
      (void)win_theta;
      return run_window(o_win);
    }
    if (app.got_subcommand(c_traj)) {
      return run_trajectory(o_traj, traj_seed, traj_periods, traj_events);
    }
    if (app.got_subcommand(c_poin)) {
      return run_poincare_cmd(o_poin, poin_rbar, poin_rmin, poin_rmax, poin_seeds, poin_periods,
                              poin_perturb);
    }
    if (app.got_subcommand(c_rad)) return run_radial_history(o_rad, rad_seed, rad_periods);
    if (app.got_subcommand(c_sw)) return run_switch_analyze(o_sw, sw_point);
    if (app.got_subcommand(c_p1)) return run_period_one(o_p1, p1_samples);
    if (app.got_subcommand(c_sp)) return run_shell_points(o_sp, sp_rbar);
    if (app.got_subcommand(c_oa)) return run_optimal_angles(o_oa);
    if (app.got_subcommand(c_bg)) {
      return run_bowl_grid(o_bg, bg_eps_lo, bg_eps_hi, bg_n_eps, bg_theta_lo, bg_theta_hi,
                           bg_n_theta);
    }
    if (app.got_subcommand(c_kr)) {
      return run_kam_ring(o_kr, kr_rbar, kr_rays, kr_periods, kr_div, kr_s_tol);
    }
    if (app.got_subcommand(c_kt)) {
      return run_kam_tube(o_kt, kt_rmin, kt_rmax, kt_shells, kt_rays, kt_periods);
    }
    if (app.got_subcommand(c_mf)) {
      return run_manifold(o_mf, mf_point, mf_rbar, mf_kind, mf_branch, mf_periods, mf_alpha,
                          mf_gap, mf_tol);
    }
    if (app.got_subcommand(c_cn)) {
      return run_connections(o_cn, cn_rmin, cn_rmax, cn_shells, cn_periods, cn_tol);
    }
    if (app.got_subcommand(c_jc)) return run_jacobian(o_jc, jc_point, jc_h);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
