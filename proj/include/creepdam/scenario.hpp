#pragma once

// Scenario assembly: translates a config document (or one of the embedded
// built-in scenarios) into a ready-to-run case, including the weak-band
// initial damage field and the boundary displacement schedules.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "config.hpp"
#include "driver.hpp"

namespace creepdam {

// Band of weakened material around a polyline: omega0 peaks at 1/2 on the
// line and falls off linearly to zero at distance h.
inline ScalarField build_band_damage(const Mesh& mesh, const Polyline& line, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("build_band_damage: h must be > 0");
  ScalarField omega(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i) {
    const double d = dist_to_polyline(mesh.nodes[i], line);
    omega[i] = std::max(0.0, (h - d) / (2.0 * h));
  }
  return omega;
}

struct Scenario {
  std::string name;
  RunCase run;
  int snapshot_every = 0;  // field output every N accepted steps; 0 = first/last only
};

namespace detail {

inline const std::map<std::string, std::vector<std::string>>& scenario_schema() {
  static const std::map<std::string, std::vector<std::string>> schema{
      {"mesh",
       {"type", "width", "height", "nx", "ny", "notch_depth", "notch_tip_angle_deg", "file"}},
      {"material", {"E", "nu", "A", "n", "B", "m", "qd", "omega_crit", "coupling"}},
      {"initial",
       {"omega", "omega_value", "band_h", "band_points", "bump_center", "bump_radius",
        "bump_peak", "omega_file"}},
      {"boundary",
       {"mode", "g11", "g12", "g21", "g22", "a1", "a2", "amplitude_start", "amplitude_end"}},
      {"load", {"mode", "qx", "qy"}},
      {"run",
       {"t_end", "dt_init", "dt_min", "dt_max", "max_domega", "integrator", "picard_tol",
        "picard_max_iters", "p", "beta1", "beta2", "snapshot_every"}}};
  return schema;
}

inline Mesh mesh_from_config(const Config& cfg) {
  const std::string type = cfg.get_string("mesh", "type");
  if (type == "file") return read_mesh(cfg.get_string("mesh", "file"));
  const double width = cfg.get_double("mesh", "width");
  const double height = cfg.get_double("mesh", "height");
  const int nx = cfg.get_int("mesh", "nx");
  const int ny = cfg.get_int("mesh", "ny");
  if (type == "rect") return structured_rect_mesh(width, height, nx, ny);
  if (type == "notched") {
    const double depth = cfg.get_double("mesh", "notch_depth");
    const double angle_deg = cfg.get_double("mesh", "notch_tip_angle_deg");
    return notched_rect_mesh(width, height, depth, angle_deg * 3.141592653589793 / 180.0, nx,
                             ny);
  }
  throw ConfigError(cfg.origin() + ": [mesh].type must be rect, notched or file, got '" + type +
                    "'");
}

inline MaterialParams material_from_config(const Config& cfg) {
  MaterialParams p;
  p.E = cfg.get_double("material", "E");
  p.nu = cfg.get_double("material", "nu");
  p.A = cfg.get_double("material", "A");
  p.n = cfg.get_double_or("material", "n", 1.0);
  p.B = cfg.get_double("material", "B");
  p.m = cfg.get_double_or("material", "m", 1.0);
  p.qd = cfg.get_double_or("material", "qd", 0.0);
  p.omega_crit = cfg.get_double_or("material", "omega_crit", 0.99);
  const std::string coupling = cfg.get_string("material", "coupling");
  if (coupling == "fully")
    p.coupling = Coupling::FullyCoupled;
  else if (coupling == "partly")
    p.coupling = Coupling::PartlyCoupled;
  else
    throw ConfigError(cfg.origin() + ": [material].coupling must be fully or partly, got '" +
                      coupling + "'");
  try {
    p.validate();
  } catch (const std::invalid_argument& err) {
    throw ConfigError(cfg.origin() + ": [material] " + err.what());
  }
  return p;
}

inline ScalarField initial_damage_from_config(const Config& cfg, const Mesh& mesh) {
  const std::string kind = cfg.get_string("initial", "omega");
  if (kind == "uniform") {
    const double v = cfg.get_double("initial", "omega_value");
    if (!(v >= 0.0 && v < 1.0))
      throw ConfigError(cfg.origin() + ": [initial].omega_value must lie in [0, 1)");
    return ScalarField(mesh.node_count(), v);
  }
  if (kind == "band") {
    const double h = cfg.get_double("initial", "band_h");
    const std::vector<double> pts = cfg.get_doubles("initial", "band_points");
    if (pts.size() < 4 || pts.size() % 2 != 0)
      throw ConfigError(cfg.origin() +
                        ": [initial].band_points needs an even list of at least 4 numbers");
    std::vector<Vec2> points;
    for (size_t i = 0; i + 1 < pts.size(); i += 2) points.push_back({pts[i], pts[i + 1]});
    return build_band_damage(mesh, Polyline(points), h);
  }
  if (kind == "bump") {
    // Smooth compactly-supported imperfection: peak * (1 - (r/R)^2)^2 inside
    // radius R, zero outside; C^1 everywhere, so refinement studies see a
    // regular initial state.
    const std::vector<double> c = cfg.get_doubles("initial", "bump_center");
    if (c.size() != 2)
      throw ConfigError(cfg.origin() + ": [initial].bump_center needs exactly 2 numbers");
    const double radius = cfg.get_double("initial", "bump_radius");
    const double peak = cfg.get_double("initial", "bump_peak");
    if (!(radius > 0.0))
      throw ConfigError(cfg.origin() + ": [initial].bump_radius must be > 0");
    if (!(peak >= 0.0 && peak < 1.0))
      throw ConfigError(cfg.origin() + ": [initial].bump_peak must lie in [0, 1)");
    ScalarField omega(mesh.node_count(), 0.0);
    for (int i = 0; i < mesh.node_count(); ++i) {
      const double dx = mesh.nodes[i].x - c[0];
      const double dy = mesh.nodes[i].y - c[1];
      const double s2 = (dx * dx + dy * dy) / (radius * radius);
      if (s2 < 1.0) omega[i] = peak * (1.0 - s2) * (1.0 - s2);
    }
    return omega;
  }
  if (kind == "file") {
    const std::string path = cfg.get_string("initial", "omega_file");
    std::ifstream in(path);
    if (!in) throw ConfigError(cfg.origin() + ": cannot open [initial].omega_file '" + path + "'");
    ScalarField omega;
    double v = 0.0;
    while (in >> v) {
      if (!(v >= 0.0 && v < 1.0))
        throw ConfigError(cfg.origin() + ": value " + std::to_string(v) + " in '" + path +
                          "' outside [0, 1)");
      omega.push_back(v);
    }
    if (static_cast<int>(omega.size()) != mesh.node_count())
      throw ConfigError(cfg.origin() + ": '" + path + "' holds " + std::to_string(omega.size()) +
                        " values for " + std::to_string(mesh.node_count()) + " nodes");
    return omega;
  }
  throw ConfigError(cfg.origin() + ": [initial].omega must be uniform, band, bump or file, got '" +
                    kind + "'");
}

inline BoundaryFn boundary_from_config(const Config& cfg, const Mesh& mesh, double t_end) {
  const std::string mode = cfg.get_string("boundary", "mode");
  const double amp0 = cfg.get_double_or("boundary", "amplitude_start", 1.0);
  const double amp1 = cfg.get_double_or("boundary", "amplitude_end", amp0);
  const auto amp = [amp0, amp1, t_end](double t) {
    const double s = std::clamp(t / t_end, 0.0, 1.0);
    return amp0 + s * (amp1 - amp0);
  };
  if (mode == "affine") {
    const double g11 = cfg.get_double_or("boundary", "g11", 0.0);
    const double g12 = cfg.get_double_or("boundary", "g12", 0.0);
    const double g21 = cfg.get_double_or("boundary", "g21", 0.0);
    const double g22 = cfg.get_double_or("boundary", "g22", 0.0);
    const double a1 = cfg.get_double_or("boundary", "a1", 0.0);
    const double a2 = cfg.get_double_or("boundary", "a2", 0.0);
    return [=](const Vec2& x, double t) -> Vec2 {
      const double a = amp(t);
      return {a * (a1 + g11 * x.x + g12 * x.y), a * (a2 + g21 * x.x + g22 * x.y)};
    };
  }
  if (mode == "stretch_quadratic_y") {
    double height = 0.0;
    for (const auto& n : mesh.nodes) height = std::max(height, n.y);
    if (!(height > 0.0)) throw ConfigError(cfg.origin() + ": mesh has zero height");
    return [=](const Vec2& x, double t) -> Vec2 {
      const double s = x.y / height;
      return {0.0, amp(t) * s * s};
    };
  }
  throw ConfigError(cfg.origin() +
                    ": [boundary].mode must be affine or stretch_quadratic_y, got '" + mode +
                    "'");
}

inline LoadFn load_from_config(const Config& cfg) {
  if (!cfg.has("load", "mode")) return {};
  const std::string mode = cfg.get_string("load", "mode");
  if (mode == "none") return {};
  if (mode == "constant") {
    const double qx = cfg.get_double_or("load", "qx", 0.0);
    const double qy = cfg.get_double_or("load", "qy", 0.0);
    return [qx, qy](const Vec2&, double) -> Vec2 { return {qx, qy}; };
  }
  throw ConfigError(cfg.origin() + ": [load].mode must be none or constant, got '" + mode + "'");
}

}  // namespace detail

inline Scenario scenario_from_config(const Config& cfg) {
  cfg.reject_unknown_keys(detail::scenario_schema());

  Scenario sc;
  sc.name = cfg.origin();
  sc.run.mesh = detail::mesh_from_config(cfg);
  sc.run.params = detail::material_from_config(cfg);
  sc.run.omega0 = detail::initial_damage_from_config(cfg, sc.run.mesh);
  sc.run.eps_cr0.assign(sc.run.mesh.node_count(), Voigt3{});

  sc.run.t_end = cfg.get_double("run", "t_end");
  if (!(sc.run.t_end > 0.0)) throw ConfigError(cfg.origin() + ": [run].t_end must be > 0");
  sc.run.boundary = detail::boundary_from_config(cfg, sc.run.mesh, sc.run.t_end);
  sc.run.load = detail::load_from_config(cfg);

  SimConfig sim;
  sim.evolve.dt_init = cfg.get_double_or("run", "dt_init", 1e-3);
  sim.evolve.dt_min = cfg.get_double_or("run", "dt_min", 1e-12);
  sim.evolve.dt_max = cfg.get_double_or("run", "dt_max", 0.1);
  sim.evolve.max_domega_per_step = cfg.get_double_or("run", "max_domega", 0.01);
  const std::string integ = cfg.get_string_or("run", "integrator", "rk4");
  if (integ == "rk4")
    sim.evolve.integrator = Integrator::Rk4;
  else if (integ == "euler")
    sim.evolve.integrator = Integrator::Euler;
  else
    throw ConfigError(cfg.origin() + ": [run].integrator must be rk4 or euler, got '" + integ +
                      "'");
  sim.picard_tol = cfg.get_double_or("run", "picard_tol", 1e-12);
  sim.picard_max_iters = cfg.get_int_or("run", "picard_max_iters", 50);
  sim.norms.p = cfg.get_double_or("run", "p", 4.0);
  sim.norms.beta1 = cfg.get_double_or("run", "beta1", 0.05);
  sim.norms.beta2 = cfg.get_double_or("run", "beta2", 100.0);
  sim.evolve.damage_ceiling = 1.0 - sim.norms.beta1 / 2.0;
  try {
    sim.validate();
  } catch (const std::invalid_argument& err) {
    throw ConfigError(cfg.origin() + ": [run] " + err.what());
  }
  sc.run.sim = sim;
  sc.snapshot_every = cfg.get_int_or("run", "snapshot_every", 0);
  if (sc.snapshot_every < 0)
    throw ConfigError(cfg.origin() + ": [run].snapshot_every must be >= 0");
  return sc;
}

// ---------------------------------------------------------------------------
// Built-in scenarios. `uniaxial` reproduces the closed-form damage history;
// `band` is the weak-band lifetime study; `notch`/`smooth` form the
// mesh-dependence pair (corner singularity vs smooth data).
// ---------------------------------------------------------------------------

inline const char* builtin_scenario_text(const std::string& name) {
  if (name == "uniaxial") {
    return R"(# Single-cell uniaxial tension held at sigma_vm = 1; damage follows the
# closed-form solution, rupture at omega = 1 - 1e-6 near t = 0.5.
[mesh]
type = rect
width = 1
height = 1
nx = 1
ny = 1

[material]
E = 1
nu = 0
A = 0
n = 1
B = 1
m = 2
qd = 1
omega_crit = 0.999999
coupling = partly

[initial]
omega = uniform
omega_value = 0

[boundary]
mode = affine
g11 = 1
amplitude_start = 1
amplitude_end = 1

[run]
t_end = 1
dt_init = 0.001
dt_max = 0.02
max_domega = 0.01
)";
  }
  if (name == "band") {
    return R"(# Rectangle with a weak horizontal band (peak damage 1/2 on the segment),
# constant vertical stretch of 0.1% of the height. Creep is disabled and the
# damage law drives the lifetime: a narrower band leaves the weakened column
# stiffer, so it carries more of the prescribed stretch and ruptures sooner --
# the lifetime shrinks with the band width h.
[mesh]
type = rect
width = 2
height = 1
nx = 64
ny = 32

[material]
E = 1000
nu = 0.3
A = 0
n = 1
B = 1
m = 2
qd = 0
omega_crit = 0.99
coupling = fully

[initial]
omega = band
band_h = 0.1
band_points = 0.5 0.5 1.5 0.5

[boundary]
mode = affine
g22 = 1
amplitude_start = 0.001
amplitude_end = 0.001

[run]
t_end = 50
dt_init = 0.001
dt_max = 0.5
max_domega = 0.01
snapshot_every = 25
)";
  }
  if (name == "notch") {
    return R"(# Clamped square with a sharp V-notch cut into the top edge, loaded by a
# constant downward body force. The re-entrant corner at the notch tip makes
# the elastic stress unbounded there, so refining the mesh keeps raising the
# resolved tip stress and the computed lifetime keeps dropping.
[mesh]
type = notched
width = 1
height = 1
notch_depth = 0.5
notch_tip_angle_deg = 30
nx = 16
ny = 16

[material]
E = 1000
nu = 0.3
A = 0
n = 1
B = 1
m = 2
qd = 1
omega_crit = 0.99
coupling = fully

[initial]
omega = uniform
omega_value = 0

[boundary]
mode = affine
amplitude_start = 0
amplitude_end = 0

[load]
mode = constant
qx = 0
qy = -10

[run]
t_end = 50
dt_init = 0.001
dt_max = 0.5
max_domega = 0.01
snapshot_every = 25
)";
  }
  if (name == "smooth") {
    return R"(# Companion to the notch scenario: plain square, smooth boundary data and a
# smooth interior imperfection (a C^1 damage bump placed off the mesh lines),
# partly coupled so the driving stress field stays elastic. Everything the
# lifetime depends on converges under mesh refinement, and so does the
# lifetime itself.
[mesh]
type = rect
width = 1
height = 1
nx = 16
ny = 16

[material]
E = 1000
nu = 0.3
A = 0
n = 1
B = 1
m = 2
qd = 1
omega_crit = 0.99
coupling = partly

[initial]
omega = bump
bump_center = 0.54321 0.45678
bump_radius = 0.35
bump_peak = 0.6

[boundary]
mode = stretch_quadratic_y
amplitude_start = 0.003
amplitude_end = 0.003

[run]
t_end = 50
dt_init = 0.001
dt_max = 0.5
max_domega = 0.01
snapshot_every = 25
)";
  }
  return nullptr;
}

// Accepts a built-in name or a config file path (built-ins take precedence).
inline Config scenario_config(const std::string& path_or_name) {
  if (const char* text = builtin_scenario_text(path_or_name))
    return Config::from_text(text, "builtin:" + path_or_name);
  return Config::from_file(path_or_name);
}

inline Scenario load_scenario(const std::string& path_or_name) {
  return scenario_from_config(scenario_config(path_or_name));
}

// Sweep parameters: "h" scales the band half-width, "mesh_size" sets nx and
// rescales ny to keep the cell aspect ratio of the base config.
inline Config apply_sweep_parameter(const Config& base, const std::string& param, double value) {
  if (param == "h") {
    if (base.get_string_or("initial", "omega", "") != "band")
      throw ConfigError(base.origin() + ": sweep over h requires [initial].omega = band");
    std::ostringstream v;
    v.precision(17);
    v << value;
    return base.with_override("initial", "band_h", v.str());
  }
  if (param == "mesh_size") {
    const int nx_base = base.get_int("mesh", "nx");
    const int ny_base = base.get_int("mesh", "ny");
    const int nx = static_cast<int>(std::lround(value));
    if (nx < 1) throw ConfigError(base.origin() + ": mesh_size values must be >= 1");
    const int ny = std::max(
        1, static_cast<int>(std::lround(static_cast<double>(nx) * ny_base / nx_base)));
    return base.with_override("mesh", "nx", std::to_string(nx))
        .with_override("mesh", "ny", std::to_string(ny));
  }
  throw ConfigError(base.origin() + ": unknown sweep parameter '" + param +
                    "' (expected h or mesh_size)");
}

}  // namespace creepdam
