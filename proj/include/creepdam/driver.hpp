#pragma once

// Staggered time stepping: each step alternates an equilibrium solve at
// frozen internal variables with a re-integration of (eps_cr, omega) from
// the step start under the new displacement, until the displacement update
// stalls (fixed-point/Picard iteration). The driver wraps that step with
// adaptive dt control, rupture detection with sub-step interpolation of the
// lifetime t*, and per-step localization diagnostics.

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "evolution.hpp"
#include "spaces.hpp"

namespace creepdam {

class PicardDivergedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct State {
  double t = 0.0;
  VectorField u;
  VoigtField eps_cr;
  ScalarField omega;
};

struct StepDiagnostics {
  double max_omega = 0.0;
  double min_one_minus_omega = 1.0;
  double grad_omega_lp = 0.0;
  double w1p_omega = 0.0;
  double lambda = 0.0;
  bool lambda_finite = true;
  double max_vm_stress = 0.0;
  double sup_eps_cr = 0.0;
  double sup_w1p_ratio = 0.0;  // sample of the C0 embedding ratio for omega
};

struct StepReport {
  double t = 0.0;        // time at the end of the step
  double dt_used = 0.0;  // zero for the initial-state row
  int picard_iters = 0;
  std::vector<double> contraction_ratios;  // successive |du| ratios, all > 0
  double max_domega = 0.0;
  StepDiagnostics diag;
};

enum class Termination { ReachedT, Rupture, PicardDiverged, SingularSystem };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::ReachedT: return "ReachedT";
    case Termination::Rupture: return "Rupture";
    case Termination::PicardDiverged: return "PicardDiverged";
    case Termination::SingularSystem: return "SingularSystem";
  }
  return "?";
}

struct RunResult {
  std::vector<StepReport> steps;  // steps[0] describes the initial state
  Termination termination = Termination::ReachedT;
  double t_star = std::numeric_limits<double>::quiet_NaN();  // set on Rupture
  State final_state;
  std::vector<std::string> warnings;
  double max_sup_w1p_ratio = 0.0;  // running max of the embedding-ratio sample
};

struct SimConfig {
  EvolveConfig evolve;
  double picard_tol = 1e-12;  // absolute, on the max nodal |du|
  int picard_max_iters = 50;
  NormConfig norms;

  void validate() const {
    evolve.validate();
    norms.validate();
    if (!(picard_tol > 0.0)) throw std::invalid_argument("SimConfig: picard_tol must be > 0");
    if (picard_max_iters < 1)
      throw std::invalid_argument("SimConfig: picard_max_iters must be >= 1");
  }
};

// Boundary displacement and body load as functions of position and time.
using BoundaryFn = std::function<Vec2(const Vec2&, double)>;
using LoadFn = std::function<Vec2(const Vec2&, double)>;

namespace detail {

inline double max_nodal_diff(const VectorField& a, const VectorField& b) {
  double d = 0.0;
  for (size_t i = 0; i < a.size(); ++i) d = std::max(d, (a[i] - b[i]).norm());
  return d;
}

inline DirichletBC bc_at(const Mesh& mesh, const BoundaryFn& boundary, double t) {
  DirichletBC bc = DirichletBC::none(mesh.node_count());
  for (int i : mesh.boundary_nodes) bc.set(i, boundary(mesh.nodes[i], t));
  return bc;
}

inline VectorField load_at(const Mesh& mesh, const LoadFn& load, double t) {
  if (!load) return {};
  VectorField q(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i) q[i] = load(mesh.nodes[i], t);
  return q;
}

}  // namespace detail

struct PicardOutcome {
  State state;
  StepReport report;
};

// One staggered step of length dt. Boundary data and load are the values at
// the end of the step (piecewise constant within the step). Internal
// variables always re-integrate from the step-start fields, so the converged
// pair satisfies both equilibrium and the one-step integral relation.
inline PicardOutcome picard_step(const Mesh& mesh, const MaterialParams& params,
                                 const State& state, const VectorField& load,
                                 const DirichletBC& bc, double dt, double tol, int max_iters,
                                 const EvolveConfig& evolve_cfg) {
  PicardOutcome out;
  out.report.t = state.t + dt;
  out.report.dt_used = dt;

  VectorField u = solve(assemble(mesh, params, state.omega, state.eps_cr, load, bc));
  double delta_prev = detail::max_nodal_diff(u, state.u);

  EvolveResult fields;
  for (int k = 1; k <= max_iters; ++k) {
    fields = evolve_fields(mesh, params, u, state.eps_cr, state.omega, dt, evolve_cfg);
    const VectorField u_next =
        solve(assemble(mesh, params, fields.omega, fields.eps_cr, load, bc));
    const double delta = detail::max_nodal_diff(u_next, u);
    if (delta_prev > 0.0 && delta > 0.0)
      out.report.contraction_ratios.push_back(delta / delta_prev);
    delta_prev = delta;
    u = u_next;
    if (delta <= tol) {
      out.report.picard_iters = k;
      out.report.max_domega = fields.max_domega;
      out.state.t = state.t + dt;
      out.state.u = std::move(u);
      out.state.eps_cr = std::move(fields.eps_cr);
      out.state.omega = std::move(fields.omega);
      return out;
    }
  }
  throw PicardDivergedError("picard_step: no contraction after " + std::to_string(max_iters) +
                            " iterations at t = " + std::to_string(state.t) +
                            ", dt = " + std::to_string(dt));
}

namespace detail {

inline StepDiagnostics diagnostics(const Mesh& mesh, const MaterialParams& params,
                                   const State& s, const NormConfig& norms) {
  StepDiagnostics d;
  for (double w : s.omega) {
    d.max_omega = std::max(d.max_omega, w);
    d.min_one_minus_omega = std::min(d.min_one_minus_omega, 1.0 - w);
  }
  d.grad_omega_lp = grad_lp_norm(mesh, s.omega, norms.p);
  d.w1p_omega = w1p_norm(mesh, s.omega, norms.p);
  const Localization loc = localization_measure(mesh, s.omega, norms.p);
  d.lambda = loc.value;
  d.lambda_finite = loc.finite;
  d.max_vm_stress = max_von_mises(stress_field(mesh, params, s.u, s.eps_cr, s.omega));
  for (const auto& c : s.eps_cr)
    d.sup_eps_cr = std::max({d.sup_eps_cr, std::abs(c.s11), std::abs(c.s22), std::abs(c.s12)});
  d.sup_w1p_ratio = sup_norm_check(mesh, s.omega, norms.p).ratio_to_w1p;
  return d;
}

// Earliest interpolated crossing of omega_crit between two accepted states.
inline double interpolate_t_star(const ScalarField& before, const ScalarField& after,
                                 double t_before, double dt, double omega_crit) {
  double t_star = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < after.size(); ++i) {
    if (after[i] >= omega_crit && after[i] > before[i]) {
      const double frac = (omega_crit - before[i]) / (after[i] - before[i]);
      t_star = std::min(t_star, t_before + std::max(frac, 0.0) * dt);
    }
  }
  return t_star;
}

}  // namespace detail

// Runs the coupled problem from t = 0 until t_end, rupture (max omega
// reaching omega_crit), Picard divergence, or a singular system. steps[0]
// records the initial equilibrium state.
inline RunResult run(const Mesh& mesh, const MaterialParams& params, const VoigtField& eps_cr0,
                     const ScalarField& omega0, const LoadFn& load, const BoundaryFn& boundary,
                     double t_end, const SimConfig& sim,
                     const std::function<void(const State&, const StepReport&)>& on_step = {}) {
  params.validate();
  sim.validate();
  if (!(t_end > 0.0)) throw std::invalid_argument("run: t_end must be > 0");
  if (!boundary) throw std::invalid_argument("run: boundary schedule is required");
  if (static_cast<int>(omega0.size()) != mesh.node_count() ||
      static_cast<int>(eps_cr0.size()) != mesh.node_count())
    throw std::invalid_argument("run: initial field sizes do not match the mesh");

  // The evolution ceiling must sit above the rupture threshold, otherwise
  // damage saturates without ever triggering the lifetime detection.
  EvolveConfig ec = sim.evolve;
  ec.damage_ceiling =
      std::max(ec.damage_ceiling,
               std::min(params.omega_crit + 0.5 * (1.0 - params.omega_crit),
                        1.0 - 2.0 * kOneMinusOmegaFloor));

  RunResult res;
  const Membership member = membership_Y(mesh, omega0, sim.norms);
  if (!member.inside)
    res.warnings.push_back("initial damage outside the admissible set: " + member.reason +
                           " (value " + std::to_string(member.offending_value) + ")");

  State state;
  state.t = 0.0;
  state.eps_cr = eps_cr0;
  state.omega = omega0;
  try {
    state.u = solve(assemble(mesh, params, omega0, eps_cr0, detail::load_at(mesh, load, 0.0),
                             detail::bc_at(mesh, boundary, 0.0)));
  } catch (const SolverError& err) {
    res.termination = Termination::SingularSystem;
    res.warnings.push_back(std::string("initial solve failed: ") + err.what());
    state.u.assign(mesh.node_count(), Vec2{});
    res.final_state = std::move(state);
    return res;
  }

  StepReport first;
  first.t = 0.0;
  first.diag = detail::diagnostics(mesh, params, state, sim.norms);
  res.max_sup_w1p_ratio = first.diag.sup_w1p_ratio;
  res.steps.push_back(first);
  if (on_step) on_step(state, res.steps.back());

  if (first.diag.max_omega >= params.omega_crit) {
    res.termination = Termination::Rupture;
    res.t_star = 0.0;
    res.final_state = std::move(state);
    return res;
  }

  double dt_next = ec.dt_init;
  res.termination = Termination::ReachedT;
  while (state.t < t_end * (1.0 - 1e-15)) {
    double dt = std::min(dt_next, t_end - state.t);
    PicardOutcome step;
    try {
      int rejections = 0;
      while (true) {
        const VectorField load_now = detail::load_at(mesh, load, state.t + dt);
        const DirichletBC bc_now = detail::bc_at(mesh, boundary, state.t + dt);
        step = picard_step(mesh, params, state, load_now, bc_now, dt, sim.picard_tol,
                           sim.picard_max_iters, ec);
        const DtDecision decision = adapt_dt(dt, step.report.max_domega, ec);
        if (decision.accepted) {
          dt_next = decision.next_dt;
          break;
        }
        if (decision.rupture_imminent) {
          // Even the smallest step violates the damage cap: take it and let
          // the critical-damage check below terminate the run.
          dt_next = ec.dt_min;
          break;
        }
        dt = decision.next_dt;
        if (++rejections > 200)
          throw SolverError("run: step rejection did not terminate at t = " +
                            std::to_string(state.t));
      }
    } catch (const PicardDivergedError& err) {
      res.termination = Termination::PicardDiverged;
      res.warnings.push_back(err.what());
      break;
    } catch (const SolverError& err) {
      res.termination = Termination::SingularSystem;
      res.warnings.push_back(err.what());
      break;
    }

    const ScalarField omega_before = state.omega;
    state = std::move(step.state);
    step.report.diag = detail::diagnostics(mesh, params, state, sim.norms);
    res.max_sup_w1p_ratio = std::max(res.max_sup_w1p_ratio, step.report.diag.sup_w1p_ratio);
    res.steps.push_back(std::move(step.report));
    if (on_step) on_step(state, res.steps.back());

    if (res.steps.back().diag.max_omega >= params.omega_crit) {
      res.termination = Termination::Rupture;
      res.t_star = detail::interpolate_t_star(omega_before, state.omega,
                                              state.t - res.steps.back().dt_used,
                                              res.steps.back().dt_used, params.omega_crit);
      break;
    }
  }
  res.final_state = std::move(state);
  return res;
}

// Linear interpolation of the recorded localization history.
inline double lambda_at(const RunResult& res, double t) {
  if (res.steps.empty()) throw std::invalid_argument("lambda_at: empty run");
  if (t <= res.steps.front().t) return res.steps.front().diag.lambda;
  for (size_t i = 1; i < res.steps.size(); ++i) {
    if (t <= res.steps[i].t) {
      const double t0 = res.steps[i - 1].t, t1 = res.steps[i].t;
      const double l0 = res.steps[i - 1].diag.lambda, l1 = res.steps[i].diag.lambda;
      if (t1 <= t0) return l1;
      return l0 + (l1 - l0) * (t - t0) / (t1 - t0);
    }
  }
  return res.steps.back().diag.lambda;
}

// Everything one run needs; sweeps build one case per parameter value.
struct RunCase {
  Mesh mesh;
  MaterialParams params;
  VoigtField eps_cr0;
  ScalarField omega0;
  LoadFn load;
  BoundaryFn boundary;
  double t_end = 1.0;
  SimConfig sim;
};

inline RunResult run_case(const RunCase& c,
                          const std::function<void(const State&, const StepReport&)>& cb = {}) {
  return run(c.mesh, c.params, c.eps_cr0, c.omega0, c.load, c.boundary, c.t_end, c.sim, cb);
}

struct SweepRow {
  double parameter = 0.0;
  bool ok = false;
  std::string error;  // set when the row failed outright
  Termination termination = Termination::ReachedT;
  double t_star = std::numeric_limits<double>::quiet_NaN();
  double lambda0 = 0.0;
  double lambda_late = 0.0;  // lambda at 0.95 t* (or at the final time)
  double mean_picard_iters = 0.0;
};

// Lifetime study over a scalar parameter. Rows are independent and may be
// evaluated concurrently; results keep the input order and row failures are
// recorded rather than fatal.
inline std::vector<SweepRow> lifetime_sweep(const std::function<RunCase(double)>& make_case,
                                            const std::vector<double>& values, int threads = 1) {
  std::vector<SweepRow> rows(values.size());
  auto eval_row = [&](size_t i) {
    SweepRow row;
    row.parameter = values[i];
    try {
      const RunCase c = make_case(values[i]);
      const RunResult res = run_case(c);
      row.ok = true;
      row.termination = res.termination;
      row.t_star = res.t_star;
      row.lambda0 = res.steps.front().diag.lambda;
      const double probe =
          res.termination == Termination::Rupture ? 0.95 * res.t_star : res.steps.back().t;
      row.lambda_late = lambda_at(res, probe);
      if (res.steps.size() > 1) {
        double iters = 0.0;
        for (size_t s = 1; s < res.steps.size(); ++s) iters += res.steps[s].picard_iters;
        row.mean_picard_iters = iters / static_cast<double>(res.steps.size() - 1);
      }
    } catch (const std::exception& err) {
      row.ok = false;
      row.error = err.what();
    }
    rows[i] = std::move(row);
  };

  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(values.size())));
  if (workers == 1) {
    for (size_t i = 0; i < values.size(); ++i) eval_row(i);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (size_t i = w; i < values.size(); i += workers) eval_row(i);
      });
    for (auto& th : pool) th.join();
  }
  return rows;
}

}  // namespace creepdam
