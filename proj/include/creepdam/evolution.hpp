#pragma once

// Time integration of the nodal internal variables (eps_cr, omega) under a
// frozen displacement field, plus the step-size controller that keeps the
// per-step damage increment under a cap.

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "fem.hpp"

namespace creepdam {

enum class Integrator { Euler, Rk4 };

struct EvolveConfig {
  double dt_init = 1e-3;
  double dt_min = 1e-12;
  double dt_max = 0.1;
  double max_domega_per_step = 0.01;  // accept a step only below this increment
  Integrator integrator = Integrator::Rk4;
  // Hard clamp on evolved damage; keeps every stiffness evaluation strictly
  // positive definite and every rate evaluation inside the material domain.
  double damage_ceiling = 0.975;  // = 1 - beta1/2 at the default beta1

  void validate() const {
    if (!(dt_min > 0.0 && dt_init >= dt_min && dt_max >= dt_init))
      throw std::invalid_argument("EvolveConfig: need 0 < dt_min <= dt_init <= dt_max");
    if (!(max_domega_per_step > 0.0))
      throw std::invalid_argument("EvolveConfig: max_domega_per_step must be > 0");
    if (!(damage_ceiling > 0.0 && damage_ceiling <= 1.0 - 2.0 * kOneMinusOmegaFloor))
      throw std::invalid_argument(
          "EvolveConfig: damage_ceiling must stay below the material singularity floor");
  }
};

struct EvolveResult {
  VoigtField eps_cr;
  ScalarField omega;
  double max_domega = 0.0;  // largest nodal damage increment of the step
};

namespace detail {

// Stage state / stage rate of the coupled nodal ODE system.
struct FieldState {
  VoigtField cr;
  ScalarField omega;
};

// One rate evaluation for every node at once. The driving stress is the
// equilibrated stress of the stage state (element stresses with
// vertex-averaged internal variables, exactly as assembled) recovered to
// nodes by area weighting; the local rate factors (1-omega)^-n, (1-omega)^-qd
// keep the node's own damage. Intermediate stage values may overshoot; they
// are clamped at the ceiling so every evaluation stays inside the material
// domain, and the overshoot surfaces as a large max_domega that gets the
// step rejected upstream.
inline FieldState field_rate(const Mesh& mesh, const MaterialParams& p, const VoigtField& eps_el,
                             const FieldState& y, double ceiling) {
  const int n = mesh.node_count();
  ScalarField om(n);
  for (int i = 0; i < n; ++i) om[i] = std::min(y.omega[i], ceiling);

  VoigtField sig_el(mesh.element_count());
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto& t = mesh.triangles[e];
    const Voigt3 cr = element_mean(y.cr, t);
    Rho r;
    r.eps11 = eps_el[e].s11;
    r.eps22 = eps_el[e].s22;
    r.eps12 = eps_el[e].s12;
    r.cr11 = cr.s11;
    r.cr22 = cr.s22;
    r.cr12 = cr.s12;
    r.omega = element_mean(om, t);
    sig_el[e] = stress(p, r);
  }
  const VoigtField sig = nodal_average(mesh, sig_el);

  FieldState k;
  k.cr.resize(n);
  k.omega.resize(n);
  for (int i = 0; i < n; ++i) {
    k.cr[i] = creep_rate(p, sig[i], om[i]);
    k.omega[i] = damage_rate(p, sig[i], om[i]);
  }
  return k;
}

inline FieldState axpy(const FieldState& y, double h, const FieldState& k) {
  const int n = static_cast<int>(y.omega.size());
  FieldState z;
  z.cr.resize(n);
  z.omega.resize(n);
  for (int i = 0; i < n; ++i) {
    z.cr[i] = y.cr[i] + h * k.cr[i];
    z.omega[i] = y.omega[i] + h * k.omega[i];
  }
  return z;
}

}  // namespace detail

// One explicit step of length dt for every node, displacement held fixed.
// Rates are driven by the recovered equilibrated stress (see field_rate).
// Damage never decreases and is clamped at the ceiling.
inline EvolveResult evolve_fields(const Mesh& mesh, const MaterialParams& params,
                                  const VectorField& u, const VoigtField& eps_cr,
                                  const ScalarField& omega, double dt,
                                  const EvolveConfig& cfg) {
  cfg.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("evolve_fields: dt must be > 0");
  const int n = mesh.node_count();
  if (static_cast<int>(eps_cr.size()) != n || static_cast<int>(omega.size()) != n)
    throw std::invalid_argument("evolve_fields: field sizes do not match the mesh");
  for (int i = 0; i < n; ++i)
    if (!(omega[i] >= 0.0 && omega[i] <= cfg.damage_ceiling))
      throw std::domain_error("evolve_fields: damage above the ceiling at node " +
                              std::to_string(i));

  const VoigtField eps_el = strain(mesh, u);  // frozen within the step
  const detail::FieldState y0{eps_cr, omega};
  detail::FieldState y1;
  if (cfg.integrator == Integrator::Euler) {
    const auto k1 = detail::field_rate(mesh, params, eps_el, y0, cfg.damage_ceiling);
    y1 = detail::axpy(y0, dt, k1);
  } else {
    const auto k1 = detail::field_rate(mesh, params, eps_el, y0, cfg.damage_ceiling);
    const auto k2 = detail::field_rate(mesh, params, eps_el, detail::axpy(y0, 0.5 * dt, k1),
                                       cfg.damage_ceiling);
    const auto k3 = detail::field_rate(mesh, params, eps_el, detail::axpy(y0, 0.5 * dt, k2),
                                       cfg.damage_ceiling);
    const auto k4 =
        detail::field_rate(mesh, params, eps_el, detail::axpy(y0, dt, k3), cfg.damage_ceiling);
    y1.cr.resize(n);
    y1.omega.resize(n);
    for (int i = 0; i < n; ++i) {
      y1.cr[i] = y0.cr[i] + (dt / 6.0) * (k1.cr[i] + 2.0 * k2.cr[i] + 2.0 * k3.cr[i] + k4.cr[i]);
      y1.omega[i] =
          y0.omega[i] + (dt / 6.0) * (k1.omega[i] + 2.0 * k2.omega[i] + 2.0 * k3.omega[i] + k4.omega[i]);
    }
  }

  EvolveResult out;
  out.eps_cr.resize(n);
  out.omega.resize(n);
  for (int i = 0; i < n; ++i) {
    const double w = std::min(y1.omega[i], cfg.damage_ceiling);
    out.eps_cr[i] = y1.cr[i];
    out.omega[i] = w;
    out.max_domega = std::max(out.max_domega, w - omega[i]);
  }
  return out;
}

// Step-size decision after a trial step. A violated cap rejects the step and
// halves dt; a comfortable margin grows dt geometrically. When dt_min still
// violates the cap the controller flags imminent rupture so the caller can
// accept the step and let the critical-damage check terminate the run.
struct DtDecision {
  bool accepted = true;
  double next_dt = 0.0;
  bool rupture_imminent = false;
};

inline DtDecision adapt_dt(double prev_dt, double max_domega, const EvolveConfig& cfg) {
  const double cap = cfg.max_domega_per_step;
  auto clamp_dt = [&](double dt) { return std::clamp(dt, cfg.dt_min, cfg.dt_max); };
  if (max_domega > cap) {
    const bool at_min = prev_dt <= cfg.dt_min * (1.0 + 1e-12);
    return {false, clamp_dt(prev_dt / 2.0), at_min};
  }
  if (max_domega <= 0.5 * cap) return {true, clamp_dt(prev_dt * 1.5), false};
  return {true, clamp_dt(prev_dt), false};
}

}  // namespace creepdam
