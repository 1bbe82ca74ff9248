#pragma once

// Result writers: per-step diagnostics as CSV, field snapshots as legacy
// ASCII VTK, and a short plain-text run summary. All output is deterministic
// (fixed formatting, no timestamps), so reruns are byte-identical.

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "driver.hpp"

namespace creepdam {

namespace detail {

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out.precision(17);
  return out;
}

}  // namespace detail

inline constexpr const char* kTimeseriesHeader =
    "t,dt,max_omega,min_one_minus_omega,grad_omega_lp,lambda,max_vm_stress,picard_iters,"
    "contraction_ratio,w1p_omega,sup_eps_cr";

inline void write_timeseries_csv(const std::string& path, const RunResult& res) {
  std::ofstream out = detail::open_out(path);
  out << kTimeseriesHeader << "\n";
  for (const auto& s : res.steps) {
    const double ratio = s.contraction_ratios.empty() ? 0.0 : s.contraction_ratios.back();
    out << s.t << "," << s.dt_used << "," << s.diag.max_omega << ","
        << s.diag.min_one_minus_omega << "," << s.diag.grad_omega_lp << "," << s.diag.lambda
        << "," << s.diag.max_vm_stress << "," << s.picard_iters << "," << ratio << ","
        << s.diag.w1p_omega << "," << s.diag.sup_eps_cr << "\n";
  }
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

// Legacy ASCII VTK snapshot with nodal damage, von Mises stress and
// displacement. The nodal stress uses the same area-weighted strain recovery
// as the evolution laws.
inline void write_vtk(const std::string& path, const Mesh& mesh, const MaterialParams& params,
                      const State& state) {
  std::ofstream out = detail::open_out(path);
  out << "# vtk DataFile Version 3.0\n";
  out << "creepdam fields at t=" << state.t << "\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.node_count() << " double\n";
  for (const auto& n : mesh.nodes) out << n.x << " " << n.y << " 0\n";
  out << "CELLS " << mesh.element_count() << " " << 4 * mesh.element_count() << "\n";
  for (const auto& t : mesh.triangles) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  out << "CELL_TYPES " << mesh.element_count() << "\n";
  for (int e = 0; e < mesh.element_count(); ++e) out << "5\n";

  out << "POINT_DATA " << mesh.node_count() << "\n";
  out << "SCALARS omega double 1\n";
  out << "LOOKUP_TABLE default\n";
  for (double w : state.omega) out << w << "\n";

  out << "SCALARS von_mises double 1\n";
  out << "LOOKUP_TABLE default\n";
  const VoigtField sig = nodal_stress(mesh, params, state.u, state.eps_cr, state.omega);
  for (int i = 0; i < mesh.node_count(); ++i) out << von_mises(sig[i]) << "\n";

  out << "VECTORS displacement double\n";
  for (const auto& u : state.u) out << u.x << " " << u.y << " 0\n";
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

inline void write_summary(const std::string& path, const std::string& scenario_name,
                          const RunResult& res) {
  std::ofstream out = detail::open_out(path);
  out << "scenario: " << scenario_name << "\n";
  out << "termination: " << to_string(res.termination) << "\n";
  out << "t_star: " << res.t_star << "\n";
  out << "t_stop: " << res.steps.back().t << "\n";
  out << "steps: " << res.steps.size() - 1 << "\n";
  out << "final_max_omega: " << res.steps.back().diag.max_omega << "\n";
  out << "final_lambda: " << res.steps.back().diag.lambda << "\n";
  out << "final_max_vm_stress: " << res.steps.back().diag.max_vm_stress << "\n";
  out << "max_sup_w1p_ratio: " << res.max_sup_w1p_ratio << "\n";
  for (const auto& w : res.warnings) out << "warning: " << w << "\n";
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

inline constexpr const char* kSweepHeader =
    "value,t_star,lambda_0,lambda_095,picard_mean_iters,status";

inline void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
  std::ofstream out = detail::open_out(path);
  out << kSweepHeader << "\n";
  for (const auto& r : rows) {
    std::string status = r.ok ? to_string(r.termination) : ("failed: " + r.error);
    for (auto& ch : status)
      if (ch == ',' || ch == '\n') ch = ';';
    out << r.parameter << "," << r.t_star << "," << r.lambda0 << "," << r.lambda_late << ","
        << r.mean_picard_iters << "," << status << "\n";
  }
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace creepdam
