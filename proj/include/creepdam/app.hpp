#pragma once

// Command implementations behind the CLI: run one scenario into an output
// directory, sweep a scenario parameter, generate meshes. Kept callable from
// tests so exit codes and produced files can be asserted directly.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "output.hpp"
#include "scenario.hpp"

namespace creepdam {

namespace detail {

inline std::string snapshot_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "field_%04d.vtk", index);
  return buf;
}

inline int thread_count_from_env(size_t rows) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("CREEPDAM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) hw = static_cast<unsigned>(v);
  }
  return static_cast<int>(std::min<size_t>(hw, rows));
}

}  // namespace detail

// Runs a scenario (built-in name or config path) and writes timeseries.csv,
// numbered field_XXXX.vtk snapshots and summary.txt into outdir. Returns 0
// when the run ends by reaching t_end or by rupture, nonzero on bad input or
// solver failure. Nothing is written until the scenario builds cleanly.
inline int run_scenario(const std::string& spec, const std::string& outdir,
                        std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  Scenario sc;
  try {
    sc = load_scenario(spec);
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return 2;
  }

  try {
    std::filesystem::create_directories(outdir);
    const auto out_path = [&](const std::string& name) {
      return (std::filesystem::path(outdir) / name).string();
    };

    int snapshot_index = 0;
    int accepted_steps = 0;
    const Mesh& mesh = sc.run.mesh;
    auto on_step = [&](const State& state, const StepReport&) {
      const bool due =
          accepted_steps == 0 ||
          (sc.snapshot_every > 0 && accepted_steps % sc.snapshot_every == 0);
      if (due) write_vtk(out_path(detail::snapshot_name(snapshot_index++)), mesh, sc.run.params,
                         state);
      ++accepted_steps;
    };

    const RunResult res = run_case(sc.run, on_step);
    write_vtk(out_path(detail::snapshot_name(snapshot_index++)), mesh, sc.run.params,
              res.final_state);
    write_timeseries_csv(out_path("timeseries.csv"), res);
    write_summary(out_path("summary.txt"), sc.name, res);

    for (const auto& w : res.warnings) log << "warning: " << w << "\n";
    log << "termination: " << to_string(res.termination) << " at t = " << res.steps.back().t
        << "\n";
    if (res.termination == Termination::Rupture) log << "t_star: " << res.t_star << "\n";
    const bool ok =
        res.termination == Termination::ReachedT || res.termination == Termination::Rupture;
    return ok ? 0 : 1;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return 1;
  }
}

// Parameter sweep (param = h or mesh_size): one run per value, results in
// sweep.csv. Rows run concurrently up to CREEPDAM_THREADS workers; row
// failures are recorded in the table and do not abort the sweep.
inline int sweep(const std::string& spec, const std::string& param,
                 const std::vector<double>& values, const std::string& outdir,
                 std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  if (values.empty()) {
    err << "error: sweep needs at least one value\n";
    return 2;
  }
  Config base;
  std::function<RunCase(double)> make_case;
  try {
    base = scenario_config(spec);
    make_case = [base, param](double value) {
      return scenario_from_config(apply_sweep_parameter(base, param, value)).run;
    };
    make_case(values.front());  // validate the schema before touching outdir
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return 2;
  }

  try {
    std::filesystem::create_directories(outdir);
    const int threads = detail::thread_count_from_env(values.size());
    const std::vector<SweepRow> rows = lifetime_sweep(make_case, values, threads);
    write_sweep_csv((std::filesystem::path(outdir) / "sweep.csv").string(), rows);
    for (const auto& r : rows) {
      log << param << " = " << r.parameter << ": ";
      if (r.ok)
        log << to_string(r.termination) << ", t_star = " << r.t_star << "\n";
      else
        log << "failed: " << r.error << "\n";
    }
    return 0;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return 1;
  }
}

struct MeshRequest {
  std::string type = "rect";  // rect | notched
  double width = 1.0;
  double height = 1.0;
  int nx = 8;
  int ny = 8;
  double notch_depth = 0.0;
  double notch_tip_angle_deg = 60.0;
};

inline int generate_mesh(const MeshRequest& req, const std::string& out_path,
                         std::ostream& err = std::cerr) {
  try {
    Mesh mesh;
    if (req.type == "rect") {
      mesh = structured_rect_mesh(req.width, req.height, req.nx, req.ny);
    } else if (req.type == "notched") {
      mesh = notched_rect_mesh(req.width, req.height, req.notch_depth,
                               req.notch_tip_angle_deg * 3.141592653589793 / 180.0, req.nx,
                               req.ny);
    } else {
      err << "error: mesh type must be rect or notched, got '" << req.type << "'\n";
      return 2;
    }
    write_mesh(mesh, out_path);
    return 0;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return 1;
  }
}

}  // namespace creepdam
