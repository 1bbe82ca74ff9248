// creepdam — plane-stress creep-damage simulator.
//
//   creepdam run <config|builtin> -o <dir>
//   creepdam sweep <config|builtin> --param h --values 0.2,0.1,0.05 -o <dir>
//   creepdam mesh <rect|notched> [dims] -o mesh.txt
//
// Built-in scenarios: uniaxial, band, notch, smooth.

#include <string>
#include <vector>

#include <CLI11.hpp>

#include <creepdam/app.hpp>

int main(int argc, char** argv) {
  CLI::App app{"plane-stress creep-damage simulator"};
  app.require_subcommand(1);

  std::string run_spec, run_out = "out";
  CLI::App* run = app.add_subcommand("run", "run one scenario");
  run->add_option("config", run_spec, "config file or built-in scenario name")->required();
  run->add_option("-o,--output", run_out, "output directory");

  std::string sweep_spec, sweep_param, sweep_out = "out";
  std::vector<double> sweep_values;
  CLI::App* sw = app.add_subcommand("sweep", "sweep one scenario parameter");
  sw->add_option("config", sweep_spec, "config file or built-in scenario name")->required();
  sw->add_option("--param", sweep_param, "parameter to sweep (h or mesh_size)")->required();
  sw->add_option("--values", sweep_values, "comma-separated parameter values")
      ->required()
      ->delimiter(',');
  sw->add_option("-o,--output", sweep_out, "output directory");

  creepdam::MeshRequest mesh_req;
  std::string mesh_out = "mesh.txt";
  CLI::App* mesh = app.add_subcommand("mesh", "generate a mesh file");
  mesh->add_option("type", mesh_req.type, "rect or notched")->required();
  mesh->add_option("--width", mesh_req.width, "domain width");
  mesh->add_option("--height", mesh_req.height, "domain height");
  mesh->add_option("--nx", mesh_req.nx, "cells along x");
  mesh->add_option("--ny", mesh_req.ny, "cells along y");
  mesh->add_option("--depth", mesh_req.notch_depth, "notch depth (notched only)");
  mesh->add_option("--angle-deg", mesh_req.notch_tip_angle_deg, "notch opening angle in degrees");
  mesh->add_option("-o,--output", mesh_out, "output mesh file");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return creepdam::run_scenario(run_spec, run_out);
  if (sw->parsed()) return creepdam::sweep(sweep_spec, sweep_param, sweep_values, sweep_out);
  if (mesh->parsed()) return creepdam::generate_mesh(mesh_req, mesh_out);
  return 2;
}
