#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include <creepdam/fem.hpp>
#include <creepdam/geometry.hpp>
#include <creepdam/material.hpp>

using namespace creepdam;

namespace {

MaterialParams elastic_params(Coupling coupling = Coupling::FullyCoupled) {
  MaterialParams p;
  p.E = 1.0;
  p.nu = 0.3;
  p.A = 0.0;
  p.n = 1.0;
  p.B = 0.0;
  p.m = 1.0;
  p.qd = 1.0;
  p.omega_crit = 0.99;
  p.coupling = coupling;
  return p;
}

// Affine displacement a + G x, whose strain is the symmetric part of G.
struct Affine {
  Vec2 a;
  double g11, g12, g21, g22;
  Vec2 operator()(const Vec2& x) const {
    return {a.x + g11 * x.x + g12 * x.y, a.y + g21 * x.x + g22 * x.y};
  }
};

VectorField interpolate(const Mesh& mesh, const Affine& u) {
  VectorField out(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i) out[i] = u(mesh.nodes[i]);
  return out;
}

DirichletBC boundary_values(const Mesh& mesh, const VectorField& u) {
  DirichletBC bc = DirichletBC::none(mesh.node_count());
  for (int i : mesh.boundary_nodes) bc.set(i, u[i]);
  return bc;
}

double max_nodal_error(const VectorField& u, const VectorField& v) {
  double err = 0.0;
  for (size_t i = 0; i < u.size(); ++i)
    err = std::max({err, std::abs(u[i].x - v[i].x), std::abs(u[i].y - v[i].y)});
  return err;
}

}  // namespace

TEST_CASE("element stiffness scales with 1 - omega when fully coupled", "[fem]") {
  const Mesh mesh = structured_rect_mesh(1.0, 1.0, 2, 2);
  const MaterialParams p = elastic_params();
  const auto k0 = element_stiffness(mesh, p, 0.0, 0);
  const auto k5 = element_stiffness(mesh, p, 0.5, 0);
  REQUIRE((k5 - 0.5 * k0).norm() <= 1e-14 * k0.norm());
}

TEST_CASE("patch test: affine fields are reproduced exactly", "[fem]") {
  const double pi = 3.141592653589793;
  const Affine u_exact{{0.01, -0.02}, 0.1, 0.03, -0.04, 0.05};
  for (const Mesh& mesh : {structured_rect_mesh(1.0, 1.0, 4, 4),
                           notched_rect_mesh(1.0, 1.0, 0.25, pi / 3.0, 6, 6)}) {
    const VectorField exact = interpolate(mesh, u_exact);
    for (double om : {0.0, 0.3}) {
      const MaterialParams p = elastic_params();
      const ScalarField omega(mesh.node_count(), om);
      const VoigtField eps_cr(mesh.node_count(), Voigt3{});
      const auto sys = assemble(mesh, p, omega, eps_cr, {}, boundary_values(mesh, exact));
      const VectorField u = solve(sys);
      REQUIRE(max_nodal_error(u, exact) <= 1e-10);

      // Strain equals the symmetric part of the displacement gradient.
      const VoigtField eps = strain(mesh, u);
      for (const auto& v : eps) {
        REQUIRE(v.s11 == Catch::Approx(0.1).margin(1e-10));
        REQUIRE(v.s22 == Catch::Approx(0.05).margin(1e-10));
        REQUIRE(v.s12 == Catch::Approx(0.5 * (0.03 - 0.04)).margin(1e-10));
      }
    }
  }
}

TEST_CASE("strain of canonical displacement fields", "[fem]") {
  const Mesh mesh = structured_rect_mesh(1.0, 1.0, 3, 3);

  // Pure shear u = (y, x): tensorial e12 = 1.
  const VectorField shear = interpolate(mesh, Affine{{0, 0}, 0, 1, 1, 0});
  for (const auto& v : strain(mesh, shear)) {
    REQUIRE(v.s11 == Catch::Approx(0.0).margin(1e-14));
    REQUIRE(v.s22 == Catch::Approx(0.0).margin(1e-14));
    REQUIRE(v.s12 == Catch::Approx(1.0).epsilon(1e-14));
  }

  // Rigid rotation u = (-y, x) and translation produce zero strain.
  for (const VectorField& rigid : {interpolate(mesh, Affine{{0, 0}, 0, -1, 1, 0}),
                                   interpolate(mesh, Affine{{0.4, -0.2}, 0, 0, 0, 0})}) {
    for (const auto& v : strain(mesh, rigid)) {
      REQUIRE(std::abs(v.s11) <= 1e-14);
      REQUIRE(std::abs(v.s22) <= 1e-14);
      REQUIRE(std::abs(v.s12) <= 1e-14);
    }
  }

  // Nodal recovery of a uniform element strain is that strain.
  const VectorField stretch = interpolate(mesh, Affine{{0, 0}, 0.2, 0, 0, -0.1});
  for (const auto& v : nodal_strain(mesh, stretch)) {
    REQUIRE(v.s11 == Catch::Approx(0.2).epsilon(1e-13));
    REQUIRE(v.s22 == Catch::Approx(-0.1).epsilon(1e-13));
    REQUIRE(v.s12 == Catch::Approx(0.0).margin(1e-14));
  }
}

TEST_CASE("nodal recovery area-weights the element values", "[fem]") {
  // Two triangles sharing the edge (1,0)-(0,1): areas 1/2 and 1. Shared nodes
  // get the area-weighted mean (a + 2b)/3, private nodes the element value.
  const Mesh mesh = make_mesh({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {3.0, 0.0}},
                              {{0, 1, 2}, {1, 3, 2}});
  REQUIRE(mesh.element_areas[0] == Catch::Approx(0.5));
  REQUIRE(mesh.element_areas[1] == Catch::Approx(1.0));

  const Voigt3 a{3.0, 0.0, -1.0};
  const Voigt3 b{6.0, 9.0, 2.0};
  const VoigtField nodal = nodal_average(mesh, {a, b});
  REQUIRE(nodal[0].s11 == Catch::Approx(3.0));  // only the small element
  REQUIRE(nodal[0].s12 == Catch::Approx(-1.0));
  REQUIRE(nodal[3].s22 == Catch::Approx(9.0));  // only the large one
  REQUIRE(nodal[1].s11 == Catch::Approx(5.0));  // (0.5*3 + 1*6) / 1.5
  REQUIRE(nodal[1].s22 == Catch::Approx(6.0));
  REQUIRE(nodal[2].s12 == Catch::Approx(1.0));  // (0.5*(-1) + 1*2) / 1.5

  REQUIRE_THROWS_AS(nodal_average(mesh, VoigtField(3)), std::invalid_argument);
}

TEST_CASE("recovered nodal stress reproduces a uniform stress state", "[fem]") {
  const Mesh mesh = structured_rect_mesh(2.0, 1.0, 5, 3);
  const MaterialParams p = elastic_params();
  const VectorField u = interpolate(mesh, Affine{{0.1, -0.3}, 0.002, 0.0005, 0.0005, -0.001});
  const VoigtField cr(mesh.node_count(), Voigt3{1e-4, -2e-4, 5e-5});
  const ScalarField omega(mesh.node_count(), 0.3);

  Rho r;
  r.eps11 = 0.002;
  r.eps22 = -0.001;
  r.eps12 = 0.0005;
  r.cr11 = 1e-4;
  r.cr22 = -2e-4;
  r.cr12 = 5e-5;
  r.omega = 0.3;
  const Voigt3 expect = stress(p, r);

  const VoigtField sig = nodal_stress(mesh, p, u, cr, omega);
  for (int i = 0; i < mesh.node_count(); ++i) {
    REQUIRE(sig[i].s11 == Catch::Approx(expect.s11).epsilon(1e-12));
    REQUIRE(sig[i].s22 == Catch::Approx(expect.s22).epsilon(1e-12));
    REQUIRE(sig[i].s12 == Catch::Approx(expect.s12).epsilon(1e-12));
  }
}

TEST_CASE("assembled matrix is symmetric positive definite", "[fem]") {
  const Mesh mesh = structured_rect_mesh(1.0, 1.0, 5, 5);
  const MaterialParams p = elastic_params();
  ScalarField omega(mesh.node_count());
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dist(0.0, 0.6);
  for (auto& w : omega) w = dist(rng);
  const VoigtField eps_cr(mesh.node_count(), Voigt3{});
  const auto sys =
      assemble(mesh, p, omega, eps_cr, {}, boundary_values(mesh, VectorField(mesh.node_count())));

  const Eigen::MatrixXd K = Eigen::MatrixXd(sys.K);
  REQUIRE((K - K.transpose()).norm() <= 1e-13 * K.norm());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
  REQUIRE(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("uniform damage rescales the solution of a loaded problem", "[fem]") {
  const Mesh mesh = structured_rect_mesh(1.0, 1.0, 6, 6);
  const MaterialParams p = elastic_params();
  const VoigtField eps_cr(mesh.node_count(), Voigt3{});
  const VectorField load(mesh.node_count(), Vec2{0.3, -0.8});
  const DirichletBC bc = boundary_values(mesh, VectorField(mesh.node_count()));

  const VectorField u0 = solve(assemble(mesh, p, ScalarField(mesh.node_count(), 0.0), eps_cr, load, bc));
  const VectorField u5 = solve(assemble(mesh, p, ScalarField(mesh.node_count(), 0.5), eps_cr, load, bc));
  // K scales by (1 - omega), so u scales by 1 / (1 - omega).
  double umax = 0.0;
  for (const auto& v : u0) umax = std::max({umax, std::abs(v.x), std::abs(v.y)});
  REQUIRE(umax > 0.0);
  for (size_t i = 0; i < u0.size(); ++i) {
    REQUIRE(u5[i].x == Catch::Approx(2.0 * u0[i].x).margin(1e-11 * umax));
    REQUIRE(u5[i].y == Catch::Approx(2.0 * u0[i].y).margin(1e-11 * umax));
  }
}

TEST_CASE("creep strain consistent with the displacement leaves it unchanged", "[fem]") {
  // Build a displacement / creep-strain pair with vertex-mean(eps_cr) equal
  // to the element strain on every element: the stress vanishes identically,
  // so that displacement is the unique equilibrium solution. Such pairs are
  // the nullspace of the combined constraint matrix; projecting a random
  // vector onto it yields a consistent, non-uniform pair.
  const Mesh mesh = structured_rect_mesh(1.0, 1.0, 2, 2);
  const int nn = mesh.node_count();
  const int ne = mesh.element_count();
  const int n_unknowns = 2 * nn + 3 * nn;

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3 * ne, n_unknowns);
  for (int e = 0; e < ne; ++e) {
    const auto g = detail::shape_gradients(mesh, e);
    for (int v = 0; v < 3; ++v) {
      const int node = mesh.triangles[e][v];
      A(3 * e + 0, 2 * node + 0) += g[v].x;
      A(3 * e + 1, 2 * node + 1) += g[v].y;
      A(3 * e + 2, 2 * node + 0) += 0.5 * g[v].y;  // tensorial shear
      A(3 * e + 2, 2 * node + 1) += 0.5 * g[v].x;
      for (int c = 0; c < 3; ++c) A(3 * e + c, 2 * nn + 3 * node + c) -= 1.0 / 3.0;
    }
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  int rank = 0;
  while (rank < svd.singularValues().size() &&
         svd.singularValues()(rank) > 1e-10 * svd.singularValues()(0))
    ++rank;
  const Eigen::MatrixXd nullspace = svd.matrixV().rightCols(n_unknowns - rank);

  Eigen::VectorXd x(n_unknowns);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> dist(-0.1, 0.1);
  for (int i = 0; i < n_unknowns; ++i) x(i) = dist(rng);
  const Eigen::VectorXd y = nullspace * (nullspace.transpose() * x);
  REQUIRE((A * y).norm() <= 1e-12);

  VectorField u_hat(nn);
  VoigtField eps_cr(nn);
  for (int i = 0; i < nn; ++i) {
    u_hat[i] = {y(2 * i), y(2 * i + 1)};
    eps_cr[i] = {y(2 * nn + 3 * i), y(2 * nn + 3 * i + 1), y(2 * nn + 3 * i + 2)};
  }

  // The pair must be genuinely non-uniform for the check to mean anything.
  const VoigtField elem_eps = strain(mesh, u_hat);
  double strain_spread = 0.0;
  for (const auto& s : elem_eps)
    strain_spread = std::max(strain_spread, std::abs(s.s11 - elem_eps[0].s11));
  REQUIRE(strain_spread > 1e-6);

  const MaterialParams p = elastic_params();
  const ScalarField omega(nn, 0.2);
  const VectorField u = solve(assemble(mesh, p, omega, eps_cr, {}, boundary_values(mesh, u_hat)));
  REQUIRE(max_nodal_error(u, u_hat) <= 1e-9);

  for (const auto& s : stress_field(mesh, p, u, eps_cr, omega)) {
    REQUIRE(std::abs(s.s11) <= 1e-10);
    REQUIRE(std::abs(s.s22) <= 1e-10);
    REQUIRE(std::abs(s.s12) <= 1e-10);
  }
}

TEST_CASE("manufactured solution converges at second order", "[fem]") {
  // u = (sin(pi x) sin(pi y), 0) with E = 1, nu = 0; the matching body load
  // is f = (1.5 pi^2 sin sin, -0.5 pi^2 cos cos).
  const double pi = 3.141592653589793;
  MaterialParams p = elastic_params();
  p.nu = 0.0;
  std::vector<double> errors;
  for (int n : {8, 16}) {
    const Mesh mesh = structured_rect_mesh(1.0, 1.0, n, n);
    VectorField exact(mesh.node_count());
    VectorField load(mesh.node_count());
    for (int i = 0; i < mesh.node_count(); ++i) {
      const double x = mesh.nodes[i].x, y = mesh.nodes[i].y;
      exact[i] = {std::sin(pi * x) * std::sin(pi * y), 0.0};
      load[i] = {1.5 * pi * pi * std::sin(pi * x) * std::sin(pi * y),
                 -0.5 * pi * pi * std::cos(pi * x) * std::cos(pi * y)};
    }
    const VoigtField eps_cr(mesh.node_count(), Voigt3{});
    const ScalarField omega(mesh.node_count(), 0.0);
    const VectorField u =
        solve(assemble(mesh, p, omega, eps_cr, load, boundary_values(mesh, exact)));
    errors.push_back(max_nodal_error(u, exact));
  }
  const double order = std::log2(errors[0] / errors[1]);
  REQUIRE(order > 1.6);
  REQUIRE(order < 2.4);
}

TEST_CASE("fully prescribed problems skip the solve", "[fem]") {
  const Mesh mesh = structured_rect_mesh(1.0, 1.0, 1, 1);  // every node on the boundary
  const Affine g{{0.0, 0.0}, 0.02, 0.0, 0.0, -0.01};
  const VectorField exact = interpolate(mesh, g);
  const auto sys = assemble(mesh, elastic_params(), ScalarField(4, 0.0), VoigtField(4, Voigt3{}),
                            {}, boundary_values(mesh, exact));
  REQUIRE(sys.n_free == 0);
  const VectorField u = solve(sys);
  for (int i = 0; i < 4; ++i) {
    REQUIRE(u[i].x == exact[i].x);
    REQUIRE(u[i].y == exact[i].y);
  }
}

TEST_CASE("assembly rejects inconsistent input", "[fem]") {
  const Mesh mesh = structured_rect_mesh(1.0, 1.0, 2, 2);
  const int nn = mesh.node_count();
  const MaterialParams p = elastic_params();
  const VoigtField eps_cr(nn, Voigt3{});
  const DirichletBC bc = boundary_values(mesh, VectorField(nn));

  REQUIRE_THROWS_AS(assemble(mesh, p, ScalarField(nn - 1, 0.0), eps_cr, {}, bc),
                    std::invalid_argument);

  ScalarField omega(nn, 0.0);
  omega[4] = 1.5;
  REQUIRE_THROWS_WITH(assemble(mesh, p, omega, eps_cr, {}, bc),
                      Catch::Matchers::ContainsSubstring("node 4"));

  DirichletBC partial = DirichletBC::none(nn);
  partial.set(mesh.boundary_nodes[0], Vec2{0, 0});
  REQUIRE_THROWS_WITH(assemble(mesh, p, ScalarField(nn, 0.0), eps_cr, {}, partial),
                      Catch::Matchers::ContainsSubstring("boundary node"));
}

TEST_CASE("solver failure reports the damage range", "[fem]") {
  // Partly coupled material past omega_crit: every element stiffness is zero,
  // but a body load keeps the right-hand side nonzero.
  const Mesh mesh = structured_rect_mesh(1.0, 1.0, 2, 2);
  const int nn = mesh.node_count();
  MaterialParams p = elastic_params(Coupling::PartlyCoupled);
  const ScalarField omega(nn, 0.995);
  const VoigtField eps_cr(nn, Voigt3{});
  const VectorField load(nn, Vec2{1.0, 0.0});
  const auto sys =
      assemble(mesh, p, omega, eps_cr, load, boundary_values(mesh, VectorField(nn)));
  REQUIRE_THROWS_AS(solve(sys), SolverError);
  REQUIRE_THROWS_WITH(solve(sys), Catch::Matchers::ContainsSubstring("omega"));
}
