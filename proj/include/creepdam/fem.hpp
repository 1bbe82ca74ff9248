#pragma once

// P1 plane-stress FEM layer: assembly of the damaged-elasticity operator
// with the creep strain entering as an internal force, Dirichlet handling by
// row/column elimination, and a direct sparse SPD solve.
//
// Internal variables (omega, eps_cr) live at nodes; each element sees their
// vertex average (one-point quadrature of the P1 interpolant).

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "geometry.hpp"
#include "material.hpp"
#include "spaces.hpp"

namespace creepdam {

using VectorField = std::vector<Vec2>;
using VoigtField = std::vector<Voigt3>;

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Prescribed displacements, one optional value per node. Assembly requires
// every boundary node to be covered (pure Dirichlet problem).
struct DirichletBC {
  std::vector<std::optional<Vec2>> value;

  static DirichletBC none(int node_count) {
    DirichletBC bc;
    bc.value.assign(node_count, std::nullopt);
    return bc;
  }
  void set(int node, const Vec2& u) { value[node] = u; }
};

// Reduced (free-dof) system plus the data needed to scatter a solution back
// to the full mesh.
struct LinearSystem {
  int n_nodes = 0;
  int n_free = 0;
  Eigen::SparseMatrix<double> K;   // n_free x n_free, symmetric positive definite
  Eigen::VectorXd rhs;             // n_free
  std::vector<int> free_of_dof;    // 2*n_nodes -> free index, or -1 if prescribed
  std::vector<double> prescribed;  // 2*n_nodes, meaningful where free_of_dof < 0
  double omega_min = 0.0, omega_max = 0.0;  // diagnostics for solver errors
};

namespace detail {

// Gradients of the three P1 shape functions on element e.
inline std::array<Vec2, 3> shape_gradients(const Mesh& mesh, int e) {
  const auto& t = mesh.triangles[e];
  const Vec2& a = mesh.nodes[t[0]];
  const Vec2& b = mesh.nodes[t[1]];
  const Vec2& c = mesh.nodes[t[2]];
  const double inv2A = 1.0 / (2.0 * mesh.element_areas[e]);
  return {Vec2{(b.y - c.y) * inv2A, (c.x - b.x) * inv2A},
          Vec2{(c.y - a.y) * inv2A, (a.x - c.x) * inv2A},
          Vec2{(a.y - b.y) * inv2A, (b.x - a.x) * inv2A}};
}

// Strain-displacement matrix in engineering Voigt form (rows e11, e22, 2e12).
inline Eigen::Matrix<double, 3, 6> b_matrix(const std::array<Vec2, 3>& grad) {
  Eigen::Matrix<double, 3, 6> B = Eigen::Matrix<double, 3, 6>::Zero();
  for (int v = 0; v < 3; ++v) {
    B(0, 2 * v) = grad[v].x;
    B(1, 2 * v + 1) = grad[v].y;
    B(2, 2 * v) = grad[v].y;
    B(2, 2 * v + 1) = grad[v].x;
  }
  return B;
}

inline double element_mean(const ScalarField& f, const std::array<int, 3>& t) {
  return (f[t[0]] + f[t[1]] + f[t[2]]) / 3.0;
}

inline Voigt3 element_mean(const VoigtField& f, const std::array<int, 3>& t) {
  return (f[t[0]] + f[t[1]] + f[t[2]]) * (1.0 / 3.0);
}

}  // namespace detail

// Element stiffness area * B^T D(omega_bar) B for the vertex-averaged damage.
inline Eigen::Matrix<double, 6, 6> element_stiffness(const Mesh& mesh, const MaterialParams& p,
                                                     double omega_bar, int e) {
  const Eigen::Matrix<double, 3, 6> B = detail::b_matrix(detail::shape_gradients(mesh, e));
  return mesh.element_areas[e] * B.transpose() * stiffness_matrix(p, omega_bar) * B;
}

// Assembles K u = f with f collecting the body load (lumped at vertices) and
// the creep internal force, then eliminates the prescribed dofs.
inline LinearSystem assemble(const Mesh& mesh, const MaterialParams& params,
                             const ScalarField& omega, const VoigtField& eps_cr,
                             const VectorField& body_load, const DirichletBC& bc) {
  const int n = mesh.node_count();
  if (static_cast<int>(omega.size()) != n || static_cast<int>(eps_cr.size()) != n ||
      static_cast<int>(bc.value.size()) != n)
    throw std::invalid_argument("assemble: field sizes do not match the mesh");
  if (!body_load.empty() && static_cast<int>(body_load.size()) != n)
    throw std::invalid_argument("assemble: body load size does not match the mesh");

  LinearSystem sys;
  sys.n_nodes = n;
  sys.omega_min = sys.omega_max = omega.empty() ? 0.0 : omega[0];
  for (int i = 0; i < n; ++i) {
    if (!(omega[i] >= 0.0 && omega[i] <= 1.0))
      throw std::domain_error("assemble: damage outside [0, 1] at node " + std::to_string(i));
    sys.omega_min = std::min(sys.omega_min, omega[i]);
    sys.omega_max = std::max(sys.omega_max, omega[i]);
  }
  for (int i : mesh.boundary_nodes)
    if (!bc.value[i])
      throw std::invalid_argument("assemble: boundary node " + std::to_string(i) +
                                  " has no prescribed displacement (pure Dirichlet problem)");

  // Dof numbering: (2 i, 2 i + 1) for node i; prescribed dofs drop out.
  sys.free_of_dof.assign(2 * n, -1);
  sys.prescribed.assign(2 * n, 0.0);
  int n_free = 0;
  for (int i = 0; i < n; ++i) {
    if (bc.value[i]) {
      sys.prescribed[2 * i] = bc.value[i]->x;
      sys.prescribed[2 * i + 1] = bc.value[i]->y;
    } else {
      sys.free_of_dof[2 * i] = n_free++;
      sys.free_of_dof[2 * i + 1] = n_free++;
    }
  }
  sys.n_free = n_free;
  sys.rhs = Eigen::VectorXd::Zero(n_free);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(36) * mesh.element_count());
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto& t = mesh.triangles[e];
    const double om = detail::element_mean(omega, t);
    const Voigt3 cr = detail::element_mean(eps_cr, t);
    const Eigen::Matrix<double, 3, 6> B = detail::b_matrix(detail::shape_gradients(mesh, e));
    const Eigen::Matrix3d D = stiffness_matrix(params, om);
    const Eigen::Matrix<double, 6, 6> Ke =
        mesh.element_areas[e] * B.transpose() * D * B;
    // Creep strain enters as an internal force, engineering shear inside.
    const Eigen::Vector3d cr_eng(cr.s11, cr.s22, 2.0 * cr.s12);
    const Eigen::Matrix<double, 6, 1> fe_cr =
        mesh.element_areas[e] * B.transpose() * (D * cr_eng);

    int dof[6];
    for (int v = 0; v < 3; ++v) {
      dof[2 * v] = 2 * t[v];
      dof[2 * v + 1] = 2 * t[v] + 1;
    }
    for (int r = 0; r < 6; ++r) {
      const int fr = sys.free_of_dof[dof[r]];
      if (fr < 0) continue;
      double rhs_r = fe_cr(r);
      if (!body_load.empty() && r % 2 == 0) {
        // Vertex-lumped body load: area/3 of the nodal value per vertex.
        const int node = t[r / 2];
        rhs_r += mesh.element_areas[e] / 3.0 * body_load[node].x;
      }
      if (!body_load.empty() && r % 2 == 1) {
        const int node = t[r / 2];
        rhs_r += mesh.element_areas[e] / 3.0 * body_load[node].y;
      }
      sys.rhs(fr) += rhs_r;
      for (int c = 0; c < 6; ++c) {
        const int fc = sys.free_of_dof[dof[c]];
        if (fc >= 0)
          trip.emplace_back(fr, fc, Ke(r, c));
        else
          sys.rhs(fr) -= Ke(r, c) * sys.prescribed[dof[c]];
      }
    }
  }
  sys.K.resize(n_free, n_free);
  sys.K.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

// Direct sparse Cholesky (LDLT) solve with a relative-residual contract of
// 1e-10; one iterative refinement pass before giving up.
inline VectorField solve(const LinearSystem& sys) {
  Eigen::VectorXd u_free;
  if (sys.n_free == 0) {
    u_free.resize(0);
  } else if (sys.rhs.norm() == 0.0) {
    u_free = Eigen::VectorXd::Zero(sys.n_free);
  } else {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    ldlt.compute(sys.K);
    const auto diag = [&] {
      return " (omega range [" + std::to_string(sys.omega_min) + ", " +
             std::to_string(sys.omega_max) + "])";
    };
    if (ldlt.info() != Eigen::Success)
      throw SolverError("solve: sparse factorization failed" + diag());
    u_free = ldlt.solve(sys.rhs);
    double resid = (sys.K * u_free - sys.rhs).norm() / sys.rhs.norm();
    if (!(resid <= 1e-10)) {
      u_free += ldlt.solve(sys.rhs - sys.K * u_free);
      resid = (sys.K * u_free - sys.rhs).norm() / sys.rhs.norm();
      if (!(resid <= 1e-10))
        throw SolverError("solve: relative residual " + std::to_string(resid) +
                          " exceeds 1e-10" + diag());
    }
  }

  VectorField u(sys.n_nodes);
  for (int i = 0; i < sys.n_nodes; ++i) {
    const int fx = sys.free_of_dof[2 * i];
    const int fy = sys.free_of_dof[2 * i + 1];
    u[i].x = fx >= 0 ? u_free(fx) : sys.prescribed[2 * i];
    u[i].y = fy >= 0 ? u_free(fy) : sys.prescribed[2 * i + 1];
  }
  return u;
}

// Element-constant total strain of a P1 displacement field (tensorial shear).
inline VoigtField strain(const Mesh& mesh, const VectorField& u) {
  if (static_cast<int>(u.size()) != mesh.node_count())
    throw std::invalid_argument("strain: displacement size does not match the mesh");
  VoigtField eps(mesh.element_count());
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto& t = mesh.triangles[e];
    const auto g = detail::shape_gradients(mesh, e);
    double e11 = 0.0, e22 = 0.0, e12 = 0.0;
    for (int v = 0; v < 3; ++v) {
      e11 += g[v].x * u[t[v]].x;
      e22 += g[v].y * u[t[v]].y;
      e12 += 0.5 * (g[v].y * u[t[v]].x + g[v].x * u[t[v]].y);
    }
    eps[e] = {e11, e22, e12};
  }
  return eps;
}

// Area-weighted recovery of an element-constant Voigt field to nodes.
inline VoigtField nodal_average(const Mesh& mesh, const VoigtField& elem) {
  if (static_cast<int>(elem.size()) != mesh.element_count())
    throw std::invalid_argument("nodal_average: field size does not match the mesh");
  VoigtField nodal(mesh.node_count());
  std::vector<double> weight(mesh.node_count(), 0.0);
  for (int e = 0; e < mesh.element_count(); ++e) {
    for (int v : mesh.triangles[e]) {
      nodal[v] += mesh.element_areas[e] * elem[e];
      weight[v] += mesh.element_areas[e];
    }
  }
  for (int i = 0; i < mesh.node_count(); ++i) nodal[i] = nodal[i] * (1.0 / weight[i]);
  return nodal;
}

inline VoigtField nodal_strain(const Mesh& mesh, const VectorField& u) {
  return nodal_average(mesh, strain(mesh, u));
}

// Element-constant stress consistent with the assembly (vertex-averaged
// internal variables, one-point quadrature).
inline VoigtField stress_field(const Mesh& mesh, const MaterialParams& params,
                               const VectorField& u, const VoigtField& eps_cr,
                               const ScalarField& omega) {
  const VoigtField eps = strain(mesh, u);
  VoigtField sig(mesh.element_count());
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto& t = mesh.triangles[e];
    const Voigt3 cr = detail::element_mean(eps_cr, t);
    Rho r;
    r.eps11 = eps[e].s11;
    r.eps22 = eps[e].s22;
    r.eps12 = eps[e].s12;
    r.cr11 = cr.s11;
    r.cr22 = cr.s22;
    r.cr12 = cr.s12;
    r.omega = detail::element_mean(omega, t);
    sig[e] = stress(params, r);
  }
  return sig;
}

// Equilibrated stress recovered to nodes. This is the stress that drives the
// nodal evolution laws and the point-data output: a node inside a weak
// feature is loaded by what its neighborhood actually carries, rather than by
// a pointwise constitutive evaluation of its own (softer) state.
inline VoigtField nodal_stress(const Mesh& mesh, const MaterialParams& params,
                               const VectorField& u, const VoigtField& eps_cr,
                               const ScalarField& omega) {
  return nodal_average(mesh, stress_field(mesh, params, u, eps_cr, omega));
}

inline double max_von_mises(const VoigtField& sig) {
  double vm = 0.0;
  for (const auto& s : sig) vm = std::max(vm, von_mises(s));
  return vm;
}

}  // namespace creepdam
