#pragma once

// Sobolev-type diagnostics on P1 fields: L^p and W^{1,p} norms, the
// admissible-damage membership test, and the localization measure
// lambda = |grad omega|_Lp / min(1 - omega) that blows up as damage
// concentrates.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace creepdam {

using ScalarField = std::vector<double>;

struct NormConfig {
  double p = 4.0;       // integrability exponent, > 2 for the embedding into C^0
  double beta1 = 0.05;  // pointwise margin: admissible damage stays <= 1 - beta1
  double beta2 = 100.0; // W^{1,p} budget

  void validate() const {
    if (!(p > 2.0)) throw std::invalid_argument("NormConfig: p must be > 2");
    if (!(beta1 > 0.0 && beta1 < 1.0))
      throw std::invalid_argument("NormConfig: beta1 must lie in (0, 1)");
    if (!(beta2 > 0.0)) throw std::invalid_argument("NormConfig: beta2 must be > 0");
  }
};

// Constant gradient of the P1 interpolant on one element.
inline Vec2 element_gradient(const Mesh& mesh, const ScalarField& f, int e) {
  const auto& t = mesh.triangles[e];
  const Vec2& a = mesh.nodes[t[0]];
  const Vec2& b = mesh.nodes[t[1]];
  const Vec2& c = mesh.nodes[t[2]];
  const double inv2A = 1.0 / (2.0 * mesh.element_areas[e]);
  // grad phi_i = perp(opposite edge) / (2 area), counterclockwise vertices.
  const Vec2 g0{(b.y - c.y) * inv2A, (c.x - b.x) * inv2A};
  const Vec2 g1{(c.y - a.y) * inv2A, (a.x - c.x) * inv2A};
  const Vec2 g2{(a.y - b.y) * inv2A, (b.x - a.x) * inv2A};
  return f[t[0]] * g0 + f[t[1]] * g1 + f[t[2]] * g2;
}

namespace detail {

inline bool is_even_integer(double p) {
  const double r = std::round(p);
  return std::abs(p - r) < 1e-12 && r >= 2.0 && std::fmod(r, 2.0) == 0.0;
}

// Exact integral of f^p over a triangle for P1 f and even integer p, from
// the simplex moment formula: int_T f^p = 2 area / ((p+1)(p+2)) * h_p, where
// h_p is the complete homogeneous symmetric polynomial in the vertex values.
inline double tri_pow_integral_even(double f1, double f2, double f3, int p, double area) {
  double h = 0.0;
  for (int a = 0; a <= p; ++a) {
    const double fa = std::pow(f1, a);
    for (int b = 0; b <= p - a; ++b)
      h += fa * std::pow(f2, b) * std::pow(f3, p - a - b);
  }
  return 2.0 * area / ((p + 1.0) * (p + 2.0)) * h;
}

inline void check_field_size(const Mesh& mesh, const ScalarField& f, const char* who) {
  if (static_cast<int>(f.size()) != mesh.node_count())
    throw std::invalid_argument(std::string(who) + ": field size does not match the mesh");
}

}  // namespace detail

// int_Omega |f|^p of the P1 interpolant. Exact for even integer p; vertex
// quadrature otherwise (approximation documented in the README).
inline double lp_norm_pow(const Mesh& mesh, const ScalarField& f, double p) {
  detail::check_field_size(mesh, f, "lp_norm");
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  double acc = 0.0;
  if (detail::is_even_integer(p)) {
    const int ip = static_cast<int>(std::lround(p));
    for (int e = 0; e < mesh.element_count(); ++e) {
      const auto& t = mesh.triangles[e];
      acc += detail::tri_pow_integral_even(f[t[0]], f[t[1]], f[t[2]], ip, mesh.element_areas[e]);
    }
  } else {
    for (int e = 0; e < mesh.element_count(); ++e) {
      const auto& t = mesh.triangles[e];
      const double s = std::pow(std::abs(f[t[0]]), p) + std::pow(std::abs(f[t[1]]), p) +
                       std::pow(std::abs(f[t[2]]), p);
      acc += mesh.element_areas[e] / 3.0 * s;
    }
  }
  return acc;
}

inline double lp_norm(const Mesh& mesh, const ScalarField& f, double p) {
  return std::pow(lp_norm_pow(mesh, f, p), 1.0 / p);
}

// int_Omega |grad f|^p; exact for any p since the gradient is element-wise
// constant.
inline double grad_lp_norm_pow(const Mesh& mesh, const ScalarField& f, double p) {
  detail::check_field_size(mesh, f, "grad_lp_norm");
  if (!(p >= 1.0)) throw std::invalid_argument("grad_lp_norm: p must be >= 1");
  double acc = 0.0;
  for (int e = 0; e < mesh.element_count(); ++e) {
    const Vec2 g = element_gradient(mesh, f, e);
    acc += mesh.element_areas[e] * std::pow(g.squared_norm(), p / 2.0);
  }
  return acc;
}

inline double grad_lp_norm(const Mesh& mesh, const ScalarField& f, double p) {
  return std::pow(grad_lp_norm_pow(mesh, f, p), 1.0 / p);
}

inline double w1p_norm(const Mesh& mesh, const ScalarField& f, double p) {
  return std::pow(lp_norm_pow(mesh, f, p) + grad_lp_norm_pow(mesh, f, p), 1.0 / p);
}

// Membership in the admissible damage set: 0 <= omega <= 1 - beta1 at every
// node and |omega|_W1p <= beta2.
struct Membership {
  bool inside = true;
  std::string reason;     // empty when inside
  double offending_value = 0.0;
};

inline Membership membership_Y(const Mesh& mesh, const ScalarField& omega,
                               const NormConfig& cfg) {
  cfg.validate();
  detail::check_field_size(mesh, omega, "membership_Y");
  for (int i = 0; i < mesh.node_count(); ++i) {
    if (!(omega[i] >= 0.0))
      return {false, "pointwise bound: omega < 0 at node " + std::to_string(i), omega[i]};
    if (omega[i] > 1.0 - cfg.beta1)
      return {false, "pointwise bound: omega > 1 - beta1 at node " + std::to_string(i), omega[i]};
  }
  const double norm = w1p_norm(mesh, omega, cfg.p);
  if (norm > cfg.beta2) return {false, "norm bound: |omega|_W1p exceeds beta2", norm};
  return {};
}

// Localization measure; flagged non-finite once min(1 - omega) falls under a
// hard floor (rupture has effectively happened).
struct Localization {
  double value = 0.0;
  bool finite = true;
};

inline constexpr double kLocalizationFloor = 1e-12;

inline Localization localization_measure(const Mesh& mesh, const ScalarField& omega, double p) {
  detail::check_field_size(mesh, omega, "localization_measure");
  double min_margin = std::numeric_limits<double>::infinity();
  for (double w : omega) min_margin = std::min(min_margin, 1.0 - w);
  if (min_margin < kLocalizationFloor)
    return {std::numeric_limits<double>::infinity(), false};
  return {grad_lp_norm(mesh, omega, p) / min_margin, true};
}

// Running supremum of a sampled history.
inline double sup_over_time(const std::vector<double>& samples) {
  if (samples.empty()) throw std::invalid_argument("sup_over_time: empty history");
  double s = samples[0];
  for (double v : samples) s = std::max(s, v);
  return s;
}

// Max nodal magnitude together with its ratio to the W^{1,p} norm; the
// running max of the ratio over a simulation samples the embedding constant
// of W^{1,p} into C^0.
struct SupNormReport {
  double sup = 0.0;
  double ratio_to_w1p = 0.0;
};

inline SupNormReport sup_norm_check(const Mesh& mesh, const ScalarField& f, double p) {
  detail::check_field_size(mesh, f, "sup_norm_check");
  double sup = 0.0;
  for (double v : f) sup = std::max(sup, std::abs(v));
  if (sup == 0.0) return {0.0, 0.0};
  return {sup, sup / w1p_norm(mesh, f, p)};
}

}  // namespace creepdam
