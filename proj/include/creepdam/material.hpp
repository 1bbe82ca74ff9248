#pragma once

// Plane-stress Kachanov-Rabotnov material point: damaged elasticity,
// Norton-type creep flow and scalar damage growth, plus the closed-form
// uniaxial damage solution used as a cross-check oracle.

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace creepdam {

// Thrown when a rate evaluation is requested too close to full damage,
// where the (1 - omega)^-k factors blow up.
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Rates are undefined once 1 - omega drops below this floor.
inline constexpr double kOneMinusOmegaFloor = 1e-9;

// FullyCoupled: stiffness degrades continuously with damage, (1 - omega) C.
// PartlyCoupled: stiffness is the virgin C until omega reaches omega_crit,
// then drops to zero (element death).
enum class Coupling { FullyCoupled, PartlyCoupled };

struct MaterialParams {
  double E = 1.0;    // Young's modulus, > 0
  double nu = 0.3;   // Poisson ratio, in [0, 0.5)
  double A = 0.0;    // creep rate coefficient, >= 0
  double n = 1.0;    // creep stress exponent, >= 1
  double B = 0.0;    // damage rate coefficient, >= 0
  double m = 1.0;    // damage stress exponent, >= 1
  double qd = 0.0;   // damage acceleration exponent, >= 0
  double omega_crit = 0.99;  // critical damage level, in (0, 1)
  Coupling coupling = Coupling::FullyCoupled;

  void validate() const {
    if (!(E > 0.0)) throw std::invalid_argument("MaterialParams: E must be > 0");
    if (!(nu >= 0.0 && nu < 0.5))
      throw std::invalid_argument("MaterialParams: nu must lie in [0, 0.5)");
    if (!(A >= 0.0)) throw std::invalid_argument("MaterialParams: A must be >= 0");
    if (!(n >= 1.0)) throw std::invalid_argument("MaterialParams: n must be >= 1");
    if (!(B >= 0.0)) throw std::invalid_argument("MaterialParams: B must be >= 0");
    if (!(m >= 1.0)) throw std::invalid_argument("MaterialParams: m must be >= 1");
    if (!(qd >= 0.0)) throw std::invalid_argument("MaterialParams: qd must be >= 0");
    if (!(omega_crit > 0.0 && omega_crit < 1.0))
      throw std::invalid_argument("MaterialParams: omega_crit must lie in (0, 1)");
  }
};

// Symmetric in-plane tensor in Voigt order (11, 22, 12). Strain-like fields
// store the tensorial shear component; the factor 2 enters only inside the
// stiffness product.
struct Voigt3 {
  double s11 = 0.0;
  double s22 = 0.0;
  double s12 = 0.0;

  Voigt3 operator+(const Voigt3& o) const { return {s11 + o.s11, s22 + o.s22, s12 + o.s12}; }
  Voigt3 operator-(const Voigt3& o) const { return {s11 - o.s11, s22 - o.s22, s12 - o.s12}; }
  Voigt3 operator*(double a) const { return {a * s11, a * s22, a * s12}; }
  Voigt3& operator+=(const Voigt3& o) {
    s11 += o.s11;
    s22 += o.s22;
    s12 += o.s12;
    return *this;
  }
};

inline Voigt3 operator*(double a, const Voigt3& v) { return v * a; }

// Local state vector feeding the constitutive update: total strain eps(u),
// creep strain and damage at one point.
struct Rho {
  double eps11 = 0.0, eps22 = 0.0, eps12 = 0.0;  // total strain (tensorial shear)
  double cr11 = 0.0, cr22 = 0.0, cr12 = 0.0;     // creep strain (tensorial shear)
  double omega = 0.0;                            // damage, in [0, 1)
};

// Plane-stress stiffness degraded by damage according to the coupling mode.
inline Eigen::Matrix3d stiffness_matrix(const MaterialParams& p, double omega) {
  if (!(omega >= 0.0 && omega <= 1.0))
    throw std::domain_error("stiffness_matrix: omega outside [0, 1]");
  if (!(p.nu >= 0.0 && p.nu < 0.5))
    throw std::domain_error("stiffness_matrix: nu outside [0, 0.5)");
  double scale = 1.0;
  if (p.coupling == Coupling::FullyCoupled) {
    scale = 1.0 - omega;
  } else {
    scale = (omega < p.omega_crit) ? 1.0 : 0.0;
  }
  const double c = scale * p.E / (1.0 - p.nu * p.nu);
  Eigen::Matrix3d D;
  D << c, c * p.nu, 0.0,
      c * p.nu, c, 0.0,
      0.0, 0.0, c * (1.0 - p.nu) / 2.0;
  return D;
}

// sigma = D(omega) * (eps - eps_cr), with the shear difference doubled to
// engineering form before the product.
inline Voigt3 stress(const MaterialParams& p, const Rho& r) {
  const Eigen::Matrix3d D = stiffness_matrix(p, r.omega);
  const Eigen::Vector3d e(r.eps11 - r.cr11, r.eps22 - r.cr22, 2.0 * (r.eps12 - r.cr12));
  const Eigen::Vector3d s = D * e;
  return {s(0), s(1), s(2)};
}

// Deviator of a plane-stress state; the out-of-plane component s33 is
// nonzero even though sigma33 = 0.
struct PlaneDeviator {
  double s11 = 0.0, s22 = 0.0, s12 = 0.0, s33 = 0.0;
};

inline PlaneDeviator deviator(const Voigt3& sig) {
  const double tr3 = (sig.s11 + sig.s22) / 3.0;
  return {sig.s11 - tr3, sig.s22 - tr3, sig.s12, -tr3};
}

inline double von_mises(const Voigt3& sig) {
  const double v =
      sig.s11 * sig.s11 + sig.s22 * sig.s22 - sig.s11 * sig.s22 + 3.0 * sig.s12 * sig.s12;
  return std::sqrt(std::max(v, 0.0));
}

namespace detail {
inline void check_damage_domain(double omega, const char* who) {
  if (!(omega >= 0.0) || 1.0 - omega < kOneMinusOmegaFloor)
    throw SingularityError(std::string(who) + ": damage " + std::to_string(omega) +
                           " outside the admissible range");
}
}  // namespace detail

// Norton flow: d(eps_cr)/dt = 3/2 A s vm^(n-1) (1 - omega)^-n, in-plane part,
// evaluated at a given stress state.
inline Voigt3 creep_rate(const MaterialParams& p, const Voigt3& sig, double omega) {
  detail::check_damage_domain(omega, "creep_rate");
  if (p.A == 0.0) return {};
  const double vm = von_mises(sig);
  if (vm == 0.0) return {};
  const PlaneDeviator s = deviator(sig);
  const double f = 1.5 * p.A * std::pow(vm, p.n - 1.0) * std::pow(1.0 - omega, -p.n);
  return {f * s.s11, f * s.s22, f * s.s12};
}

inline Voigt3 creep_rate(const MaterialParams& p, const Rho& r) {
  detail::check_damage_domain(r.omega, "creep_rate");
  if (p.A == 0.0) return {};
  return creep_rate(p, stress(p, r), r.omega);
}

// Damage growth: d(omega)/dt = B vm^m (1 - omega)^-qd, always >= 0, evaluated
// at a given stress state.
inline double damage_rate(const MaterialParams& p, const Voigt3& sig, double omega) {
  detail::check_damage_domain(omega, "damage_rate");
  if (p.B == 0.0) return 0.0;
  const double vm = von_mises(sig);
  if (vm == 0.0) return 0.0;
  return p.B * std::pow(vm, p.m) * std::pow(1.0 - omega, -p.qd);
}

inline double damage_rate(const MaterialParams& p, const Rho& r) {
  detail::check_damage_domain(r.omega, "damage_rate");
  if (p.B == 0.0) return 0.0;
  return damage_rate(p, stress(p, r), r.omega);
}

// Closed-form damage history under constant von Mises stress:
//   omega(t) = 1 - [ (1-omega0)^(qd+1) - B (qd+1) vm^m t ]^(1/(qd+1)).
// Valid until the bracket reaches zero (rupture).
inline double uniaxial_damage(const MaterialParams& p, double sigma_vm, double omega0,
                              double t) {
  if (!(p.B > 0.0)) throw std::invalid_argument("uniaxial_damage: needs B > 0");
  if (!(sigma_vm > 0.0)) throw std::invalid_argument("uniaxial_damage: needs sigma_vm > 0");
  if (!(omega0 >= 0.0 && omega0 < 1.0))
    throw std::invalid_argument("uniaxial_damage: omega0 outside [0, 1)");
  if (!(t >= 0.0)) throw std::invalid_argument("uniaxial_damage: needs t >= 0");
  const double q1 = p.qd + 1.0;
  const double bracket = std::pow(1.0 - omega0, q1) - p.B * q1 * std::pow(sigma_vm, p.m) * t;
  if (bracket < 0.0)
    throw std::domain_error("uniaxial_damage: t is past the rupture time");
  return 1.0 - std::pow(bracket, 1.0 / q1);
}

// Time at which the closed-form solution reaches omega_target.
inline double uniaxial_rupture_time(const MaterialParams& p, double sigma_vm, double omega0,
                                    double omega_target) {
  if (!(p.B > 0.0)) throw std::invalid_argument("uniaxial_rupture_time: needs B > 0");
  if (!(sigma_vm > 0.0))
    throw std::invalid_argument("uniaxial_rupture_time: needs sigma_vm > 0");
  if (!(omega0 >= 0.0 && omega0 < 1.0) || !(omega_target > omega0 && omega_target <= 1.0))
    throw std::invalid_argument("uniaxial_rupture_time: need 0 <= omega0 < omega_target <= 1");
  const double q1 = p.qd + 1.0;
  return (std::pow(1.0 - omega0, q1) - std::pow(1.0 - omega_target, q1)) /
         (p.B * q1 * std::pow(sigma_vm, p.m));
}

}  // namespace creepdam
