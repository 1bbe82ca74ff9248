#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <creepdam/material.hpp>

using namespace creepdam;

namespace {

MaterialParams base_params() {
  MaterialParams p;
  p.E = 1.0;
  p.nu = 0.0;
  p.coupling = Coupling::PartlyCoupled;  // keeps the stress independent of omega
  return p;
}

Rho uniaxial_rho(double eps11, double omega) {
  Rho r;
  r.eps11 = eps11;
  r.omega = omega;
  return r;
}

}  // namespace

TEST_CASE("stiffness matrix: plane stress entries and damage scaling", "[material]") {
  MaterialParams p;
  p.E = 1.0;
  p.nu = 0.0;
  const Eigen::Matrix3d D = stiffness_matrix(p, 0.0);
  Eigen::Matrix3d expect;
  expect << 1, 0, 0, 0, 1, 0, 0, 0, 0.5;
  REQUIRE((D - expect).cwiseAbs().maxCoeff() < 1e-15);

  p.nu = 0.3;
  p.coupling = Coupling::FullyCoupled;
  const Eigen::Matrix3d D0 = stiffness_matrix(p, 0.0);
  const Eigen::Matrix3d Dh = stiffness_matrix(p, 0.5);
  REQUIRE((Dh - 0.5 * D0).cwiseAbs().maxCoeff() < 1e-15);

  p.coupling = Coupling::PartlyCoupled;
  p.omega_crit = 0.99;
  REQUIRE((stiffness_matrix(p, 0.5) - D0).cwiseAbs().maxCoeff() < 1e-15);
  REQUIRE(stiffness_matrix(p, 0.995).cwiseAbs().maxCoeff() == 0.0);

  REQUIRE_THROWS_AS(stiffness_matrix(p, -0.1), std::domain_error);
  REQUIRE_THROWS_AS(stiffness_matrix(p, 1.1), std::domain_error);
  p.nu = 0.5;
  REQUIRE_THROWS_AS(stiffness_matrix(p, 0.0), std::domain_error);
}

TEST_CASE("stress from the local state vector", "[material]") {
  MaterialParams p;
  p.E = 1.0;
  p.nu = 0.3;
  p.coupling = Coupling::FullyCoupled;

  // eps11 = 1, omega = 1/2: sigma11 = (1/2) E/(1-nu^2), sigma22 = nu * that.
  Rho r = uniaxial_rho(1.0, 0.5);
  const Voigt3 sig = stress(p, r);
  REQUIRE(sig.s11 == Catch::Approx(0.5 / 0.91).epsilon(1e-14));
  REQUIRE(sig.s22 == Catch::Approx(0.15 / 0.91).epsilon(1e-14));
  REQUIRE(sig.s12 == 0.0);

  // Creep strain equal to the total strain leaves no stress.
  r.cr11 = 1.0;
  const Voigt3 relaxed = stress(p, r);
  REQUIRE(std::abs(relaxed.s11) < 1e-15);
  REQUIRE(std::abs(relaxed.s22) < 1e-15);

  // Pure shear with the tensorial component doubled inside the product.
  Rho sh;
  sh.eps12 = 1.0;
  p.nu = 0.0;
  const Voigt3 tau = stress(p, sh);
  REQUIRE(tau.s12 == Catch::Approx(1.0).epsilon(1e-14));  // 2 * E/(2(1+0)) * eps12
}

TEST_CASE("deviator and von Mises stress", "[material]") {
  const Voigt3 uni{1.0, 0.0, 0.0};
  const PlaneDeviator s = deviator(uni);
  REQUIRE(s.s11 == Catch::Approx(2.0 / 3.0));
  REQUIRE(s.s22 == Catch::Approx(-1.0 / 3.0));
  REQUIRE(s.s33 == Catch::Approx(-1.0 / 3.0));
  REQUIRE(von_mises(uni) == Catch::Approx(1.0).epsilon(1e-15));

  const Voigt3 hydro{1.0, 1.0, 0.0};  // equibiaxial: vm = |sigma|
  REQUIRE(von_mises(hydro) == Catch::Approx(1.0).epsilon(1e-15));

  const Voigt3 shear{0.0, 0.0, 1.0};
  REQUIRE(von_mises(shear) == Catch::Approx(std::sqrt(3.0)).epsilon(1e-15));

  REQUIRE(von_mises(Voigt3{}) == 0.0);
}

TEST_CASE("von Mises agrees with the deviator contraction", "[material]") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> dist(-10.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const Voigt3 sig{dist(rng), dist(rng), dist(rng)};
    const PlaneDeviator s = deviator(sig);
    const double contraction =
        s.s11 * s.s11 + s.s22 * s.s22 + s.s33 * s.s33 + 2.0 * s.s12 * s.s12;
    const double vm_dev = std::sqrt(1.5 * contraction);
    REQUIRE(von_mises(sig) == Catch::Approx(vm_dev).epsilon(1e-12).margin(1e-12));
  }
}

TEST_CASE("creep rate: frozen examples", "[material]") {
  MaterialParams p = base_params();
  p.A = 1.0;
  p.n = 1.0;

  // sigma = (1, 0, 0), omega = 0: rate = 3/2 * s = (1, -1/2, 0).
  Voigt3 rate = creep_rate(p, uniaxial_rho(1.0, 0.0));
  REQUIRE(rate.s11 == Catch::Approx(1.0).epsilon(1e-14));
  REQUIRE(rate.s22 == Catch::Approx(-0.5).epsilon(1e-14));
  REQUIRE(rate.s12 == 0.0);

  // n = 2, omega = 1/2 amplifies by (1-omega)^-2 = 4.
  p.n = 2.0;
  rate = creep_rate(p, uniaxial_rho(1.0, 0.5));
  REQUIRE(rate.s11 == Catch::Approx(4.0).epsilon(1e-14));
  REQUIRE(rate.s22 == Catch::Approx(-2.0).epsilon(1e-14));

  // A = 0 switches creep off entirely.
  p.A = 0.0;
  rate = creep_rate(p, uniaxial_rho(1.0, 0.5));
  REQUIRE(rate.s11 == 0.0);
  REQUIRE(rate.s22 == 0.0);

  p.A = 1.0;
  REQUIRE_THROWS_AS(creep_rate(p, uniaxial_rho(1.0, 1.0 - 1e-10)), SingularityError);
}

TEST_CASE("creep rate is aligned with the stress deviator", "[material]") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  std::uniform_real_distribution<double> om(0.0, 0.9);
  MaterialParams p = base_params();
  p.A = 0.7;
  p.n = 3.0;
  for (int i = 0; i < 200; ++i) {
    Rho r;
    r.eps11 = dist(rng);
    r.eps22 = dist(rng);
    r.eps12 = dist(rng);
    r.omega = om(rng);
    const Voigt3 rate = creep_rate(p, r);
    const PlaneDeviator s = deviator(stress(p, r));
    // rate = lambda * (s11, s22, s12) with lambda >= 0.
    const double lam = 1.5 * p.A * std::pow(von_mises(stress(p, r)), p.n - 1.0) *
                       std::pow(1.0 - r.omega, -p.n);
    REQUIRE(rate.s11 == Catch::Approx(lam * s.s11).margin(1e-12));
    REQUIRE(rate.s22 == Catch::Approx(lam * s.s22).margin(1e-12));
    REQUIRE(rate.s12 == Catch::Approx(lam * s.s12).margin(1e-12));
  }
}

TEST_CASE("creep rate reduces to the Norton law in uniaxial tension", "[material]") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> logA(-2.0, 2.0);
  std::uniform_real_distribution<double> en(1.0, 6.0);
  std::uniform_real_distribution<double> logS(-1.0, 1.0);
  MaterialParams p = base_params();
  for (int i = 0; i < 1000; ++i) {
    p.A = std::pow(10.0, logA(rng));
    p.n = en(rng);
    const double sigma = std::pow(10.0, logS(rng));
    const Voigt3 rate = creep_rate(p, uniaxial_rho(sigma, 0.0));
    const double norton = p.A * std::pow(sigma, p.n);
    REQUIRE(std::abs(rate.s11 - norton) <= 1e-12 * norton);
    REQUIRE(std::abs(rate.s22 + 0.5 * norton) <= 1e-12 * norton);
  }
}

TEST_CASE("damage rate: frozen examples and monotonicity", "[material]") {
  MaterialParams p = base_params();
  p.B = 1.0;
  p.m = 2.0;
  p.qd = 1.0;

  REQUIRE(damage_rate(p, uniaxial_rho(1.0, 0.0)) == Catch::Approx(1.0).epsilon(1e-14));
  REQUIRE(damage_rate(p, uniaxial_rho(1.0, 0.5)) == Catch::Approx(2.0).epsilon(1e-14));

  p.B = 0.0;
  REQUIRE(damage_rate(p, uniaxial_rho(1.0, 0.5)) == 0.0);

  p.B = 1.0;
  REQUIRE_THROWS_AS(damage_rate(p, uniaxial_rho(1.0, 1.0)), SingularityError);

  // Increasing damage at fixed stress accelerates the rate (qd > 0).
  double prev = 0.0;
  for (double w : {0.0, 0.2, 0.4, 0.6, 0.8}) {
    const double rate = damage_rate(p, uniaxial_rho(1.0, w));
    REQUIRE(rate > prev);
    prev = rate;
  }
}

TEST_CASE("closed-form uniaxial damage history", "[material]") {
  MaterialParams p = base_params();
  p.B = 1.0;
  p.m = 2.0;
  p.qd = 1.0;

  REQUIRE(uniaxial_damage(p, 1.0, 0.0, 0.0) == 0.0);
  REQUIRE(uniaxial_damage(p, 1.0, 0.0, 0.375) == Catch::Approx(0.5).epsilon(1e-14));
  REQUIRE(uniaxial_rupture_time(p, 1.0, 0.0, 1.0) == Catch::Approx(0.5).epsilon(1e-14));

  // Starting at omega0 = 1/2 costs the remaining quarter of the budget.
  REQUIRE(uniaxial_rupture_time(p, 1.0, 0.5, 1.0) == Catch::Approx(0.125).epsilon(1e-14));

  REQUIRE_THROWS_AS(uniaxial_damage(p, 1.0, 0.0, 0.51), std::domain_error);
  REQUIRE_THROWS_AS(uniaxial_rupture_time(p, 1.0, 0.5, 0.5), std::invalid_argument);
}

TEST_CASE("closed-form history matches the damage rate ODE", "[material]") {
  MaterialParams p = base_params();
  p.B = 0.8;
  p.m = 3.0;
  p.qd = 2.0;
  const double sigma = 1.3;
  const double t_rupture = uniaxial_rupture_time(p, sigma, 0.1, 1.0);
  for (int i = 1; i <= 20; ++i) {
    const double t = 0.8 * t_rupture * i / 20.0;
    const double h = 1e-7 * t_rupture;
    const double dw_dt =
        (uniaxial_damage(p, sigma, 0.1, t + h) - uniaxial_damage(p, sigma, 0.1, t - h)) /
        (2.0 * h);
    const double rate = damage_rate(p, uniaxial_rho(sigma, uniaxial_damage(p, sigma, 0.1, t)));
    REQUIRE(dw_dt == Catch::Approx(rate).epsilon(1e-5));
  }
}

TEST_CASE("parameter validation", "[material]") {
  MaterialParams p;
  p.E = 0.0;
  REQUIRE_THROWS_AS(p.validate(), std::invalid_argument);
  p = MaterialParams{};
  p.nu = 0.5;
  REQUIRE_THROWS_AS(p.validate(), std::invalid_argument);
  p = MaterialParams{};
  p.omega_crit = 1.0;
  REQUIRE_THROWS_AS(p.validate(), std::invalid_argument);
  p = MaterialParams{};
  REQUIRE_NOTHROW(p.validate());
}
