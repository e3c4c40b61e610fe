#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "caseflux/spectrum.hpp"

using namespace caseflux;

namespace {
OpticalMedium iso(Real c) { return OpticalMedium(1.0 - c, c, {1.0}); }
const OpticalMedium kCaseII = OpticalMedium::linear(0.03, 100.0, 0.3);
}  // namespace

TEST_CASE("lambda weight matches the isotropic closed form") {
  const Real c = 0.9;
  auto med = iso(c);
  for (Real nu : {0.1, 0.5, 0.95}) {
    CHECK(lambda_weight(nu, 0, med) ==
          Catch::Approx(1.0 - c * nu * std::atanh(nu)).epsilon(1e-12));
  }
  CHECK(lambda_weight(0.0, 0, med) == 1.0);
  auto m05 = iso(0.5);
  CHECK(lambda_weight(0.5, 0, m05) == Catch::Approx(1.0 - 0.125 * std::log(3.0)).epsilon(1e-12));
  CHECK_THROWS_AS(lambda_weight(1.2, 0, med), std::domain_error);
}

TEST_CASE("dispersion matches the isotropic closed form") {
  auto med = iso(0.5);
  for (Real z : {1.5, 2.0, 5.0, -3.0}) {
    CHECK(dispersion(z, 0, med) ==
          Catch::Approx(1.0 - 0.5 * z * std::atanh(1.0 / z)).epsilon(1e-12));
  }
  CHECK(dispersion(2.0, 0, med) == Catch::Approx(1.0 - std::atanh(0.5)).epsilon(1e-12));
  // Large-z limit -> 1 - c.
  CHECK(dispersion(1e6, 0, med) == Catch::Approx(0.5).epsilon(1e-5));
  // Evenness.
  for (Real z : {1.3, 4.0}) {
    CHECK(dispersion(-z, 0, kCaseII) == Catch::Approx(dispersion(z, 0, kCaseII)).epsilon(1e-12));
    CHECK(dispersion(-z, 1, kCaseII) == Catch::Approx(dispersion(z, 1, kCaseII)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(dispersion(0.7, 0, med), std::domain_error);
}

TEST_CASE("discrete eigenvalue for isotropic c=0.5") {
  auto spec = find_discrete(0, iso(0.5));
  REQUIRE(spec.eigenvalues.size() == 1);
  CHECK(spec.eigenvalues[0] == Catch::Approx(1.0443820337608335).epsilon(1e-10));
  CHECK(spec.residuals[0] <= 1e-12);
}

TEST_CASE("discrete eigenvalue for isotropic c=0.9997") {
  auto med = OpticalMedium::linear(0.03, 100.0, 0.0);
  auto spec = find_discrete(0, med);
  REQUIRE(spec.eigenvalues.size() == 1);
  CHECK(spec.eigenvalues[0] == Catch::Approx(33.342333044051669).epsilon(1e-9));
  // Diffusion estimate 1/sqrt(3(1-c)) is close for c -> 1.
  CHECK(spec.eigenvalues[0] ==
        Catch::Approx(1.0 / std::sqrt(3.0 * (1.0 - med.albedo()))).epsilon(0.01));
}

TEST_CASE("discrete eigenvalues for the linear-scattering parameter sets") {
  auto s2 = find_discrete(0, kCaseII);
  REQUIRE(s2.eigenvalues.size() >= 1);
  CHECK(s2.eigenvalues[0] == Catch::Approx(39.849149143941966).epsilon(1e-9));
  auto s3 = find_discrete(0, OpticalMedium::linear(0.3, 100.0, 0.3));
  REQUIRE(s3.eigenvalues.size() >= 1);
  CHECK(s3.eigenvalues[0] == Catch::Approx(12.624722148307339).epsilon(1e-9));
  // Top azimuthal order |m| = N: at most one root.
  auto sm1 = find_discrete(1, kCaseII);
  CHECK(sm1.eigenvalues.size() <= 1);
}

TEST_CASE("spectra are identical for +m and -m") {
  auto sp = find_discrete(1, kCaseII);
  auto sn = find_discrete(-1, kCaseII);
  REQUIRE(sp.eigenvalues.size() == sn.eigenvalues.size());
  for (std::size_t j = 0; j < sp.eigenvalues.size(); ++j)
    CHECK(sp.eigenvalues[j] == Catch::Approx(sn.eigenvalues[j]).epsilon(1e-14));
  for (Real nu : {0.2, 0.8})
    CHECK(lambda_weight(nu, -1, kCaseII) == Catch::Approx(lambda_weight(nu, 1, kCaseII)).epsilon(1e-14));
}

TEST_CASE("scan-grid doubling finds no additional roots") {
  for (const OpticalMedium& med : {kCaseII, iso(0.5)}) {
    auto a = find_discrete(0, med, 4096);
    auto b = find_discrete(0, med, 8192);
    CHECK(a.eigenvalues.size() == b.eigenvalues.size());
  }
}

TEST_CASE("discrete norm closed form and finite-difference agreement, isotropic c=0.5") {
  auto med = iso(0.5);
  auto spec = find_discrete(0, med);
  const Real nu0 = spec.eigenvalues[0];
  // Closed-form derivative; at the root atanh(1/nu0) = 1/(c nu0).
  const Real c = 0.5;
  const Real dclosed = -c * std::atanh(1.0 / nu0) + c * nu0 / (nu0 * nu0 - 1.0);
  CHECK(dclosed == Catch::Approx(-1.0 / nu0 + c * nu0 / (nu0 * nu0 - 1.0)).epsilon(1e-10));
  const Real n_closed = 0.5 * c * nu0 * nu0 * dclosed;
  CHECK(spec.norms[0] == Catch::Approx(n_closed).epsilon(1e-9));
  CHECK(spec.norms[0] == Catch::Approx(1.3082513211188309).epsilon(1e-9));
  CHECK(spec.norms[0] > 0.0);
  // Odd under nu -> -nu: the adjoint pairing flips sign with the eigenvalue.
  CHECK(norm_discrete(-nu0, 0, med) == Catch::Approx(-spec.norms[0]).epsilon(1e-9));
}

TEST_CASE("continuum normalization closed form, isotropic") {
  const Real c = 0.9;
  auto med = iso(c);
  for (Real nu : {0.1, 0.5, 0.9}) {
    const Real lam = 1.0 - c * nu * std::atanh(nu);
    const Real expect = nu * (lam * lam + std::pow(0.5 * pi * c * nu, 2));
    CHECK(norm_continuum(nu, 0, med) == Catch::Approx(expect).epsilon(1e-11));
  }
  // Linear-in-nu vanishing at the origin.
  CHECK(norm_continuum(1e-6, 0, med) == Catch::Approx(1e-6).epsilon(1e-3));
  // Lower bound near nu -> 1 for m = 0.
  const Real nu = 1.0 - 1e-6;
  CHECK(norm_continuum(nu, 0, med) >= nu * std::pow(0.5 * pi * c * nu, 2));
  CHECK_THROWS_AS(norm_continuum(1.5, 0, med), std::domain_error);
}

TEST_CASE("Plemelj boundary values of the dispersion function") {
  for (int m : {0, 1}) {
    for (Real nu : {0.15, 0.35, 0.55, 0.75, 0.9}) {
      const Real lam = lambda_weight(nu, m, kCaseII);
      const Real jump = 0.5 * pi * kCaseII.albedo() * nu * g_kernel(nu, nu, m, kCaseII) *
                        std::pow(1.0 - nu * nu, std::abs(m));
      // eps -> 0+ by Richardson extrapolation in eps; the limit from above is
      // lambda + i pi (c nu / 2) g (1 - nu^2)^{|m|}.
      auto bv = [&](Real eps) { return dispersion(Complex(nu, eps), m, kCaseII); };
      Complex v1 = bv(1e-4), v2 = bv(5e-5);
      Complex extr = 2.0 * v2 - v1;  // boundary value is linear in eps to leading order
      CHECK(std::abs(extr - Complex(lam, jump)) < 1e-6);
      CHECK(std::abs(std::conj(bv(1e-5)) - bv(-1e-5)) < 1e-13);  // Schwarz reflection
    }
  }
}
