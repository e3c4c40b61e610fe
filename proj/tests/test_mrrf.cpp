#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "caseflux/eigenfunctions.hpp"
#include "caseflux/mrrf.hpp"

using namespace caseflux;

namespace {
OpticalMedium iso(Real c) { return OpticalMedium(1.0 - c, c, {1.0}); }
const OpticalMedium kCaseII = OpticalMedium::linear(0.03, 100.0, 0.3);
const OpticalMedium kHG2(0.3, 0.7, henyey_greenstein_coeffs(0.8, 13));

Real residual(const TridiagonalOperator& op, Real nu, const std::vector<Real>& v) {
  const int n = op.size();
  Real worst = 0.0;
  for (int i = 0; i < n; ++i) {
    Real r = -nu * v[static_cast<std::size_t>(i)];
    if (i > 0) r += op.b[static_cast<std::size_t>(i - 1)] * v[static_cast<std::size_t>(i - 1)];
    if (i < n - 1) r += op.b[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i + 1)];
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}
}  // namespace

TEST_CASE("tridiagonal operator entries") {
  auto op = build_B(0, kCaseII, 5);
  REQUIRE(op.size() == 6);
  CHECK(op.b[0] ==
        Catch::Approx(1.0 / std::sqrt(3.0 * kCaseII.sigma(0) * kCaseII.sigma(1))).epsilon(1e-14));
  // Above the phase-function order sigma = 1.
  CHECK(op.b[3] == Catch::Approx(4.0 / std::sqrt(63.0)).epsilon(1e-14));
  // m = l start: the coupling reduces to the (l+1) branch.
  auto op2 = build_B(2, kHG2, 6);
  CHECK(op2.b[0] ==
        Catch::Approx(std::sqrt(5.0 / (35.0 * kHG2.sigma(3) * kHG2.sigma(2)))).epsilon(1e-13));
  // Nearly transparent medium: free-streaming couplings.
  OpticalMedium clear(1.0, 1e-12, {1.0});
  auto op3 = build_B(0, clear, 3);
  for (int l = 0; l < 3; ++l)
    CHECK(op3.b[static_cast<std::size_t>(l)] ==
          Catch::Approx(Real(l + 1) / std::sqrt(4.0 * (l + 1) * (l + 1) - 1.0)).epsilon(1e-10));
  CHECK_THROWS_AS(build_B(0, kCaseII, 0), std::invalid_argument);
}

TEST_CASE("two-by-two closed form is the diffusion eigenvalue") {
  auto modes = solve_modes(build_B(0, kCaseII, 1));
  REQUIRE(modes.eigenvalues.size() == 2);
  const Real expect = 1.0 / std::sqrt(3.0 * kCaseII.sigma(0) * kCaseII.sigma(1));
  CHECK(modes.eigenvalues[0] == Catch::Approx(expect).epsilon(1e-13));
  CHECK(modes.eigenvalues[1] == Catch::Approx(-expect).epsilon(1e-13));
  CHECK(expect == Catch::Approx(39.85).epsilon(1e-3));
}

TEST_CASE("solve_modes returns an orthonormal eigen-decomposition") {
  for (const OpticalMedium& med : {iso(0.9), kHG2}) {
    for (int m : {0, 1}) {
      auto op = build_B(m, med, 50);
      auto modes = solve_modes(op);
      const int n = op.size();
      REQUIRE(static_cast<int>(modes.eigenvalues.size()) == n);
      for (int k = 0; k < n; ++k) {
        CHECK(residual(op, modes.eigenvalues[static_cast<std::size_t>(k)],
                       modes.vectors[static_cast<std::size_t>(k)]) < 1e-10);
        // Spectrum symmetric about zero.
        CHECK(modes.eigenvalues[static_cast<std::size_t>(k)] ==
              Catch::Approx(-modes.eigenvalues[static_cast<std::size_t>(n - 1 - k)])
                  .margin(1e-12));
      }
      for (int k = 0; k < n; k += 7) {
        for (int k2 = 0; k2 < n; k2 += 7) {
          Real dot = 0.0;
          for (int i = 0; i < n; ++i)
            dot += modes.vectors[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] *
                   modes.vectors[static_cast<std::size_t>(k2)][static_cast<std::size_t>(i)];
          CHECK(std::abs(dot - (k == k2 ? 1.0 : 0.0)) < 1e-12);
        }
      }
      CHECK(largest_eigenvalue(op) == Catch::Approx(modes.eigenvalues[0]).epsilon(1e-12));
    }
  }
}

TEST_CASE("truncated eigenvalue converges to the dispersion root") {
  const OpticalMedium media[] = {OpticalMedium::linear(0.03, 100.0, 0.0), kCaseII,
                                 OpticalMedium::linear(0.3, 100.0, 0.3)};
  for (const auto& med : media) {
    const Real nu0 = find_discrete(0, med).eigenvalues[0];
    Real prev = -1.0;
    for (int L : {20, 50, 100, 200}) {
      const Real err = std::abs(largest_eigenvalue(build_B(0, med, L)) - nu0);
      if (prev >= 0.0) CHECK(err <= prev + 1e-14);
      prev = err;
    }
  }
  // Tight convergence for a moderate albedo.
  auto med = iso(0.9);
  const Real nu0 = find_discrete(0, med).eigenvalues[0];
  CHECK(std::abs(largest_eigenvalue(build_B(0, med, 200)) - nu0) <= 1e-8);
}

TEST_CASE("eigenvector entries decay geometrically for discrete modes") {
  for (const OpticalMedium& med : {iso(0.9), kCaseII}) {
    auto modes = solve_modes(build_B(0, med, 200));
    const auto& v = modes.vectors[0];
    Real prev = std::abs(v[10]);
    for (int i = 11; i < 40 && prev > 1e-14; ++i) {
      CHECK(std::abs(v[static_cast<std::size_t>(i)]) < prev);
      prev = std::abs(v[static_cast<std::size_t>(i)]);
    }
  }
}

TEST_CASE("z_norm composes the discrete normalization") {
  auto med = iso(0.5);
  auto spec = find_discrete(0, med);
  const Real nu0 = spec.eigenvalues[0];
  CHECK(z_norm(nu0, 0, med) == Catch::Approx(2.0 * pi * spec.norms[0] / nu0).epsilon(1e-13));
  CHECK(z_norm(nu0, 0, med) > 0.0);
}

TEST_CASE("eigenvectors reproduce the expansion coefficients") {
  // c^m_l(nu_j) = sqrt(Z) <l|psi>/sqrt(sigma_l) up to one global constant,
  // fixed by matching at l = |m|; the constant squared recovers Z.
  struct Case {
    const OpticalMedium* med;
    int m;
  };
  const Case cases[] = {{&kCaseII, 0}, {&kHG2, 0}, {&kHG2, 1}};
  for (const auto& cs : cases) {
    const auto& med = *cs.med;
    const int m = cs.m;
    auto spec = find_discrete(m, med, 2048, 256);
    REQUIRE_FALSE(spec.eigenvalues.empty());
    const Real nuj = spec.eigenvalues[0];
    auto modes = solve_modes(build_B(m, med, 200));
    CHECK(modes.eigenvalues[0] == Catch::Approx(nuj).epsilon(1e-10));
    auto tab = coeff_table(nuj, m, med, m + 12);
    const auto& v = modes.vectors[0];
    const Real c0 = tab.values[static_cast<std::size_t>(m)].real();
    const Real constant = c0 * std::sqrt(med.sigma(m)) / v[0];
    for (int l = m; l <= m + 12; ++l) {
      const Real predicted =
          constant * v[static_cast<std::size_t>(l - m)] / std::sqrt(med.sigma(l));
      CHECK(tab.values[static_cast<std::size_t>(l)].real() ==
            Catch::Approx(predicted).margin(1e-6 * std::abs(c0)));
    }
    // Dual route to Z: the matching constant squared against 2 pi N / nu.
    CHECK(constant * constant == Catch::Approx(std::abs(z_norm(nuj, m, med))).epsilon(1e-6));
  }
}
