#ifndef CASEFLUX_SPECTRUM_HPP
#define CASEFLUX_SPECTRUM_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "caseflux/chandra.hpp"
#include "caseflux/medium.hpp"
#include "caseflux/quadrature.hpp"

namespace caseflux {

// Continuum weight lambda^m(nu) = 1 - (c nu / 2) PV int g^m(nu,mu)/(nu-mu) dm(mu),
// nu in (-1,1).
inline Real lambda_weight(Real nu, int m, const OpticalMedium& med,
                          int order = kProductionGaussOrder) {
  if (!(nu > -1.0 && nu < 1.0))
    throw std::domain_error("lambda_weight: nu must lie in (-1,1)");
  if (nu == 0.0) return 1.0;
  const int am = std::abs(m);
  auto F = [&](Real mu) {
    return g_kernel(nu, mu, m, med) * std::pow(1.0 - mu * mu, am);
  };
  return 1.0 - 0.5 * med.albedo() * nu * pv_integral(F, nu, order);
}

// Dispersion function Lambda^m(z) for real z off [-1,1].  For z close to the
// endpoints the same subtraction used inside the PV integral tames the
// near-singular integrand; the subtracted term integrates to log((z+1)/(z-1)).
inline Real dispersion(Real z, int m, const OpticalMedium& med,
                       int order = kProductionGaussOrder) {
  if (!(std::abs(z) > 1.0))
    throw std::domain_error("dispersion: real argument must satisfy |z| > 1");
  const int am = std::abs(m);
  const QuadratureRule& rule = gauss_legendre(order);
  auto F = [&](Real mu) {
    return g_kernel(z, mu, m, med) * std::pow(1.0 - mu * mu, am);
  };
  Real integral;
  if (std::abs(z) - 1.0 < 0.05) {
    const Real fz = F(z);
    Real sum = 0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const Real mu = rule.nodes[i];
      sum += rule.weights[i] * (F(mu) - fz) / (z - mu);
    }
    integral = sum + fz * std::log((z + 1.0) / (z - 1.0));
  } else {
    Real sum = 0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const Real mu = rule.nodes[i];
      sum += rule.weights[i] * F(mu) / (z - mu);
    }
    integral = sum;
  }
  return 1.0 - 0.5 * med.albedo() * z * integral;
}

// Complex-argument dispersion, used for the Plemelj boundary values.
inline Complex dispersion(Complex z, int m, const OpticalMedium& med,
                          int order = kProductionGaussOrder) {
  if (z.imag() == 0.0 && std::abs(z.real()) <= 1.0)
    throw std::domain_error("dispersion: argument on the segment [-1,1]");
  const int am = std::abs(m);
  const QuadratureRule& rule = gauss_legendre(order);
  // Subtracting F(z) makes the integrand a polynomial in mu, so the rule is
  // exact; the pole contributes the closed-form log of the end-point ratio.
  const Complex Fz = g_kernel(z, z, m, med) * detail::ipow(Complex(1.0, 0.0) - z * z, am);
  Complex sum{};
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const Real mu = rule.nodes[i];
    Complex F = g_kernel(z, Complex(mu, 0.0), m, med) * std::pow(1.0 - mu * mu, am);
    sum += rule.weights[i] * (F - Fz) / (z - mu);
  }
  sum += Fz * std::log((z + 1.0) / (z - 1.0));
  return Complex(1.0, 0.0) - 0.5 * med.albedo() * z * sum;
}

// Discrete spectrum for one azimuthal order.
struct SpectrumData {
  int m = 0;
  std::vector<Real> eigenvalues;  // nu_0 > nu_1 > ... > 1; negatives implied
  std::vector<Real> norms;        // N^m_j
  std::vector<Real> residuals;    // |Lambda^m(nu_j)|
};

// d Lambda / dz by Richardson-extrapolated central differences.
inline Real dispersion_derivative(Real z, int m, const OpticalMedium& med,
                                  int order = kProductionGaussOrder) {
  const Real h = std::max(1e-4 * std::abs(z), 1e-6);
  auto central = [&](Real step) {
    return (dispersion(z + step, m, med, order) - dispersion(z - step, m, med, order)) /
           (2.0 * step);
  };
  const Real d1 = central(h);
  const Real d2 = central(0.5 * h);
  return (4.0 * d2 - d1) / 3.0;
}

// N^m_j = int mu phi_j(mu)^2 dm(mu), equivalently (c/2) nu_j^2 g(nu_j,nu_j)
// dLambda/dz at the root.  The quadrature form is used: the closed form needs
// g pointwise at mu = nu_j, where the upward h_l recurrence's round-off is
// amplified by the growth of p_l beyond the cut, and for high-order phase
// functions that evaluation loses all accuracy.  Under the integral the same
// noise is suppressed by the decay of the smooth factor's Legendre
// coefficients, so the moment form stays well conditioned.
inline Real norm_discrete(Real nu_j, int m, const OpticalMedium& med,
                          int order = kProductionGaussOrder) {
  const int am = std::abs(m);
  const Real pref = 0.5 * med.albedo() * nu_j;
  return gauss_legendre(order).integrate([&](Real mu) {
    const Real p = pref * g_kernel(nu_j, mu, m, med) / (nu_j - mu);
    return mu * p * p * std::pow(1.0 - mu * mu, am);
  });
}

// Continuum normalization N^m(nu) = nu Lambda^{m+} Lambda^{m-} (1-nu^2)^{-|m|}
// expanded through the Plemelj boundary values.
inline Real norm_continuum(Real nu, int m, const OpticalMedium& med,
                           int order = kProductionGaussOrder) {
  if (!(nu > 0.0 && nu < 1.0))
    throw std::domain_error("norm_continuum: nu must lie in (0,1)");
  const int am = std::abs(m);
  const Real lam = lambda_weight(nu, m, med, order);
  const Real w = 1.0 - nu * nu;
  const Real half_jump = 0.5 * pi * med.albedo() * nu * g_kernel(nu, nu, m, med);
  // nu [lam^2 + (pi c nu g w^{|m|} / 2)^2] w^{-|m|}, grouped to avoid overflow
  // near nu -> 1 for m != 0.
  return nu * (lam * lam * std::pow(w, -am) + half_jump * half_jump * std::pow(w, am));
}

// All discrete eigenvalues nu > 1 of Lambda^m.  The scan substitutes
// nu = 1/xi on a uniform grid in (0,1) so that roots near 1 and near infinity
// are captured together; brackets are refined by bisection and polished by a
// few secant steps.  Candidates whose polished residual exceeds root_tol are
// dropped: for high-order phase functions the h_l recurrence overflows the
// cancellation budget at large nu and the scan picks up sign changes that are
// pure round-off noise, with residuals many orders of magnitude above those
// of genuine roots.
inline SpectrumData find_discrete(int m, const OpticalMedium& med,
                                  int scan_points = 4096,
                                  int order = kProductionGaussOrder,
                                  Real root_tol = 1e-8) {
  if (std::abs(m) > med.order())
    throw std::invalid_argument("find_discrete: |m| exceeds phase-function order");
  SpectrumData out;
  out.m = m;

  auto Lam = [&](Real nu) { return dispersion(nu, m, med, order); };

  std::vector<std::pair<Real, Real>> brackets;
  Real xi_prev = 1.0 / scan_points * 0.5;
  Real f_prev = Lam(1.0 / xi_prev);
  for (int i = 1; i < scan_points; ++i) {
    const Real xi = (i + 0.5) / scan_points;
    if (xi >= 1.0) break;
    const Real f = Lam(1.0 / xi);
    if (f_prev == 0.0) brackets.emplace_back(1.0 / xi_prev, 1.0 / xi_prev);
    if (f_prev * f < 0.0) brackets.emplace_back(1.0 / xi, 1.0 / xi_prev);
    xi_prev = xi;
    f_prev = f;
  }

  std::vector<Real> roots(brackets.size());
  parallel_for(brackets.size(), [&](std::size_t bi) {
    Real a = brackets[bi].first, b = brackets[bi].second;
    Real fa = Lam(a), fb = Lam(b);
    while (b - a > 1e-14 * std::min(std::abs(a), std::abs(b))) {
      const Real mid = 0.5 * (a + b);
      const Real fm = Lam(mid);
      if (fa * fm <= 0.0) {
        b = mid;
        fb = fm;
      } else {
        a = mid;
        fa = fm;
      }
    }
    Real x0 = a, x1 = b, f0 = fa, f1 = fb;
    for (int it = 0; it < 8 && f1 != f0; ++it) {
      const Real x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
      if (!(x2 > 1.0) || !std::isfinite(x2)) break;
      x0 = x1;
      f0 = f1;
      x1 = x2;
      f1 = Lam(x1);
      if (f1 == 0.0) break;
    }
    roots[bi] = (std::abs(f1) <= std::abs(f0)) ? x1 : x0;
  });

  std::sort(roots.begin(), roots.end(), std::greater<Real>());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](Real x, Real y) { return std::abs(x - y) < 1e-10 * x; }),
              roots.end());

  for (Real r : roots) {
    const Real res = std::abs(Lam(r));
    if (res > root_tol) continue;
    out.eigenvalues.push_back(r);
    out.residuals.push_back(res);
    out.norms.push_back(norm_discrete(r, m, med));
  }
  return out;
}

}  // namespace caseflux

#endif
