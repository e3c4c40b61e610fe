#ifndef CASEFLUX_DENSITY_HPP
#define CASEFLUX_DENSITY_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "caseflux/quadrature.hpp"
#include "caseflux/spectrum.hpp"

namespace caseflux {

// Source geometry for the two density configurations: an isotropic point
// emitter at the origin, or a uniform segment of length ell on the x-axis.
struct SourceSpec {
  enum Kind { point, line } kind = point;
  Real strength = 1.0;  // S_a (point) or S_b (line)
  Real ell = 0.0;       // segment length, cm (line only)
};

// Sampled on-axis energy density.  Values are U v / (mu_t^2 S_a) for the
// point source and U v / (mu_t S_b) for the line source; z is measured in
// mean free paths.  v never appears separately since it cancels in every
// comparison, so all routines report U v.
struct DensityProfile {
  std::vector<Real> z;
  std::vector<Real> values;
  enum Method { case_method, fourier, mc } method = case_method;
  std::vector<Real> error;  // per-point estimate from rule refinement
};

inline std::vector<Real> default_density_grid(int n = 200, Real zmin = 0.1,
                                              Real zmax = 25.0) {
  std::vector<Real> z(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    z[static_cast<std::size_t>(i)] =
        zmin * std::pow(zmax / zmin, Real(i) / Real(n - 1));
  return z;
}

namespace detail {

// 1 / (nu N(nu)) tabulated on the mapped nodes of a Gauss rule over (0,1).
inline std::vector<Real> inv_nu_norm_table(const QuadratureRule& rule,
                                           const OpticalMedium& med) {
  std::vector<Real> t(rule.nodes.size());
  parallel_for(rule.nodes.size(), [&](std::size_t i) {
    const Real nu = 0.5 * (rule.nodes[i] + 1.0);
    t[i] = 1.0 / (nu * norm_continuum(nu, 0, med));
  });
  return t;
}

inline void check_grid(const std::vector<Real>& zs) {
  for (Real z : zs)
    if (!(z > 0.0)) throw std::domain_error("density: z must be positive");
}

// Fourier kernel (atan k)^2 / (k - c atan k); decays like (pi/2)^2 / k.
inline Real fourier_kernel(Real k, Real c) {
  const Real a = std::atan(k);
  return a * a / (k - c * a);
}

}  // namespace detail

// Point source via the eigenmode sum: the m = 0 spectrum carries the whole
// double angular integral.
inline DensityProfile density_point(const std::vector<Real>& zs,
                                    const OpticalMedium& med) {
  detail::check_grid(zs);
  const SpectrumData spec = find_discrete(0, med);
  const QuadratureRule& rule = gauss_legendre(kProductionGaussOrder);
  const QuadratureRule& half = gauss_legendre(kProductionGaussOrder / 2);
  const auto tab = detail::inv_nu_norm_table(rule, med);
  const auto tab_half = detail::inv_nu_norm_table(half, med);

  DensityProfile out;
  out.z = zs;
  out.method = DensityProfile::case_method;
  out.values.resize(zs.size());
  out.error.resize(zs.size());
  parallel_for(zs.size(), [&](std::size_t i) {
    const Real z = zs[i];
    Real disc = 0.0;
    for (std::size_t j = 0; j < spec.eigenvalues.size(); ++j)
      disc += std::exp(-z / spec.eigenvalues[j]) /
              (spec.eigenvalues[j] * spec.norms[j]);
    auto cont = [&](const QuadratureRule& r, const std::vector<Real>& t) {
      Real sum = 0.0;
      for (std::size_t k = 0; k < r.nodes.size(); ++k) {
        const Real nu = 0.5 * (r.nodes[k] + 1.0);
        sum += 0.5 * r.weights[k] * std::exp(-z / nu) * t[k];
      }
      return sum;
    };
    const Real full = (disc + cont(rule, tab)) / z;
    const Real coarse = (disc + cont(half, tab_half)) / z;
    out.values[i] = full;
    out.error[i] = std::abs(full - coarse);
  });
  return out;
}

// Point source via the scalar Fourier transform; isotropic scattering only.
inline DensityProfile density_point_fourier(const std::vector<Real>& zs, Real c) {
  detail::check_grid(zs);
  DensityProfile out;
  out.z = zs;
  out.method = DensityProfile::fourier;
  out.values.resize(zs.size());
  out.error.assign(zs.size(), 1e-10);
  parallel_for(zs.size(), [&](std::size_t i) {
    const Real z = zs[i];
    const Real tail = oscillatory_semi_infinite(
        [&](Real k) { return detail::fourier_kernel(k, c); }, z);
    out.values[i] = std::exp(-z) / (z * z) + (2.0 * c / pi) * tail / z;
  });
  return out;
}

inline DensityProfile density_point_fourier(const std::vector<Real>& zs,
                                            const OpticalMedium& med) {
  if (med.order() >= 1 && med.f(1) != 0.0)
    throw std::invalid_argument("density_point_fourier: isotropic baseline only");
  return density_point_fourier(zs, med.albedo());
}

// Line source of length ell (cm) on the x-axis, observed on the z-axis.  The
// transverse frequency integral carries the source shape through the
// cumulative Bessel factor; panels grow geometrically from the discrete
// mode's 1/nu_0 roll-off scale and stay below the J_0 half period.
inline DensityProfile density_line(const std::vector<Real>& zs,
                                   const OpticalMedium& med, Real ell) {
  detail::check_grid(zs);
  if (!(ell > 0.0)) throw std::domain_error("density_line: ell must be positive");
  const Real tl = med.to_mfp(ell);  // mu_t * ell
  const SpectrumData spec = find_discrete(0, med);
  const QuadratureRule& nu_rule = gauss_legendre(kProductionGaussOrder / 2);
  const auto tab = detail::inv_nu_norm_table(nu_rule, med);
  const Real nu0 = spec.eigenvalues.empty() ? 1.0 : spec.eigenvalues[0];

  auto profile = [&](Real z, int order) {
    const Real qmax = -std::log(1e-14) / z;
    const Real cap = std::min(0.5 * pi / tl, 2.0);
    std::vector<Real> edges{0.0};
    Real w = std::min(0.5 / nu0, cap);
    while (edges.back() < qmax) {
      edges.push_back(std::min(qmax, edges.back() + w));
      w = std::min(2.0 * w, cap);
    }
    const QuadratureRule& qr = gauss_legendre(order);
    const QuadratureRule& bes = gauss_legendre(16);
    Real total = 0.0;
    Real cum = 0.0, t_prev = 0.0;  // running integral of J_0 up to mu_t l q
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
      const Real a = edges[p], b = edges[p + 1];
      for (std::size_t k = 0; k < qr.nodes.size(); ++k) {
        const Real q = 0.5 * (a + b) + 0.5 * (b - a) * qr.nodes[k];
        const Real t = tl * q;
        cum += bes.integrate([](Real u) { return std::cyl_bessel_j(0.0, u); },
                             t_prev, t);
        t_prev = t;
        Real modes = 0.0;
        for (std::size_t j = 0; j < spec.eigenvalues.size(); ++j) {
          const Real nuj = spec.eigenvalues[j];
          const Real Qj = std::sqrt(1.0 + nuj * nuj * q * q);
          modes += std::exp(-Qj * z / nuj) / (Qj * spec.norms[j]);
        }
        Real cont = 0.0;
        for (std::size_t n = 0; n < nu_rule.nodes.size(); ++n) {
          const Real nu = 0.5 * (nu_rule.nodes[n] + 1.0);
          const Real Q = std::sqrt(1.0 + nu * nu * q * q);
          cont += 0.5 * nu_rule.weights[n] * std::exp(-Q * z / nu) * nu *
                  tab[n] / Q;
        }
        total += 0.5 * (b - a) * qr.weights[k] * cum * (modes + cont);
      }
    }
    return total;
  };
  DensityProfile out;
  out.z = zs;
  out.method = DensityProfile::case_method;
  out.values.resize(zs.size());
  out.error.resize(zs.size());
  parallel_for(zs.size(), [&](std::size_t i) {
    const Real fine = profile(zs[i], 16);
    const Real coarse = profile(zs[i], 10);
    out.values[i] = fine;
    out.error[i] = std::abs(fine - coarse);
  });
  return out;
}

// Line source via the point-source Fourier kernel integrated along the
// segment; isotropic scattering only.
inline DensityProfile density_line_fourier(const std::vector<Real>& zs, Real c,
                                           Real tl) {
  detail::check_grid(zs);
  if (!(tl > 0.0))
    throw std::domain_error("density_line_fourier: ell must be positive");
  DensityProfile out;
  out.z = zs;
  out.method = DensityProfile::fourier;
  out.values.resize(zs.size());
  out.error.resize(zs.size());
  parallel_for(zs.size(), [&](std::size_t i) {
    const Real z = zs[i];
    auto kernel = [&](Real x0) {
      const Real r = std::sqrt(x0 * x0 + z * z);
      const Real tail = oscillatory_semi_infinite(
          [&](Real k) { return detail::fourier_kernel(k, c); }, r);
      return std::exp(-r) / (r * r) + (2.0 * c / pi) * tail / r;
    };
    const Real fine = gauss_legendre(32).integrate(kernel, 0.0, tl);
    const Real coarse = gauss_legendre(16).integrate(kernel, 0.0, tl);
    out.values[i] = fine;
    out.error[i] = std::abs(fine - coarse);
  });
  return out;
}

inline DensityProfile density_line_fourier(const std::vector<Real>& zs,
                                           const OpticalMedium& med, Real ell) {
  if (med.order() >= 1 && med.f(1) != 0.0)
    throw std::invalid_argument("density_line_fourier: isotropic baseline only");
  return density_line_fourier(zs, med.albedo(), med.to_mfp(ell));
}

}  // namespace caseflux

#endif
