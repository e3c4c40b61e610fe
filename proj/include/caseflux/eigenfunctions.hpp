#ifndef CASEFLUX_EIGENFUNCTIONS_HPP
#define CASEFLUX_EIGENFUNCTIONS_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "caseflux/rotation.hpp"
#include "caseflux/spectrum.hpp"

namespace caseflux {

// Singular eigenfunction phi^m(nu, mu) as a distribution: a regular part
// (c nu / 2) g^m(nu, mu) / (nu - mu) plus, for nu inside (-1,1), the
// delta part lambda^m(nu) (1-nu^2)^{-|m|} delta(nu - mu).  Continuum
// eigenfunctions are only ever used under integrals against smooth tests.
class SingularEigenfunction {
public:
  SingularEigenfunction(Real nu, int m, const OpticalMedium& med, bool discrete,
                        Real lambda, Real delta_coeff)
      : nu_(nu), m_(m), med_(med), discrete_(discrete), lambda_(lambda),
        delta_coeff_(delta_coeff) {}

  Real nu() const { return nu_; }
  int m() const { return m_; }
  bool discrete() const { return discrete_; }
  const OpticalMedium& medium() const { return med_; }
  Real lambda() const { return lambda_; }
  Real delta_coeff() const { return delta_coeff_; }

  template <class T>
  T regular(T mu) const {
    return Real(0.5 * med_.albedo() * nu_) * g_kernel(T(nu_), mu, m_, med_) / (T(nu_) - mu);
  }

private:
  Real nu_;
  int m_;
  OpticalMedium med_;
  bool discrete_;
  Real lambda_;
  Real delta_coeff_;
};

// Construct phi^m.  Discrete arguments (|nu| > 1) must actually be roots of
// the dispersion function; the continuum is all of (-1,1).
inline SingularEigenfunction phi(Real nu, int m, const OpticalMedium& med,
                                 Real root_tol = 1e-8) {
  if (std::abs(m) > med.order())
    throw std::invalid_argument("phi: |m| exceeds phase-function order");
  const int am = std::abs(m);
  if (std::abs(nu) > 1.0) {
    const Real res = dispersion(nu, m, med);
    if (std::abs(res) > root_tol)
      throw std::invalid_argument("phi: nu is not an eigenvalue (dispersion residual " +
                                  std::to_string(res) + ")");
    return SingularEigenfunction(nu, m, med, true, 0.0, 0.0);
  }
  if (std::abs(nu) < 1.0) {
    const Real lam = lambda_weight(nu, m, med);
    return SingularEigenfunction(nu, m, med, false, lam,
                                 lam * std::pow(1.0 - nu * nu, -am));
  }
  throw std::domain_error("phi: |nu| = 1 is not in the spectrum");
}

// Integral of a smooth test against a continuum eigenfunction under the
// measure dm(mu) = (1-mu^2)^{|m|} dmu: the principal-value part plus the
// delta contribution.  With test = 1 this is the normalization, exactly 1.
template <class F>
Real integrate_continuum(F&& test, const SingularEigenfunction& sef,
                         int order = kProductionGaussOrder) {
  if (sef.discrete())
    throw std::invalid_argument("integrate_continuum: eigenfunction is discrete");
  const int am = std::abs(sef.m());
  const Real nu = sef.nu();
  const Real cnu = 0.5 * sef.medium().albedo() * nu;
  auto F_ = [&](Real mu) {
    return cnu * g_kernel(nu, mu, sef.m(), sef.medium()) * test(mu) *
           std::pow(1.0 - mu * mu, am);
  };
  const Real pv = (nu == 0.0) ? 0.0 : pv_integral(F_, nu, order);
  return pv + sef.delta_coeff() * test(nu) * std::pow(1.0 - nu * nu, am);
}

// Same pattern for a discrete eigenfunction, where the integrand is smooth.
template <class F>
Real integrate_discrete(F&& test, const SingularEigenfunction& sef,
                        int order = kProductionGaussOrder) {
  if (!sef.discrete())
    throw std::invalid_argument("integrate_discrete: eigenfunction is continuum");
  const int am = std::abs(sef.m());
  return gauss_legendre(order).integrate([&](Real mu) {
    return sef.regular(mu) * test(mu) * std::pow(1.0 - mu * mu, am);
  });
}

template <class F>
Real integrate_mode(F&& test, const SingularEigenfunction& sef,
                    int order = kProductionGaussOrder) {
  return sef.discrete() ? integrate_discrete(test, sef, order)
                        : integrate_continuum(test, sef, order);
}

// Full 3D angular part Phi^m_nu(s; k) for a discrete eigenfunction:
// phi^m(nu, mu(k)) times the combined azimuthal factor.
inline Complex eval_Phi(const SingularEigenfunction& sef, const Direction& s,
                        const FrameParams& fp) {
  if (!sef.discrete())
    throw std::invalid_argument("eval_Phi: continuum modes are only integrated");
  const Complex mu = mu_rotated(s, fp);
  if (std::abs(Complex(sef.nu(), 0.0) - mu) < 1e-13)
    throw std::domain_error("eval_Phi: direction hits the regular-part pole");
  return sef.regular(mu) * azimuthal_factor(s, fp, sef.m());
}

// Signed normalization N^m(nu): the discrete norm at |nu| > 1 (odd in nu)
// and nu times the boundary-value product inside (-1,1); odd in nu on both
// branches.
inline Real signed_norm(Real nu, int m, const OpticalMedium& med) {
  if (std::abs(nu) > 1.0) return norm_discrete(nu, m, med);
  if (nu == 0.0) throw std::domain_error("signed_norm: nu = 0");
  const Real s = (nu > 0) ? 1.0 : -1.0;
  return s * norm_continuum(std::abs(nu), m, med);
}

// Scalar multiplier turning Phi into the adjoint-normalized Phi-tilde:
// [2 pi Q(nu q) N^m(nu)]^{-1}.
inline Real adjoint_weight(Real nu, int m, const FrameParams& fp,
                           const OpticalMedium& med) {
  const Real bigq = std::sqrt(1.0 + nu * nu * fp.qmag * fp.qmag);
  return 1.0 / (2.0 * pi * bigq * signed_norm(nu, m, med));
}

// Spherical-harmonic expansion coefficients c^m_l(nu) of Phi^m_nu, stored at
// index l for l = |m|..L (zero below |m|).
struct CoeffTable {
  int m = 0;
  Real nu = 0.0;
  std::vector<Complex> values;
};

// c^m_l(nu).  Off the cut the Legendre product integrals collapse to the
// Neumann form 2 Q_max P_min with the branch cut along (-inf, 1]; inside
// (-1,1) the principal-value product integral is evaluated through its
// boundary term -i pi P P plus the explicit contour integral over the upper
// unit semicircle, and the delta part contributes lambda (1-nu^2)^{-|m|/2} P_l.
inline CoeffTable coeff_table(Real nu, int m, const OpticalMedium& med, int L,
                              int contour_order = 256,
                              int order = kProductionGaussOrder) {
  const int am = std::abs(m);
  const int N = med.order();
  if (am > N) throw std::invalid_argument("coeff_table: |m| exceeds phase-function order");
  if (L < am) throw std::invalid_argument("coeff_table: L must be >= |m|");
  if (std::abs(nu) == 1.0) throw std::domain_error("coeff_table: nu on the cut endpoint");

  CoeffTable out;
  out.m = m;
  out.nu = nu;
  out.values.assign(static_cast<std::size_t>(L) + 1, Complex{});

  const Real c = med.albedo();
  const int Lw = std::max(L, N);
  const auto h = h_table(nu, m, med, N);
  auto pref = [&](int l) {
    return 2.0 * pi * std::sqrt((2 * l + 1) / (4.0 * pi) * detail::factorial_ratio(l, m));
  };
  auto weight = [&](int lpp) {
    return med.f(lpp) * (2 * lpp + 1) * detail::factorial_ratio(lpp, m) *
           h[static_cast<std::size_t>(lpp)];
  };

  if (std::abs(nu) > 1.0) {
    auto pq = legendre_PQ(nu, m, Lw);
    for (int l = am; l <= L; ++l) {
      Real sum = 0;
      for (int lpp = am; lpp <= N; ++lpp) {
        const int lo = std::min(l, lpp), hi = std::max(l, lpp);
        sum += weight(lpp) * 2.0 * pq.Q[static_cast<std::size_t>(hi)] *
               pq.P[static_cast<std::size_t>(lo)];
      }
      out.values[static_cast<std::size_t>(l)] = pref(l) * 0.5 * c * nu * sum;
    }
    return out;
  }

  // Continuum branch.
  const Real lam = lambda_weight(nu, m, med, order);
  auto Fnu = ferrers_p_row(nu, m, Lw);
  const QuadratureRule& crule = gauss_legendre(contour_order);
  // Contour samples z = e^{i theta}, theta in (0, pi), with mapped weights.
  std::vector<Complex> zs(crule.nodes.size());
  std::vector<Complex> dz(crule.nodes.size());
  std::vector<std::vector<Complex>> Fz(crule.nodes.size());
  for (std::size_t i = 0; i < crule.nodes.size(); ++i) {
    const Real th = 0.5 * pi * (crule.nodes[i] + 1.0);
    zs[i] = std::exp(Complex(0.0, th));
    dz[i] = Complex(0.0, 0.5 * pi * crule.weights[i]) * zs[i];
    Fz[i] = ferrers_p_row(zs[i], m, Lw);
  }
  const Real msign = (am % 2 == 0) ? 1.0 : -1.0;
  for (int l = am; l <= L; ++l) {
    Complex sum{};
    for (int lpp = am; lpp <= N; ++lpp) {
      Complex contour{};
      for (std::size_t i = 0; i < zs.size(); ++i)
        contour += Fz[i][static_cast<std::size_t>(lpp)] * Fz[i][static_cast<std::size_t>(l)] /
                   (nu - zs[i]) * dz[i];
      const Complex bracket =
          Complex(0.0, -pi) * Fnu[static_cast<std::size_t>(lpp)] *
              Fnu[static_cast<std::size_t>(l)] - contour;
      sum += weight(lpp) * bracket;
    }
    out.values[static_cast<std::size_t>(l)] =
        pref(l) * (0.5 * c * nu * msign * sum +
                   lam * std::pow(1.0 - nu * nu, -0.5 * am) * Fnu[static_cast<std::size_t>(l)]);
  }
  return out;
}

}  // namespace caseflux

#endif
