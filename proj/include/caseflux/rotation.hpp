#ifndef CASEFLUX_ROTATION_HPP
#define CASEFLUX_ROTATION_HPP

#include <cmath>
#include <complex>
#include <stdexcept>

#include "caseflux/specfun.hpp"

namespace caseflux {

// Unit direction given by lab-frame polar and azimuthal angles.
struct Direction {
  Real theta = 0.0;
  Real phi = 0.0;
  Real mu() const { return std::cos(theta); }
};

// Geometry of the rotated frame attached to the complex wave direction
// k = (-i nu q, Q(nu q)) with Q = sqrt(1 + (nu q)^2).  The frame's polar
// angle is imaginary (cos = Q >= 1, sin = i|nu q|); its azimuth follows the
// sign-of-nu rule.  At q = 0 the frame is the lab frame and the azimuth is
// fixed to zero so the rotation degenerates to the identity.
struct FrameParams {
  Real nu;
  Real qx, qy;
  Real qmag;
  Real phi_q;
  Real x;   // nu * qmag
  Real Q;   // sqrt(1 + x^2)
  Real phi_k;

  FrameParams(Real nu_, Real qx_, Real qy_) : nu(nu_), qx(qx_), qy(qy_) {
    qmag = std::hypot(qx, qy);
    x = nu * qmag;
    Q = std::sqrt(1.0 + x * x);
    if (qmag == 0.0) {
      phi_q = 0.0;
      phi_k = 0.0;
    } else {
      phi_q = std::atan2(qy, qx);
      phi_k = (nu > 0.0) ? phi_q + pi : phi_q;
    }
  }

  static FrameParams lab(Real nu_) { return FrameParams(nu_, 0.0, 0.0); }
};

// Cosine of the polar angle of s in the rotated frame:
// mu(k) = -i nu q sin(theta) cos(phi - phi_q) + Q(nu q) cos(theta).
inline Complex mu_rotated(const Direction& s, const FrameParams& fp) {
  if (fp.qmag == 0.0) return Complex(std::cos(s.theta), 0.0);
  const Real st = std::sin(s.theta);
  return Complex(fp.Q * std::cos(s.theta), -fp.x * st * std::cos(s.phi - fp.phi_q));
}

// Lab-frame spherical harmonic with the Condon-Shortley phase.
inline Complex sph_harmonic(int l, int m, const Direction& s) {
  if (std::abs(m) > l) throw std::invalid_argument("sph_harmonic: |m| > l");
  auto P = ferrers_p_row(std::cos(s.theta), m, l);
  const Real norm = std::sqrt((2 * l + 1) / (4.0 * pi) * detail::factorial_ratio(l, m));
  return norm * P[static_cast<std::size_t>(l)] *
         std::exp(Complex(0.0, m * s.phi));
}

// Rotated spherical harmonic Y_lm(s; k) = sum_{m'} e^{-i m' phi_k}
// d^l_{m'm}(theta_k) Y_{lm'}(s), with the Wigner d continued to the
// imaginary frame angle.
inline Complex rotated_harmonic(int l, int m, const Direction& s, const FrameParams& fp,
                                const WignerD& w) {
  if (std::abs(m) > l || l > w.l_max())
    throw std::invalid_argument("rotated_harmonic: indices out of range");
  Complex sum{};
  for (int mp = -l; mp <= l; ++mp) {
    sum += std::exp(Complex(0.0, -mp * fp.phi_k)) * w.d(l, mp, m) * sph_harmonic(l, mp, s);
  }
  return sum;
}

inline Complex rotated_harmonic(int l, int m, const Direction& s, const FrameParams& fp) {
  WignerD w(fp.x, l);
  return rotated_harmonic(l, m, s, fp, w);
}

// Combined azimuthal factor (1 - mu(k)^2)^{|m|/2} e^{i m phi(k)}.  This is
// the single-valued product sin(theta_rot) e^{+-i phi_rot} raised to the
// |m|-th power; the +1 and -1 cases come straight from the l = 1 rotated
// harmonics and higher |m| by powers, so no branch of the square root is
// ever taken.
inline Complex azimuthal_factor(const Direction& s, const FrameParams& fp, int m) {
  if (m == 0) return Complex(1.0, 0.0);
  static const Real k1 = std::sqrt(8.0 * pi / 3.0);
  WignerD w(fp.x, 1);
  Complex e;
  if (m > 0)
    e = -k1 * rotated_harmonic(1, 1, s, fp, w);
  else
    e = k1 * rotated_harmonic(1, -1, s, fp, w);
  return detail::ipow(e, std::abs(m));
}

// e^{i m phi(k)} alone; singular where mu(k)^2 = 1.  Kept for diagnostics;
// physical assemblies use azimuthal_factor.
inline Complex azimuthal_phase(const Direction& s, const FrameParams& fp, int m) {
  const Complex mu = mu_rotated(s, fp);
  const Complex w2 = Complex(1.0, 0.0) - mu * mu;
  if (std::abs(w2) < 1e-14)
    throw std::domain_error("azimuthal_phase: direction on the rotated pole");
  const int am = std::abs(m);
  return azimuthal_factor(s, fp, m) / std::pow(w2, 0.5 * am);
}

}  // namespace caseflux

#endif
