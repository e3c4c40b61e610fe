#ifndef CASEFLUX_MEDIUM_HPP
#define CASEFLUX_MEDIUM_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "caseflux/common.hpp"

namespace caseflux {

// Homogeneous optical medium: absorption/scattering coefficients in 1/cm and
// the phase-function expansion coefficients f_0..f_N (f_0 = 1).  All lengths
// elsewhere in the library are measured in units of the mean free path
// 1/(mu_a + mu_s); the medium keeps the dimensional values and exposes the
// conversion.
class OpticalMedium {
public:
  OpticalMedium(Real mu_a, Real mu_s, std::vector<Real> f)
      : mu_a_(mu_a), mu_s_(mu_s), f_(std::move(f)) {
    if (!(mu_a_ > 0) || !(mu_s_ > 0))
      throw std::invalid_argument("OpticalMedium: mu_a and mu_s must be positive");
    if (f_.empty()) f_.push_back(1.0);
    if (std::abs(f_[0] - 1.0) > 1e-14)
      throw std::invalid_argument("OpticalMedium: f_0 must be 1 (phase-function normalization)");
  }

  // Isotropic or linearly anisotropic medium.
  static OpticalMedium linear(Real mu_a, Real mu_s, Real f1) {
    if (f1 == 0.0) return OpticalMedium(mu_a, mu_s, {1.0});
    return OpticalMedium(mu_a, mu_s, {1.0, f1});
  }

  Real mu_a() const { return mu_a_; }
  Real mu_s() const { return mu_s_; }
  Real mu_t() const { return mu_a_ + mu_s_; }
  Real albedo() const { return mu_s_ / (mu_a_ + mu_s_); }
  int order() const { return static_cast<int>(f_.size()) - 1; }

  // f_l, implicitly zero above the phase-function order.
  Real f(int l) const {
    if (l < 0) throw std::invalid_argument("OpticalMedium::f: negative index");
    return l <= order() ? f_[static_cast<std::size_t>(l)] : 0.0;
  }

  // sigma_l = 1 - c f_l for l <= N and 1 above.
  Real sigma(int l) const {
    if (l < 0) throw std::invalid_argument("OpticalMedium::sigma: negative index");
    return 1.0 - albedo() * f(l);
  }

  // Dimensional length (cm) -> mean free paths, and back.
  Real to_mfp(Real length_cm) const { return length_cm * mu_t(); }
  Real from_mfp(Real length_mfp) const { return length_mfp / mu_t(); }

private:
  Real mu_a_;
  Real mu_s_;
  std::vector<Real> f_;
};

struct SigmaTable {
  std::vector<Real> sigma;  // index l = 0..L
};

inline Real albedo(const OpticalMedium& m) { return m.albedo(); }

// f_l = g^l, truncated at N_trunc.
inline std::vector<Real> henyey_greenstein_coeffs(Real g, int n_trunc) {
  if (!(std::abs(g) < 1.0))
    throw std::invalid_argument("henyey_greenstein_coeffs: |g| must be < 1");
  if (n_trunc < 0)
    throw std::invalid_argument("henyey_greenstein_coeffs: negative truncation");
  std::vector<Real> f(static_cast<std::size_t>(n_trunc) + 1);
  f[0] = 1.0;
  for (int l = 1; l <= n_trunc; ++l) f[static_cast<std::size_t>(l)] = f[static_cast<std::size_t>(l - 1)] * g;
  return f;
}

inline SigmaTable sigma_table(const OpticalMedium& m, int L) {
  if (L < m.order())
    throw std::invalid_argument("sigma_table: L must be at least the phase-function order");
  SigmaTable t;
  t.sigma.resize(static_cast<std::size_t>(L) + 1);
  for (int l = 0; l <= L; ++l) t.sigma[static_cast<std::size_t>(l)] = m.sigma(l);
  return t;
}

}  // namespace caseflux

#endif
