#ifndef CASEFLUX_GREENS_HPP
#define CASEFLUX_GREENS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "caseflux/eigenfunctions.hpp"

namespace caseflux {

struct GreensSettings {
  int nu_order = 200;       // Gauss order for the continuum nu-integral
  int q_azimuthal = 32;     // trapezoid nodes for the azimuthal q-angle
  int q_panel_order = 16;   // Gauss order per radial q-panel
  Real q_cut_tol = 1e-14;   // radial cutoff from the slowest mode decay
  Real dz_floor = 0.1;      // minimum |z - z0| for pointwise 3D evaluation
};

// Immutable bundle of medium, discrete spectra for all azimuthal orders and
// quadrature settings; shareable across threads.
class GreensEvaluator {
public:
  explicit GreensEvaluator(const OpticalMedium& med, GreensSettings set = {})
      : med_(med), set_(set) {
    const int N = med_.order();
    spectra_.reserve(static_cast<std::size_t>(N) + 1);
    inv_norm_.resize(static_cast<std::size_t>(N) + 1);
    const QuadratureRule& rule = gauss_legendre(set_.nu_order);
    for (int m = 0; m <= N; ++m) {
      spectra_.push_back(find_discrete(m, med_));
      for (Real r : spectra_.back().residuals)
        if (r > 1e-8) throw std::runtime_error("GreensEvaluator: unconverged eigenvalue");
      auto& cache = inv_norm_[static_cast<std::size_t>(m)];
      cache.resize(rule.nodes.size());
      parallel_for(rule.nodes.size(), [&](std::size_t i) {
        cache[i] = 1.0 / norm_continuum(0.5 * (rule.nodes[i] + 1.0), m, med_);
      });
    }
  }

  const OpticalMedium& medium() const { return med_; }
  const GreensSettings& settings() const { return set_; }
  const SpectrumData& spectrum(int m) const {
    return spectra_[static_cast<std::size_t>(std::abs(m))];
  }
  // 1/N^m(nu) precomputed at the (0,1)-mapped nodes of the nu rule.
  Real inv_norm_at(int m, std::size_t node) const {
    return inv_norm_[static_cast<std::size_t>(std::abs(m))][node];
  }

private:
  OpticalMedium med_;
  GreensSettings set_;
  std::vector<SpectrumData> spectra_;
  std::vector<std::vector<Real>> inv_norm_;
};

// Reduced 1D kernel for a single azimuthal order: the mu-space content of the
// plane-source Green's function without the e^{im(phi-phi0)} factor.  The
// continuum's delta-delta part (support mu = mu0 only) is excluded; callers
// keep directions off that set.
inline Real green_kernel_1d_m(const GreensEvaluator& ge, int m, Real dz, int sign,
                              Real mu, Real mu0) {
  if (!(dz > 0.0)) throw std::domain_error("green_kernel_1d_m: need z != z0");
  const OpticalMedium& med = ge.medium();
  const int am = std::abs(m);
  if (am > med.order()) return 0.0;
  const Real c = med.albedo();
  const Real s = (sign >= 0) ? 1.0 : -1.0;
  const Real W = std::pow((1.0 - mu * mu) * (1.0 - mu0 * mu0), 0.5 * am);

  Real total = 0.0;
  const SpectrumData& spec = ge.spectrum(m);
  for (std::size_t j = 0; j < spec.eigenvalues.size(); ++j) {
    const Real nuj = s * spec.eigenvalues[j];
    const Real p = 0.5 * c * nuj * g_kernel(nuj, mu, m, med) / (nuj - mu);
    const Real p0 = 0.5 * c * nuj * g_kernel(nuj, mu0, m, med) / (nuj - mu0);
    total += p * p0 * W * std::exp(-dz / spec.eigenvalues[j]) / spec.norms[j];
  }

  const QuadratureRule& rule = gauss_legendre(ge.settings().nu_order);
  auto Hnum = [&](Real nu) {
    const Real snu = s * nu;
    return 0.25 * c * c * nu * nu * g_kernel(snu, mu, m, med) * g_kernel(snu, mu0, m, med) *
           std::exp(-dz / nu);
  };
  std::vector<Real> Hvals(rule.nodes.size());
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    Hvals[i] = Hnum(0.5 * (rule.nodes[i] + 1.0)) * ge.inv_norm_at(m, i);
  auto pv = [&](Real a) {
    const bool inside = a > 0.0 && a < 1.0;
    const Real fa = inside ? Hnum(a) / norm_continuum(a, m, med) : 0.0;
    Real sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const Real nu = 0.5 * (rule.nodes[i] + 1.0);
      sum += 0.5 * rule.weights[i] * (Hvals[i] - fa) / (nu - a);
    }
    return inside ? sum + fa * std::log((1.0 - a) / a) : sum;
  };
  if (std::abs(mu - mu0) < 1e-12)
    throw std::domain_error("green_kernel_1d_m: coincident polar directions");
  // PV-PV part by partial fractions: each pole handled separately.
  total += W * s / (mu - mu0) * (pv(s * mu) - pv(s * mu0));
  // delta-PV cross terms, one per direction whose cosine lies on the
  // integration side.
  auto delta_term = [&](Real a, Real b) {
    // a carries the delta, b the principal-value factor.
    if (!(s * a > 1e-12 && s * a < 1.0 - 1e-12)) return 0.0;
    const Real lam = lambda_weight(std::abs(a), m, med);
    return lam * std::pow(1.0 - a * a, -Real(am)) * 0.5 * c * a *
           g_kernel(a, b, m, med) / (a - b) * W * std::exp(-dz / std::abs(a)) /
           norm_continuum(std::abs(a), m, med);
  };
  total += delta_term(mu, mu0) + delta_term(mu0, mu);
  return total;
}

// One-dimensional (plane-integrated) Green's function.
inline Real green_1d(const GreensEvaluator& ge, Real z, const Direction& s, Real z0,
                     const Direction& s0) {
  if (z == z0) throw std::domain_error("green_1d: source plane excluded");
  const Real dz = std::abs(z - z0);
  const int sign = (z > z0) ? 1 : -1;
  const Real mu = std::cos(s.theta), mu0 = std::cos(s0.theta);
  Real sum = green_kernel_1d_m(ge, 0, dz, sign, mu, mu0);
  for (int m = 1; m <= ge.medium().order(); ++m)
    sum += 2.0 * std::cos(m * (s.phi - s0.phi)) * green_kernel_1d_m(ge, m, dz, sign, mu, mu0);
  return sum / (2.0 * pi);
}

// Discrete-mode part of the transverse-frequency integrand.  The direction
// factors have denominators nu_j - mu_rot(nu_j); along each direction with
// ssign cos(theta) > 0 the rotated cosine sweeps through nu_j on the ring
// q = sqrt(1/cos^2 theta - 1/nu_j^2) at the perpendicular azimuth, so this
// part carries a sharp but integrable ridge there.
inline Complex green_q_discrete(const GreensEvaluator& ge, Real qx, Real qy, Real z,
                                const Direction& s, Real z0, const Direction& s0) {
  if (z == z0) throw std::domain_error("green_q_discrete: source plane excluded");
  const Real dz = std::abs(z - z0);
  const Real ssign = (z > z0) ? 1.0 : -1.0;
  const OpticalMedium& med = ge.medium();
  Complex total{};
  for (int m = -med.order(); m <= med.order(); ++m) {
    const SpectrumData& spec = ge.spectrum(m);
    for (std::size_t j = 0; j < spec.eigenvalues.size(); ++j) {
      const Real nuj = ssign * spec.eigenvalues[j];
      FrameParams fp(nuj, qx, qy);
      const SingularEigenfunction sef(nuj, m, med, true, 0.0, 0.0);
      const Complex a = eval_Phi(sef, s, fp);
      const Complex b = eval_Phi(sef, s0, fp);
      total += a * std::conj(b) * std::exp(-fp.Q * dz / spec.eigenvalues[j]) /
               (fp.Q * spec.norms[j]);
    }
  }
  return total;
}

// Continuum part of the transverse-frequency integrand.
inline Complex green_q_continuum(const GreensEvaluator& ge, Real qx, Real qy, Real z,
                                 const Direction& s, Real z0, const Direction& s0) {
  if (z == z0) throw std::domain_error("green_q_continuum: source plane excluded");
  const Real dz = std::abs(z - z0);
  const Real ssign = (z > z0) ? 1.0 : -1.0;
  const OpticalMedium& med = ge.medium();
  const Real c = med.albedo();
  const Real qmag = std::hypot(qx, qy);

  Complex total{};
  // Nu-integral over (0,1).  Poles of the two regular-part factors
  // sit at complex nu; when one drifts close to the integration segment its
  // singular part is subtracted and integrated in closed form.
  const QuadratureRule& rule = gauss_legendre(ge.settings().nu_order);
  struct Pole {
    Complex nu_star;
  };
  auto find_pole = [&](const Direction& dir, bool conjugate) -> std::vector<Pole> {
    std::vector<Pole> out;
    const Real ct = std::cos(dir.theta), st = std::sin(dir.theta);
    const Real cdp = std::cos(dir.phi - std::atan2(qy, qx));
    // Factor D(nu) = s nu - mu_rot(nu) with mu_rot = Q(s nu q) ct - i s nu q st cdp,
    // conjugated for the source-direction factor.  With u = s nu and
    // A = 1 - i imsign q st cdp the root equation u A = ct sqrt(1 + u^2 q^2)
    // is solved in closed form; squaring adds a spurious sign, so both
    // candidates are checked against D directly.
    const Real imsign = conjugate ? 1.0 : -1.0;
    auto D = [&](Complex nu) {
      const Complex x = ssign * nu * qmag;
      const Complex Q = std::sqrt(1.0 + x * x);
      return ssign * nu - (Q * ct + imsign * Complex(0, 1) * x * st * cdp);
    };
    if (ssign * ct <= 0.0) return out;
    const Complex A = Complex(1.0, -imsign * qmag * st * cdp);
    const Complex disc = A * A - Complex(qmag * qmag * ct * ct, 0.0);
    if (std::abs(disc) < 1e-24) return out;
    const Complex base = ct / std::sqrt(disc);
    for (Real sgn : {1.0, -1.0}) {
      const Complex nu = ssign * sgn * base;
      if (std::abs(D(nu)) < 1e-9 && std::abs(nu.imag()) < 0.3 && nu.real() > -0.3 &&
          nu.real() < 1.3)
        out.push_back({nu});
    }
    return out;
  };

  // The singular factors do not depend on m; poles are found once.
  auto poles_a = find_pole(s, false);
  auto poles_b = find_pole(s0, true);
  std::vector<Pole> poles(poles_a);
  poles.insert(poles.end(), poles_b.begin(), poles_b.end());

  const int N = med.order();
  const int nm = 2 * N + 1;
  static const Real k1 = std::sqrt(8.0 * pi / 3.0);
  // All azimuthal orders at one nu: the frame, rotated cosines and the two
  // l = 1 azimuthal factors are shared across m, and g is even in m.
  auto values_at = [&](Real nu, const std::vector<Real>& inv_norm,
                       std::vector<Complex>& out) {
    const Real snu = ssign * nu;
    FrameParams fp(snu, qx, qy);
    const Complex muk = mu_rotated(s, fp);
    const Complex muk0 = mu_rotated(s0, fp);
    const Complex decay = std::exp(-fp.Q * dz / nu) / fp.Q;
    WignerD w(fp.x, 1);
    const Complex ep = -k1 * rotated_harmonic(1, 1, s, fp, w);
    const Complex em = k1 * rotated_harmonic(1, -1, s, fp, w);
    const Complex ep0 = -k1 * rotated_harmonic(1, 1, s0, fp, w);
    const Complex em0 = k1 * rotated_harmonic(1, -1, s0, fp, w);
    for (int am = 0; am <= N; ++am) {
      const Complex p = 0.5 * c * snu * g_kernel(snu, muk, am, med) / (snu - muk);
      const Complex p0 =
          std::conj(0.5 * c * snu * g_kernel(snu, muk0, am, med) / (snu - muk0));
      const Complex base = p * p0 * decay * inv_norm[static_cast<std::size_t>(am)];
      if (am == 0) {
        out[static_cast<std::size_t>(N)] = base;
      } else {
        out[static_cast<std::size_t>(N + am)] =
            base * detail::ipow(ep, am) * std::conj(detail::ipow(ep0, am));
        out[static_cast<std::size_t>(N - am)] =
            base * detail::ipow(em, am) * std::conj(detail::ipow(em0, am));
      }
    }
  };

  std::vector<Real> invn(static_cast<std::size_t>(N) + 1);
  std::vector<Complex> vals(static_cast<std::size_t>(nm));
  // The full integrand is num / (D1 D2) per m; each residue at a simple
  // near-segment root is extracted from two real evaluations straddling the
  // root, fitting value = r/(nu - nu*) + const.  The straddle keeps both
  // sample distances O(h), so the estimate stays smooth as the root crosses
  // the axis.
  std::vector<std::vector<Complex>> residues(
      poles.size(), std::vector<Complex>(static_cast<std::size_t>(nm)));
  std::vector<Complex> vals2(static_cast<std::size_t>(nm));
  for (std::size_t k = 0; k < poles.size(); ++k) {
    const Real h = 0.04;
    const Real x = poles[k].nu_star.real();
    Real a1 = std::min(0.999, std::max(0.001, x - h));
    Real a2 = std::min(0.999, std::max(0.001, x + h));
    if (a2 - a1 < h) {
      if (a1 < 0.5) a2 = a1 + h; else a1 = a2 - h;
    }
    const Complex d1 = Complex(a1, 0) - poles[k].nu_star;
    const Complex d2 = Complex(a2, 0) - poles[k].nu_star;
    for (int am = 0; am <= N; ++am)
      invn[static_cast<std::size_t>(am)] = 1.0 / norm_continuum(a1, am, med);
    values_at(a1, invn, vals);
    for (int am = 0; am <= N; ++am)
      invn[static_cast<std::size_t>(am)] = 1.0 / norm_continuum(a2, am, med);
    values_at(a2, invn, vals2);
    const Complex det = 1.0 / d1 - 1.0 / d2;
    for (int mi = 0; mi < nm; ++mi)
      residues[k][static_cast<std::size_t>(mi)] =
          (vals[static_cast<std::size_t>(mi)] - vals2[static_cast<std::size_t>(mi)]) / det;
  }

  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const Real nu = 0.5 * (rule.nodes[i] + 1.0);
    for (int am = 0; am <= N; ++am)
      invn[static_cast<std::size_t>(am)] = ge.inv_norm_at(am, i);
    values_at(nu, invn, vals);
    for (int mi = 0; mi < nm; ++mi) {
      Complex v = vals[static_cast<std::size_t>(mi)];
      for (std::size_t k = 0; k < poles.size(); ++k)
        v -= residues[k][static_cast<std::size_t>(mi)] /
             (Complex(nu, 0) - poles[k].nu_star);
      total += 0.5 * rule.weights[i] * v;
    }
  }
  for (std::size_t k = 0; k < poles.size(); ++k) {
    const Complex tail =
        std::log((Complex(1.0, 0) - poles[k].nu_star) / (-poles[k].nu_star));
    for (int mi = 0; mi < nm; ++mi)
      total += residues[k][static_cast<std::size_t>(mi)] * tail;
  }

  // Delta share of the continuum modes.  Each singular factor's distributional
  // part contributes lambda(nu*) w^{-|m|} in place of the regular factor's
  // residue numerator (c nu g / 2); lambda continues off the axis as
  // Lambda(z) -+ i pi (c z / 2) g(z,z) w^{|m|} by half-plane.  The branch
  // switch across the axis cancels the +-i pi jump of the plain integral, so
  // the assembled integrand stays continuous where a pole crosses the cut.
  // Far poles are faded smoothly; their delta reading is not meaningful.
  for (std::size_t k = 0; k < poles.size(); ++k) {
    const Complex nc0 = poles[k].nu_star;
    const Real chi = std::exp(-std::pow(nc0.imag() / 0.1, 4.0));
    if (chi < 1e-14) continue;
    Complex nc = nc0;
    if (std::abs(nc.imag()) < 1e-13) nc += Complex(0.0, 1e-13);
    // The imaginary part of the add-back log is +-pi for crossings on the
    // cut and continuous away from it; its share weight is slaved to the
    // weight on the dispersion part so the add-back's branch jump is always
    // cancelled exactly: at a crossing the total jump is
    // 2 pi i r (1 - 2 w1 + w2) per unit residue, zero when w1 = (g + w2)/2
    // with g the on-cut gate.
    const Real imL =
        std::log((Complex(1.0, 0) - nc) / (-nc)).imag();
    const Real tw = std::max(std::abs(nc0.imag()), 1e-12);
    const Real gate = 1.0 / ((1.0 + std::exp(-nc0.real() / tw)) *
                             (1.0 + std::exp(-(1.0 - nc0.real()) / tw)));
    // Crossings beyond either endpoint carry no delta reading; a fixed-width
    // fade in the real part suppresses the dispersion share there.
    const Real xw = 0.03;
    const Real gate2 = 1.0 / ((1.0 + std::exp(-nc0.real() / xw)) *
                              (1.0 + std::exp(-(1.0 - nc0.real()) / xw)));
    const Real w2 = chi * gate * gate2;
    const Real w1 = 0.5 * (chi * gate + w2);
    for (int am = 0; am <= N; ++am) {
      const Complex g2 = g_kernel(nc, nc, am, med);
      const Complex w = detail::ipow(Complex(1.0, 0.0) - nc * nc, am);
      const Complex coef =
          w2 * dispersion(nc, am, med) * 2.0 / (c * nc * g2 * w) -
          Complex(0.0, 2.0 * imL * w1);
      if (am == 0) {
        total += residues[k][static_cast<std::size_t>(N)] * coef;
      } else {
        total += residues[k][static_cast<std::size_t>(N + am)] * coef;
        total += residues[k][static_cast<std::size_t>(N - am)] * coef;
      }
    }
  }
  return total;
}

// Integrand of the transverse Fourier integral: the braced mode sum of the 3D
// Green's function at transverse frequency q, before the e^{iq.(rho-rho0)}
// factor and the (2 pi)^-3 measure.  At q = 0 this is exactly 2 pi times the
// 1D Green's function.
inline Complex green_q_integrand(const GreensEvaluator& ge, Real qx, Real qy, Real z,
                                 const Direction& s, Real z0, const Direction& s0) {
  if (z == z0) throw std::domain_error("green_q_integrand: source plane excluded");
  if (qx == 0.0 && qy == 0.0) {
    const Real dz = std::abs(z - z0);
    const int sign = (z > z0) ? 1 : -1;
    const Real mu = std::cos(s.theta), mu0 = std::cos(s0.theta);
    Real sum = green_kernel_1d_m(ge, 0, dz, sign, mu, mu0);
    for (int m = 1; m <= ge.medium().order(); ++m)
      sum += 2.0 * std::cos(m * (s.phi - s0.phi)) *
             green_kernel_1d_m(ge, m, dz, sign, mu, mu0);
    return Complex(sum, 0.0);
  }
  return green_q_discrete(ge, qx, qy, z, s, z0, s0) +
         green_q_continuum(ge, qx, qy, z, s, z0, s0);
}

// Three-dimensional Green's function; (dx, dy) is the transverse offset
// rho - rho0.
inline Real green_3d(const GreensEvaluator& ge, Real dx, Real dy, Real z,
                     const Direction& s, Real z0, const Direction& s0) {
  const Real dz = std::abs(z - z0);
  if (dz < ge.settings().dz_floor)
    throw std::domain_error("green_3d: |z - z0| below the evaluation floor");
  const GreensSettings& set = ge.settings();
  const Real rho = std::hypot(dx, dy);
  const Real phi_r = (rho > 0.0) ? std::atan2(dy, dx) : 0.0;
  // Radial cutoff: every mode decays at least as e^{-q dz}.
  const Real qmax = -std::log(set.q_cut_tol) / dz;
  // The integrand's sharpest radial feature is the largest mode's 1/Q(nu q)
  // roll-off, of width 1/nu; panels grow geometrically from that scale and
  // are capped so the transverse phase stays resolved per panel.
  const auto& eig0 = ge.spectrum(0).eigenvalues;
  const Real q_scale = 0.5 / (eig0.empty() ? 1.0 : eig0[0]);
  const Real w_max = pi / (rho + 1.0);
  std::vector<Real> base{0.0};
  Real width = std::min(q_scale, qmax);
  while (base.back() < qmax) {
    base.push_back(std::min(qmax, base.back() + width));
    width = std::min(2.0 * width, w_max);
  }
  auto insert_edge = [](std::vector<Real>& ed, Real x) {
    auto it = std::lower_bound(ed.begin(), ed.end(), x);
    if (it != ed.end() && std::abs(*it - x) <= 1e-9) return;
    if (it != ed.begin() && std::abs(*(it - 1) - x) <= 1e-9) return;
    ed.insert(it, x);
  };
  // Continuum edges: a factor's axis crossing leaves the spectral interval
  // through the endpoint at q = |tan(theta)|; the ring profile has a corner
  // there, so panels must not straddle it.
  const Real ssign = (z > z0) ? 1.0 : -1.0;
  std::vector<Real> edges_c(base);
  for (const Direction* d : {&s, &s0}) {
    if (ssign * std::cos(d->theta) <= 0.0) continue;
    const Real qc = std::abs(std::tan(d->theta));
    if (qc > 1e-6 && qc < qmax - 1e-6) insert_edge(edges_c, qc);
  }
  // Discrete-part singular rings: each eigenvalue's direction denominator
  // vanishes on q = sqrt(1/cos^2 theta - 1/nu_j^2), leaving an integrable
  // 1/x ridge with a finite jump in the ring profile.  Radial panels are
  // graded geometrically into each such ring from both sides.
  std::vector<Real> qJ;
  Real ridge_fac = 1.0;
  for (const Direction* d : {&s, &s0}) {
    const Real ct = std::cos(d->theta);
    if (ssign * ct <= 0.0) continue;
    const Real st = std::abs(std::sin(d->theta));
    for (int m = -ge.medium().order(); m <= ge.medium().order(); ++m)
      for (Real nuj : ge.spectrum(m).eigenvalues) {
        const Real v = 1.0 / (ct * ct) - 1.0 / (nuj * nuj);
        if (v <= 0.0) continue;
        const Real q = std::sqrt(v);
        if (q <= 1e-6 || q >= qmax - 1e-6) continue;
        qJ.push_back(q);
        ridge_fac = std::min(ridge_fac, ct * ct / std::max(st, 1e-3));
      }
  }
  std::sort(qJ.begin(), qJ.end());
  qJ.erase(std::unique(qJ.begin(), qJ.end(),
                       [](Real a, Real b) { return b - a < 1e-12 * (1.0 + b); }),
           qJ.end());
  std::vector<Real> edges_d(base);
  for (Real q : qJ) {
    insert_edge(edges_d, q);
    for (Real off = 0.25; off > 2e-10 * (1.0 + q); off *= 0.5) {
      if (q - off > 1e-9) insert_edge(edges_d, q - off);
      if (q + off < qmax - 1e-9) insert_edge(edges_d, q + off);
    }
  }

  // Azimuthal breaks: the pole of either regular factor crosses the real
  // axis where the direction azimuth is perpendicular to q, so the integrand
  // has localized curvature at these four angles.  Arcs between them get
  // Gauss panels graded toward both ends; anchoring the grid to the breaks
  // also makes the result exactly invariant under a global rotation.
  std::vector<Real> breaks;
  for (Real b : {s.phi - 0.5 * pi, s.phi + 0.5 * pi, s0.phi - 0.5 * pi,
                 s0.phi + 0.5 * pi}) {
    Real w = std::fmod(b, 2.0 * pi);
    if (w < 0.0) w += 2.0 * pi;
    breaks.push_back(w);
  }
  std::sort(breaks.begin(), breaks.end());
  std::vector<Real> arcs;  // arc start angles; lengths follow cyclically
  for (Real b : breaks)
    if (arcs.empty() || b - arcs.back() > 1e-9) arcs.push_back(b);
  if (arcs.size() > 1 && arcs.front() + 2.0 * pi - arcs.back() <= 1e-9)
    arcs.pop_back();

  const int p_az = std::max(4, set.q_azimuthal / 4);
  const Real w0 = 0.64 / set.q_azimuthal;
  const QuadratureRule& azr = gauss_legendre(p_az);
  // Graded edges for an arc of length L, growing geometrically from w0a at
  // both ends.
  auto arc_edges = [&](Real L, Real w0a) {
    std::vector<Real> left{0.0};
    Real w = w0a;
    while (left.back() + w < 0.5 * L) {
      left.push_back(left.back() + w);
      w *= 2.0;
    }
    std::vector<Real> ed(left);
    for (auto it = left.rbegin(); it != left.rend(); ++it) {
      const Real e = L - *it;
      if (e > ed.back() + 1e-12) ed.push_back(e);
    }
    return ed;
  };

  // Ring-by-ring integration of one part of the integrand.  Rings close to a
  // singular radius get azimuthal panels graded down to the ridge width,
  // which shrinks in proportion to the radial distance.
  auto integrate = [&](const std::vector<Real>& edges, const QuadratureRule& rad,
                       auto&& part, bool to_ridge) -> Real {
    const std::size_t panels = edges.size() - 1;
    std::vector<Real> partial(panels, 0.0);
    parallel_for(panels, [&](std::size_t pi_) {
      const Real a = edges[pi_];
      const Real b = edges[pi_ + 1];
      Real acc = 0.0;
      for (std::size_t i = 0; i < rad.nodes.size(); ++i) {
        const Real q = 0.5 * (a + b) + 0.5 * (b - a) * rad.nodes[i];
        const Real wq = 0.5 * (b - a) * rad.weights[i] * q;
        Real w0a = w0;
        if (to_ridge && !qJ.empty()) {
          Real dmin = qmax;
          for (Real qq : qJ) dmin = std::min(dmin, std::abs(q - qq));
          w0a = std::max(1e-11, std::min(w0, 0.5 * ridge_fac * dmin));
        }
        // Panels wide enough to see the transverse phase turn are subdivided.
        const Real wcap =
            std::min(0.7, std::max(0.15, 1.5 * p_az / (q * rho + 1.0)));
        for (std::size_t ai = 0; ai < arcs.size(); ++ai) {
          const Real a0 = arcs[ai];
          const Real L = (arcs.size() == 1)
                             ? 2.0 * pi
                             : (ai + 1 < arcs.size() ? arcs[ai + 1] - a0
                                                     : arcs[0] + 2.0 * pi - a0);
          const auto ed = arc_edges(L, w0a);
          for (std::size_t pe = 0; pe + 1 < ed.size(); ++pe) {
            const int nsub =
                1 + static_cast<int>((ed[pe + 1] - ed[pe]) / wcap);
            const Real wp = (ed[pe + 1] - ed[pe]) / nsub;
            for (int su = 0; su < nsub; ++su) {
              const Real pa = a0 + ed[pe] + su * wp;
              for (std::size_t j = 0; j < azr.nodes.size(); ++j) {
                const Real phq = pa + 0.5 * wp * (azr.nodes[j] + 1.0);
                const Real wph = 0.5 * wp * azr.weights[j];
                const Complex e =
                    std::exp(Complex(0.0, q * rho * std::cos(phq - phi_r)));
                const Complex S = part(ge, q * std::cos(phq), q * std::sin(phq),
                                       z, s, z0, s0);
                acc += wq * wph * (e * S).real();
              }
            }
          }
        }
      }
      partial[pi_] = acc;
    });
    Real total = 0.0;
    for (Real v : partial) total += v;
    return total;
  };

  const QuadratureRule& rad_c = gauss_legendre(set.q_panel_order);
  const QuadratureRule& rad_d = gauss_legendre(std::max(6, set.q_panel_order / 2));
  const Real total =
      integrate(edges_c, rad_c,
                [](const GreensEvaluator& g, Real qx, Real qy, Real zz,
                   const Direction& a1, Real zz0, const Direction& a2) {
                  return green_q_continuum(g, qx, qy, zz, a1, zz0, a2);
                },
                false) +
      integrate(edges_d, rad_d,
                [](const GreensEvaluator& g, Real qx, Real qy, Real zz,
                   const Direction& a1, Real zz0, const Direction& a2) {
                  return green_q_discrete(g, qx, qy, zz, a1, zz0, a2);
                },
                true);
  return total / ((2.0 * pi) * (2.0 * pi) * (2.0 * pi));
}

}  // namespace caseflux

#endif
