#ifndef CASEFLUX_SPECFUN_HPP
#define CASEFLUX_SPECFUN_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "caseflux/common.hpp"

namespace caseflux {

namespace detail {

inline Real factorial(int n) {
  static const std::vector<Real> table = [] {
    std::vector<Real> t(171);
    t[0] = 1.0;
    for (int k = 1; k <= 170; ++k) t[static_cast<std::size_t>(k)] = t[static_cast<std::size_t>(k - 1)] * k;
    return t;
  }();
  if (n < 0 || n > 170) throw std::invalid_argument("factorial: out of range");
  return table[static_cast<std::size_t>(n)];
}

// (l-m)!/(l+m)! as a product, valid for signed m with |m| <= l.
inline Real factorial_ratio(int l, int m) {
  Real r = 1.0;
  if (m >= 0) {
    for (int k = l - m + 1; k <= l + m; ++k) r /= k;
  } else {
    for (int k = l + m + 1; k <= l - m; ++k) r *= k;
  }
  return r;
}

}  // namespace detail

// Row of the normalized polynomials p_l^m for l = |m|..L, generated by the
// upward recurrence (l-m+1) p_{l+1} = (2l+1) mu p_l - (l+m) p_{l-1} from the
// constant seed at l = |m|.  Entries below l = |m| are zero.
template <class T>
std::vector<T> p_row(T mu, int m, int L) {
  const int am = std::abs(m);
  if (L < am) throw std::invalid_argument("p_row: L must be >= |m|");
  std::vector<T> p(static_cast<std::size_t>(L) + 1, T{});
  Real seed;
  if (m >= 0) {
    seed = 1.0;  // (2m)!/(2^m m!) = (2m-1)!!
    for (int k = 1; k <= m; ++k) seed *= (2 * k - 1);
  } else {
    seed = (am % 2 == 0 ? 1.0 : -1.0) / (std::pow(2.0, am) * detail::factorial(am));
  }
  p[static_cast<std::size_t>(am)] = T(seed);
  T prev{};  // p_{|m|-1} treated as zero
  for (int l = am; l < L; ++l) {
    T next = (Real(2 * l + 1) * mu * p[static_cast<std::size_t>(l)] - Real(l + m) * prev) / Real(l - m + 1);
    prev = p[static_cast<std::size_t>(l)];
    p[static_cast<std::size_t>(l + 1)] = next;
  }
  return p;
}

// Ferrers-branch associated Legendre P_l^m(w) = (-1)^m (1-w^2)^{|m|/2} p_l^m(w),
// continued off [-1,1] with the principal branch of the square root.
template <class T>
std::vector<T> ferrers_p_row(T w, int m, int L) {
  const int am = std::abs(m);
  std::vector<T> p = p_row(w, m, L);
  T pref = std::pow(T(1) - w * w, Real(am) / 2);
  if (am % 2 == 1) pref = -pref;
  for (auto& v : p) v *= pref;
  return p;
}

struct LegendrePQ {
  std::vector<Real> P;  // P_l^m(nu), l = 0..L (zero below |m|)
  std::vector<Real> Q;  // Q_l^m(nu), Hurwitz-Zweifel cut (-inf, 1]
};

namespace detail {

// Q_l ratios Q_l/Q_{l-1} at order m by the downward continued fraction;
// the minimal solution of the recurrence is reached from r ~ 0 high above.
inline std::vector<Real> q_ratios(Real nu, int m, int L) {
  const Real lg = std::max(std::log(std::abs(nu)), 0.005);
  const int start = L + 60 + std::min(4000, static_cast<int>(12.0 / lg));
  std::vector<Real> r(static_cast<std::size_t>(L) + 1, 0.0);
  Real rn = 0.0;
  for (int l = start; l >= 1; --l) {
    rn = Real(l + m) / ((2 * l + 1) * nu - Real(l - m + 1) * rn);
    if (l <= L) r[static_cast<std::size_t>(l)] = rn;
  }
  return r;
}

// Integer power by repeated squaring; std::pow on a zero complex base
// produces NaN even for exponent zero.
template <class T>
T ipow(T base, int n) {
  T acc = T(1);
  T b = base;
  for (int k = n; k > 0; k >>= 1) {
    if (k & 1) acc *= b;
    b *= b;
  }
  return acc;
}

}  // namespace detail

// Associated Legendre functions of both kinds off the cut, for real nu with
// |nu| > 1.  For nu < -1 the principal-value continuation on the cut is used
// (Q_0 = atanh(1/nu) real), which is what the eigenfunction-coefficient
// parity relation requires.  Upward recurrence is safe for P (dominant
// solution); Q is built from continued-fraction ratios anchored at Q_m^m.
inline LegendrePQ legendre_PQ(Real nu, int m, int L) {
  if (!(std::abs(nu) > 1.0))
    throw std::domain_error("legendre_PQ: argument must satisfy |nu| > 1");
  const int am = std::abs(m);
  if (L < am) throw std::invalid_argument("legendre_PQ: L must be >= |m|");

  auto build = [&](int mm) {
    LegendrePQ out;
    out.P.assign(static_cast<std::size_t>(L) + 1, 0.0);
    out.Q.assign(static_cast<std::size_t>(L) + 1, 0.0);
    const Real s = std::sqrt(nu * nu - 1.0);
    // P_mm^mm = (2mm-1)!! (nu^2-1)^{mm/2}, then upward.
    Real seed = 1.0;
    for (int k = 1; k <= mm; ++k) seed *= (2 * k - 1) * s;
    out.P[static_cast<std::size_t>(mm)] = seed;
    Real prev = 0.0;
    for (int l = mm; l < L; ++l) {
      Real next = ((2 * l + 1) * nu * out.P[static_cast<std::size_t>(l)] - (l + mm) * prev) / Real(l - mm + 1);
      prev = out.P[static_cast<std::size_t>(l)];
      out.P[static_cast<std::size_t>(l + 1)] = next;
    }
    // Q at m = 0 from ratios, then raised in m:
    // A_l^{m+1} = ((l-m) nu A_l^m - (l+m) A_{l-1}^m) / sqrt(nu^2-1), l >= 1.
    // The relation degenerates at l = 0 (Q_{-1}^m is not available), so that
    // entry is recovered from the l-recurrence at l = 1 after each raise;
    // work at length >= 3 so indices 1 and 2 always exist.
    const int Lw = (mm > 0) ? std::max(L, 2) : L;
    std::vector<Real> q(static_cast<std::size_t>(Lw) + 1);
    {
      auto r = detail::q_ratios(nu, 0, Lw);
      q[0] = 0.5 * std::log(std::abs((nu + 1.0) / (nu - 1.0)));
      for (int l = 1; l <= Lw; ++l) q[static_cast<std::size_t>(l)] = r[static_cast<std::size_t>(l)] * q[static_cast<std::size_t>(l - 1)];
    }
    for (int mu = 0; mu < mm; ++mu) {
      std::vector<Real> up(static_cast<std::size_t>(Lw) + 1, 0.0);
      for (int l = 1; l <= Lw; ++l) {
        up[static_cast<std::size_t>(l)] = ((l - mu) * nu * q[static_cast<std::size_t>(l)] - (l + mu) * q[static_cast<std::size_t>(l - 1)]) / s;
      }
      const int M = mu + 1;
      up[0] = (3.0 * nu * up[1] - (2.0 - M) * up[2]) / (1.0 + M);
      q = std::move(up);
    }
    q.resize(static_cast<std::size_t>(L) + 1);
    out.Q = std::move(q);
    return out;
  };

  LegendrePQ out = build(am);
  if (m < 0) {
    for (int l = 0; l <= L; ++l) {
      const Real ratio = (l >= am) ? detail::factorial_ratio(l, am) : 0.0;
      out.P[static_cast<std::size_t>(l)] *= ratio;
      out.Q[static_cast<std::size_t>(l)] *= ratio;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Wigner d-matrices at imaginary angle: d^l_{m'm}[i tau] with
// cos(theta) = Q(x) = sqrt(1+x^2) and sin(theta) = i |x|, x = nu q.
// ---------------------------------------------------------------------------

class WignerD {
public:
  WignerD(Real x, int l_max) : x_(x), l_max_(l_max) {
    if (l_max < 0 || l_max > 80) throw std::invalid_argument("WignerD: l_max out of range");
    const Real bigq = std::sqrt(1.0 + x * x);
    cos_ = Complex(bigq, 0.0);
    c2_ = std::sqrt(0.5 * (1.0 + bigq));           // cos(theta/2), real >= 1
    s2_ = Complex(0.0, std::abs(x) / (2.0 * c2_.real()));  // sin(theta/2), imaginary
    slices_.resize(static_cast<std::size_t>(l_max) + 1);
    for (int l = 0; l <= l_max; ++l)
      slices_[static_cast<std::size_t>(l)].assign(static_cast<std::size_t>((2 * l + 1) * (2 * l + 1)), Complex{});
    build();
  }

  Real x() const { return x_; }
  int l_max() const { return l_max_; }

  Complex d(int l, int mp, int m) const {
    if (l < 0 || l > l_max_ || std::abs(mp) > l || std::abs(m) > l)
      throw std::invalid_argument("WignerD::d: indices out of range");
    return slices_[static_cast<std::size_t>(l)][idx(l, mp, m)];
  }

private:
  static std::size_t idx(int l, int mp, int m) {
    return static_cast<std::size_t>((mp + l) * (2 * l + 1) + (m + l));
  }

  // Direct Wigner sum with complex half-angle functions; used as the seed of
  // the upward l-recurrence at l0 = max(|m'|,|m|).
  Complex direct(int l, int mp, int m) const {
    Complex sum{};
    const int s_lo = std::max(0, m - mp);
    const int s_hi = std::min(l + m, l - mp);
    const Real pref = std::sqrt(detail::factorial(l + mp) * detail::factorial(l - mp) *
                                detail::factorial(l + m) * detail::factorial(l - m));
    for (int s = s_lo; s <= s_hi; ++s) {
      const Real den = detail::factorial(l + m - s) * detail::factorial(s) *
                       detail::factorial(mp - m + s) * detail::factorial(l - mp - s);
      Complex term = detail::ipow(c2_, 2 * l + m - mp - 2 * s) * detail::ipow(s2_, mp - m + 2 * s) / den;
      if ((mp - m + s) % 2 != 0) term = -term;
      sum += term;
    }
    return pref * sum;
  }

  void build() {
    for (int mp = -l_max_; mp <= l_max_; ++mp) {
      for (int m = -l_max_; m <= l_max_; ++m) {
        const int l0 = std::max(std::abs(mp), std::abs(m));
        if (l0 > l_max_) continue;
        Complex dm1{};  // d^{l0-1}, multiplied by a vanishing coefficient below
        Complex d0 = direct(l0, mp, m);
        slices_[static_cast<std::size_t>(l0)][idx(l0, mp, m)] = d0;
        int l_from = l0;
        if (l0 == 0 && l_max_ >= 1) {
          // The l -> l+1 recurrence divides by l; step over l = 0 directly.
          slices_[1][idx(1, 0, 0)] = cos_;
          dm1 = d0;
          d0 = cos_;
          l_from = 1;
        }
        for (int l = l_from; l < l_max_; ++l) {
          const Real a = std::sqrt(Real((l + 1) * (l + 1) - mp * mp)) *
                         std::sqrt(Real((l + 1) * (l + 1) - m * m));
          const Real b = (l > 0) ? std::sqrt(Real(l * l - mp * mp)) * std::sqrt(Real(l * l - m * m)) : 0.0;
          Complex num = Real(2 * l + 1) * (Real(l * (l + 1)) * cos_ - Real(mp * m)) * d0 - Real(l + 1) * b * dm1;
          Complex d1 = num / (Real(l) * a);
          slices_[static_cast<std::size_t>(l + 1)][idx(l + 1, mp, m)] = d1;
          dm1 = d0;
          d0 = d1;
        }
      }
    }
  }

  Real x_;
  int l_max_;
  Complex cos_, c2_, s2_;
  std::vector<std::vector<Complex>> slices_;
};

inline WignerD wigner_d_imag(Real x, int l_max) { return WignerD(x, l_max); }

// ---------------------------------------------------------------------------
// Bessel J0 and its cumulative integral.
// ---------------------------------------------------------------------------

inline Real bessel_j0(Real x) { return std::cyl_bessel_j(0.0, std::abs(x)); }

// Integral of J0 over (0, x), via the identity  int_0^x J0 = 2 sum_k J_{2k+1}(x)
// with the whole J_n row generated by Miller's downward recurrence.
inline Real cumulative_j0(Real x) {
  if (!(x >= 0)) throw std::domain_error("cumulative_j0: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (x < 1e-3) {
    // Two-term Maclaurin series; next term is O(x^5).
    return x - x * x * x / 12.0;
  }
  const int top = static_cast<int>(x) + 60 + static_cast<int>(10.0 * std::sqrt(x));
  Real jp = 0.0, jc = 1e-300;
  Real norm = 0.0, odd_sum = 0.0;
  for (int n = top; n >= 1; --n) {
    Real jm = (2.0 * n / x) * jc - jp;
    jp = jc;
    jc = jm;
    // jp now holds J_n; accumulate before it is overwritten further down.
    if (n % 2 == 0)
      norm += 2.0 * jp;
    else
      odd_sum += jp;
    if (std::abs(jc) > 1e250) {
      jc *= 1e-250;
      jp *= 1e-250;
      norm *= 1e-250;
      odd_sum *= 1e-250;
    }
  }
  norm += jc;  // J_0 contribution to J_0 + 2 sum J_{2k} = 1
  return 2.0 * odd_sum / norm;
}

}  // namespace caseflux

#endif
