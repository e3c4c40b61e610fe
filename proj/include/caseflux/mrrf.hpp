#ifndef CASEFLUX_MRRF_HPP
#define CASEFLUX_MRRF_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "caseflux/spectrum.hpp"

namespace caseflux {

// Truncated tridiagonal operator B^m on the harmonic indices l = |m|..L:
// zero diagonal, off-diagonal couplings
// b_l = sqrt(((l+1)^2 - m^2) / ((4(l+1)^2 - 1) sigma_{l+1} sigma_l)).
struct TridiagonalOperator {
  int m = 0;
  int L = 0;
  std::vector<Real> b;  // b[i] couples l = |m|+i and l = |m|+i+1

  int size() const { return L - std::abs(m) + 1; }
};

inline TridiagonalOperator build_B(int m, const OpticalMedium& med, int L) {
  const int am = std::abs(m);
  if (L < am + 1) throw std::invalid_argument("build_B: L must be >= |m| + 1");
  TridiagonalOperator op;
  op.m = m;
  op.L = L;
  op.b.resize(static_cast<std::size_t>(L - am));
  for (int l = am; l < L; ++l) {
    const Real num = Real(l + 1) * Real(l + 1) - Real(m) * Real(m);
    const Real den = (4.0 * Real(l + 1) * Real(l + 1) - 1.0) * med.sigma(l + 1) * med.sigma(l);
    op.b[static_cast<std::size_t>(l - am)] = std::sqrt(num / den);
  }
  return op;
}

// Full eigen-decomposition B|psi> = nu|psi>, eigenvalues sorted descending,
// eigenvectors unit-normalized, vectors[k][i] indexed by i = l - |m|.
struct MrrfModes {
  int m = 0;
  int L = 0;
  std::vector<Real> eigenvalues;
  std::vector<std::vector<Real>> vectors;
};

namespace detail {

// Implicit-shift QL iteration for a symmetric tridiagonal matrix, rotations
// accumulated into z (initialized to the identity).  d holds the diagonal,
// e the subdiagonal in e[0..n-2].
inline void tql2(std::vector<Real>& d, std::vector<Real>& e,
                 std::vector<std::vector<Real>>& z) {
  const int n = static_cast<int>(d.size());
  if (n == 1) return;
  e.resize(static_cast<std::size_t>(n), 0.0);
  for (int l = 0; l < n - 1; ++l) {
    int iter = 0;
    int mm;
    do {
      for (mm = l; mm < n - 1; ++mm) {
        const Real dd = std::abs(d[mm]) + std::abs(d[mm + 1]);
        if (std::abs(e[mm]) <= 1e-17 * dd) break;
      }
      if (mm != l) {
        if (++iter > 50) throw std::runtime_error("tql2: too many iterations");
        Real g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        Real r = std::hypot(g, 1.0);
        g = d[mm] - d[l] + e[l] / (g + std::copysign(r, g));
        Real s = 1.0, c = 1.0, p = 0.0;
        for (int i = mm - 1; i >= l; --i) {
          Real f = s * e[i];
          const Real bb = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[mm] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * bb;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - bb;
          for (int k = 0; k < n; ++k) {
            f = z[static_cast<std::size_t>(k)][static_cast<std::size_t>(i + 1)];
            z[static_cast<std::size_t>(k)][static_cast<std::size_t>(i + 1)] =
                s * z[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] + c * f;
            z[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] =
                c * z[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] - s * f;
          }
        }
        if (r == 0.0 && mm - 1 >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[mm] = 0.0;
      }
    } while (mm != l);
  }
}

}  // namespace detail

inline MrrfModes solve_modes(const TridiagonalOperator& op) {
  const int n = op.size();
  std::vector<Real> d(static_cast<std::size_t>(n), 0.0);
  std::vector<Real> e(op.b);
  std::vector<std::vector<Real>> z(static_cast<std::size_t>(n),
                                   std::vector<Real>(static_cast<std::size_t>(n), 0.0));
  for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;
  detail::tql2(d, e, z);

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return d[static_cast<std::size_t>(a)] > d[static_cast<std::size_t>(b)]; });

  MrrfModes out;
  out.m = op.m;
  out.L = op.L;
  out.eigenvalues.resize(static_cast<std::size_t>(n));
  out.vectors.assign(static_cast<std::size_t>(n),
                     std::vector<Real>(static_cast<std::size_t>(n)));
  for (int k = 0; k < n; ++k) {
    const int src = order[static_cast<std::size_t>(k)];
    out.eigenvalues[static_cast<std::size_t>(k)] = d[static_cast<std::size_t>(src)];
    Real norm2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const Real v = z[static_cast<std::size_t>(i)][static_cast<std::size_t>(src)];
      out.vectors[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = v;
      norm2 += v * v;
    }
    const Real inv = 1.0 / std::sqrt(norm2);
    for (Real& v : out.vectors[static_cast<std::size_t>(k)]) v *= inv;
  }
  return out;
}

// Largest eigenvalue alone by Sturm-count bisection; all the Green's-function
// path needs when the full decomposition is not wanted.
inline Real largest_eigenvalue(const TridiagonalOperator& op, Real tol = 1e-13) {
  const int n = op.size();
  if (n == 1) return 0.0;
  // Count of eigenvalues below x from the signs of the LDL^T pivots.
  auto count_below = [&](Real x) {
    int cnt = 0;
    Real q = -x;
    if (q < 0.0) ++cnt;
    for (int i = 1; i < n; ++i) {
      const Real bi = op.b[static_cast<std::size_t>(i - 1)];
      Real denom = q;
      if (denom == 0.0) denom = 1e-300;
      q = -x - bi * bi / denom;
      if (q < 0.0) ++cnt;
    }
    return cnt;
  };
  Real hi = 0.0;
  for (std::size_t i = 0; i < op.b.size(); ++i) {
    Real g = op.b[i];
    if (i + 1 < op.b.size()) g += op.b[i + 1];
    hi = std::max(hi, g);
  }
  Real lo = 0.0;
  while (hi - lo > tol * std::max(1.0, hi)) {
    const Real mid = 0.5 * (lo + hi);
    if (count_below(mid) < n) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Z^m at a discrete eigenvalue: nu_j Z^m(nu_j) = 2 pi N^m_j.
inline Real z_norm(Real nu_j, int m, const OpticalMedium& med) {
  return 2.0 * pi * norm_discrete(nu_j, m, med) / nu_j;
}

}  // namespace caseflux

#endif
