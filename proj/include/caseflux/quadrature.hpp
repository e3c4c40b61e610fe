#ifndef CASEFLUX_QUADRATURE_HPP
#define CASEFLUX_QUADRATURE_HPP

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "caseflux/common.hpp"

namespace caseflux {

// Gauss-Legendre rule on (-1,1).
struct QuadratureRule {
  std::vector<Real> nodes;
  std::vector<Real> weights;

  template <class F>
  auto integrate(F&& f) const -> decltype(f(Real{})) {
    decltype(f(Real{})) sum{};
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }

  // Same rule mapped affinely to (a,b).
  template <class F>
  auto integrate(F&& f, Real a, Real b) const -> decltype(f(Real{})) {
    const Real h = 0.5 * (b - a);
    const Real mid = 0.5 * (a + b);
    decltype(f(Real{})) sum{};
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(mid + h * nodes[i]);
    return h * sum;
  }
};

namespace detail {

inline QuadratureRule compute_gauss_legendre(int n) {
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  // Newton iteration on P_n with Chebyshev-angle starting guesses.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    Real x = std::cos(pi * (i + 0.75) / (n + 0.5));
    Real dp = 0;
    for (int it = 0; it < 100; ++it) {
      Real p0 = 1.0, p1 = x;
      if (n == 1) { p1 = x; }
      for (int k = 2; k <= n; ++k) {
        Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      Real pn = (n == 1) ? x : p1;
      Real pnm1 = (n == 1) ? 1.0 : p0;
      dp = n * (x * pn - pnm1) / (x * x - 1.0);
      Real dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    Real w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

}  // namespace detail

// Rules are cached per order; the memo is guarded so rules can be requested
// from worker threads.
inline const QuadratureRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  static std::mutex mtx;
  static std::map<int, std::unique_ptr<QuadratureRule>> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, std::make_unique<QuadratureRule>(detail::compute_gauss_legendre(n))).first;
  }
  return *it->second;
}

// Default production order for all finite-interval integrals.
inline constexpr int kProductionGaussOrder = 512;

// PV integral over (-1,1) of F(mu)/(nu - mu) by singularity subtraction.
// F must be smooth on [-1,1]; after subtracting F(nu) the integrand is regular
// and the Gauss rule applies directly.
template <class F>
Real pv_integral(F&& f, Real nu, int order = kProductionGaussOrder) {
  if (!(nu > -1.0 && nu < 1.0))
    throw std::domain_error("pv_integral: nu must lie strictly inside (-1,1)");
  const Real fnu = f(nu);
  const QuadratureRule& rule = gauss_legendre(order);
  Real sum = 0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const Real mu = rule.nodes[i];
    sum += rule.weights[i] * (f(mu) - fnu) / (nu - mu);
  }
  return sum + fnu * std::log((1.0 + nu) / (1.0 - nu));
}

// Adaptive bisection with an embedded pair of Gauss rules.  Used where the
// integrand has localized structure (the near-conservative Fourier kernels
// peak sharply near k = 0).
template <class F>
Real adaptive_gauss(F&& f, Real a, Real b, Real abs_tol, int depth = 0) {
  const QuadratureRule& lo = gauss_legendre(15);
  const QuadratureRule& hi = gauss_legendre(31);
  const Real coarse = lo.integrate(f, a, b);
  const Real fine = hi.integrate(f, a, b);
  if (std::abs(fine - coarse) <= abs_tol || depth >= 40) return fine;
  const Real mid = 0.5 * (a + b);
  return adaptive_gauss(f, a, mid, 0.5 * abs_tol, depth + 1) +
         adaptive_gauss(f, mid, b, 0.5 * abs_tol, depth + 1);
}

// Integral of sin(k z) f(k) over (0, inf) for f decaying like a/k.  The head
// [0, K] is integrated adaptively; the tail is summed over exact half periods
// of sin(k z) and the alternating partial sums are accelerated by iterated
// averaging (Euler transformation).
template <class F>
Real oscillatory_semi_infinite(F&& f, Real z, Real abs_tol = 1e-10) {
  if (!(z > 0)) throw std::domain_error("oscillatory_semi_infinite: z must be positive");
  const Real half = pi / z;
  // Head boundary on a sign change of sin(k z), past the low-k structure.
  const int head_halves = std::max(1, static_cast<int>(std::ceil(8.0 / half)));
  const Real K = head_halves * half;
  auto g = [&](Real k) { return std::sin(k * z) * f(k); };
  Real head = adaptive_gauss(g, 0.0, K, 0.1 * abs_tol);

  const int max_segments = 256;
  const QuadratureRule& seg_rule = gauss_legendre(16);
  std::vector<Real> partial;  // partial sums of the alternating segment series
  partial.reserve(max_segments);
  Real sum = 0;
  Real best = 0, best_err = HUGE_VAL;
  for (int n = 0; n < max_segments; ++n) {
    const Real a = K + n * half;
    sum += seg_rule.integrate(g, a, a + half);
    partial.push_back(sum);
    // Iterated averaging of the partial-sum sequence.
    std::vector<Real> row = partial;
    while (row.size() > 1) {
      for (std::size_t i = 0; i + 1 < row.size(); ++i) row[i] = 0.5 * (row[i] + row[i + 1]);
      row.pop_back();
      if (row.size() >= 2) {
        Real err = std::abs(row[row.size() - 1] - row[row.size() - 2]);
        if (err < best_err) {
          best_err = err;
          best = row.back();
        }
      }
    }
    if (partial.size() >= 4 && best_err < 0.9 * abs_tol) return head + best;
  }
  if (best_err < 10 * abs_tol) return head + best;
  throw ConvergenceError("oscillatory_semi_infinite: tail acceleration did not converge",
                         head + best, best_err);
}

}  // namespace caseflux

#endif
