#ifndef CASEFLUX_CHANDRA_HPP
#define CASEFLUX_CHANDRA_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "caseflux/medium.hpp"
#include "caseflux/specfun.hpp"

namespace caseflux {

// Chandrasekhar-type polynomials h_l^m(nu), l = |m|..L, from the three-term
// recurrence nu (2l+1) sigma_l h_l = (l-m+1) h_{l+1} + (l+m) h_{l-1} with the
// constant seed h_{|m|}^m = p_{|m|}^m.  Only l <= N is ever needed by the
// kernel g^m; the upward recurrence is applied no further than requested.
template <class T>
std::vector<T> h_table(T nu, int m, const OpticalMedium& med, int L) {
  const int am = std::abs(m);
  if (am > med.order())
    throw std::invalid_argument("h_table: |m| exceeds phase-function order (phi^m vanishes)");
  if (L < am) throw std::invalid_argument("h_table: L must be >= |m|");
  std::vector<T> h(static_cast<std::size_t>(L) + 1, T{});
  if (m >= 0) {
    Real seed = 1.0;
    for (int k = 1; k <= m; ++k) seed *= (2 * k - 1);
    h[static_cast<std::size_t>(am)] = T(seed);
  } else {
    h[static_cast<std::size_t>(am)] =
        T((am % 2 == 0 ? 1.0 : -1.0) / (std::pow(2.0, am) * detail::factorial(am)));
  }
  T prev{};
  for (int l = am; l < L; ++l) {
    T next = (nu * Real(2 * l + 1) * med.sigma(l) * h[static_cast<std::size_t>(l)] - Real(l + m) * prev) /
             Real(l - m + 1);
    prev = h[static_cast<std::size_t>(l)];
    h[static_cast<std::size_t>(l + 1)] = next;
  }
  return h;
}

// Kernel g^m(nu, mu) = sum_{l'=|m|}^N (2l'+1) f_{l'} (l'-m)!/(l'+m)!
//                      p_{l'}^m(mu) h_{l'}^m(nu).
// Symmetric under m -> -m; polynomial of degree <= N in mu once multiplied by
// (1-mu^2)^{|m|}.
template <class Tnu, class Tmu>
auto g_kernel(Tnu nu, Tmu mu, int m, const OpticalMedium& med) -> decltype(Tnu{} * Tmu{}) {
  const int N = med.order();
  const int am = std::abs(m);
  if (am > N)
    throw std::invalid_argument("g_kernel: |m| exceeds phase-function order");
  const auto h = h_table(nu, m, med, N);
  const auto p = p_row(mu, m, N);
  decltype(Tnu{} * Tmu{}) sum{};
  for (int l = am; l <= N; ++l) {
    sum += Real(2 * l + 1) * med.f(l) * detail::factorial_ratio(l, m) *
           p[static_cast<std::size_t>(l)] * h[static_cast<std::size_t>(l)];
  }
  return sum;
}

}  // namespace caseflux

#endif
