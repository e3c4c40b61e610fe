#ifndef CASEFLUX_COMMON_HPP
#define CASEFLUX_COMMON_HPP

#include <complex>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace caseflux {

using Real = double;
using Complex = std::complex<Real>;

inline constexpr Real pi = 3.14159265358979323846264338327950288;

// Thrown when an iterative scheme fails to reach its tolerance.  Carries the
// best value obtained so far together with the residual estimate.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, Real partial, Real estimate)
      : std::runtime_error(what), partial_(partial), estimate_(estimate) {}
  Real partial() const { return partial_; }
  Real estimate() const { return estimate_; }

private:
  Real partial_;
  Real estimate_;
};

// Number of worker threads.  CASEFLUX_THREADS caps hardware concurrency.
inline unsigned thread_count() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("CASEFLUX_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1 && static_cast<unsigned>(v) < hw) hw = static_cast<unsigned>(v);
  }
  return hw;
}

// Static partition of [0, n) across worker threads.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  unsigned nt = thread_count();
  if (nt <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (unsigned t = 0; t < nt; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += nt) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace caseflux

#endif
