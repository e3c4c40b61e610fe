#ifndef CASEFLUX_MONTECARLO_HPP
#define CASEFLUX_MONTECARLO_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "caseflux/medium.hpp"

namespace caseflux {

// Photon-transport run description.  Lengths are in mean free paths; the
// estimator matches the point-source density normalization U v / (mu_t^2 S_a).
struct McConfig {
  OpticalMedium medium = OpticalMedium(0.5, 0.5, {1.0});
  long long photons = 0;
  int bins = 0;
  Real rmax = 0.0;
  std::uint64_t seed = 0;
  Real roulette = 1e-6;  // weight threshold for Russian roulette
  int batches = 256;     // fixed stream count, independent of thread count
};

struct McResult {
  std::vector<Real> r_center;
  std::vector<Real> values;
  std::vector<Real> stderrs;
  std::vector<long long> counts;
  Real injected = 0.0;
  Real absorbed = 0.0;  // weight removed by absorption and roulette balance
};

// Inverse CDF of the linear phase function (1 + 3 f1 mu) / 2 on [-1, 1].
inline Real sample_linear_phase(Real f1, Real u) {
  if (!(std::abs(f1) < 1.0 / 3.0))
    throw std::invalid_argument(
        "sample_linear_phase: |f1| must be below 1/3 for a nonnegative kernel");
  if (f1 == 0.0) return 2.0 * u - 1.0;
  // (3 f1 / 4)(mu^2 - 1) + (mu + 1) / 2 = u; the monotone branch through
  // (-1, 0) and (1, 1) is the '+' root.
  const Real a = 0.75 * f1;
  const Real disc = 0.25 - 4.0 * a * (0.5 - a - u);
  Real mu = (-0.5 + std::sqrt(std::max(disc, 0.0))) / (2.0 * a);
  if (mu < -1.0) mu = -1.0;
  if (mu > 1.0) mu = 1.0;
  return mu;
}

namespace detail {

// splitmix64 step; used to derive independent per-batch seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Rotate direction d by polar cosine ct and azimuth psi about itself.
inline void deflect(Real d[3], Real ct, Real psi) {
  const Real st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
  const Real cp = std::cos(psi), sp = std::sin(psi);
  if (std::abs(d[2]) > 0.99999) {
    const Real sign = (d[2] >= 0.0) ? 1.0 : -1.0;
    d[0] = st * cp;
    d[1] = sign * st * sp;
    d[2] = sign * ct;
    return;
  }
  const Real den = std::sqrt(1.0 - d[2] * d[2]);
  const Real nx = st * (d[0] * d[2] * cp - d[1] * sp) / den + d[0] * ct;
  const Real ny = st * (d[1] * d[2] * cp + d[0] * sp) / den + d[1] * ct;
  const Real nz = -st * cp * den + d[2] * ct;
  d[0] = nx;
  d[1] = ny;
  d[2] = nz;
}

}  // namespace detail

// Analog-capture collision estimator for the point source in the infinite
// medium.  Each collision scores the current weight into the shell holding
// it; weights shrink by the albedo per collision and terminate by roulette.
// Batches own fixed RNG streams, so results depend only on the seed and the
// batch count, never on the thread count.
inline McResult simulate_point(const McConfig& cfg) {
  if (cfg.photons < 1 || cfg.bins < 1 || !(cfg.rmax > 0.0))
    throw std::invalid_argument("simulate_point: bad configuration");
  if (cfg.medium.order() >= 1 && !(std::abs(cfg.medium.f(1)) < 1.0 / 3.0))
    throw std::invalid_argument("simulate_point: linear sampler needs |f1| < 1/3");
  const Real c = cfg.medium.albedo();
  const Real f1 = (cfg.medium.order() >= 1) ? cfg.medium.f(1) : 0.0;
  const int nb = cfg.bins;
  const Real dr = cfg.rmax / nb;
  const int batches = std::max(1, cfg.batches);

  std::vector<std::vector<Real>> tally(
      static_cast<std::size_t>(batches),
      std::vector<Real>(static_cast<std::size_t>(nb), 0.0));
  std::vector<std::vector<long long>> hits(
      static_cast<std::size_t>(batches),
      std::vector<long long>(static_cast<std::size_t>(nb), 0));
  std::vector<long long> nphot(static_cast<std::size_t>(batches), 0);
  std::vector<Real> balance(static_cast<std::size_t>(batches), 0.0);

  for (int b = 0; b < batches; ++b)
    nphot[static_cast<std::size_t>(b)] =
        cfg.photons / batches + (b < cfg.photons % batches ? 1 : 0);

  parallel_for(static_cast<std::size_t>(batches), [&](std::size_t b) {
    std::mt19937_64 rng(detail::mix64(cfg.seed ^ (0x51ed2701ull + b)));
    std::uniform_real_distribution<Real> uni(0.0, 1.0);
    auto& bins = tally[b];
    auto& cnt = hits[b];
    Real removed = 0.0;
    for (long long p = 0; p < nphot[b]; ++p) {
      Real pos[3] = {0.0, 0.0, 0.0};
      Real dir[3];
      // Isotropic emission.
      const Real mu0 = 2.0 * uni(rng) - 1.0;
      const Real ph0 = 2.0 * pi * uni(rng);
      const Real s0 = std::sqrt(1.0 - mu0 * mu0);
      dir[0] = s0 * std::cos(ph0);
      dir[1] = s0 * std::sin(ph0);
      dir[2] = mu0;
      Real w = 1.0;
      while (true) {
        const Real step = -std::log(1.0 - uni(rng));
        pos[0] += step * dir[0];
        pos[1] += step * dir[1];
        pos[2] += step * dir[2];
        const Real r = std::sqrt(pos[0] * pos[0] + pos[1] * pos[1] + pos[2] * pos[2]);
        const int k = static_cast<int>(r / dr);
        if (k < nb) {
          bins[static_cast<std::size_t>(k)] += w;
          ++cnt[static_cast<std::size_t>(k)];
        }
        removed += (1.0 - c) * w;
        w *= c;
        if (w < cfg.roulette) {
          if (uni(rng) < 0.5) {
            removed -= w;  // survivor weight doubles
            w *= 2.0;
          } else {
            removed += w;
            break;
          }
        }
        const Real ct = sample_linear_phase(f1, uni(rng));
        detail::deflect(dir, ct, 2.0 * pi * uni(rng));
      }
    }
    balance[b] = removed;
  });

  McResult out;
  out.r_center.resize(static_cast<std::size_t>(nb));
  out.values.assign(static_cast<std::size_t>(nb), 0.0);
  out.stderrs.assign(static_cast<std::size_t>(nb), 0.0);
  out.counts.assign(static_cast<std::size_t>(nb), 0);
  out.injected = static_cast<Real>(cfg.photons);
  for (Real v : balance) out.absorbed += v;

  for (int k = 0; k < nb; ++k) {
    const Real r0 = k * dr, r1 = (k + 1) * dr;
    const Real vol = 4.0 * pi / 3.0 * (r1 * r1 * r1 - r0 * r0 * r0);
    out.r_center[static_cast<std::size_t>(k)] = 0.5 * (r0 + r1);
    // Per-batch means give the spread; 4 pi converts shell fluence to the
    // density normalization (the pure-absorber bin must read e^{-r} / r^2).
    Real mean = 0.0;
    for (int b = 0; b < batches; ++b) {
      const Real est = 4.0 * pi * tally[static_cast<std::size_t>(b)][static_cast<std::size_t>(k)] /
                       (static_cast<Real>(nphot[static_cast<std::size_t>(b)]) * vol);
      mean += est * static_cast<Real>(nphot[static_cast<std::size_t>(b)]);
      out.counts[static_cast<std::size_t>(k)] +=
          hits[static_cast<std::size_t>(b)][static_cast<std::size_t>(k)];
    }
    mean /= static_cast<Real>(cfg.photons);
    Real var = 0.0;
    for (int b = 0; b < batches; ++b) {
      const Real est = 4.0 * pi * tally[static_cast<std::size_t>(b)][static_cast<std::size_t>(k)] /
                       (static_cast<Real>(nphot[static_cast<std::size_t>(b)]) * vol);
      const Real d = est - mean;
      var += d * d;
    }
    var /= static_cast<Real>(batches) * static_cast<Real>(batches - 1);
    out.values[static_cast<std::size_t>(k)] = mean;
    out.stderrs[static_cast<std::size_t>(k)] = std::sqrt(var);
  }
  return out;
}

}  // namespace caseflux

#endif
