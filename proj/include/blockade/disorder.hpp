#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace blockade {

inline constexpr double lambda_infinity = std::numeric_limits<double>::infinity();

/// One sampled set of site couplings J_k = sqrt(X_k / lambda), X_k ~ Poisson.
struct DisorderConfiguration {
  std::vector<double> couplings;
  std::vector<std::uint64_t> counts;  // X_k; empty when lambda is infinite
  double lambda = lambda_infinity;
  std::uint64_t master_seed = 0;
  std::uint64_t index = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Uniform double in [0, 1) from the top 53 bits; independent of the
/// standard library's distribution implementation.
template <class Engine>
double uniform01(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// Inversion by sequential search, started at the mode so the number of
/// steps is O(sqrt(mean)) and the tail probabilities do not underflow.
template <class Engine>
std::uint64_t poisson_inversion(Engine& engine, double mean) {
  const auto mode = static_cast<std::uint64_t>(std::floor(mean));
  const double log_pmode =
      static_cast<double>(mode) * std::log(mean) - mean - std::lgamma(mode + 1.0);
  const double pmode = std::exp(log_pmode);
  double cdf_below = 0.0;  // P(X < mode)
  {
    double p = pmode;
    for (std::uint64_t k = mode; k > 0; --k) {
      p *= static_cast<double>(k) / mean;
      cdf_below += p;
    }
  }
  double u = uniform01(engine);
  if (u < cdf_below) {
    // Walk down from mode - 1.
    double p = pmode;
    double acc = cdf_below;
    for (std::uint64_t k = mode; k > 0; --k) {
      p *= static_cast<double>(k) / mean;
      acc -= p;
      if (u >= acc) return k - 1;
    }
    return 0;
  }
  u -= cdf_below;
  double p = pmode;
  std::uint64_t k = mode;
  while (u >= p) {
    u -= p;
    ++k;
    p *= mean / static_cast<double>(k);
    if (p == 0.0) break;
  }
  return k;
}

/// Hoermann's transformed rejection with squeeze (PTRS); exact for
/// mean >= 10.
template <class Engine>
std::uint64_t poisson_ptrs(Engine& engine, double mean) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double U = uniform01(engine) - 0.5;
    const double V = uniform01(engine);
    const double us = 0.5 - std::abs(U);
    const double k = std::floor((2.0 * a / us + b) * U + mean + 0.43);
    if (us >= 0.07 && V <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && V > us)) continue;
    if (std::log(V) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

}  // namespace detail

/// Exact Poisson draw. Inversion for small means, PTRS above.
template <class Engine>
std::uint64_t sample_poisson(Engine& engine, double mean) {
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    throw std::invalid_argument("poisson mean must be positive and finite");
  }
  return mean < 64.0 ? detail::poisson_inversion(engine, mean)
                     : detail::poisson_ptrs(engine, mean);
}

/// Engine for configuration `index` under `master_seed`. The seed depends
/// only on the pair, so configurations can be generated in any order.
inline std::mt19937_64 configuration_engine(std::uint64_t master_seed,
                                            std::uint64_t index) {
  const std::uint64_t s =
      detail::splitmix64(detail::splitmix64(master_seed) ^
                         detail::splitmix64(index + 0x632be59bd9b4e019ull));
  return std::mt19937_64(s);
}

inline DisorderConfiguration sample_configuration(int n_sites, double lambda,
                                                  std::uint64_t master_seed,
                                                  std::uint64_t index) {
  if (n_sites < 1) throw std::invalid_argument("sample_configuration: N >= 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("sample_configuration: lambda > 0");
  DisorderConfiguration cfg;
  cfg.lambda = lambda;
  cfg.master_seed = master_seed;
  cfg.index = index;
  if (std::isinf(lambda)) {
    cfg.couplings.assign(static_cast<std::size_t>(n_sites), 1.0);
    return cfg;
  }
  auto engine = configuration_engine(master_seed, index);
  cfg.counts.resize(static_cast<std::size_t>(n_sites));
  cfg.couplings.resize(static_cast<std::size_t>(n_sites));
  for (std::size_t k = 0; k < cfg.counts.size(); ++k) {
    cfg.counts[k] = sample_poisson(engine, lambda);
    cfg.couplings[k] = std::sqrt(static_cast<double>(cfg.counts[k]) / lambda);
  }
  return cfg;
}

/// E[J^2] = E[X] / lambda, which is 1 for every lambda.
inline double mean_square_coupling(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("mean_square_coupling: lambda > 0");
  return 1.0;
}

}  // namespace blockade
