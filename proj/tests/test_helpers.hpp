// Shared generators and independent oracles for the test suites. The
// oracles recompute expected values by the most direct route available
// (term-by-term sums, naive enumeration) so they stay independent of the
// library code paths they check.
#pragma once

#include <random>

#include "thermoflow/core.hpp"

namespace tftest {

using namespace thermoflow;

inline ThermalContext trivial_context(std::size_t d) {
  return make_context(make_spectrum(std::vector<double>(d, 0.0)), 1.0);
}

// beta-factors {1,2,8} at beta = 1: the three-level example used throughout.
inline ThermalContext three_level_context() {
  return make_context(
      make_spectrum({0.0, std::log(2.0), std::log(8.0)}), 1.0);
}

inline BlockDiagonalState three_level_state() {
  return BlockDiagonalState{{0.55, 0.35, 0.1}};
}

inline BlockDiagonalState fig2_state() {
  return BlockDiagonalState{{0.3, 0.25, 0.22, 0.1, 0.07, 0.06}};
}

inline BlockDiagonalState random_state(std::size_t d, std::mt19937_64& rng) {
  std::exponential_distribution<double> exp1(1.0);
  std::vector<double> p(d);
  double s = 0.0;
  for (auto& x : p) s += x = exp1(rng);
  for (auto& x : p) x /= s;
  return BlockDiagonalState{std::move(p)};
}

inline ThermalContext random_context(std::size_t d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> beta_dist(0.2, 2.0);
  std::uniform_real_distribution<double> energy(0.0, 2.0);
  std::vector<double> e(d);
  for (auto& x : e) x = energy(rng);
  return make_context(make_spectrum(std::move(e)), beta_dist(rng));
}

// ---- independent oracles ----

inline double oracle_kl(const std::vector<double>& p,
                        const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) s += p[i] * std::log(p[i] / q[i]);
  return s;
}

inline double oracle_renyi(const std::vector<double>& p,
                           const std::vector<double>& q, double alpha) {
  if (alpha == 0.0) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
      if (p[i] > 0.0) s += q[i];
    return -std::log(s);
  }
  if (alpha == 1.0) return oracle_kl(p, q);
  if (alpha == kInf) {
    double best = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
      best = std::max(best, p[i] / q[i]);
    return std::log(best);
  }
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) s += std::pow(p[i], alpha) * std::pow(q[i], 1.0 - alpha);
  return std::log(s) / (alpha - 1.0);
}

// Trivial-Hamiltonian steepest state (tail cut), for sorted-descending p.
inline std::vector<double> oracle_trivial_steepest(std::vector<double> p,
                                                   double eps) {
  const std::size_t d = p.size();
  double tail = 0.0;
  std::size_t m = d;
  for (std::size_t i = d; i-- > 0;) {
    if (tail + p[i] >= eps) {
      m = i + 1;  // 1-based cut index
      break;
    }
    tail += p[i];
  }
  std::vector<double> out(p);
  out[0] += eps;
  out[m - 1] = p[m - 1] - eps + tail;
  for (std::size_t i = m; i < d; ++i) out[i] = 0.0;
  return out;
}

}  // namespace tftest
