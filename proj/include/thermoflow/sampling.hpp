// Random and deterministic probes inside a trace-distance epsilon-ball.
// Used by the sampled lower bound on the conventional smoothed divergence
// and by the randomized property tests.
#pragma once

#include <random>

#include "thermoflow/core.hpp"

namespace thermoflow {

// Draws a same-basis state within trace distance eps of `state`. A signed
// perturbation with half-L1 mass u*eps (u uniform in (0,1]) is split between
// a random take subset and a random give subset; takes are clipped at zero
// and the give side receives exactly the probability that was taken, so the
// sample is normalized and ball membership is guaranteed.
inline BlockDiagonalState ball_sample(const BlockDiagonalState& state,
                                      double eps, std::mt19937_64& rng) {
  const std::size_t d = state.size();
  std::vector<double> out(state.probabilities);
  if (d < 2 || eps <= 0.0) return BlockDiagonalState{std::move(out)};

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double mass = eps * std::max(unit(rng), 1e-12);

  std::vector<std::size_t> take, give;
  while (take.empty() || give.empty()) {
    take.clear();
    give.clear();
    for (std::size_t i = 0; i < d; ++i)
      (unit(rng) < 0.5 ? take : give).push_back(i);
  }
  std::vector<double> w(take.size());
  double wsum = 0.0;
  for (std::size_t j = 0; j < take.size(); ++j) wsum += w[j] = unit(rng) + 1e-9;
  double taken = 0.0;
  for (std::size_t j = 0; j < take.size(); ++j) {
    double amount = std::min(out[take[j]], mass * w[j] / wsum);
    out[take[j]] -= amount;
    taken += amount;
  }
  std::vector<double> v(give.size());
  double vsum = 0.0;
  for (std::size_t j = 0; j < give.size(); ++j) vsum += v[j] = unit(rng) + 1e-9;
  for (std::size_t j = 0; j < give.size(); ++j)
    out[give[j]] += taken * v[j] / vsum;
  return BlockDiagonalState{std::move(out)};
}

// Deterministic extremal ball members: for every target level, push mass
// onto it while draining either the smallest probabilities first (reaches
// the support-minimizing corners of the ball) or the lowest beta-order
// weights first. 2d candidates in total.
inline std::vector<BlockDiagonalState> directional_extremes(
    const BlockDiagonalState& state, const ThermalContext& ctx, double eps) {
  const std::size_t d = state.size();
  std::vector<BlockDiagonalState> out;
  if (eps <= 0.0) return out;
  auto drain = [&](std::size_t target, const std::vector<std::size_t>& order) {
    std::vector<double> p(state.probabilities);
    double budget = eps;
    for (std::size_t i : order) {
      if (i == target || budget <= 0.0) continue;
      double amount = std::min(p[i], budget);
      p[i] -= amount;
      p[target] += amount;
      budget -= amount;
    }
    out.push_back(BlockDiagonalState{std::move(p)});
  };
  std::vector<std::size_t> by_prob(d), by_weight(d);
  std::iota(by_prob.begin(), by_prob.end(), 0);
  by_weight = by_prob;
  std::stable_sort(by_prob.begin(), by_prob.end(), [&](auto a, auto b) {
    return state[a] < state[b];
  });
  std::stable_sort(by_weight.begin(), by_weight.end(), [&](auto a, auto b) {
    return state[a] / ctx.thermal_weights[a] < state[b] / ctx.thermal_weights[b];
  });
  for (std::size_t target = 0; target < d; ++target) {
    drain(target, by_prob);
    drain(target, by_weight);
  }
  return out;
}

}  // namespace thermoflow
