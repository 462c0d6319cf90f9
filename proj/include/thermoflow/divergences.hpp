// Renyi divergences D_alpha(rho || tau) for commuting spectra, their
// alpha -> 0, 1, infinity limits, the generalized free energies
// F_alpha = beta^{-1} (-ln Z + D_alpha), and the two smoothed families.
// All divergences are in nats.
#pragma once

#include <random>

#include "thermoflow/core.hpp"
#include "thermoflow/sampling.hpp"
#include "thermoflow/smoothing.hpp"

namespace thermoflow {

// D_alpha(rho || tau) = 1/(alpha-1) ln sum_i p_i^alpha tau_i^{1-alpha} with
// the conventions 0^alpha = 0 and 0 ln 0 = 0, and the limits
//   alpha = 0:   -ln sum_{i: p_i > 0} tau_i
//   alpha = 1:   sum_i p_i ln(p_i / tau_i)
//   alpha = inf: ln max_i p_i / tau_i
// Near alpha = 1 the KL form is used to avoid cancellation in 1/(alpha-1).
inline double renyi_divergence(const BlockDiagonalState& state,
                               const ThermalContext& ctx, double alpha) {
  if (!(alpha >= 0.0))
    throw NegativeAlpha("alpha=" + std::to_string(alpha));
  const std::size_t d = state.size();
  if (d != ctx.dim()) throw LengthMismatch("renyi_divergence");
  const auto& tau = ctx.thermal_weights;

  if (alpha == 0.0) {
    double support = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      if (state[i] > 0.0) support += tau[i];
    return -std::log(support);
  }
  if (std::abs(alpha - 1.0) < 1e-6) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      if (state[i] > 0.0) s += state[i] * std::log(state[i] / tau[i]);
    return s;
  }
  if (alpha == kInf) {
    double best = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      best = std::max(best, state[i] / tau[i]);
    return std::log(best);
  }
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    if (state[i] > 0.0)
      s += std::exp(alpha * std::log(state[i]) + (1.0 - alpha) * std::log(tau[i]));
  return std::log(s) / (alpha - 1.0);
}

// F_alpha(rho, tau) = beta^{-1} [ -ln Z + D_alpha(rho || tau) ].
inline double free_energy(const BlockDiagonalState& state,
                          const ThermalContext& ctx, double alpha) {
  return (-std::log(ctx.partition_function) +
          renyi_divergence(state, ctx, alpha)) / ctx.beta;
}

// The new smoothed divergence: D_alpha of the steep state for alpha <= 1,
// of the flattest state for alpha > 1.
inline double smoothed_divergence_new(const BlockDiagonalState& state,
                                      const ThermalContext& ctx, double alpha,
                                      double eps) {
  if (!(alpha >= 0.0)) throw NegativeAlpha("alpha=" + std::to_string(alpha));
  auto smoothed = alpha <= 1.0 ? steep_state(state, ctx, eps)
                               : flattest_state(state, ctx, eps);
  return renyi_divergence(smoothed.result_state, ctx, alpha);
}

inline double smoothed_free_energy(const BlockDiagonalState& state,
                                   const ThermalContext& ctx, double alpha,
                                   double eps) {
  return (-std::log(ctx.partition_function) +
          smoothed_divergence_new(state, ctx, alpha, eps)) / ctx.beta;
}

struct ConventionalDivergence {
  double value = 0.0;
  bool exact = false;  // false: sampled lower bound on the ball maximum
};

// The conventional smoothed divergence. For alpha > 1 the minimum over the
// ball is attained exactly by the flattest state. For 0 <= alpha <= 1 no
// single maximizer exists, so the maximum is lower-bounded by evaluating
// the steep state plus `budget` further candidates: the 2d deterministic
// directional extremes first, random ball samples after that.
inline ConventionalDivergence smoothed_divergence_conventional(
    const BlockDiagonalState& state, const ThermalContext& ctx, double alpha,
    double eps, std::size_t budget, std::mt19937_64& rng) {
  if (!(alpha >= 0.0)) throw NegativeAlpha("alpha=" + std::to_string(alpha));
  if (alpha > 1.0) {
    auto fl = flattest_state(state, ctx, eps);
    return {renyi_divergence(fl.result_state, ctx, alpha), true};
  }
  auto st = steep_state(state, ctx, eps);
  double best = renyi_divergence(st.result_state, ctx, alpha);
  std::size_t used = 0;
  if (budget > 0) {
    for (const auto& cand : directional_extremes(state, ctx, eps)) {
      if (used == budget) break;
      best = std::max(best, renyi_divergence(cand, ctx, alpha));
      ++used;
    }
  }
  for (; used < budget; ++used) {
    auto cand = ball_sample(state, eps, rng);
    best = std::max(best, renyi_divergence(cand, ctx, alpha));
  }
  return {best, eps == 0.0};
}

inline ConventionalDivergence smoothed_divergence_conventional(
    const BlockDiagonalState& state, const ThermalContext& ctx, double alpha,
    double eps, std::size_t budget, std::uint64_t seed = 0x7f4a7c15) {
  std::mt19937_64 rng(seed);
  return smoothed_divergence_conventional(state, ctx, alpha, eps, budget, rng);
}

// Evaluation grid over alpha >= 0; always contains 0, 1 and infinity.
struct AlphaGrid {
  std::vector<double> values;

  static AlphaGrid default_grid() {
    AlphaGrid g;
    g.values = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5,  0.6, 0.7, 0.8,
                0.9, 1.0, 1.25, 1.5, 2.0, 3.0, 5.0, 10.0, kInf};
    return g;
  }

  static AlphaGrid with(std::vector<double> extra) {
    AlphaGrid g = default_grid();
    g.values.insert(g.values.end(), extra.begin(), extra.end());
    g.normalize();
    return g;
  }

  void normalize() {
    for (double a : values)
      if (!(a >= 0.0)) throw NegativeAlpha("grid alpha " + std::to_string(a));
    values.push_back(0.0);
    values.push_back(1.0);
    values.push_back(kInf);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
  }
};

struct DivergenceProfile {
  AlphaGrid grid;
  std::vector<double> d_values;  // nats
  std::vector<double> f_values;  // energy units
  std::optional<double> epsilon; // empty: exact profile
};

// Batch evaluation over the grid. Exact profiles are non-decreasing in
// alpha; smoothed profiles are monotone within each branch of the smoothing
// but may step down across the alpha = 1 boundary where the construction
// switches from the steep to the flattest state.
inline DivergenceProfile divergence_profile(
    const BlockDiagonalState& state, const ThermalContext& ctx,
    const AlphaGrid& grid, std::optional<double> eps = std::nullopt) {
  DivergenceProfile out;
  out.grid = grid;
  out.epsilon = eps;
  const double log_z = std::log(ctx.partition_function);
  std::optional<SmoothingResult> steep, flat;
  if (eps) {
    steep = steep_state(state, ctx, *eps);
    flat = flattest_state(state, ctx, *eps);
  }
  for (double a : grid.values) {
    double d;
    if (!eps) {
      d = renyi_divergence(state, ctx, a);
    } else {
      const auto& s = a <= 1.0 ? steep->result_state : flat->result_state;
      d = renyi_divergence(s, ctx, a);
    }
    out.d_values.push_back(d);
    out.f_values.push_back((-log_z + d) / ctx.beta);
  }
  return out;
}

// CSV export: "alpha,D_nats,F"; the infinite grid point prints as "inf".
inline std::string profile_to_csv(const DivergenceProfile& profile) {
  std::string out = "alpha,D_nats,F\n";
  char buf[160];
  for (std::size_t i = 0; i < profile.grid.values.size(); ++i) {
    double a = profile.grid.values[i];
    if (a == kInf) {
      std::snprintf(buf, sizeof buf, "inf,%.17g,%.17g\n", profile.d_values[i],
                    profile.f_values[i]);
    } else {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", a,
                    profile.d_values[i], profile.f_values[i]);
    }
    out += buf;
  }
  return out;
}

}  // namespace thermoflow
