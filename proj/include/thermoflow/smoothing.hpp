// Explicit epsilon-ball smoothing constructions: the flattest state (exists
// for every epsilon), the steep state, the steepest state in the small-eps
// regime, the trivial-Hamiltonian specializations, and the F/G index
// machinery the flattest construction is built on.
#pragma once

#include <optional>

#include "thermoflow/core.hpp"

namespace thermoflow {

struct ConstructionIndices {
  std::optional<std::size_t> m;   // flattest: head block is 1..M (1-based)
  std::optional<std::size_t> n;   // flattest: tail block is N..d
  std::optional<std::size_t> r;   // steep: last surviving level
  std::optional<std::size_t> n1;  // trivial flattest head
  std::optional<std::size_t> n2;  // trivial flattest tail
  std::optional<std::size_t> k;   // steepest: last level with p_k > 0
};

struct SmoothingResult {
  BlockDiagonalState result_state;  // original basis, same beta-ordering
  double epsilon_used = 0.0;        // the requested smoothing parameter
  ConstructionIndices indices;
  double achieved_distance = 0.0;   // trace distance from the input
};

namespace detail {

inline void check_epsilon(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0))
    throw OutOfDomain("epsilon must lie in [0,1], got " + std::to_string(eps));
}

inline std::vector<double> ordered_thermal(const BetaOrderedState& ordered,
                                           const ThermalContext& ctx) {
  std::vector<double> tau(ordered.size());
  for (std::size_t i = 0; i < ordered.size(); ++i)
    tau[i] = ctx.thermal_weights[ordered.permutation[i]];
  return tau;
}

// Ratio p-hat_i / tau_i; proportional to the beta-order weight p e^{beta E}.
inline std::vector<double> ordered_ratios(const std::vector<double>& p,
                                          const std::vector<double>& tau) {
  std::vector<double> r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r[i] = p[i] / tau[i];
  return r;
}

inline SmoothingResult finish(const BlockDiagonalState& input,
                              std::vector<double> ordered_result,
                              const std::vector<std::size_t>& perm, double eps,
                              ConstructionIndices idx) {
  SmoothingResult out;
  out.result_state =
      BlockDiagonalState{to_original_basis(ordered_result, perm)};
  out.epsilon_used = eps;
  out.indices = idx;
  out.achieved_distance = trace_distance(input, out.result_state);
  return out;
}

}  // namespace detail

// F(m) = sum_{i<=m} p_i - p_{m+1} e^{beta E_{m+1}} sum_{i<=m} e^{-beta E_i},
// for beta-ordered eigenvalues and 1 <= m <= d-1. Non-decreasing in m with
// F(1) >= 0; the smallest m with eps <= F(m) is the flattest head index M.
inline double f_index_function(const BetaOrderedState& ordered,
                               const ThermalContext& ctx, std::size_t m) {
  const std::size_t d = ordered.size();
  if (m < 1 || m > d - 1)
    throw IndexOutOfRange("F(m) needs 1 <= m <= d-1, got m=" +
                          std::to_string(m));
  auto tau = detail::ordered_thermal(ordered, ctx);
  double head_p = 0.0, head_t = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    head_p += ordered.ordered_probabilities[i];
    head_t += tau[i];
  }
  return head_p - ordered.ordered_probabilities[m] / tau[m] * head_t;
}

// G(m) = p_{m-1} e^{beta E_{m-1}} sum_{i>=m} e^{-beta E_i} - sum_{i>=m} p_i,
// for 2 <= m <= d. Non-increasing in m with G(d) >= 0; the largest m with
// eps <= G(m) is the flattest tail index N.
inline double g_index_function(const BetaOrderedState& ordered,
                               const ThermalContext& ctx, std::size_t m) {
  const std::size_t d = ordered.size();
  if (m < 2 || m > d)
    throw IndexOutOfRange("G(m) needs 2 <= m <= d, got m=" +
                          std::to_string(m));
  auto tau = detail::ordered_thermal(ordered, ctx);
  double tail_p = 0.0, tail_t = 0.0;
  for (std::size_t i = m - 1; i < d; ++i) {
    tail_p += ordered.ordered_probabilities[i];
    tail_t += tau[i];
  }
  return ordered.ordered_probabilities[m - 2] / tau[m - 2] * tail_t - tail_p;
}

// The state every member of the epsilon-ball can reach by thermal
// operations. For eps >= delta(rho, tau) this is the thermal state itself;
// otherwise the first M eigenvalues are cut by a total of eps and the last
// d-N+1 are raised by eps, each block equalized in beta-order weight.
inline SmoothingResult flattest_state(const BlockDiagonalState& state,
                                      const ThermalContext& ctx, double eps) {
  detail::check_epsilon(eps);
  const std::size_t d = state.size();
  auto ordered = beta_order(state, ctx);
  auto tau = detail::ordered_thermal(ordered, ctx);
  const auto& p = ordered.ordered_probabilities;

  double dist_thermal = trace_distance(state, thermal_state(ctx));
  if (eps >= dist_thermal) {
    return detail::finish(state, tau, ordered.permutation, eps, {});
  }

  auto r = detail::ordered_ratios(p, tau);
  std::vector<double> head_p(d), head_t(d);  // inclusive prefix sums
  double ap = 0.0, at = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    ap += p[i];
    at += tau[i];
    head_p[i] = ap;
    head_t[i] = at;
  }
  std::vector<double> tail_p(d), tail_t(d);  // inclusive suffix sums
  double bp = 0.0, bt = 0.0;
  for (std::size_t i = d; i-- > 0;) {
    bp += p[i];
    bt += tau[i];
    tail_p[i] = bp;
    tail_t[i] = bt;
  }

  std::size_t M = 0;  // 1-based
  for (std::size_t m = 1; m <= d - 1; ++m) {
    if (head_p[m - 1] - r[m] * head_t[m - 1] >= eps) {
      M = m;
      break;
    }
  }
  std::size_t N = 0;
  for (std::size_t m = d; m >= 2; --m) {
    if (r[m - 2] * tail_t[m - 1] - tail_p[m - 1] >= eps) {
      N = m;
      break;
    }
  }
  if (M == 0 || N == 0 || M >= N)
    throw IndexInversion("flattest indices M=" + std::to_string(M) +
                         " N=" + std::to_string(N) + " at eps=" +
                         std::to_string(eps));

  std::vector<double> out(p);
  double head_ratio = (head_p[M - 1] - eps) / head_t[M - 1];
  for (std::size_t i = 0; i < M; ++i) out[i] = tau[i] * head_ratio;
  double tail_ratio = (tail_p[N - 1] + eps) / tail_t[N - 1];
  for (std::size_t i = N - 1; i < d; ++i) out[i] = tau[i] * tail_ratio;

  ConstructionIndices idx;
  idx.m = M;
  idx.n = N;
  return detail::finish(state, std::move(out), ordered.permutation, eps, idx);
}

// An explicit epsilon-steep state: eps is added to the leading beta-ordered
// eigenvalue and the distribution tail is cut down to the index R.
inline SmoothingResult steep_state(const BlockDiagonalState& state,
                                   const ThermalContext& ctx, double eps) {
  detail::check_epsilon(eps);
  const std::size_t d = state.size();
  auto ordered = beta_order(state, ctx);
  const auto& p = ordered.ordered_probabilities;
  if (eps == 0.0) {
    return detail::finish(state, p, ordered.permutation, eps, {});
  }
  if (eps > 1.0 - p[0]) {
    std::vector<double> pure(d, 0.0);
    pure[0] = 1.0;
    return detail::finish(state, std::move(pure), ordered.permutation, eps, {});
  }
  std::vector<double> suffix(d + 1, 0.0);  // suffix[j] = sum_{i>j} p_i, 0-based
  for (std::size_t i = d; i-- > 0;) suffix[i] = suffix[i + 1] + p[i];
  std::size_t R = 1;
  for (std::size_t j = d; j >= 1; --j) {
    if (suffix[j - 1] >= eps) {
      R = j;
      break;
    }
  }
  std::vector<double> out(p);
  if (R == 1) {
    // eps exhausts everything below the top level; all mass lands on index 1
    std::fill(out.begin(), out.end(), 0.0);
    out[0] = 1.0;
  } else {
    out[0] = p[0] + eps;
    out[R - 1] = std::max(0.0, p[R - 1] + suffix[R] - eps);
    for (std::size_t i = R; i < d; ++i) out[i] = 0.0;
  }
  ConstructionIndices idx;
  idx.r = R;
  return detail::finish(state, std::move(out), ordered.permutation, eps, idx);
}

struct SteepestBounds {
  double eps_a = kInf;
  double eps_b = kInf;
  double eps_c = kInf;
  std::size_t k = 0;  // 1-based last index with p_k > 0
  double limit() const { return std::min({eps_a, eps_b, eps_c}); }
};

inline SteepestBounds steepest_epsilon_bounds(const BetaOrderedState& ordered,
                                              const ThermalContext& ctx) {
  const std::size_t d = ordered.size();
  const auto& p = ordered.ordered_probabilities;
  const auto& E = ordered.ordered_energies;
  std::vector<double> b(d);
  for (std::size_t i = 0; i < d; ++i) b[i] = std::exp(ctx.beta * E[i]);
  SteepestBounds out;
  for (std::size_t i = 0; i < d; ++i)
    if (p[i] > 0.0) {
      out.eps_a = std::min(out.eps_a, p[i]);
      out.k = i + 1;
    }
  for (std::size_t i = 1; i < d; ++i)
    if (E[i] > E[0])
      out.eps_b = std::min(out.eps_b,
                           (p[0] * b[0] - p[i] * b[i]) / (b[i] - b[0]));
  if (out.k >= 1) {
    const std::size_t kk = out.k - 1;
    for (std::size_t i = 0; i < d; ++i)
      if (p[i] > 0.0 && E[i] > E[kk])
        out.eps_c = std::min(out.eps_c,
                             (p[i] * b[i] - p[kk] * b[kk]) / (b[i] - b[kk]));
  }
  return out;
}

// The steepest state exists when eps <= min(eps_A, eps_B, eps_C): add eps to
// the top beta-ordered eigenvalue and remove it from the last nonzero one.
// The result thermo-majorizes every state in the epsilon-ball.
inline SmoothingResult steepest_state_small_eps(const BlockDiagonalState& state,
                                                const ThermalContext& ctx,
                                                double eps) {
  detail::check_epsilon(eps);
  auto ordered = beta_order(state, ctx);
  auto bounds = steepest_epsilon_bounds(ordered, ctx);
  if (eps > bounds.limit()) {
    const char* which = bounds.eps_a <= bounds.eps_b
                            ? (bounds.eps_a <= bounds.eps_c ? "eps_A" : "eps_C")
                            : (bounds.eps_b <= bounds.eps_c ? "eps_B" : "eps_C");
    throw EpsilonTooLarge("eps=" + std::to_string(eps) + " exceeds " + which +
                          "=" + std::to_string(bounds.limit()));
  }
  std::vector<double> out(ordered.ordered_probabilities);
  ConstructionIndices idx;
  idx.k = bounds.k;
  if (eps > 0.0 && bounds.k > 1) {
    out[0] += eps;
    out[bounds.k - 1] = std::max(0.0, out[bounds.k - 1] - eps);
  }
  return detail::finish(state, std::move(out), ordered.permutation, eps, idx);
}

// Trivial-Hamiltonian flattest state via the head-cut/tail-fill indices
// N1, N2. Kept as an independent arithmetic route from flattest_state so the
// two implementations can be checked against each other.
inline SmoothingResult trivial_flattest(const BlockDiagonalState& state,
                                        const ThermalContext& ctx, double eps,
                                        double tol_order = kTolOrder) {
  detail::check_epsilon(eps);
  const std::size_t d = state.size();
  if (d != ctx.dim()) throw LengthMismatch("trivial_flattest");
  for (double e : ctx.spectrum.energies)
    if (std::abs(e - ctx.spectrum.energies[0]) > tol_order)
      throw NonTrivialSpectrum("energy levels differ");

  auto ordered = beta_order(state, ctx);  // descending probabilities here
  const auto& p = ordered.ordered_probabilities;
  double dist_uniform = 0.0;
  for (double v : p) dist_uniform += std::abs(v - 1.0 / double(d));
  dist_uniform *= 0.5;
  if (eps >= dist_uniform) {
    std::vector<double> unif(d, 1.0 / double(d));
    return detail::finish(state, std::move(unif), ordered.permutation, eps, {});
  }

  std::vector<double> head(d + 1, 0.0), tail(d + 2, 0.0);
  for (std::size_t i = 0; i < d; ++i) head[i + 1] = head[i] + p[i];
  for (std::size_t i = d; i-- > 0;) tail[i + 1] = tail[i + 2] + p[i];

  std::size_t N1 = 0;
  for (std::size_t m = 1; m <= d - 1; ++m) {
    if (head[m] - double(m) * p[m] >= eps) {  // sum_{i<=m}(p_i - p_{m+1})
      N1 = m;
      break;
    }
  }
  std::size_t N2 = 0;
  for (std::size_t m = d; m >= 2; --m) {
    double members = double(d - m + 1);
    if (members * p[m - 2] - tail[m] >= eps) {  // sum_{i>=m}(p_{m-1} - p_i)
      N2 = m;
      break;
    }
  }
  if (N1 == 0 || N2 == 0 || N1 >= N2)
    throw IndexInversion("trivial flattest N1=" + std::to_string(N1) +
                         " N2=" + std::to_string(N2));

  std::vector<double> out(p);
  double head_value = (head[N1] - eps) / double(N1);
  for (std::size_t i = 0; i < N1; ++i) out[i] = head_value;
  double tail_value = (tail[N2] + eps) / double(d - N2 + 1);
  for (std::size_t i = N2 - 1; i < d; ++i) out[i] = tail_value;

  ConstructionIndices idx;
  idx.n1 = N1;
  idx.n2 = N2;
  return detail::finish(state, std::move(out), ordered.permutation, eps, idx);
}

// Fixed counterexample showing that no single ball state maximizes D_alpha
// for every alpha in [0,1]: within the eps=0.45 ball of p={0.55,0.35,0.1}
// with beta-factors {1,2,8}, the state {1,0,0} is the unique maximizer of
// D_0 (minimal support thermal weight), yet {0.45,0,0.55} beats it at D_1.
struct NonexistenceReport {
  double d1_spread = 0.0;          // D_1({0.45,0,0.55} || tau), nats
  double d1_support = 0.0;         // D_1({1,0,0} || tau), nats
  double d1_margin = 0.0;          // d1_spread - d1_support
  double min_support_weight = 0.0; // over supports reachable within the ball
  bool support_unique = false;     // minimum attained only by support {1}
  bool conclusion_holds = false;
};

inline NonexistenceReport steepest_nonexistence_demo() {
  const std::vector<double> p = {0.55, 0.35, 0.1};
  const std::vector<double> beta_factors = {1.0, 2.0, 8.0};
  const double eps = 0.45;
  std::vector<double> tau(3);
  double z = 0.0;
  for (double b : beta_factors) z += 1.0 / b;
  for (std::size_t i = 0; i < 3; ++i) tau[i] = (1.0 / beta_factors[i]) / z;

  auto kl = [&](const std::vector<double>& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
      if (a[i] > 0.0) s += a[i] * std::log(a[i] / tau[i]);
    return s;
  };

  NonexistenceReport rep;
  rep.d1_spread = kl({0.45, 0.0, 0.55});
  rep.d1_support = kl({1.0, 0.0, 0.0});
  rep.d1_margin = rep.d1_spread - rep.d1_support;

  // exhaustive over the 7 candidate supports: a support is reachable iff the
  // probability mass outside it can be moved within the ball
  double best = kInf;
  int best_mask = 0, best_count = 0;
  for (int mask = 1; mask < 8; ++mask) {
    double move = 0.0, weight = 0.0;
    for (int i = 0; i < 3; ++i) {
      if (mask & (1 << i))
        weight += tau[i];
      else
        move += p[i];
    }
    if (move > eps + 1e-15) continue;
    if (weight < best - 1e-15) {
      best = weight;
      best_mask = mask;
      best_count = 1;
    } else if (weight <= best + 1e-15) {
      ++best_count;
    }
  }
  rep.min_support_weight = best;
  rep.support_unique = best_count == 1 && best_mask == 1;
  rep.conclusion_holds = rep.support_unique && rep.d1_margin > 0.0;
  return rep;
}

}  // namespace thermoflow
