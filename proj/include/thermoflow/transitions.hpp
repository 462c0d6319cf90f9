// Feasibility verdicts for state transitions under (catalytic) thermal
// operations: the exact second laws over an alpha grid, the exact
// thermo-majorization check, and the smoothed sufficient condition for
// approximate transitions.
#pragma once

#include "thermoflow/curves.hpp"
#include "thermoflow/divergences.hpp"

namespace thermoflow {

enum class Verdict {
  FeasibleTO,       // exact curve domination passed
  FeasibleCTOGrid,  // free-energy condition passed on the grid (grid-limited)
  InfeasibleWitness,
  Inconclusive,
};

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::FeasibleTO: return "Feasible-TO";
    case Verdict::FeasibleCTOGrid: return "Feasible-CTO-grid";
    case Verdict::InfeasibleWitness: return "Infeasible-witness";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

struct AlphaMargin {
  double alpha = 0.0;
  double margin = 0.0;  // F_alpha(rho) - F_alpha(sigma), energy units
};

struct TransitionReport {
  Verdict verdict = Verdict::Inconclusive;
  std::vector<AlphaMargin> per_alpha_margins;
  double binding_alpha = 0.0;  // alpha of the minimal margin
  std::optional<double> curve_witness;  // x of worst domination violation
  double eps1 = 0.0;
  double eps2 = 0.0;
  std::optional<bool> direct_feasible;  // theorem-1 direct curve check
};

namespace detail {

// A margin below -tol flips the verdict to infeasible; a margin in
// [-tol, 0) cannot be told apart from an exact zero, so it reports
// inconclusive; anything >= 0 satisfies the >= condition as written.
inline Verdict grid_verdict(const std::vector<AlphaMargin>& margins,
                            double tol) {
  double worst = kInf;
  for (const auto& m : margins) worst = std::min(worst, m.margin);
  if (worst < -tol) return Verdict::InfeasibleWitness;
  if (worst < 0.0) return Verdict::Inconclusive;
  return Verdict::FeasibleCTOGrid;
}

inline void fill_binding(TransitionReport& rep) {
  double worst = kInf;
  for (const auto& m : rep.per_alpha_margins)
    if (m.margin < worst) {
      worst = m.margin;
      rep.binding_alpha = m.alpha;
    }
}

inline void require_same_spectrum(const ThermalContext& a,
                                  const ThermalContext& b) {
  if (!same_spectrum(a, b))
    throw LengthMismatch("states live on different spectra");
}

}  // namespace detail

// Exact second laws: F_alpha(rho) >= F_alpha(sigma) over the grid including
// the 0, 1 and infinity limits. A pass is necessarily grid-limited: the
// underlying condition quantifies over all alpha >= 0.
inline TransitionReport check_exact_second_laws(const BlockDiagonalState& rho,
                                                const BlockDiagonalState& sigma,
                                                const ThermalContext& ctx,
                                                const AlphaGrid& grid,
                                                double tol = 1e-9) {
  TransitionReport rep;
  for (double a : grid.values)
    rep.per_alpha_margins.push_back(
        {a, free_energy(rho, ctx, a) - free_energy(sigma, ctx, a)});
  detail::fill_binding(rep);
  rep.verdict = detail::grid_verdict(rep.per_alpha_margins, tol);
  return rep;
}

// Exact thermo-majorization: sigma is reachable from rho by a thermal
// operation iff the curve of rho dominates the curve of sigma. Grid-free.
inline TransitionReport check_to_exact(const BlockDiagonalState& rho,
                                       const BlockDiagonalState& sigma,
                                       const ThermalContext& ctx,
                                       double tol = 1e-9) {
  TransitionReport rep;
  auto cr = build_curve(beta_order(rho, ctx), ctx);
  auto cs = build_curve(beta_order(sigma, ctx), ctx);
  auto dom = curve_dominates(cr, cs, tol);
  if (dom.dominates) {
    rep.verdict = Verdict::FeasibleTO;
  } else {
    rep.verdict = Verdict::InfeasibleWitness;
    rep.curve_witness = dom.worst_x;
  }
  return rep;
}

// Smoothed sufficient condition: compares the smoothed free energies
// F^{eps1}(rho) >= F^{eps2}(sigma) over the grid and additionally runs the
// exact curve check on (rho_steep^{eps1}, sigma_fl^{eps2}). A direct pass
// certifies the transition between the smoothed states under plain thermal
// operations and subsumes the grid verdict.
inline TransitionReport check_theorem1(const BlockDiagonalState& rho,
                                       const BlockDiagonalState& sigma,
                                       const ThermalContext& ctx, double eps1,
                                       double eps2, const AlphaGrid& grid,
                                       double tol = 1e-9) {
  TransitionReport rep;
  rep.eps1 = eps1;
  rep.eps2 = eps2;

  auto rho_steep = steep_state(rho, ctx, eps1);
  auto rho_flat = flattest_state(rho, ctx, eps1);
  auto sigma_steep = steep_state(sigma, ctx, eps2);
  auto sigma_flat = flattest_state(sigma, ctx, eps2);

  for (double a : grid.values) {
    const auto& r = a <= 1.0 ? rho_steep.result_state : rho_flat.result_state;
    const auto& s = a <= 1.0 ? sigma_steep.result_state : sigma_flat.result_state;
    rep.per_alpha_margins.push_back(
        {a, (renyi_divergence(r, ctx, a) - renyi_divergence(s, ctx, a)) /
                ctx.beta});
  }
  detail::fill_binding(rep);

  auto cs = build_curve(beta_order(rho_steep.result_state, ctx), ctx);
  auto cf = build_curve(beta_order(sigma_flat.result_state, ctx), ctx);
  auto dom = curve_dominates(cs, cf, tol);
  rep.direct_feasible = dom.dominates;
  if (dom.dominates) {
    rep.verdict = Verdict::FeasibleTO;
  } else {
    rep.curve_witness = dom.worst_x;
    rep.verdict = detail::grid_verdict(rep.per_alpha_margins, tol);
  }
  return rep;
}

struct ApproximateOutputBound {
  double sum = 0.0;      // eps1 + eps2
  double clamped = 0.0;  // reported bound; trace distance cannot exceed 1
  bool was_clamped = false;
};

// Applying the channel found for the smoothed pair to the unsmoothed input
// lands within eps1 + eps2 of the target (data processing + triangle
// inequality for the trace distance).
inline ApproximateOutputBound approximate_output_bound(double eps1,
                                                       double eps2) {
  if (!(eps1 >= 0.0 && eps1 <= 1.0 && eps2 >= 0.0 && eps2 <= 1.0))
    throw OutOfDomain("epsilons must lie in [0,1]");
  ApproximateOutputBound b;
  b.sum = eps1 + eps2;
  b.clamped = std::min(b.sum, 1.0);
  b.was_clamped = b.sum > 1.0;
  return b;
}

}  // namespace thermoflow
