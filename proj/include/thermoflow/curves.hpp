// Thermo-majorization curves: piecewise-linear curves of cumulative
// probability against cumulative normalized Gibbs weight. Curve domination
// decides reachability under thermal operations for block-diagonal states.
#pragma once

#include <cstdio>
#include <optional>

#include "thermoflow/core.hpp"

namespace thermoflow {

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
};

// Kinks are ordered with x strictly increasing (thermal weights are strictly
// positive), y non-decreasing, from (0,0) to (1,1). Built from a beta-ordered
// state the curve is concave; built from an arbitrary permutation it is the
// same polyline construction without the concavity guarantee.
struct ThermoMajorizationCurve {
  std::vector<CurvePoint> kinks;

  std::size_t segments() const { return kinks.empty() ? 0 : kinks.size() - 1; }
};

namespace detail {

// Shared point construction: x_k = sum_{i<=k} gibbs / total, y_k likewise.
// Normalizing by the totals pins the final kink at exactly (1,1).
inline ThermoMajorizationCurve polyline(const std::vector<double>& probs,
                                        const std::vector<double>& gibbs) {
  const std::size_t d = probs.size();
  ThermoMajorizationCurve c;
  c.kinks.resize(d + 1);
  double cx = 0.0, cy = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    cx += gibbs[k];
    cy += probs[k];
    c.kinks[k + 1] = {cx, cy};
  }
  for (std::size_t k = 1; k <= d; ++k) {
    c.kinks[k].x /= cx;
    c.kinks[k].y /= cy;
  }
  return c;
}

}  // namespace detail

inline ThermoMajorizationCurve build_curve(const BetaOrderedState& ordered,
                                           const ThermalContext& ctx) {
  if (ordered.size() != ctx.dim()) throw LengthMismatch("build_curve");
  std::vector<double> gibbs(ordered.size());
  for (std::size_t i = 0; i < ordered.size(); ++i)
    gibbs[i] = std::exp(-ctx.beta * ordered.ordered_energies[i]);
  return detail::polyline(ordered.ordered_probabilities, gibbs);
}

// Generalized curve c(p,E) for an arbitrary permutation of the levels.
inline ThermoMajorizationCurve build_curve_unordered(
    const BlockDiagonalState& state, const std::vector<std::size_t>& perm,
    const ThermalContext& ctx) {
  const std::size_t d = state.size();
  if (perm.size() != d || d != ctx.dim())
    throw LengthMismatch("build_curve_unordered");
  std::vector<bool> seen(d, false);
  for (std::size_t i : perm) {
    if (i >= d || seen[i]) throw OutOfDomain("not a permutation");
    seen[i] = true;
  }
  std::vector<double> probs(d), gibbs(d);
  for (std::size_t i = 0; i < d; ++i) {
    probs[i] = state[perm[i]];
    gibbs[i] = ctx.gibbs_factors[perm[i]];
  }
  return detail::polyline(probs, gibbs);
}

// Linear interpolation between bracketing kinks; exact at kinks.
inline double evaluate(const ThermoMajorizationCurve& curve, double x) {
  constexpr double slack = 1e-9;
  if (!(x >= -slack && x <= 1.0 + slack))
    throw OutOfDomain("curve evaluated at x=" + std::to_string(x));
  x = std::clamp(x, 0.0, 1.0);
  const auto& ks = curve.kinks;
  auto it = std::upper_bound(ks.begin(), ks.end(), x,
                             [](double v, const CurvePoint& p) { return v < p.x; });
  if (it == ks.begin()) return ks.front().y;
  if (it == ks.end()) return ks.back().y;
  const CurvePoint& hi = *it;
  const CurvePoint& lo = *(it - 1);
  return lo.y + (hi.y - lo.y) * (x - lo.x) / (hi.x - lo.x);
}

struct DominationResult {
  bool dominates = false;
  double worst_x = 0.0;    // x of the smallest (upper - lower) gap
  double worst_gap = 0.0;  // negative when violated
  explicit operator bool() const { return dominates; }
};

// True iff upper >= lower - tol at every kink of either curve. Checking the
// union of kink x-sets is sufficient: the difference of two piecewise-linear
// functions is piecewise-linear with breakpoints in that union.
inline DominationResult curve_dominates(const ThermoMajorizationCurve& upper,
                                        const ThermoMajorizationCurve& lower,
                                        double tol = 1e-9) {
  DominationResult r;
  r.worst_gap = kInf;
  auto probe = [&](double x) {
    double gap = evaluate(upper, x) - evaluate(lower, x);
    if (gap < r.worst_gap) {
      r.worst_gap = gap;
      r.worst_x = x;
    }
  };
  for (const CurvePoint& p : upper.kinks) probe(p.x);
  for (const CurvePoint& p : lower.kinks) probe(p.x);
  r.dominates = r.worst_gap >= -tol;
  return r;
}

struct BandCheckResult {
  bool inside = false;
  double max_deviation = 0.0;
};

// Theorem: any probe within trace distance eps of the center has a
// thermo-majorization curve inside the band [c - eps, c + eps].
inline BandCheckResult epsilon_band_check(const BlockDiagonalState& center,
                                          const BlockDiagonalState& probe,
                                          double epsilon,
                                          const ThermalContext& ctx,
                                          double tol = 1e-9) {
  double dist = trace_distance(center, probe);
  if (dist > epsilon + tol)
    throw NotInBall("trace distance " + std::to_string(dist) + " exceeds " +
                    std::to_string(epsilon));
  auto cc = build_curve(beta_order(center, ctx), ctx);
  auto cp = build_curve(beta_order(probe, ctx), ctx);
  double dev = 0.0;
  auto probe_at = [&](double x) {
    dev = std::max(dev, std::abs(evaluate(cp, x) - evaluate(cc, x)));
  };
  for (const CurvePoint& p : cc.kinks) probe_at(p.x);
  for (const CurvePoint& p : cp.kinks) probe_at(p.x);
  return {dev <= epsilon + tol, dev};
}

// CSV export, one kink per row, 17 significant digits.
inline std::string curve_to_csv(const ThermoMajorizationCurve& curve,
                                std::optional<double> band = std::nullopt) {
  std::string out = band ? "x,y,y_lo,y_hi\n" : "x,y\n";
  char buf[160];
  for (const CurvePoint& p : curve.kinks) {
    if (band) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", p.x, p.y,
                    p.y - *band, p.y + *band);
    } else {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.x, p.y);
    }
    out += buf;
  }
  return out;
}

}  // namespace thermoflow
