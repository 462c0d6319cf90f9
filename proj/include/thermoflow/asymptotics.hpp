// Tensor powers and finite-n machinery: multinomial class compression of
// rho^{(x)n} in log space, Hoeffding typicality, the AEP sandwich offsets
// (delta, g1, g2), the single finite-n sufficient condition Delta(n, eps),
// and the n* threshold search. The smoothing constructions generalize to
// (value, multiplicity) classes; a class is split when a cut boundary falls
// inside it.
#pragma once

#include "thermoflow/curves.hpp"
#include "thermoflow/divergences.hpp"

namespace thermoflow {

inline constexpr std::size_t kDefaultClassCap = 2'000'000;

// One composition class of the i.i.d. spectrum: `log_multiplicity` equal
// eigenvalues sharing one probability and one thermal weight.
struct SpectrumClass {
  double log_probability = 0.0;    // ln p of a single member; -inf if p = 0
  double log_thermal_weight = 0.0; // ln tau of a single member
  double log_multiplicity = 0.0;

  double mass() const { return std::exp(log_probability + log_multiplicity); }
  double thermal_mass() const {
    return std::exp(log_thermal_weight + log_multiplicity);
  }
  double log_ratio() const { return log_probability - log_thermal_weight; }
};

// Classes are kept beta-ordered: log_ratio non-increasing (ordering by
// p/tau is equivalent to ordering by p e^{beta E}).
struct TensorPowerSpectrum {
  long long n = 1;
  std::vector<SpectrumClass> classes;
};

namespace detail {

struct LogSumExp {
  double max = -kInf;
  double sum = 0.0;  // sum of exp(x - max)

  void add(double x) {
    if (x == -kInf) return;
    if (x <= max) {
      sum += std::exp(x - max);
    } else {
      sum = sum * std::exp(max - x) + 1.0;
      max = x;
    }
  }
  double value() const { return sum == 0.0 ? -kInf : max + std::log(sum); }
};

inline double class_count(std::size_t d, long long n) {
  double c = 1.0;  // C(n + d - 1, d - 1)
  for (std::size_t i = 1; i < d; ++i) c *= double(n + i) / double(i);
  return c;
}

// ln(count - x) given ln(count) and ln(x), stable for huge counts.
inline double log_count_minus(double log_count, double log_x) {
  if (log_x == -kInf) return log_count;
  double t = std::exp(log_x - log_count);
  if (t >= 1.0) return -kInf;
  return log_count + std::log1p(-t);
}

}  // namespace detail

// Multinomial compression of rho^{(x)n}: one class per composition of n
// over the d base levels, C(n+d-1, d-1) classes in total.
inline TensorPowerSpectrum tensor_power(const BlockDiagonalState& state,
                                        const ThermalContext& ctx, long long n,
                                        std::size_t cap = kDefaultClassCap) {
  if (n < 1) throw OutOfDomain("tensor power needs n >= 1");
  const std::size_t d = state.size();
  if (d != ctx.dim()) throw LengthMismatch("tensor_power");
  double count = detail::class_count(d, n);
  if (count > double(cap))
    throw TooLarge("tensor power needs " + std::to_string(count) +
                   " classes, cap is " + std::to_string(cap));

  std::vector<double> log_p(d), log_q(d);
  for (std::size_t i = 0; i < d; ++i) {
    log_p[i] = state[i] > 0.0 ? std::log(state[i]) : -kInf;
    log_q[i] = std::log(ctx.thermal_weights[i]);
  }
  const double log_n_fact = std::lgamma(double(n) + 1.0);

  TensorPowerSpectrum out;
  out.n = n;
  out.classes.reserve(std::size_t(count));
  std::vector<long long> k(d, 0);
  k[0] = n;
  while (true) {
    SpectrumClass c;
    c.log_probability = 0.0;
    c.log_thermal_weight = 0.0;
    c.log_multiplicity = log_n_fact;
    for (std::size_t i = 0; i < d; ++i) {
      if (k[i] == 0) continue;
      c.log_probability += double(k[i]) * log_p[i];
      c.log_thermal_weight += double(k[i]) * log_q[i];
      c.log_multiplicity -= std::lgamma(double(k[i]) + 1.0);
    }
    out.classes.push_back(c);
    // next composition: move one unit from the first nonzero slot rightwards
    std::size_t i = 0;
    while (i < d && k[i] == 0) ++i;
    if (i + 1 >= d) break;
    long long head = k[i];
    k[i] = 0;
    k[0] = head - 1;
    k[i + 1] += 1;
  }
  std::stable_sort(out.classes.begin(), out.classes.end(),
                   [](const SpectrumClass& a, const SpectrumClass& b) {
                     return a.log_ratio() > b.log_ratio();
                   });
  return out;
}

// D_alpha over a compressed spectrum, evaluated with log-sum-exp.
inline double weighted_renyi(const std::vector<SpectrumClass>& classes,
                             double alpha) {
  if (!(alpha >= 0.0)) throw NegativeAlpha("alpha=" + std::to_string(alpha));
  if (alpha == 0.0) {
    detail::LogSumExp support;
    for (const auto& c : classes)
      if (c.log_probability > -kInf)
        support.add(c.log_thermal_weight + c.log_multiplicity);
    return -support.value();
  }
  if (std::abs(alpha - 1.0) < 1e-6) {
    double s = 0.0;
    for (const auto& c : classes)
      if (c.log_probability > -kInf) s += c.mass() * c.log_ratio();
    return s;
  }
  if (alpha == kInf) {
    double best = -kInf;
    for (const auto& c : classes) best = std::max(best, c.log_ratio());
    return best;
  }
  detail::LogSumExp lse;
  for (const auto& c : classes) {
    if (c.log_probability == -kInf) continue;
    lse.add(c.log_multiplicity + alpha * c.log_probability +
            (1.0 - alpha) * c.log_thermal_weight);
  }
  return lse.value() / (alpha - 1.0);
}

inline double weighted_trace_distance_to_thermal(
    const std::vector<SpectrumClass>& classes) {
  double s = 0.0;
  for (const auto& c : classes) s += std::abs(c.mass() - c.thermal_mass());
  return 0.5 * s;
}

// Thermo-majorization curve of a compressed spectrum. All members of a
// class share one slope, so one kink per class boundary reproduces the
// full d^n polyline.
inline ThermoMajorizationCurve weighted_curve(
    const std::vector<SpectrumClass>& classes) {
  ThermoMajorizationCurve curve;
  curve.kinks.push_back({0.0, 0.0});
  double cx = 0.0, cy = 0.0;
  for (const auto& c : classes) {
    cx += c.thermal_mass();
    cy += c.mass();
    if (cx > curve.kinks.back().x) {
      curve.kinks.push_back({cx, cy});
    } else {
      curve.kinks.back().y = cy;  // fully underflowed class; keep x monotone
    }
  }
  double tx = curve.kinks.back().x, ty = curve.kinks.back().y;
  for (auto& p : curve.kinks) {
    p.x /= tx;
    p.y /= ty;
  }
  return curve;
}

// Flattest state on classes. Because the F/G step functions are constant
// inside a class, the head cut always ends at a class boundary and the tail
// fill always starts at one; no class split is needed here.
inline std::vector<SpectrumClass> weighted_flattest(
    const std::vector<SpectrumClass>& classes, double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw OutOfDomain("epsilon in [0,1]");
  const std::size_t L = classes.size();
  std::vector<SpectrumClass> out(classes);
  if (eps >= weighted_trace_distance_to_thermal(classes)) {
    for (auto& c : out) c.log_probability = c.log_thermal_weight;
    return out;
  }

  std::vector<double> head_p(L), log_head_t(L);
  detail::LogSumExp head_t;
  double hp = 0.0;
  for (std::size_t c = 0; c < L; ++c) {
    hp += classes[c].mass();
    head_t.add(classes[c].log_thermal_weight + classes[c].log_multiplicity);
    head_p[c] = hp;
    log_head_t[c] = head_t.value();
  }
  std::vector<double> tail_p(L), log_tail_t(L);
  detail::LogSumExp tail_t;
  double tp = 0.0;
  for (std::size_t c = L; c-- > 0;) {
    tp += classes[c].mass();
    tail_t.add(classes[c].log_thermal_weight + classes[c].log_multiplicity);
    tail_p[c] = tp;
    log_tail_t[c] = tail_t.value();
  }

  // first boundary where F >= eps: cut classes 0..cut-1
  std::size_t cut = 0;
  for (std::size_t c = 1; c < L; ++c) {
    double f = head_p[c - 1] -
               std::exp(classes[c].log_ratio() + log_head_t[c - 1]);
    if (f >= eps) {
      cut = c;
      break;
    }
  }
  // last boundary where G >= eps: fill classes fill..L-1
  std::size_t fill = 0;
  for (std::size_t c = L; c-- > 1;) {
    double g = std::exp(classes[c - 1].log_ratio() + log_tail_t[c]) - tail_p[c];
    if (g >= eps) {
      fill = c;
      break;
    }
  }
  if (cut == 0 || fill == 0 || cut > fill)
    throw IndexInversion("weighted flattest cut=" + std::to_string(cut) +
                         " fill=" + std::to_string(fill));

  double log_head_ratio = std::log(head_p[cut - 1] - eps) - log_head_t[cut - 1];
  for (std::size_t c = 0; c < cut; ++c)
    out[c].log_probability = out[c].log_thermal_weight + log_head_ratio;
  double log_tail_ratio = std::log(tail_p[fill] + eps) - log_tail_t[fill];
  for (std::size_t c = fill; c < L; ++c)
    out[c].log_probability = out[c].log_thermal_weight + log_tail_ratio;
  return out;
}

// Steep state on classes. The +eps lands on the first member and the tail
// cut index R generally falls inside a class, which is then split into an
// unchanged run, the boundary member, and a zeroed run. For multiplicities
// beyond 2^50 the member count at the boundary is continuum-valued; the
// resulting error is below one member mass.
inline std::vector<SpectrumClass> weighted_steep(
    const std::vector<SpectrumClass>& classes, double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw OutOfDomain("epsilon in [0,1]");
  const std::size_t L = classes.size();
  std::vector<SpectrumClass> out;
  if (eps == 0.0) return classes;

  auto push_zeroed = [&](const SpectrumClass& c, double log_mult) {
    if (log_mult == -kInf) return;
    SpectrumClass z = c;
    z.log_probability = -kInf;
    z.log_multiplicity = log_mult;
    out.push_back(z);
  };

  const SpectrumClass& first = classes.front();
  if (eps > 1.0 - std::exp(first.log_probability)) {
    SpectrumClass top = first;
    top.log_probability = 0.0;  // all mass on one member
    top.log_multiplicity = 0.0;
    out.push_back(top);
    push_zeroed(first, detail::log_count_minus(first.log_multiplicity, 0.0));
    for (std::size_t c = 1; c < L; ++c)
      push_zeroed(classes[c], classes[c].log_multiplicity);
    return out;
  }

  std::vector<double> suffix(L + 1, 0.0);
  for (std::size_t c = L; c-- > 0;)
    suffix[c] = suffix[c + 1] + classes[c].mass();
  std::size_t cr = 0;  // class containing the cut index R
  for (std::size_t c = L; c-- > 0;) {
    if (suffix[c] >= eps) {
      cr = c;
      break;
    }
  }

  // split class cr: keep_count untouched members, one boundary member
  // carrying the residual, the rest zeroed
  const SpectrumClass& bc = classes[cr];
  double mult = std::exp(bc.log_multiplicity);
  double log_keep, log_zero, boundary_value;
  if (mult <= double(1LL << 50)) {
    double m = std::exp(bc.log_probability);
    double keep = std::clamp(std::floor((suffix[cr] - eps) / m), 0.0, mult - 1.0);
    boundary_value = std::max(0.0, suffix[cr] - keep * m - eps);
    log_keep = keep > 0.0 ? std::log(keep) : -kInf;
    double zero = mult - keep - 1.0;
    log_zero = zero > 0.0 ? std::log(zero) : -kInf;
  } else {
    log_keep = std::min(std::log(suffix[cr] - eps) - bc.log_probability,
                        detail::log_count_minus(bc.log_multiplicity, 0.0));
    log_zero = detail::log_count_minus(bc.log_multiplicity, log_keep);
    boundary_value = 0.0;
  }

  for (std::size_t c = 0; c < cr; ++c) out.push_back(classes[c]);
  if (log_keep > -kInf) {
    SpectrumClass kept = bc;
    kept.log_multiplicity = log_keep;
    out.push_back(kept);
  }
  SpectrumClass edge = bc;
  edge.log_multiplicity = 0.0;
  edge.log_probability =
      boundary_value > 0.0 ? std::log(boundary_value) : -kInf;
  out.push_back(edge);
  push_zeroed(bc, log_zero);
  for (std::size_t c = cr + 1; c < L; ++c)
    push_zeroed(classes[c], classes[c].log_multiplicity);

  // +eps onto the very first member; out.front() holds the original first
  // member value (eps <= 1 - p_1 guarantees the cut never reaches it)
  SpectrumClass head = out.front();
  double head_p = std::exp(head.log_probability);
  if (std::exp(head.log_multiplicity) > 1.5) {
    SpectrumClass rest = head;
    rest.log_multiplicity = detail::log_count_minus(head.log_multiplicity, 0.0);
    head.log_multiplicity = 0.0;
    head.log_probability = std::log(head_p + eps);
    out.front() = head;
    out.insert(out.begin() + 1, rest);
  } else {
    out.front().log_probability = std::log(head_p + eps);
  }
  return out;
}

// Pr over the eigenvalue distribution of rho^{(x)n} that the ratio
// p~_k / q~_k lies within e^{n [D +- delta]}; exact class summation.
inline double typical_mass(const BlockDiagonalState& state,
                           const ThermalContext& ctx, long long n,
                           double delta, std::size_t cap = kDefaultClassCap) {
  if (!(delta >= 0.0)) throw OutOfDomain("delta must be nonnegative");
  double d1 = renyi_divergence(state, ctx, 1.0);
  double lo = double(n) * (d1 - delta), hi = double(n) * (d1 + delta);
  auto spectrum = tensor_power(state, ctx, n, cap);
  double mass = 0.0;
  for (const auto& c : spectrum.classes) {
    double r = c.log_ratio();
    if (r >= lo && r <= hi) mass += c.mass();
  }
  return mass;
}

// Sandwich offsets around D(rho || tau) from the AEP proof:
//   alpha in [0,1]:  D - delta <= (1/n) D^_alpha <= D + g1
//   alpha  >  1:     D - g2    <= (1/n) D^_alpha <= D + delta
struct AepBounds {
  double delta = 0.0;
  double g1 = 0.0;
  double g2 = 0.0;

  double lower_steep() const { return delta; }
  double upper_steep() const { return g1; }
  double lower_flat() const { return g2; }
  double upper_flat() const { return delta; }
};

namespace detail {

inline double hoeffding_delta(long long n, double eps) {
  return std::sqrt(std::log(2.0 / eps) / (2.0 * double(n)));
}

// g1 uses the beta-ordered leading eigenvalues p1, q1 of the base pair;
// p~1 = p1^n, q~1 = q1^n, and 2 e^{-n delta^2} = sqrt(2 eps).
inline double g1_bound(long long n, double eps, double p1, double q1,
                       double d1) {
  double delta = hoeffding_delta(n, eps);
  double pt1 = std::exp(double(n) * std::log(p1));
  double log_qt1 = double(n) * std::log(q1);
  return (1.0 - eps) * delta - eps * d1 +
         (pt1 + eps) * (std::log(pt1 + eps) - log_qt1) / double(n) +
         std::sqrt(2.0 * eps) * std::log(p1 / q1);
}

inline double g2_bound(long long n, double eps, double d1) {
  double delta = hoeffding_delta(n, eps);
  return delta + (std::sqrt(2.0 * eps) + eps) * (d1 - delta) -
         std::log(eps) / double(n);
}

inline std::pair<double, double> leading_pair(const BlockDiagonalState& state,
                                              const ThermalContext& ctx) {
  auto ordered = beta_order(state, ctx);
  std::size_t top = ordered.permutation[0];
  return {state[top], ctx.thermal_weights[top]};
}

}  // namespace detail

inline AepBounds aep_bounds(const BlockDiagonalState& state,
                            const ThermalContext& ctx, long long n,
                            double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw OutOfDomain("epsilon in (0,1)");
  if (n < 1) throw OutOfDomain("n >= 1");
  AepBounds b;
  b.delta = detail::hoeffding_delta(n, eps);
  double d1 = renyi_divergence(state, ctx, 1.0);
  auto [p1, q1] = detail::leading_pair(state, ctx);
  b.g1 = detail::g1_bound(n, eps, p1, q1, d1);
  b.g2 = detail::g2_bound(n, eps, d1);
  return b;
}

struct FiniteNReport {
  long long n = 1;
  double epsilon = 0.0;
  double delta = 0.0;  // sqrt(ln(2/eps) / 2n)
  double g1 = 0.0;     // sigma side
  double g2 = 0.0;     // rho side
  double Delta = 0.0;  // delta + max(g1, g2), nats
  bool condition_holds = false;
  std::optional<long long> n_star;
};

// The single sufficient condition F(rho) >= F(sigma) + beta^{-1} Delta(n,eps)
// for (rho^n)_steep -> (sigma^n)_fl via thermal operations.
inline FiniteNReport corollary1_delta(const BlockDiagonalState& rho,
                                      const BlockDiagonalState& sigma,
                                      const ThermalContext& ctx, long long n,
                                      double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw OutOfDomain("epsilon in (0,1)");
  if (n < 1) throw OutOfDomain("n >= 1");
  FiniteNReport rep;
  rep.n = n;
  rep.epsilon = eps;
  rep.delta = detail::hoeffding_delta(n, eps);
  double d_rho = renyi_divergence(rho, ctx, 1.0);
  double d_sigma = renyi_divergence(sigma, ctx, 1.0);
  auto [p1, q1] = detail::leading_pair(sigma, ctx);
  rep.g1 = detail::g1_bound(n, eps, p1, q1, d_sigma);
  rep.g2 = detail::g2_bound(n, eps, d_rho);
  rep.Delta = rep.delta + std::max(rep.g1, rep.g2);
  // F(rho) >= F(sigma) + Delta/beta is D(rho) >= D(sigma) + Delta on a
  // shared spectrum; comparing divergences avoids the common -ln Z term.
  rep.condition_holds = d_rho - d_sigma >= rep.Delta;
  return rep;
}

struct EpsilonSchedule {
  enum class Kind { Constant, Inverse, InverseCubeRoot };
  Kind kind = Kind::InverseCubeRoot;
  double value = 0.1;  // used by Constant

  static EpsilonSchedule constant(double eps) {
    return {Kind::Constant, eps};
  }
  static EpsilonSchedule inverse() { return {Kind::Inverse, 0.0}; }
  static EpsilonSchedule inverse_cube_root() {
    return {Kind::InverseCubeRoot, 0.0};
  }

  double operator()(long long n) const {
    double eps = value;
    if (kind == Kind::Inverse) eps = 1.0 / double(n);
    if (kind == Kind::InverseCubeRoot) eps = std::pow(double(n), -1.0 / 3.0);
    return std::clamp(eps, 1e-12, 1.0 - 1e-12);
  }
};

// Smallest n at which the finite-n condition holds under the epsilon
// schedule, found by doubling followed by bisection. Returns nothing when
// F(rho) <= F(sigma) (Delta > 0 makes the condition unreachable) or when no
// n below the cap works.
inline std::optional<long long> find_n_star(const BlockDiagonalState& rho,
                                            const BlockDiagonalState& sigma,
                                            const ThermalContext& ctx,
                                            const EpsilonSchedule& schedule,
                                            long long cap = 1LL << 30) {
  double margin = renyi_divergence(rho, ctx, 1.0) -
                  renyi_divergence(sigma, ctx, 1.0);
  if (!(margin > 0.0)) return std::nullopt;
  auto holds = [&](long long n) {
    return corollary1_delta(rho, sigma, ctx, n, schedule(n)).condition_holds;
  };
  if (holds(1)) return 1;
  long long lo = 1, hi = 2;
  while (!holds(hi)) {
    lo = hi;
    if (hi > cap / 2) return std::nullopt;
    hi *= 2;
  }
  while (hi - lo > 1) {  // invariant: !holds(lo) && holds(hi)
    long long mid = lo + (hi - lo) / 2;
    (holds(mid) ? hi : lo) = mid;
  }
  return hi;
}

// (1/1) D^_alpha of the smoothed tensor power; the constructions run on the
// compressed beta-ordered classes.
inline double smoothed_divergence_tensor(const BlockDiagonalState& state,
                                         const ThermalContext& ctx,
                                         long long n, double alpha, double eps,
                                         std::size_t cap = kDefaultClassCap) {
  auto spectrum = tensor_power(state, ctx, n, cap);
  auto smoothed = alpha <= 1.0 ? weighted_steep(spectrum.classes, eps)
                               : weighted_flattest(spectrum.classes, eps);
  return weighted_renyi(smoothed, alpha);
}

// Convergence CSV: "n,alpha,epsilon,normalized_D,lower_bound,upper_bound"
// with branch-specific sandwich bounds.
inline std::string convergence_csv(const BlockDiagonalState& state,
                                   const ThermalContext& ctx,
                                   const std::vector<long long>& ns,
                                   const AlphaGrid& grid, double eps,
                                   std::size_t cap = kDefaultClassCap) {
  std::string out = "n,alpha,epsilon,normalized_D,lower_bound,upper_bound\n";
  double d1 = renyi_divergence(state, ctx, 1.0);
  char buf[200];
  for (long long n : ns) {
    auto bounds = aep_bounds(state, ctx, n, eps);
    auto spectrum = tensor_power(state, ctx, n, cap);
    auto steep = weighted_steep(spectrum.classes, eps);
    auto flat = weighted_flattest(spectrum.classes, eps);
    for (double a : grid.values) {
      double v = weighted_renyi(a <= 1.0 ? steep : flat, a) / double(n);
      double lo = a <= 1.0 ? d1 - bounds.delta : d1 - bounds.g2;
      double hi = a <= 1.0 ? d1 + bounds.g1 : d1 + bounds.delta;
      if (a == kInf) {
        std::snprintf(buf, sizeof buf, "%lld,inf,%.17g,%.17g,%.17g,%.17g\n", n,
                      eps, v, lo, hi);
      } else {
        std::snprintf(buf, sizeof buf,
                      "%lld,%.17g,%.17g,%.17g,%.17g,%.17g\n", n, a, eps, v, lo,
                      hi);
      }
      out += buf;
    }
  }
  return out;
}

}  // namespace thermoflow
