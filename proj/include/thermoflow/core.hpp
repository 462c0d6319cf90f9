// Core value types for block-diagonal thermodynamic states: energy spectra,
// thermal contexts, probability vectors, beta-ordering and trace distance.
// All types are immutable values after construction; everything is plain
// double precision and safe for concurrent reads.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace thermoflow {

inline constexpr double kTolNorm = 1e-9;    // normalization checks
inline constexpr double kTolOrder = 1e-12;  // ordering / tie comparisons
inline constexpr double kInf = std::numeric_limits<double>::infinity();

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define THERMOFLOW_ERROR(Name)                                      \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

THERMOFLOW_ERROR(LengthMismatch);
THERMOFLOW_ERROR(NegativeProbability);
THERMOFLOW_ERROR(NotNormalized);
THERMOFLOW_ERROR(OutOfDomain);
THERMOFLOW_ERROR(NotInBall);
THERMOFLOW_ERROR(IndexOutOfRange);
THERMOFLOW_ERROR(IndexInversion);
THERMOFLOW_ERROR(EpsilonTooLarge);
THERMOFLOW_ERROR(NonTrivialSpectrum);
THERMOFLOW_ERROR(NegativeAlpha);
THERMOFLOW_ERROR(TooLarge);

#undef THERMOFLOW_ERROR

// Energy levels E_1..E_d; the zero of energy is arbitrary. No ordering is
// required here: ordering is a property of states, not spectra.
struct EnergySpectrum {
  std::vector<double> energies;

  std::size_t size() const { return energies.size(); }
};

inline EnergySpectrum make_spectrum(std::vector<double> energies) {
  if (energies.empty()) throw OutOfDomain("spectrum needs at least one level");
  for (double e : energies)
    if (!std::isfinite(e)) throw OutOfDomain("non-finite energy level");
  return EnergySpectrum{std::move(energies)};
}

// A spectrum together with an inverse temperature: partition function
// Z = sum_i e^{-beta E_i} and the thermal weights tau_i = e^{-beta E_i}/Z.
// The thermal state has full rank, so every tau_i > 0.
struct ThermalContext {
  EnergySpectrum spectrum;
  double beta = 1.0;
  double partition_function = 0.0;
  std::vector<double> gibbs_factors;    // e^{-beta E_i}
  std::vector<double> thermal_weights;  // tau_i

  std::size_t dim() const { return spectrum.size(); }
};

inline ThermalContext make_context(EnergySpectrum spectrum, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw OutOfDomain("beta must be positive and finite");
  ThermalContext ctx;
  ctx.spectrum = std::move(spectrum);
  ctx.beta = beta;
  ctx.gibbs_factors.reserve(ctx.dim());
  for (double e : ctx.spectrum.energies) {
    double g = std::exp(-beta * e);
    if (!(g > 0.0) || !std::isfinite(g))
      throw OutOfDomain("e^{-beta E} overflow/underflow; rescale energies");
    ctx.gibbs_factors.push_back(g);
  }
  ctx.partition_function =
      std::accumulate(ctx.gibbs_factors.begin(), ctx.gibbs_factors.end(), 0.0);
  ctx.thermal_weights.reserve(ctx.dim());
  for (double g : ctx.gibbs_factors)
    ctx.thermal_weights.push_back(g / ctx.partition_function);
  return ctx;
}

// Probability vector aligned index-by-index with an energy spectrum.
struct BlockDiagonalState {
  std::vector<double> probabilities;

  std::size_t size() const { return probabilities.size(); }
  double operator[](std::size_t i) const { return probabilities[i]; }
};

inline BlockDiagonalState make_state(std::vector<double> probabilities,
                                     const EnergySpectrum& spectrum,
                                     double tol_norm = kTolNorm) {
  if (probabilities.size() != spectrum.size())
    throw LengthMismatch("state has " + std::to_string(probabilities.size()) +
                         " entries, spectrum has " +
                         std::to_string(spectrum.size()));
  double sum = 0.0;
  for (double p : probabilities) {
    if (!std::isfinite(p) || p < 0.0)
      throw NegativeProbability("probability " + std::to_string(p));
    sum += p;
  }
  if (std::abs(sum - 1.0) > tol_norm)
    throw NotNormalized("sum deviates from 1 by " + std::to_string(sum - 1.0));
  return BlockDiagonalState{std::move(probabilities)};
}

inline BlockDiagonalState thermal_state(const ThermalContext& ctx) {
  return BlockDiagonalState{ctx.thermal_weights};
}

// State plus a permutation witnessing beta-ordering: applying `permutation`
// to the original indices yields p-hat with p-hat_i e^{beta E-hat_i}
// non-increasing. ordered[i] == original[permutation[i]].
struct BetaOrderedState {
  BlockDiagonalState state;  // original basis
  std::vector<std::size_t> permutation;
  std::vector<double> ordered_probabilities;
  std::vector<double> ordered_energies;

  std::size_t size() const { return ordered_probabilities.size(); }
};

// Sorts by p_i e^{beta E_i} descending. Comparison runs on log keys
// (ln p_i + beta E_i), which keeps ties scale-free; keys closer than
// tol_order are treated as equal and resolved by original index, so the
// ordering is stable and the thermal state maps to the identity.
inline BetaOrderedState beta_order(const BlockDiagonalState& state,
                                   const ThermalContext& ctx,
                                   double tol_order = kTolOrder) {
  const std::size_t d = state.size();
  if (d != ctx.dim())
    throw LengthMismatch("state/context dimension mismatch");
  std::vector<double> key(d);
  for (std::size_t i = 0; i < d; ++i)
    key[i] = state[i] > 0.0
                 ? std::log(state[i]) + ctx.beta * ctx.spectrum.energies[i]
                 : -kInf;
  std::vector<std::size_t> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });
  // collapse near-ties back to original-index order
  std::size_t run = 0;
  for (std::size_t i = 1; i <= d; ++i) {
    bool tied = i < d && ((key[perm[i - 1]] == -kInf && key[perm[i]] == -kInf) ||
                          key[perm[i - 1]] - key[perm[i]] <= tol_order);
    if (!tied) {
      std::sort(perm.begin() + run, perm.begin() + i);
      run = i;
    }
  }
  BetaOrderedState out;
  out.state = state;
  out.permutation = perm;
  out.ordered_probabilities.resize(d);
  out.ordered_energies.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    out.ordered_probabilities[i] = state[perm[i]];
    out.ordered_energies[i] = ctx.spectrum.energies[perm[i]];
  }
  return out;
}

// Maps a vector given in the ordered frame back to the original basis.
inline std::vector<double> to_original_basis(
    const std::vector<double>& ordered, const std::vector<std::size_t>& perm) {
  if (ordered.size() != perm.size()) throw LengthMismatch("permutation size");
  std::vector<double> out(ordered.size());
  for (std::size_t i = 0; i < ordered.size(); ++i) out[perm[i]] = ordered[i];
  return out;
}

// 1/2 sum_i |p_i - q_i| for states diagonal in the same basis.
inline double trace_distance(const BlockDiagonalState& a,
                             const BlockDiagonalState& b) {
  if (a.size() != b.size()) throw LengthMismatch("trace_distance");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

inline bool same_spectrum(const ThermalContext& a, const ThermalContext& b,
                          double tol = kTolOrder) {
  if (a.dim() != b.dim() || std::abs(a.beta - b.beta) > tol) return false;
  for (std::size_t i = 0; i < a.dim(); ++i)
    if (std::abs(a.spectrum.energies[i] - b.spectrum.energies[i]) > tol)
      return false;
  return true;
}

}  // namespace thermoflow
