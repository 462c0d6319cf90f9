// JSON I/O for states and reports. State files follow the schema
//   {"beta": <float>, "energies": [...], "probabilities": [...]}
// with a trivial Hamiltonian encoded as all-zero energies. Spectrum files
// are the same schema without probabilities; the thermal state can be
// synthesized from one.
#pragma once

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "thermoflow/asymptotics.hpp"
#include "thermoflow/smoothing.hpp"
#include "thermoflow/transitions.hpp"

namespace thermoflow {

using json = nlohmann::json;

struct LoadedState {
  ThermalContext context;
  BlockDiagonalState state;
};

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

inline ThermalContext context_from_json(const json& j) {
  if (!j.contains("beta") || !j.contains("energies"))
    throw Error("state file needs 'beta' and 'energies'");
  return make_context(make_spectrum(j["energies"].get<std::vector<double>>()),
                      j["beta"].get<double>());
}

// `thermal` substitutes the thermal state when the file carries only a
// spectrum (or when the caller asks for it explicitly).
inline LoadedState state_from_json(const json& j, bool thermal = false) {
  LoadedState out;
  out.context = context_from_json(j);
  if (thermal) {
    out.state = thermal_state(out.context);
    return out;
  }
  if (!j.contains("probabilities"))
    throw Error("state file has no 'probabilities' (use --thermal?)");
  out.state = make_state(j["probabilities"].get<std::vector<double>>(),
                         out.context.spectrum);
  return out;
}

inline LoadedState load_state(const std::string& path, bool thermal = false) {
  return state_from_json(read_json_file(path), thermal);
}

inline json state_to_json(const BlockDiagonalState& state,
                          const ThermalContext& ctx) {
  return json{{"beta", ctx.beta},
              {"energies", ctx.spectrum.energies},
              {"probabilities", state.probabilities}};
}

inline json indices_to_json(const ConstructionIndices& idx) {
  json j = json::object();
  if (idx.m) j["M"] = *idx.m;
  if (idx.n) j["N"] = *idx.n;
  if (idx.r) j["R"] = *idx.r;
  if (idx.n1) j["N1"] = *idx.n1;
  if (idx.n2) j["N2"] = *idx.n2;
  if (idx.k) j["k"] = *idx.k;
  return j;
}

inline json smoothing_result_to_json(const LoadedState& input,
                                     const SmoothingResult& result) {
  return json{{"input", state_to_json(input.state, input.context)},
              {"result_probabilities", result.result_state.probabilities},
              {"epsilon", result.epsilon_used},
              {"indices", indices_to_json(result.indices)},
              {"achieved_trace_distance", result.achieved_distance}};
}

inline json transition_report_to_json(const TransitionReport& rep) {
  json margins = json::array();
  for (const auto& m : rep.per_alpha_margins)
    margins.push_back(json{{"alpha", m.alpha == kInf ? json("inf") : json(m.alpha)},
                           {"margin", m.margin}});
  json j{{"verdict", to_string(rep.verdict)},
         {"margins", margins},
         {"eps1", rep.eps1},
         {"eps2", rep.eps2}};
  if (!rep.per_alpha_margins.empty())
    j["binding_alpha"] =
        rep.binding_alpha == kInf ? json("inf") : json(rep.binding_alpha);
  if (rep.curve_witness) j["curve_witness_x"] = *rep.curve_witness;
  if (rep.direct_feasible) j["direct_to_feasible"] = *rep.direct_feasible;
  return j;
}

inline json finite_n_report_to_json(const FiniteNReport& rep) {
  json j{{"n", rep.n},          {"epsilon", rep.epsilon},
         {"delta", rep.delta},  {"g1", rep.g1},
         {"g2", rep.g2},        {"Delta", rep.Delta},
         {"condition_holds", rep.condition_holds}};
  if (rep.n_star) j["n_star"] = *rep.n_star;
  return j;
}

}  // namespace thermoflow
