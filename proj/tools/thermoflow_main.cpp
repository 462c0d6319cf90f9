// thermoflow CLI: smoothing constructions, thermo-majorization curves,
// divergence profiles, transition feasibility checks and finite-n bounds.
// Check-style subcommands exit 0 when feasible, 2 when infeasible and
// 3 when inconclusive; everything else exits 0 on success, 1 on error.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "thermoflow/io.hpp"

namespace tf = thermoflow;

namespace {

struct GlobalOpts {
  double tol = 1e-9;
  std::string grid_spec;
  std::uint64_t seed = 0x5eed;
  std::string output;
  std::string format = "json";
  bool bits = false;
};

tf::AlphaGrid parse_grid(const std::string& spec) {
  if (spec.empty()) return tf::AlphaGrid::default_grid();
  std::vector<double> extra;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok == "inf") {
      extra.push_back(tf::kInf);
    } else {
      extra.push_back(std::stod(tok));
    }
  }
  return tf::AlphaGrid::with(std::move(extra));
}

std::size_t class_cap(std::size_t flag_value) {
  if (flag_value != 0) return flag_value;
  if (const char* env = std::getenv("THERMOFLOW_CLASS_CAP"))
    return std::size_t(std::stoull(env));
  return tf::kDefaultClassCap;
}

void emit(const GlobalOpts& g, const std::string& text) {
  if (g.output.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    tf::write_text_file(g.output, text);
  }
}

int verdict_exit(tf::Verdict v) {
  switch (v) {
    case tf::Verdict::FeasibleTO:
    case tf::Verdict::FeasibleCTOGrid:
      return 0;
    case tf::Verdict::InfeasibleWitness:
      return 2;
    case tf::Verdict::Inconclusive:
      return 3;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"smoothed generalized free energies for thermal operations"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--tol", g.tol, "margin/domination tolerance");
  app.add_option("--grid", g.grid_spec, "extra alpha grid points, e.g. 0.5,2,inf");
  app.add_option("--seed", g.seed, "RNG seed for sampled bounds");
  app.add_option("--output,-o", g.output, "output path (default stdout)");
  app.add_option("--format", g.format, "json or csv where applicable")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--bits", g.bits, "report divergences in bits instead of nats");

  // smooth
  auto* smooth = app.add_subcommand("smooth", "flattest / steep / steepest state");
  smooth->fallthrough();
  std::string smooth_in, smooth_kind;
  double smooth_eps = 0.0;
  bool smooth_thermal = false;
  smooth->add_option("input", smooth_in, "state JSON")->required();
  smooth->add_option("--kind", smooth_kind, "flattest|steep|steepest|trivial-flattest")
      ->required()
      ->check(CLI::IsMember({"flattest", "steep", "steepest", "trivial-flattest"}));
  smooth->add_option("--eps", smooth_eps, "smoothing parameter")->required();
  smooth->add_flag("--thermal", smooth_thermal, "input file is a spectrum; use its thermal state");

  // curve
  auto* curve = app.add_subcommand("curve", "thermo-majorization curve CSV");
  curve->fallthrough();
  std::string curve_in;
  double curve_band = -1.0;
  bool curve_thermal = false;
  curve->add_option("input", curve_in, "state JSON")->required();
  curve->add_option("--band", curve_band, "add c +/- eps band columns");
  curve->add_flag("--thermal", curve_thermal, "use the thermal state of the spectrum");

  // divergence
  auto* div = app.add_subcommand("divergence", "D_alpha / F_alpha profile CSV");
  div->fallthrough();
  std::string div_in;
  double div_eps = -1.0;
  bool div_thermal = false;
  div->add_option("input", div_in, "state JSON")->required();
  div->add_option("--eps", div_eps, "smooth with this epsilon");
  div->add_flag("--thermal", div_thermal, "use the thermal state of the spectrum");

  // check
  auto* check = app.add_subcommand("check", "transition feasibility");
  check->fallthrough();
  std::string check_mode, check_rho, check_sigma;
  double check_eps1 = 0.05, check_eps2 = 0.05, check_eps = 0.05;
  long long check_n = 1;
  bool thermal_rho = false, thermal_sigma = false;
  check->add_option("mode", check_mode, "exact|to|theorem1|finite-n")
      ->required()
      ->check(CLI::IsMember({"exact", "to", "theorem1", "finite-n"}));
  check->add_option("rho", check_rho, "initial state JSON")->required();
  check->add_option("sigma", check_sigma, "final state JSON")->required();
  check->add_option("--eps1", check_eps1, "smoothing for rho (theorem1)");
  check->add_option("--eps2", check_eps2, "smoothing for sigma (theorem1)");
  check->add_option("--eps", check_eps, "smoothing (finite-n)");
  check->add_option("--n", check_n, "number of copies (finite-n)");
  check->add_flag("--thermal-rho", thermal_rho, "rho file is a spectrum; use thermal");
  check->add_flag("--thermal-sigma", thermal_sigma, "sigma file is a spectrum; use thermal");

  // aep
  auto* aep = app.add_subcommand("aep", "finite-n convergence CSV");
  aep->fallthrough();
  std::string aep_in, aep_nlist = "2,4,8,12";
  double aep_eps = 0.05;
  std::size_t aep_cap = 0;
  aep->add_option("input", aep_in, "state JSON")->required();
  aep->add_option("--n-list", aep_nlist, "comma-separated n values");
  aep->add_option("--eps", aep_eps, "smoothing parameter");
  aep->add_option("--cap", aep_cap, "tensor class cap (0: env/default)");

  // nstar
  auto* nstar = app.add_subcommand("nstar", "smallest n with the finite-n condition");
  nstar->fallthrough();
  std::string ns_rho, ns_sigma, ns_schedule = "cuberoot";
  double ns_eps = 0.1;
  long long ns_cap = 1LL << 30;
  bool ns_thermal_rho = false, ns_thermal_sigma = false;
  nstar->add_option("rho", ns_rho, "initial state JSON")->required();
  nstar->add_option("sigma", ns_sigma, "final state JSON")->required();
  nstar->add_option("--schedule", ns_schedule, "constant|inverse|cuberoot")
      ->check(CLI::IsMember({"constant", "inverse", "cuberoot"}));
  nstar->add_option("--eps", ns_eps, "epsilon for the constant schedule");
  nstar->add_option("--cap-n", ns_cap, "search cap");
  nstar->add_flag("--thermal-rho", ns_thermal_rho);
  nstar->add_flag("--thermal-sigma", ns_thermal_sigma);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*smooth) {
      auto in = tf::load_state(smooth_in, smooth_thermal);
      tf::SmoothingResult res;
      if (smooth_kind == "flattest")
        res = tf::flattest_state(in.state, in.context, smooth_eps);
      else if (smooth_kind == "steep")
        res = tf::steep_state(in.state, in.context, smooth_eps);
      else if (smooth_kind == "steepest")
        res = tf::steepest_state_small_eps(in.state, in.context, smooth_eps);
      else
        res = tf::trivial_flattest(in.state, in.context, smooth_eps);
      emit(g, tf::smoothing_result_to_json(in, res).dump(2));
      return 0;
    }

    if (*curve) {
      auto in = tf::load_state(curve_in, curve_thermal);
      auto c = tf::build_curve(tf::beta_order(in.state, in.context), in.context);
      emit(g, tf::curve_to_csv(c, curve_band >= 0.0
                                      ? std::optional<double>(curve_band)
                                      : std::nullopt));
      return 0;
    }

    if (*div) {
      auto in = tf::load_state(div_in, div_thermal);
      auto grid = parse_grid(g.grid_spec);
      auto profile = tf::divergence_profile(
          in.state, in.context, grid,
          div_eps >= 0.0 ? std::optional<double>(div_eps) : std::nullopt);
      if (g.bits) {
        for (auto& v : profile.d_values) v /= std::log(2.0);
      }
      emit(g, tf::profile_to_csv(profile));
      return 0;
    }

    if (*check) {
      auto rho = tf::load_state(check_rho, thermal_rho);
      auto sigma = tf::load_state(check_sigma, thermal_sigma);
      if (!tf::same_spectrum(rho.context, sigma.context))
        throw tf::LengthMismatch("mismatched spectra between rho and sigma");
      auto grid = parse_grid(g.grid_spec);
      if (check_mode == "finite-n") {
        auto rep = tf::corollary1_delta(rho.state, sigma.state, rho.context,
                                        check_n, check_eps);
        emit(g, tf::finite_n_report_to_json(rep).dump(2));
        return rep.condition_holds ? 0 : 3;
      }
      tf::TransitionReport rep;
      if (check_mode == "exact")
        rep = tf::check_exact_second_laws(rho.state, sigma.state, rho.context,
                                          grid, g.tol);
      else if (check_mode == "to")
        rep = tf::check_to_exact(rho.state, sigma.state, rho.context, g.tol);
      else
        rep = tf::check_theorem1(rho.state, sigma.state, rho.context,
                                 check_eps1, check_eps2, grid, g.tol);
      emit(g, tf::transition_report_to_json(rep).dump(2));
      return verdict_exit(rep.verdict);
    }

    if (*aep) {
      auto in = tf::load_state(aep_in);
      std::vector<long long> ns;
      std::stringstream ss(aep_nlist);
      std::string tok;
      while (std::getline(ss, tok, ',')) ns.push_back(std::stoll(tok));
      auto grid = parse_grid(g.grid_spec);
      emit(g, tf::convergence_csv(in.state, in.context, ns, grid, aep_eps,
                                  class_cap(aep_cap)));
      return 0;
    }

    if (*nstar) {
      auto rho = tf::load_state(ns_rho, ns_thermal_rho);
      auto sigma = tf::load_state(ns_sigma, ns_thermal_sigma);
      if (!tf::same_spectrum(rho.context, sigma.context))
        throw tf::LengthMismatch("mismatched spectra between rho and sigma");
      tf::EpsilonSchedule schedule;
      if (ns_schedule == "constant")
        schedule = tf::EpsilonSchedule::constant(ns_eps);
      else if (ns_schedule == "inverse")
        schedule = tf::EpsilonSchedule::inverse();
      else
        schedule = tf::EpsilonSchedule::inverse_cube_root();
      auto result =
          tf::find_n_star(rho.state, sigma.state, rho.context, schedule, ns_cap);
      tf::json j;
      if (result) {
        j["n_star"] = *result;
      } else {
        j["n_star"] = nullptr;
        j["note"] = "no n below the cap satisfies the condition; "
                    "F(rho) must strictly exceed F(sigma)";
      }
      emit(g, j.dump(2));
      return result ? 0 : 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
