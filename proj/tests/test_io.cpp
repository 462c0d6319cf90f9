#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"
#include "thermoflow/io.hpp"

using namespace thermoflow;
using namespace tftest;

namespace {

std::string tmp_path(const std::string& name) {
  return std::string("tf_io_") + name;
}

void write_state_file(const std::string& path, double beta,
                      const std::vector<double>& energies,
                      const std::vector<double>& probabilities) {
  json j{{"beta", beta}, {"energies", energies}};
  if (!probabilities.empty()) j["probabilities"] = probabilities;
  write_text_file(path, j.dump(2));
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(THERMOFLOW_CLI_PATH) + " " + args +
                    " > tf_io_stdout.txt 2> tf_io_stderr.txt";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("state JSON round-trips bitwise") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t d = 2 + trial % 5;
    auto ctx = random_context(d, rng);
    auto st = random_state(d, rng);
    auto j = state_to_json(st, ctx);
    auto loaded = state_from_json(j);
    auto j2 = state_to_json(loaded.state, loaded.context);
    auto loaded2 = state_from_json(j2);
    for (std::size_t i = 0; i < d; ++i) {
      REQUIRE(loaded.state[i] == loaded2.state[i]);
      REQUIRE(loaded.context.spectrum.energies[i] ==
              loaded2.context.spectrum.energies[i]);
    }
    REQUIRE(loaded.context.beta == loaded2.context.beta);
  }
}

TEST_CASE("thermal synthesis from a spectrum file") {
  json j{{"beta", 1.0}, {"energies", {0.0, 1.0, 2.0}}};
  REQUIRE_THROWS_AS(state_from_json(j), Error);
  auto loaded = state_from_json(j, true);
  REQUIRE(loaded.state.size() == 3);
  REQUIRE(trace_distance(loaded.state, thermal_state(loaded.context)) == 0.0);
}

TEST_CASE("CLI: smooth reproduces the Fig. 2 flattest values") {
  write_state_file(tmp_path("fig2.json"), 1.0, std::vector<double>(6, 0.0),
                   {0.3, 0.25, 0.22, 0.1, 0.07, 0.06});
  int code = run_cli("smooth --kind flattest --eps 0.1 " + tmp_path("fig2.json") +
                     " -o " + tmp_path("fl.json"));
  REQUIRE(code == 0);
  auto out = read_json_file(tmp_path("fl.json"));
  const double expected[] = {0.225, 0.225, 0.22, 0.11, 0.11, 0.11};
  for (int i = 0; i < 6; ++i)
    REQUIRE(out["result_probabilities"][i].get<double>() ==
            Catch::Approx(expected[i]).margin(1e-12));
  REQUIRE(out["indices"]["M"] == 2);
  REQUIRE(out["indices"]["N"] == 4);

  // steep with eps = 0 echoes the input
  code = run_cli("smooth --kind steep --eps 0 " + tmp_path("fig2.json") +
                 " -o " + tmp_path("st.json"));
  REQUIRE(code == 0);
  auto echo = read_json_file(tmp_path("st.json"));
  REQUIRE(echo["result_probabilities"][0].get<double>() == 0.3);
  REQUIRE(echo["achieved_trace_distance"].get<double>() == 0.0);
}

TEST_CASE("CLI: steepest on the three-level example") {
  write_state_file(tmp_path("three.json"), 1.0,
                   {0.0, std::log(2.0), std::log(8.0)}, {0.55, 0.35, 0.1});
  int code = run_cli("smooth --kind steepest --eps 0.03 " +
                     tmp_path("three.json") + " -o " + tmp_path("stp.json"));
  REQUIRE(code == 0);
  auto out = read_json_file(tmp_path("stp.json"));
  // original basis: {0.52, 0.35, 0.13}
  REQUIRE(out["result_probabilities"][0].get<double>() ==
          Catch::Approx(0.52).margin(1e-12));
  REQUIRE(out["result_probabilities"][2].get<double>() ==
          Catch::Approx(0.13).margin(1e-12));

  // too large an epsilon surfaces the violated bound
  code = run_cli("smooth --kind steepest --eps 0.2 " + tmp_path("three.json"));
  REQUIRE(code == 1);
  REQUIRE(slurp("tf_io_stderr.txt").find("eps_C") != std::string::npos);
}

TEST_CASE("CLI: curve CSV") {
  write_state_file(tmp_path("fig2.json"), 1.0, std::vector<double>(6, 0.0),
                   {0.3, 0.25, 0.22, 0.1, 0.07, 0.06});
  int code = run_cli("curve " + tmp_path("fig2.json"));
  REQUIRE(code == 0);
  auto csv = slurp("tf_io_stdout.txt");
  REQUIRE(csv.rfind("x,y\n", 0) == 0);
  REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 8);  // header + 7 kinks

  code = run_cli("curve --band 0.1 " + tmp_path("fig2.json"));
  REQUIRE(code == 0);
  REQUIRE(slurp("tf_io_stdout.txt").rfind("x,y,y_lo,y_hi\n", 0) == 0);

  // the thermal state of any spectrum draws the two-point diagonal
  write_state_file(tmp_path("spec.json"), 1.0, {0.0, 0.3, 0.9}, {});
  code = run_cli("curve --thermal " + tmp_path("spec.json"));
  REQUIRE(code == 0);
  auto diag = slurp("tf_io_stdout.txt");
  REQUIRE(std::count(diag.begin(), diag.end(), '\n') == 5);
}

TEST_CASE("CLI: divergence profile") {
  write_state_file(tmp_path("three.json"), 1.0,
                   {0.0, std::log(2.0), std::log(8.0)}, {0.55, 0.35, 0.1});
  int code = run_cli("divergence " + tmp_path("three.json"));
  REQUIRE(code == 0);
  auto csv = slurp("tf_io_stdout.txt");
  REQUIRE(csv.rfind("alpha,D_nats,F\n", 0) == 0);
  REQUIRE(csv.find("inf,") != std::string::npos);
}

TEST_CASE("CLI: check exit codes") {
  write_state_file(tmp_path("three.json"), 1.0,
                   {0.0, std::log(2.0), std::log(8.0)}, {0.55, 0.35, 0.1});
  write_state_file(tmp_path("spec3.json"), 1.0,
                   {0.0, std::log(2.0), std::log(8.0)}, {});

  // anything reaches the thermal state
  REQUIRE(run_cli("check to " + tmp_path("three.json") + " " +
                  tmp_path("spec3.json") + " --thermal-sigma") == 0);
  // the reverse is infeasible
  REQUIRE(run_cli("check exact " + tmp_path("spec3.json") + " " +
                  tmp_path("three.json") + " --thermal-rho") == 2);
  // theorem1 with rho = sigma is feasible through the smoothing chain
  REQUIRE(run_cli("check theorem1 --eps1 0.1 --eps2 0.1 " +
                  tmp_path("three.json") + " " + tmp_path("three.json")) == 0);

  // finite-n report carries the quoted delta
  REQUIRE(run_cli("check finite-n --n 100 --eps 0.02 " + tmp_path("three.json") +
                  " " + tmp_path("spec3.json") + " --thermal-sigma -o " +
                  tmp_path("fn.json")) == 3);
  auto rep = read_json_file(tmp_path("fn.json"));
  REQUIRE(rep["delta"].get<double>() == Catch::Approx(0.15174).margin(1e-5));

  // mismatched spectra are rejected
  write_state_file(tmp_path("other.json"), 1.0, {0.0, 0.5, 1.0},
                   {0.5, 0.3, 0.2});
  REQUIRE(run_cli("check to " + tmp_path("three.json") + " " +
                  tmp_path("other.json")) == 1);
}

TEST_CASE("CLI: nstar") {
  write_state_file(tmp_path("qubit.json"), 1.0, {0.0, 4.0}, {0.0, 1.0});
  write_state_file(tmp_path("qspec.json"), 1.0, {0.0, 4.0}, {});
  int code = run_cli("nstar --schedule constant --eps 0.1 " +
                     tmp_path("qubit.json") + " " + tmp_path("qspec.json") +
                     " --thermal-sigma -o " + tmp_path("ns.json"));
  REQUIRE(code == 0);
  REQUIRE(read_json_file(tmp_path("ns.json"))["n_star"].get<long long>() == 3);

  // no threshold in the reverse direction
  code = run_cli("nstar --schedule constant --eps 0.1 " + tmp_path("qspec.json") +
                 " --thermal-rho " + tmp_path("qubit.json"));
  REQUIRE(code == 3);
}

TEST_CASE("CLI: aep convergence table") {
  write_state_file(tmp_path("qubit8.json"), 1.0, {0.0, 0.0}, {0.8, 0.2});
  int code = run_cli("aep --n-list 2,4 --eps 0.05 " + tmp_path("qubit8.json"));
  REQUIRE(code == 0);
  auto csv = slurp("tf_io_stdout.txt");
  REQUIRE(csv.rfind("n,alpha,epsilon,normalized_D,lower_bound,upper_bound\n",
                    0) == 0);
}

TEST_CASE("CLI: deterministic outputs for fixed inputs") {
  write_state_file(tmp_path("three.json"), 1.0,
                   {0.0, std::log(2.0), std::log(8.0)}, {0.55, 0.35, 0.1});
  REQUIRE(run_cli("check theorem1 --eps1 0.05 --eps2 0.05 " +
                  tmp_path("three.json") + " " + tmp_path("three.json") +
                  " -o " + tmp_path("rep1.json")) == 0);
  REQUIRE(run_cli("check theorem1 --eps1 0.05 --eps2 0.05 " +
                  tmp_path("three.json") + " " + tmp_path("three.json") +
                  " -o " + tmp_path("rep2.json")) == 0);
  REQUIRE(slurp(tmp_path("rep1.json")) == slurp(tmp_path("rep2.json")));
}
