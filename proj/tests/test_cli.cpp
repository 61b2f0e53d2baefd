#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "qds/bounds.hpp"
#include "qds/montecarlo.hpp"

using json = nlohmann::json;

namespace {

struct CmdResult {
  int code = -1;
  std::string out;
};

CmdResult run_cli(const std::string& args) {
  const std::string cmd = std::string(QDS_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CmdResult res;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) res.out.append(buf, n);
  const int status = pclose(pipe);
  res.code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string stderr_of(const std::string& args) {
  const std::string cmd =
      std::string(QDS_CLI_PATH) + " " + args + " 2>&1 1>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, n);
  pclose(pipe);
  return out;
}

int count_lines(const std::string& s) {
  int lines = 0;
  for (char c : s) {
    if (c == '\n') ++lines;
  }
  return lines;
}

}  // namespace

TEST_CASE("bounds command emits the headline numbers as json") {
  const auto res = run_cli("bounds --alpha 0.2 --length 1000000");
  REQUIRE(res.code == 0);
  const json j = json::parse(res.out);
  CHECK(j["parameters"]["alpha"].get<double>() == doctest::Approx(0.2));
  CHECK(j["parameters"]["length"].get<long>() == 1000000);
  CHECK(j["derived_rates"]["p_usd"].get<double>() ==
        doctest::Approx(0.0768837).epsilon(1e-5));
  const double rep = j["bounds_log10"]["repudiation"].get<double>();
  CHECK(rep <= -5.69);  // bound is at most 2e-6
  CHECK(rep >= -6.01);
  CHECK(j["constraints"]["ok"].get<bool>());
}

TEST_CASE("bounds json round-trips through its own parameters block") {
  const auto first = run_cli("bounds --alpha 0.35 --length 20000");
  REQUIRE(first.code == 0);
  const json j = json::parse(first.out);
  const auto& p = j["parameters"];
  char args[512];
  std::snprintf(args, sizeof(args),
                "bounds --alpha %.17g --length %ld --s-a %.17g --s-v %.17g "
                "--delta %.17g --r %.17g --epsilon %.17g",
                p["alpha"].get<double>(), p["length"].get<long>(),
                p["s_a"].get<double>(), p["s_v"].get<double>(),
                p["delta"].get<double>(), p["r"].get<double>(),
                p["epsilon"].get<double>());
  const auto second = run_cli(args);
  REQUIRE(second.code == 0);
  const json k = json::parse(second.out);
  // parameters were rounded to 6 significant digits on output, so the
  // reproduced bounds agree to that precision, not bit-exactly
  for (const char* key : {"honest_abort", "repudiation", "forge_passive",
                          "forge_active"}) {
    CHECK(k["bounds_log10"][key].get<double>() ==
          doctest::Approx(j["bounds_log10"][key].get<double>()).epsilon(1e-3));
  }
}

TEST_CASE("invalid thresholds exit 1 with a named violation and no stdout") {
  const auto res = run_cli("bounds --alpha 0.2 --length 1000 --s-a 0.5 --s-v 0.4");
  CHECK(res.code == 1);
  CHECK(res.out.empty());
  const std::string err =
      stderr_of("bounds --alpha 0.2 --length 1000 --s-a 0.5 --s-v 0.4");
  CHECK(err.find("s_a") != std::string::npos);

  const auto margin = run_cli("bounds --alpha 0.2 --length 1000 --r 0.99");
  CHECK(margin.code == 1);
  CHECK(margin.out.empty());
  CHECK(stderr_of("bounds --alpha 0.2 --length 1000 --r 0.99")
            .find("constraint violated") != std::string::npos);

  const auto unknown = run_cli("frobnicate");
  CHECK(unknown.code == 1);
  CHECK(unknown.out.empty());
}

TEST_CASE("simulate output is byte-identical across repeated invocations") {
  const std::string args =
      "simulate --scenario forge-passive --alpha 0.5 --length 100 "
      "--trials 2000 --seed 99";
  const auto a = run_cli(args + " --workers 1");
  const auto b = run_cli(args + " --workers 1");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  // worker count changes scheduling only, never the numbers
  const auto c = run_cli(args + " --workers 4");
  REQUIRE(c.code == 0);
  CHECK(a.out == c.out);
}

TEST_CASE("simulate honest run reports clean statistics") {
  const auto res = run_cli(
      "simulate --scenario honest --alpha 0.5 --length 200 --trials 500 "
      "--seed 3 --workers 2");
  REQUIRE(res.code == 0);
  const json j = json::parse(res.out);
  const auto& est = j["estimates"];
  CHECK(est["mismatch_per_element"]["successes"].get<long>() == 0);
  CHECK(est["null_click_per_element"]["successes"].get<long>() == 0);
  CHECK(est["repudiation"]["successes"].get<long>() == 0);
  const double frac = est["unambiguous_per_element"]["rate"].get<double>();
  CHECK(frac == doctest::Approx(qds::usd_success_probability(0.5)).epsilon(0.05));
}

TEST_CASE("simulate csv format lists one row per event") {
  const auto res = run_cli(
      "simulate --scenario honest --alpha 0.5 --length 50 --trials 100 "
      "--seed 1 --format csv");
  REQUIRE(res.code == 0);
  CHECK(res.out.rfind("event,successes,trials,rate,ci_low,ci_high\n", 0) == 0);
  CHECK(count_lines(res.out) == 8);  // header + 7 events
  CHECK(res.out.find("\nforge,") != std::string::npos);
}

TEST_CASE("oracle command reproduces the library value") {
  const auto res = run_cli("oracle --which honest-abort --alpha 0.5 --length 500");
  REQUIRE(res.code == 0);
  const json j = json::parse(res.out);
  const double exact = qds::exact_honest_abort(qds::default_params(0.5, 500));
  CHECK(j["oracle"]["value"].get<double>() == doctest::Approx(exact).epsilon(1e-5));

  const auto rep = run_cli(
      "oracle --which repudiation-product --alpha 0.5 --length 200");
  REQUIRE(rep.code == 0);
  const json k = json::parse(rep.out);
  const qds::ProtocolParams p = qds::default_params(0.5, 200);
  const double pm = qds::optimal_repudiation_marginal(p);
  CHECK(k["oracle"]["value"].get<double>() ==
        doctest::Approx(qds::exact_repudiation_product(p, pm)).epsilon(1e-5));

  CHECK(run_cli("oracle --which nonsense --alpha 0.5 --length 10").code == 1);
}

TEST_CASE("sweep csv has a header and one row per grid point") {
  const auto res = run_cli(
      "sweep --alpha-min 0.1 --alpha-max 0.5 --steps 5 --length 10000 "
      "--format csv");
  REQUIRE(res.code == 0);
  CHECK(res.out.rfind("alpha,p_usd,p_min,p_min_prime,", 0) == 0);
  CHECK(count_lines(res.out) == 6);
}

TEST_CASE("config file supplies values and flags override it") {
  const std::string path = "cli_test_config.tmp";
  {
    std::ofstream cfg(path);
    cfg << "# comment line\n";
    cfg << "alpha = 0.3\n";
    cfg << "length = 5000\n";
    cfg << "s-a = 0.01\n";
  }
  const auto from_cfg = run_cli("bounds --config " + path);
  REQUIRE(from_cfg.code == 0);
  const json j = json::parse(from_cfg.out);
  CHECK(j["parameters"]["alpha"].get<double>() == doctest::Approx(0.3));
  CHECK(j["parameters"]["length"].get<long>() == 5000);
  CHECK(j["parameters"]["s_a"].get<double>() == doctest::Approx(0.01));

  const auto overridden = run_cli("bounds --config " + path + " --alpha 0.5");
  REQUIRE(overridden.code == 0);
  const json k = json::parse(overridden.out);
  CHECK(k["parameters"]["alpha"].get<double>() == doctest::Approx(0.5));
  CHECK(k["parameters"]["length"].get<long>() == 5000);

  std::remove(path.c_str());

  const auto missing = run_cli("bounds --config no_such_file.cfg");
  CHECK(missing.code == 1);
  CHECK(missing.out.empty());
}

TEST_CASE("help exits zero and prints the subcommands") {
  const auto res = run_cli("--help");
  CHECK(res.code == 0);
  CHECK(res.out.find("bounds") != std::string::npos);
  CHECK(res.out.find("simulate") != std::string::npos);
  CHECK(res.out.find("oracle") != std::string::npos);
  CHECK(res.out.find("sweep") != std::string::npos);
}
