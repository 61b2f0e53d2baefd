#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qds/adversaries.hpp"
#include "qds/bounds.hpp"
#include "qds/montecarlo.hpp"
#include "qds/protocol.hpp"

using json = nlohmann::ordered_json;

namespace {

// Round to 6 significant digits so rendered numbers are stable and compact.
double sig6(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return std::strtod(buf, nullptr);
}

std::string fmt6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

std::map<std::string, std::string> load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::map<std::string, std::string> cfg;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!key.empty()) cfg[key] = value;
  }
  return cfg;
}

// One flag or config key feeding a variable; config applies only when the
// flag was not given on the command line.
struct Binding {
  std::string key;
  CLI::Option* opt;
  std::function<void(const std::string&)> set;
};

class OptionSet {
 public:
  void bind_double(CLI::App* sub, const std::string& flag, double& var,
                   const std::string& desc) {
    auto* opt = sub->add_option(flag, var, desc);
    bindings_.push_back({key_of(flag), opt, [&var](const std::string& s) {
                           var = std::stod(s);
                         }});
  }
  void bind_long(CLI::App* sub, const std::string& flag, long& var,
                 const std::string& desc) {
    auto* opt = sub->add_option(flag, var, desc);
    bindings_.push_back({key_of(flag), opt, [&var](const std::string& s) {
                           var = std::stol(s);
                         }});
  }
  void bind_u64(CLI::App* sub, const std::string& flag, std::uint64_t& var,
                const std::string& desc) {
    auto* opt = sub->add_option(flag, var, desc);
    bindings_.push_back({key_of(flag), opt, [&var](const std::string& s) {
                           var = std::stoull(s);
                         }});
  }
  void bind_int(CLI::App* sub, const std::string& flag, int& var,
                const std::string& desc) {
    auto* opt = sub->add_option(flag, var, desc);
    bindings_.push_back({key_of(flag), opt, [&var](const std::string& s) {
                           var = std::stoi(s);
                         }});
  }
  void bind_string(CLI::App* sub, const std::string& flag, std::string& var,
                   const std::string& desc) {
    auto* opt = sub->add_option(flag, var, desc);
    bindings_.push_back({key_of(flag), opt, [&var](const std::string& s) {
                           var = s;
                         }});
  }
  void bind_bool(CLI::App* sub, const std::string& flag, bool& var,
                 const std::string& desc) {
    auto* opt = sub->add_flag(flag, var, desc);
    bindings_.push_back({key_of(flag), opt, [&var](const std::string& s) {
                           var = (s == "1" || s == "true" || s == "yes");
                         }});
  }

  bool set_on_cli(const std::string& key) const {
    for (const auto& b : bindings_) {
      if (b.key == key) return b.opt->count() > 0;
    }
    return false;
  }

  // Returns true if the key was consumed either on the CLI or from config.
  bool was_set(const std::string& key,
               const std::map<std::string, std::string>& cfg) const {
    return set_on_cli(key) || cfg.count(key) > 0;
  }

  void apply_config(const std::map<std::string, std::string>& cfg) const {
    for (const auto& b : bindings_) {
      if (b.opt->count() == 0) {
        const auto it = cfg.find(b.key);
        if (it != cfg.end()) b.set(it->second);
      }
    }
  }

 private:
  static std::string key_of(const std::string& flag) {
    auto pos = flag.rfind("--");
    return pos == std::string::npos ? flag : flag.substr(pos + 2);
  }
  std::vector<Binding> bindings_;
};

struct CommonArgs {
  double alpha = 0.2;
  long length = 1000000;
  double s_a = 0.0, s_v = 0.0, delta = 0.0, r = 0.0, epsilon = 0.0;
  std::string format = "json";
  std::string config_path;

  void bind(CLI::App* sub, OptionSet& opts) {
    opts.bind_double(sub, "--alpha", alpha, "coherent-state amplitude");
    opts.bind_long(sub, "--length", length, "signature length L");
    opts.bind_double(sub, "--s-a", s_a, "authentication threshold");
    opts.bind_double(sub, "--s-v", s_v, "verification threshold");
    opts.bind_double(sub, "--delta", delta, "unambiguous count tolerance");
    opts.bind_double(sub, "--r", r, "null-port abort fraction");
    opts.bind_double(sub, "--epsilon", epsilon, "active-forging slack");
    opts.bind_string(sub, "--format", format, "output format: json or csv");
    sub->add_option("--config", config_path, "flat key = value config file");
  }

  // Omitted thresholds fall back to the reference defaults for (alpha, L).
  qds::ProtocolParams resolve(const OptionSet& opts,
                              const std::map<std::string, std::string>& cfg) const {
    const qds::ProtocolParams defaults = qds::default_params(alpha, length);
    qds::ProtocolParams p = defaults;
    if (opts.was_set("s-a", cfg)) p.s_a = s_a;
    if (opts.was_set("s-v", cfg)) p.s_v = s_v;
    if (opts.was_set("delta", cfg)) p.delta = delta;
    if (opts.was_set("r", cfg)) p.r = r;
    if (opts.was_set("epsilon", cfg)) p.epsilon = epsilon;
    p.validate();
    return p;
  }
};

json params_json(const qds::ProtocolParams& p) {
  return json{{"alpha", sig6(p.alpha)},   {"length", p.big_l},
              {"s_a", sig6(p.s_a)},       {"s_v", sig6(p.s_v)},
              {"delta", sig6(p.delta)},   {"r", sig6(p.r)},
              {"epsilon", sig6(p.epsilon)}};
}

json rates_json(const qds::DerivedRates& r) {
  return json{{"p_usd", sig6(r.p_usd)},
              {"p_min", sig6(r.p_min)},
              {"p_min_prime", sig6(r.p_min_prime)}};
}

json constraints_json(const qds::ConstraintReport& c) {
  return json{{"sv_gt_sa", c.sv_gt_sa},
              {"forge_margin", sig6(c.forge_margin)},
              {"delta_valid", c.delta_valid},
              {"ok", c.ok()}};
}

json bounds_json(const qds::BoundsReport& b) {
  return json{{"honest_abort", sig6(b.log10_honest_abort_ub)},
              {"repudiation", sig6(b.log10_repudiation_ub)},
              {"forge_passive", sig6(b.log10_forge_passive_ub)},
              {"forge_active", sig6(b.log10_forge_active_ub)}};
}

json estimate_json(const qds::Estimate& e) {
  json j{{"successes", e.successes}, {"trials", e.trials},
         {"rate", sig6(e.rate)},     {"ci_low", sig6(e.ci_low)},
         {"ci_high", sig6(e.ci_high)}};
  if (e.rate > 0.0 && e.rate < 1e-6) j["log10_rate"] = sig6(std::log10(e.rate));
  return j;
}

std::string bounds_csv_row(double alpha, const qds::BoundsReport& b) {
  std::ostringstream row;
  row << fmt6(alpha) << ',' << fmt6(b.rates.p_usd) << ',' << fmt6(b.rates.p_min)
      << ',' << fmt6(b.rates.p_min_prime) << ',' << fmt6(b.log10_repudiation_ub)
      << ',' << fmt6(b.log10_forge_passive_ub) << ','
      << fmt6(b.log10_forge_active_ub) << ',' << fmt6(b.log10_honest_abort_ub)
      << ',' << (b.constraints.ok() ? 1 : 0) << '\n';
  return row.str();
}

constexpr const char* kBoundsCsvHeader =
    "alpha,p_usd,p_min,p_min_prime,log10_rep,log10_forge_passive,"
    "log10_forge_active,log10_honest_abort,constraints_ok\n";

void require_format(const std::string& format) {
  if (format != "json" && format != "csv") {
    throw std::invalid_argument("format must be json or csv");
  }
}

int run_bounds(const CommonArgs& args, const OptionSet& opts,
               const std::map<std::string, std::string>& cfg, std::string& out) {
  require_format(args.format);
  const qds::ProtocolParams params = args.resolve(opts, cfg);
  const qds::BoundsReport report = qds::compute_bounds(params);
  if (!report.constraints.ok()) {
    std::string which = !report.constraints.sv_gt_sa ? "s_v > s_a"
                        : !report.constraints.delta_valid
                            ? "0 < delta < p_USD"
                            : "forge margin p'_min - s_v p_USD/(p_USD-delta) - "
                              "sqrt(epsilon+r) > 0";
    throw std::invalid_argument("constraint violated: " + which);
  }
  if (args.format == "json") {
    json j{{"parameters", params_json(params)},
           {"derived_rates", rates_json(report.rates)},
           {"bounds_log10", bounds_json(report)},
           {"constraints", constraints_json(report.constraints)}};
    out = j.dump(2) + "\n";
  } else {
    out = std::string(kBoundsCsvHeader) + bounds_csv_row(params.alpha, report);
  }
  return 0;
}

struct SimulateArgs {
  std::string scenario = "honest";
  std::uint64_t trials = 10000;
  std::uint64_t seed = 12345;
  long workers = 1;
  double p_mismatch = -1.0;  // <0: use the optimal marginal
  double scale = 1.0;
  bool align_to_guess = false;
  double amp_bob = std::nan("");
  double amp_charlie = std::nan("");
};

int run_simulate(const CommonArgs& args, const SimulateArgs& sim,
                 const OptionSet& opts,
                 const std::map<std::string, std::string>& cfg, std::string& out) {
  require_format(args.format);
  if (sim.trials == 0) throw std::invalid_argument("trials must be >= 1");
  if (sim.workers < 1) throw std::invalid_argument("workers must be >= 1");
  const qds::ProtocolParams params = args.resolve(opts, cfg);
  const double p_usd = qds::usd_success_probability(params.alpha);

  qds::Scenario scenario;
  if (sim.scenario == "honest") {
    scenario = qds::HonestScenario{};
  } else if (sim.scenario == "repudiate-abstract") {
    double pm = sim.p_mismatch >= 0.0 ? sim.p_mismatch
                                      : qds::optimal_repudiation_marginal(params);
    if (pm > 1.0) throw std::invalid_argument("p-mismatch must be <= 1");
    qds::RepudiationMarginals marg;
    marg.p_mismatch = pm;
    marg.p_match = std::max(0.0, p_usd - pm);
    marg.p_ambiguous = 1.0 - marg.p_match - marg.p_mismatch;
    scenario = qds::RepudiateAbstractScenario{marg};
  } else if (sim.scenario == "repudiate-physical") {
    const double ab = std::isnan(sim.amp_bob) ? params.alpha : sim.amp_bob;
    const double ac = std::isnan(sim.amp_charlie) ? params.alpha : sim.amp_charlie;
    scenario = qds::RepudiatePhysicalScenario{
        {qds::Amplitude(ab, 0.0), qds::Amplitude(ac, 0.0)}};
  } else if (sim.scenario == "forge-passive") {
    scenario = qds::ForgePassiveScenario{};
  } else if (sim.scenario == "forge-active") {
    scenario = qds::ForgeActiveScenario{{sim.scale, sim.align_to_guess}};
  } else {
    throw std::invalid_argument("unknown scenario: " + sim.scenario);
  }

  const qds::ExperimentResult res = qds::run_experiment(
      scenario, params, sim.trials, sim.seed, static_cast<unsigned>(sim.workers));
  const std::uint64_t elements =
      sim.trials * static_cast<std::uint64_t>(params.big_l);
  const qds::Estimate mismatch_el =
      qds::make_estimate(res.total_mismatches, elements);
  const qds::Estimate unambiguous_el =
      qds::make_estimate(res.total_unambiguous, elements);
  const qds::Estimate null_el =
      qds::make_estimate(res.total_null_clicks, elements);

  if (args.format == "json") {
    json pj = params_json(params);
    pj["scenario"] = sim.scenario;
    pj["trials"] = sim.trials;
    pj["seed"] = sim.seed;
    json j{{"parameters", pj},
           {"derived_rates", rates_json(qds::derived_rates(params.alpha))},
           {"estimates",
            {{"abort", estimate_json(res.abort)},
             {"auth_and_reject", estimate_json(res.auth_and_reject)},
             {"repudiation", estimate_json(res.repudiation)},
             {"forge", estimate_json(res.forge)},
             {"mismatch_per_element", estimate_json(mismatch_el)},
             {"unambiguous_per_element", estimate_json(unambiguous_el)},
             {"null_click_per_element", estimate_json(null_el)}}}};
    out = j.dump(2) + "\n";
  } else {
    std::ostringstream csv;
    csv << "event,successes,trials,rate,ci_low,ci_high\n";
    auto row = [&](const char* name, const qds::Estimate& e) {
      csv << name << ',' << e.successes << ',' << e.trials << ',' << fmt6(e.rate)
          << ',' << fmt6(e.ci_low) << ',' << fmt6(e.ci_high) << '\n';
    };
    row("abort", res.abort);
    row("auth_and_reject", res.auth_and_reject);
    row("repudiation", res.repudiation);
    row("forge", res.forge);
    row("mismatch_per_element", mismatch_el);
    row("unambiguous_per_element", unambiguous_el);
    row("null_click_per_element", null_el);
    out = csv.str();
  }
  return 0;
}

struct OracleArgs {
  std::string which = "honest-abort";
  double p_mismatch = -1.0;
};

int run_oracle(const CommonArgs& args, const OracleArgs& oracle,
               const OptionSet& opts,
               const std::map<std::string, std::string>& cfg, std::string& out) {
  require_format(args.format);
  const qds::ProtocolParams params = args.resolve(opts, cfg);
  double value;
  if (oracle.which == "honest-abort") {
    value = qds::exact_honest_abort(params);
  } else if (oracle.which == "forge-passive") {
    value = qds::exact_forge_passive(params);
  } else if (oracle.which == "repudiation-product") {
    const double pm = oracle.p_mismatch >= 0.0
                          ? oracle.p_mismatch
                          : qds::optimal_repudiation_marginal(params);
    value = qds::exact_repudiation_product(params, pm);
  } else {
    throw std::invalid_argument("unknown oracle: " + oracle.which);
  }
  if (args.format == "json") {
    json j{{"parameters", params_json(params)},
           {"oracle",
            {{"which", oracle.which}, {"value", sig6(value)}}}};
    if (value > 0.0) j["oracle"]["log10_value"] = sig6(std::log10(value));
    out = j.dump(2) + "\n";
  } else {
    out = "which,value\n" + oracle.which + "," + fmt6(value) + "\n";
  }
  return 0;
}

struct SweepArgs {
  double alpha_min = 0.05;
  double alpha_max = 1.0;
  int steps = 20;
};

int run_sweep(const CommonArgs& args, const SweepArgs& sweep, std::string& out) {
  require_format(args.format);
  const auto entries =
      qds::sweep_alpha(sweep.alpha_min, sweep.alpha_max, sweep.steps, args.length);
  if (args.format == "csv") {
    std::ostringstream csv;
    csv << kBoundsCsvHeader;
    for (const auto& [alpha, report] : entries) csv << bounds_csv_row(alpha, report);
    out = csv.str();
  } else {
    json points = json::array();
    for (const auto& [alpha, report] : entries) {
      points.push_back(json{{"alpha", sig6(alpha)},
                            {"derived_rates", rates_json(report.rates)},
                            {"bounds_log10", bounds_json(report)},
                            {"constraints", constraints_json(report.constraints)}});
    }
    json j{{"parameters",
            {{"alpha_min", sig6(sweep.alpha_min)},
             {"alpha_max", sig6(sweep.alpha_max)},
             {"steps", sweep.steps},
             {"length", args.length}}},
           {"sweep", points}};
    out = j.dump(2) + "\n";
  }
  return 0;
}

int parse_and_dispatch(int argc, char** argv) {
  CLI::App app{"Coherent-state quantum digital signature simulator"};
  app.require_subcommand(1);

  OptionSet bounds_opts, sim_opts, oracle_opts, sweep_opts;
  CommonArgs bounds_args, sim_common, oracle_args_common, sweep_common;
  SimulateArgs sim_args;
  OracleArgs oracle_args;
  SweepArgs sweep_args;

  auto* bounds_cmd = app.add_subcommand("bounds", "closed-form security bounds");
  bounds_args.bind(bounds_cmd, bounds_opts);

  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo protocol runs");
  sim_common.bind(sim_cmd, sim_opts);
  sim_opts.bind_string(sim_cmd, "--scenario", sim_args.scenario,
                       "honest | repudiate-abstract | repudiate-physical | "
                       "forge-passive | forge-active");
  sim_opts.bind_u64(sim_cmd, "--trials", sim_args.trials, "number of trials");
  sim_opts.bind_u64(sim_cmd, "--seed", sim_args.seed, "master seed");
  sim_opts.bind_long(sim_cmd, "--workers", sim_args.workers,
                     "worker threads (does not affect results)");
  sim_opts.bind_double(sim_cmd, "--p-mismatch", sim_args.p_mismatch,
                       "abstract repudiation mismatch marginal");
  sim_opts.bind_double(sim_cmd, "--scale", sim_args.scale,
                       "active response amplitude scale");
  sim_opts.bind_bool(sim_cmd, "--align-to-guess", sim_args.align_to_guess,
                     "align active response to Bob's guess");
  sim_opts.bind_double(sim_cmd, "--amp-bob", sim_args.amp_bob,
                       "physical repudiation amplitude to Bob");
  sim_opts.bind_double(sim_cmd, "--amp-charlie", sim_args.amp_charlie,
                       "physical repudiation amplitude to Charlie");

  auto* oracle_cmd = app.add_subcommand("oracle", "exact combinatorial oracles");
  oracle_args_common.bind(oracle_cmd, oracle_opts);
  oracle_opts.bind_string(oracle_cmd, "--which", oracle_args.which,
                          "honest-abort | forge-passive | repudiation-product");
  oracle_opts.bind_double(oracle_cmd, "--p-mismatch", oracle_args.p_mismatch,
                          "mismatch marginal for repudiation-product");

  auto* sweep_cmd = app.add_subcommand("sweep", "alpha sweep of the bounds");
  sweep_common.bind(sweep_cmd, sweep_opts);
  sweep_opts.bind_double(sweep_cmd, "--alpha-min", sweep_args.alpha_min, "grid start");
  sweep_opts.bind_double(sweep_cmd, "--alpha-max", sweep_args.alpha_max, "grid end");
  sweep_opts.bind_int(sweep_cmd, "--steps", sweep_args.steps, "grid points");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << e.what() << "\n";
    return 1;
  }

  try {
    std::string out;
    int rc = 2;
    if (bounds_cmd->parsed()) {
      std::map<std::string, std::string> cfg;
      if (!bounds_args.config_path.empty()) cfg = load_config(bounds_args.config_path);
      bounds_opts.apply_config(cfg);
      rc = run_bounds(bounds_args, bounds_opts, cfg, out);
    } else if (sim_cmd->parsed()) {
      std::map<std::string, std::string> cfg;
      if (!sim_common.config_path.empty()) cfg = load_config(sim_common.config_path);
      sim_opts.apply_config(cfg);
      rc = run_simulate(sim_common, sim_args, sim_opts, cfg, out);
    } else if (oracle_cmd->parsed()) {
      std::map<std::string, std::string> cfg;
      if (!oracle_args_common.config_path.empty()) {
        cfg = load_config(oracle_args_common.config_path);
      }
      oracle_opts.apply_config(cfg);
      rc = run_oracle(oracle_args_common, oracle_args, oracle_opts, cfg, out);
    } else if (sweep_cmd->parsed()) {
      std::map<std::string, std::string> cfg;
      if (!sweep_common.config_path.empty()) cfg = load_config(sweep_common.config_path);
      sweep_opts.apply_config(cfg);
      rc = run_sweep(sweep_common, sweep_args, out);
    }
    if (rc == 0) std::cout << out;
    return rc;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) { return parse_and_dispatch(argc, argv); }
