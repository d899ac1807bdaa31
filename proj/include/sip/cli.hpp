#pragma once

#include "sip/bench.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace sip {
namespace cli {

namespace detail {

inline void add_override_flags(CLI::App* app, cfg::KeyValues& overrides) {
  const auto bind = [app, &overrides](const std::string& flag, const std::string& key,
                                      const std::string& help) {
    app->add_option_function<std::string>(
        flag, [&overrides, key](const std::string& v) { overrides[key] = v; }, help);
  };
  bind("--problem", "problem", "problem name (see list-problems)");
  bind("--method", "method", "agsip | sgsip | exchange | sipcom");
  bind("--regime", "regime", "schedule regime or 'auto'");
  bind("--k0", "k0", "schedule shift (negative = regime lower bound)");
  bind("--K", "K", "iteration horizon");
  bind("--seed", "seed", "instance / sampling seed");
  bind("--noise", "noise", "noise std for all three oracles");
  bind("--noise-f", "noise_std_f", "noise std of the objective gradient oracle");
  bind("--noise-g", "noise_std_g", "noise std of the constraint value oracle");
  bind("--noise-gprime", "noise_std_gprime", "noise std of the constraint gradient oracles");
  bind("--reps", "repetitions", "stochastic repetitions");
  bind("--record-every", "record_every", "trace sampling stride");
  bind("--out", "out", "output directory");
  bind("--label", "label", "output label (default method_regime)");
  bind("--tau", "tau", "tau coefficient (negative = regime lower bound)");
  bind("--tau-prime", "tau_prime", "tau' floor (negative = regime lower bound)");
  bind("--lambda-bound", "lambda_bound", "stand-in for |lambda*|_1 + 1");
  bind("--timing", "timing", "'wall' or 'none' (none -> reproducible bytes)");
  bind("--six-sample", "six_sample", "use six independent samples per iteration");
  bind("--exchange-tol", "tol", "exchange stopping tolerance");
  bind("--exchange-rounds", "max_rounds", "exchange round budget");
  bind("--inner-iterations", "iterations", "inner subgradient budget per exchange round");
  bind("--sipcom-c", "C", "sipcom step constant");
  bind("--sipcom-delta", "delta", "sipcom tolerance constant");
}

inline RunConfig build_config(const std::string& config_path, const cfg::KeyValues& overrides) {
  RunConfig rc;
  if (!config_path.empty()) apply_key_values(rc, cfg::parse_file(config_path));
  apply_key_values(rc, overrides);
  return rc;
}

}  // namespace detail

/// Entry point shared by the binary and the in-process tests.
/// Exit codes: 0 success, 1 runtime failure, 2 configuration rejected.
inline int dispatch(std::vector<std::string> args, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"benchmark harness for semi-infinite convex programs"};
  app.require_subcommand(1);

  std::string run_cfg_path, verify_cfg_path, compare_out = ".";
  cfg::KeyValues run_overrides, verify_overrides;
  std::vector<std::string> compare_cfg_paths;

  CLI::App* run = app.add_subcommand("run", "execute one configured solve and write its trace");
  run->add_option("--config", run_cfg_path, "key = value config file");
  detail::add_override_flags(run, run_overrides);

  CLI::App* compare =
      app.add_subcommand("compare", "run several configs on one problem; CSV + SVG plots");
  compare->add_option("configs", compare_cfg_paths, "config files (>= 2)")->required();
  compare->add_option("--out", compare_out, "output directory");

  CLI::App* verify =
      app.add_subcommand("verify", "evaluate the schedule's structural conditions");
  verify->add_option("--config", verify_cfg_path, "key = value config file");
  detail::add_override_flags(verify, verify_overrides);

  app.add_subcommand("list-problems", "list the shipped problem instances");

  try {
    std::vector<const char*> argv;
    argv.push_back("sipbench");
    for (const auto& a : args) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (app.got_subcommand("run"))
      return bench::cmd_run(detail::build_config(run_cfg_path, run_overrides), out);
    if (app.got_subcommand("verify"))
      return bench::cmd_verify(detail::build_config(verify_cfg_path, verify_overrides), out);
    if (app.got_subcommand("compare")) {
      std::vector<RunConfig> configs;
      for (const auto& path : compare_cfg_paths) configs.push_back(load_config(path));
      return bench::cmd_compare(std::move(configs), compare_out, out);
    }
    return bench::cmd_list_problems(out);
  } catch (const config_error& e) {
    err << "configuration rejected: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace cli
}  // namespace sip
