// twinfock command line tool.
//
//   twinfock run      <config> --out DIR [--seed S]
//   twinfock ensemble <config> --out DIR [--seed S]
//   twinfock cascade  --n N --k-max K --out DIR
//   twinfock bob      <config> --out DIR [--seed S] [--chi X]
//   twinfock verify   [--level quick|full]
//
// Exit codes: 0 success, 2 invalid configuration or arguments,
// 3 verification failure, 1 unexpected error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "twinfock/harness.hpp"
#include "twinfock/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Twin-Fock detection cascades, phase estimation, and counting statistics"};
  app.set_version_flag("--version", twinfock::kVersion);
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed_flag;
  std::optional<double> chi_flag;
  long long cascade_n = 0;
  int cascade_k_max = 0;
  std::string level = "quick";
  bool inject_failure = false;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option_function<std::uint64_t>(
           "--seed", [&](std::uint64_t v) { seed_flag = v; },
           "master seed (overrides master_seed in the config)");
  };

  CLI::App* run = app.add_subcommand("run", "simulate one detection trajectory");
  run->add_option("config", config_path, "experiment config file")->required();
  run->add_option("--out", out_dir, "output directory")->required();
  add_seed(run);

  CLI::App* ensemble = app.add_subcommand("ensemble", "simulate an ensemble of trajectories");
  ensemble->add_option("config", config_path, "experiment config file")->required();
  ensemble->add_option("--out", out_dir, "output directory")->required();
  add_seed(ensemble);

  CLI::App* cascade = app.add_subcommand("cascade", "forced + cascade from a balanced source");
  cascade->add_option("--n", cascade_n, "total particle number (even)")->required();
  cascade->add_option("--k-max", cascade_k_max, "last detection index k")->required();
  cascade->add_option("--out", out_dir, "output directory")->required();

  CLI::App* bob = app.add_subcommand("bob", "counting distribution after a trajectory");
  bob->add_option("config", config_path, "experiment config file")->required();
  bob->add_option("--out", out_dir, "output directory")->required();
  add_seed(bob);
  bob->add_option_function<double>(
         "--chi", [&](double v) { chi_flag = v; },
         "analyzer angle (default: the trajectory's estimated phase)");

  CLI::App* verify = app.add_subcommand("verify", "run the self-verification checks");
  verify->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  verify->add_flag("--inject-failure", inject_failure,
                   "append a check that always fails (tests the failure path)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // CLI11's parse failures are usage errors
  }

  if (run->parsed()) {
    return twinfock::harness::cmd_run(config_path, seed_flag, out_dir, std::cout, std::cerr);
  }
  if (ensemble->parsed()) {
    return twinfock::harness::cmd_ensemble(config_path, seed_flag, out_dir, std::cout, std::cerr);
  }
  if (cascade->parsed()) {
    return twinfock::harness::cmd_cascade(cascade_n, cascade_k_max, out_dir, std::cout,
                                          std::cerr);
  }
  if (bob->parsed()) {
    return twinfock::harness::cmd_bob(config_path, seed_flag, chi_flag, out_dir, std::cout,
                                      std::cerr);
  }
  return twinfock::harness::cmd_verify(level, inject_failure, std::cout, std::cerr);
}
