#include "bsmimo/commands.hpp"

#include "criteria.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace
{
using namespace bsmimo;

struct Options
{
  std::string config;
  Overrides overrides;
};

void add_common(CLI::App* cmd, Options& o)
{
  cmd->add_option("--config", o.config, "run configuration (JSON); built-in defaults when omitted")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.overrides.seed, "Monte-Carlo seed");
  cmd->add_option("--out", o.overrides.out, "output directory");
  cmd->add_option("--threads", o.overrides.threads, "worker threads (0 = all cores); results do not depend on it");
  cmd->add_option("--scenarios", o.overrides.scenarios, "Monte-Carlo scenario count");
}

void add_angles(CLI::App* cmd, Options& o)
{
  cmd->add_option("--tx-theta", o.overrides.tx_theta_deg, "transmit-side angle theta (deg)");
  cmd->add_option("--tx-phi", o.overrides.tx_phi_deg, "transmit-side angle phi (deg)");
  cmd->add_option("--rx1-theta", o.overrides.rx1_theta_deg, "receiver 1 theta (deg)");
  cmd->add_option("--rx1-phi", o.overrides.rx1_phi_deg, "receiver 1 phi (deg)");
  cmd->add_option("--rx2-theta", o.overrides.rx2_theta_deg, "receiver 2 theta (deg)");
  cmd->add_option("--rx2-phi", o.overrides.rx2_phi_deg, "receiver 2 phi (deg)");
}

RunConfig resolve(const Options& o)
{
  RunConfig config = o.config.empty() ? RunConfig{} : load_config(o.config);
  apply_overrides(config, o.overrides);
  return config;
}

int selftest(const Options& o)
{
  std::filesystem::path path = o.config;
  if (path.empty())
    path = std::filesystem::path(BSMIMO_SOURCE_DIR) / "configs" / "hand_scenario.json";
  RunConfig shipped = load_config(path);
  apply_overrides(shipped, o.overrides);

  int failed = 0;
  acceptance::run_all(shipped, [&](const acceptance::Outcome& outcome) {
    std::cout << acceptance::format_line(outcome) << std::endl;
    failed += !outcome.passed;
  });
  std::cout << (failed ? std::to_string(failed) + " of 8 checks failed" : "all 8 checks passed") << '\n';
  return failed ? 1 : 0;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Beam-space MIMO near-field perturbation analysis"};
  app.require_subcommand(1);

  Options o;
  auto* metrics = app.add_subcommand("metrics", "basis correlation, power imbalance, state power ratios, average EVM");
  auto* evm = app.add_subcommand("evm-map", "angular EVM map and its sphere average");
  auto* constellation = app.add_subcommand("constellation", "transmit- and receive-side constellation points");
  auto* monte_carlo = app.add_subcommand("monte-carlo", "seeded random-geometry sweep, constellation-error CDFs");
  auto* self = app.add_subcommand("selftest", "run the acceptance checks and print a pass/fail table");
  for (auto* cmd : {metrics, evm, constellation, monte_carlo, self})
    add_common(cmd, o);
  add_angles(constellation, o);

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError& e)
  {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try
  {
    if (self->parsed())
      return selftest(o);
    const RunConfig config = resolve(o);
    if (metrics->parsed())
      cmd_metrics(config, std::cout);
    else if (evm->parsed())
      cmd_evm_map(config, std::cout);
    else if (constellation->parsed())
      cmd_constellation(config, std::cout);
    else if (monte_carlo->parsed())
      cmd_monte_carlo(config, std::cout);
    return 0;
  }
  catch (const InputError& e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  catch (const DegenerateError& e)
  {
    std::cerr << "degenerate: " << e.what() << '\n';
    return 1;
  }
  catch (const std::exception& e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
