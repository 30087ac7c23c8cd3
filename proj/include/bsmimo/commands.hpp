#pragma once

#include "bsmimo/config.hpp"
#include "bsmimo/io.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>

namespace bsmimo
{

// Everything the subcommands derive from a RunConfig.
struct Pipeline
{
  Constellation constellation;
  Ratios ratios;
  States free_space;
  States perturbed;
  Basis free_basis;
  Basis perturbed_basis;

  // Basis the receiver uses to build its channel matrix.
  const Basis& channel_basis(ChannelBasis which) const
  {
    return which == ChannelBasis::perturbed ? perturbed_basis : free_basis;
  }
};

Pipeline build_pipeline(const RunConfig& config);

struct Overrides
{
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::optional<unsigned> threads;
  std::optional<std::size_t> scenarios;
  std::optional<double> tx_theta_deg, tx_phi_deg;
  std::optional<double> rx1_theta_deg, rx1_phi_deg, rx2_theta_deg, rx2_phi_deg;
};

void apply_overrides(RunConfig& config, const Overrides& overrides);

// Basis correlation, power imbalance, per-state power ratios and average EVM; writes metrics.json.
nlohmann::json cmd_metrics(const RunConfig& config, std::ostream& log);

// Writes evm_map.csv and prints the sphere-averaged EVM.
EvmAverage<double> cmd_evm_map(const RunConfig& config, std::ostream& log);

// Transmit side at config.tx_angle, receive side after ZF at config.rx_angles; writes constellation.csv.
std::vector<std::pair<std::string, std::vector<ConstellationPoint>>> cmd_constellation(const RunConfig& config,
                                                                                        std::ostream& log);

// Writes cdf_stream{1,2}.csv and monte_carlo.json; throws DegenerateError when every scenario is rejected.
MonteCarloResult cmd_monte_carlo(const RunConfig& config, std::ostream& log);

nlohmann::json summary_json(const CdfSummary& summary);

} // namespace bsmimo
