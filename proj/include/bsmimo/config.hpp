#pragma once

#include "bsmimo/beamspace.hpp"
#include "bsmimo/link_sim.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bsmimo
{

enum class ChannelBasis
{
  perturbed, // pilot-calibrated receiver
  free_space
};

struct AntennaSource
{
  // Used when pattern_files is empty.
  AntennaProfile<double> profile = AntennaProfile<double>::default_profile();
  // State label ("+1", "-1", "+j", "-j", "phase:<deg>") -> pattern CSV.
  std::map<std::string, std::filesystem::path> pattern_files;
  bool synthesize_missing_states = false;
};

struct RunConfig
{
  Index n_theta = 91;
  Index n_phi = 180;
  int order = 4;
  double offset = 0; // rad
  AntennaSource antenna;
  std::vector<PerturbationLobe<double>> perturbation;
  ChannelBasis channel_basis = ChannelBasis::perturbed;
  MonteCarloConfig monte_carlo;
  SolidAngle tx_angle = SolidAngle::from_degrees(45, 294);
  std::array<SolidAngle, 2> rx_angles{SolidAngle::from_degrees(45, 294), SolidAngle::from_degrees(45, 298)};
  std::filesystem::path out_dir = "out";
};

Complex parse_state_label(const std::string& label);

// Unknown keys and out-of-range values are rejected; relative paths resolve against base_dir.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

} // namespace bsmimo
