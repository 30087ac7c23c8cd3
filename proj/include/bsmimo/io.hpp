#pragma once

// File formats: far-field pattern CSV, EVM map CSV, CDF CSV, constellation CSV
// and the metrics.json bundle. Numbers are written in shortest round-trip form
// with locale-independent formatting; non-finite values as "inf" / "-inf" / "nan".

#include "bsmimo/beamspace.hpp"
#include "bsmimo/link_sim.hpp"
#include "bsmimo/sphere_field.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bsmimo
{

enum class AngleUnit
{
  deg,
  rad
};

// Pattern CSV layout:
//   # frequency: 2.45 GHz        (optional comment lines, "key: value")
//   # state: +j
//   # grid: 91 x 180
//   theta_deg,phi_deg,re_etheta,im_etheta,re_ephi,im_ephi
//   0,0,...
// Rows run theta-major over the full equiangular sphere (poles included, phi in [0, 360)).
// theta_rad/phi_rad column names switch the angle unit.
struct PatternFileHeader
{
  Index n_theta = 0;
  Index n_phi = 0;
  AngleUnit units = AngleUnit::deg;
  std::string frequency;
  std::string state;
};

struct PatternFile
{
  PatternFileHeader header;
  Pattern pattern;
};

std::string format_double(double value);
double parse_double(std::string_view text);

PatternFile read_pattern_csv(const std::filesystem::path& path);
Pattern load_pattern_csv(const std::filesystem::path& path);
void save_pattern_csv(const std::filesystem::path& path, const Pattern& pattern, const std::string& state = {},
                      const std::string& frequency = {});

void write_evm_map_csv(const std::filesystem::path& path, const EvmMap<double>& map);

// Sorted errors, one row per record: error,cumulative_probability
void write_cdf_csv(const std::filesystem::path& path, const std::vector<double>& sorted_errors);
std::vector<double> read_cdf_csv(const std::filesystem::path& path);

void write_constellation_csv(const std::filesystem::path& path,
                             const std::vector<std::pair<std::string, std::vector<ConstellationPoint>>>& sides);

// JSON value for a double; non-finite values become string sentinels.
nlohmann::json json_number(double value);
double json_to_double(const nlohmann::json& value);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

struct ResultBundle
{
  std::optional<nlohmann::json> metrics;
  std::optional<EvmMap<double>> evm;
  std::optional<MonteCarloResult> monte_carlo;
};

// Writes metrics.json, evm_map.csv and cdf_stream{1,2}.csv for the parts present.
std::vector<std::filesystem::path> save_results(const ResultBundle& results, const std::filesystem::path& out_dir);

} // namespace bsmimo
