#include "bsmimo/commands.hpp"

#include <chrono>
#include <ostream>

namespace bsmimo
{
namespace
{
using json = nlohmann::json;

States load_states(const RunConfig& config, const Ratios& ratios)
{
  const auto& files = config.antenna.pattern_files;
  if (files.empty())
  {
    auto grid = build_grid<double>(config.n_theta, config.n_phi);
    return generate_mirror_pair(config.antenna.profile, grid, ratios);
  }

  std::vector<std::optional<Pattern>> loaded(ratios.size());
  for (const auto& [label, path] : files)
  {
    const auto idx = ratios.find(parse_state_label(label));
    if (!idx)
      throw InputError("pattern file for state " + label + " does not match the constellation");
    loaded[*idx] = load_pattern_csv(path);
  }
  const auto plus = ratios.index_of(Complex(1));
  const auto minus = ratios.index_of(Complex(-1));
  if (!loaded[plus] || !loaded[minus])
    throw InputError("pattern files for the +1 and -1 states are required");
  for (const auto& p : loaded)
    if (p && !same_grid(p->grid(), loaded[plus]->grid()))
      throw InputError("pattern files use different grids");

  const auto basis = compute_basis(*loaded[plus], *loaded[minus]);
  std::vector<Pattern> states;
  for (std::size_t i = 0; i < ratios.size(); ++i)
  {
    if (loaded[i])
      states.push_back(*loaded[i]);
    else if (config.antenna.synthesize_missing_states)
      states.push_back(synthesize_pattern(basis, Complex(1), ratios[i]));
    else
      throw InputError("no pattern file for state " + format_ratio(ratios[i]));
  }
  return States(ratios, std::move(states));
}

json basis_json(const Basis& basis)
{
  return {{"basis_correlation_db", json_number(basis_correlation_db(basis))},
          {"power_imbalance_db", json_number(power_imbalance_db(basis))},
          {"basis_power", {integrate_power(basis.b1), integrate_power(basis.b2)}}};
}

json evm_json(const EvmMap<double>& map, const EvmAverage<double>& avg)
{
  return {{"rms_linear", json_number(avg.rms_linear)},
          {"rms_db", json_number(avg.rms_db)},
          {"mean_db", json_number(avg.mean_db)},
          {"masked_fraction", map.masked_fraction()}};
}

// EVM values at or below this are rounding noise of an exact decomposition.
constexpr double kEvmNumericalZero = 1e-12;

EvmMap<double> reported_evm_map(const Pipeline& p)
{
  auto map = evm_map(p.perturbed_basis, p.perturbed, p.ratios);
  auto values = map.evm.values();
  for (Index i = 0; i < values.size(); ++i)
    if (values[i] <= kEvmNumericalZero)
      values[i] = 0;
  return {ScalarAngularMap<double>(map.evm.grid(), std::move(values)), std::move(map.masked)};
}

std::string db_text(double db)
{
  return format_double(db) + " dB";
}

} // namespace

Pipeline build_pipeline(const RunConfig& config)
{
  Constellation constellation(config.order, config.offset);
  Ratios ratios = constellation.ratio_set();
  States free_space = load_states(config, ratios);
  const auto psi = generate_perturbation(config.perturbation, free_space.grid(), ratios);
  States perturbed = apply_perturbation(free_space, psi);
  Basis free_basis = perturbed_basis(free_space);
  Basis hat = perturbed_basis(perturbed);
  return {std::move(constellation), std::move(ratios), std::move(free_space), std::move(perturbed),
          std::move(free_basis), std::move(hat)};
}

void apply_overrides(RunConfig& config, const Overrides& o)
{
  if (o.seed)
    config.monte_carlo.seed = *o.seed;
  if (o.out)
    config.out_dir = *o.out;
  if (o.threads)
    config.monte_carlo.threads = *o.threads;
  if (o.scenarios)
  {
    if (*o.scenarios < 1)
      throw InputError("--scenarios must be at least 1");
    config.monte_carlo.scenarios = *o.scenarios;
  }
  auto set = [](SolidAngle& a, const std::optional<double>& theta, const std::optional<double>& phi) {
    if (theta)
      a.theta = deg_to_rad(*theta);
    if (phi)
      a.phi = deg_to_rad(*phi);
  };
  set(config.tx_angle, o.tx_theta_deg, o.tx_phi_deg);
  set(config.rx_angles[0], o.rx1_theta_deg, o.rx1_phi_deg);
  set(config.rx_angles[1], o.rx2_theta_deg, o.rx2_phi_deg);
}

json cmd_metrics(const RunConfig& config, std::ostream& log)
{
  const auto p = build_pipeline(config);

  json ratio = json::object();
  json ratio_db = json::object();
  for (std::size_t i = 0; i < p.ratios.size(); ++i)
  {
    const auto label = format_ratio(p.ratios[i]);
    const double r = integrate_power(p.perturbed.pattern_at(i)) / integrate_power(p.free_space.pattern_at(i));
    ratio[label] = json_number(r);
    ratio_db[label] = json_number(10 * std::log10(r));
  }

  const auto map = reported_evm_map(p);
  json doc = {{"grid", {{"n_theta", p.free_space.grid()->n_theta()}, {"n_phi", p.free_space.grid()->n_phi()}}},
              {"constellation", {{"order", p.constellation.order()}, {"offset_deg", rad_to_deg(p.constellation.offset())}}},
              {"free_space", basis_json(p.free_basis)},
              {"perturbed", basis_json(p.perturbed_basis)},
              {"state_power_ratio", ratio},
              {"state_power_ratio_db", ratio_db},
              {"average_evm", evm_json(map, average_evm(map))}};

  save_results({doc, std::nullopt, std::nullopt}, config.out_dir);
  log << "basis correlation: free space " << db_text(basis_correlation_db(p.free_basis)) << ", perturbed "
      << db_text(basis_correlation_db(p.perturbed_basis)) << '\n'
      << "power imbalance: free space " << db_text(power_imbalance_db(p.free_basis)) << ", perturbed "
      << db_text(power_imbalance_db(p.perturbed_basis)) << '\n'
      << "wrote " << (config.out_dir / "metrics.json").string() << '\n';
  return doc;
}

EvmAverage<double> cmd_evm_map(const RunConfig& config, std::ostream& log)
{
  const auto p = build_pipeline(config);
  const auto map = reported_evm_map(p);
  const auto avg = average_evm(map);
  save_results({std::nullopt, map, std::nullopt}, config.out_dir);
  log << "average EVM: " << db_text(avg.rms_db) << " (rms over sphere), " << db_text(avg.mean_db)
      << " (dB-domain mean), masked fraction " << format_double(map.masked_fraction()) << '\n'
      << "wrote " << (config.out_dir / "evm_map.csv").string() << '\n';
  return avg;
}

std::vector<std::pair<std::string, std::vector<ConstellationPoint>>> cmd_constellation(const RunConfig& config,
                                                                                        std::ostream& log)
{
  const auto p = build_pipeline(config);
  const double cap = config.monte_carlo.condition_cap;
  const auto& h_basis = p.channel_basis(config.channel_basis);

  std::vector<std::pair<std::string, std::vector<ConstellationPoint>>> sides;
  sides.emplace_back("transmit", transmit_constellation(h_basis, p.perturbed, p.constellation, config.tx_angle, cap));
  const ReceiveGeometry geometry{config.rx_angles, config.monte_carlo.rx_polarizations};
  sides.emplace_back("receive", receive_constellation(p.perturbed, build_channel(h_basis, geometry), p.constellation, cap));

  const auto path = config.out_dir / "constellation.csv";
  write_constellation_csv(path, sides);
  log << "wrote " << path.string() << '\n';
  return sides;
}

json summary_json(const CdfSummary& summary)
{
  json q = json::object();
  for (const auto& [prob, value] : summary.quantiles)
    q[format_double(prob)] = json_number(value);
  json e = json::object();
  for (const auto& [threshold, frac] : summary.exceedance)
    e[format_double(threshold)] = frac;
  return {{"count", summary.count}, {"quantiles", q}, {"exceedance", e}};
}

MonteCarloResult cmd_monte_carlo(const RunConfig& config, std::ostream& log)
{
  const auto p = build_pipeline(config);
  const auto start = std::chrono::steady_clock::now();
  auto result = run_monte_carlo(p.perturbed, p.channel_basis(config.channel_basis), p.constellation, config.monte_carlo);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

  if (result.accepted == 0)
    throw DegenerateError("all " + std::to_string(result.rejected) + " scenarios were rejected as ill-conditioned");

  save_results({std::nullopt, std::nullopt, result}, config.out_dir);
  const auto& mc = config.monte_carlo;
  json report = {{"scenarios", mc.scenarios},
                 {"accepted", result.accepted},
                 {"rejected", result.rejected},
                 {"seed", mc.seed},
                 {"separation_deg", {mc.separation.min_deg, mc.separation.max_deg}},
                 {"condition_cap", mc.condition_cap},
                 {"channel_basis", config.channel_basis == ChannelBasis::perturbed ? "perturbed" : "free_space"},
                 {"stream1", summary_json(cdf_summary(result.errors[0]))},
                 {"stream2", summary_json(cdf_summary(result.errors[1]))}};
  write_json(config.out_dir / "monte_carlo.json", report);

  log << "scenarios: " << result.accepted << " accepted, " << result.rejected << " rejected\n"
      << "median constellation error: stream 1 " << format_double(quantile(result.errors[0], 0.5)) << ", stream 2 "
      << format_double(quantile(result.errors[1], 0.5)) << '\n'
      << "wall clock: " << elapsed.count() << " s\n"
      << "wrote " << (config.out_dir / "cdf_stream1.csv").string() << ", "
      << (config.out_dir / "cdf_stream2.csv").string() << '\n';
  return result;
}

} // namespace bsmimo
