#include "bsmimo/config.hpp"

#include "bsmimo/io.hpp"

#include <fstream>
#include <set>

namespace bsmimo
{
namespace
{
using json = nlohmann::json;

void require_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed)
{
  if (!obj.is_object())
    throw InputError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items())
    if (!ok.count(key))
      throw InputError(where + ": unknown key '" + key + "'");
}

double number(const json& obj, const char* key, const std::string& where, double fallback)
{
  if (!obj.contains(key))
    return fallback;
  try
  {
    return json_to_double(obj.at(key));
  }
  catch (const std::exception&)
  {
    throw InputError(where + "." + key + ": expected a number");
  }
}

template <typename Int>
Int integer(const json& obj, const char* key, const std::string& where, Int fallback)
{
  if (!obj.contains(key))
    return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
    throw InputError(where + "." + key + ": expected a nonnegative integer");
  return static_cast<Int>(v.get<unsigned long long>());
}

Complex complex_value(const json& v, const std::string& where)
{
  if (v.is_number())
    return {v.get<double>(), 0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw InputError(where + ": expected a number or [re, im]");
}

SolidAngle direction(const json& obj, const std::string& where, SolidAngle fallback)
{
  require_keys(obj, where, {"theta_deg", "phi_deg"});
  return SolidAngle::from_degrees(number(obj, "theta_deg", where, rad_to_deg(fallback.theta)),
                                  number(obj, "phi_deg", where, rad_to_deg(fallback.phi)));
}

PolarizationSelect polarization(const std::string& s, const std::string& where)
{
  if (s == "theta")
    return PolarizationSelect::theta;
  if (s == "phi")
    return PolarizationSelect::phi;
  if (s == "both")
    return PolarizationSelect::both;
  throw InputError(where + ": polarization must be theta, phi or both");
}

void parse_antenna(const json& obj, const std::filesystem::path& base, AntennaSource& out)
{
  const std::string where = "antenna";
  require_keys(obj, where, {"profile", "lobes", "pattern_files", "synthesize_missing_states"});
  if (obj.contains("profile") && obj.at("profile") != "default")
    throw InputError(where + ".profile: only \"default\" is built in");
  if (obj.contains("lobes"))
  {
    out.profile.lobes.clear();
    for (std::size_t i = 0; i < obj.at("lobes").size(); ++i)
    {
      const auto& l = obj.at("lobes")[i];
      const std::string lw = where + ".lobes[" + std::to_string(i) + "]";
      require_keys(l, lw, {"theta_deg", "phi_deg", "width_deg", "e_theta", "e_phi"});
      FieldLobe<double> lobe{deg_to_rad(number(l, "theta_deg", lw, 90)), deg_to_rad(number(l, "phi_deg", lw, 0)),
                             deg_to_rad(number(l, "width_deg", lw, 30)),
                             l.contains("e_theta") ? complex_value(l.at("e_theta"), lw + ".e_theta") : Complex(0),
                             l.contains("e_phi") ? complex_value(l.at("e_phi"), lw + ".e_phi") : Complex(0)};
      if (!(lobe.width > 0))
        throw InputError(lw + ".width_deg must be positive");
      out.profile.lobes.push_back(lobe);
    }
    if (out.profile.lobes.empty())
      throw InputError(where + ".lobes is empty");
  }
  if (obj.contains("pattern_files"))
  {
    if (!obj.at("pattern_files").is_object())
      throw InputError(where + ".pattern_files: expected an object");
    for (const auto& [label, file] : obj.at("pattern_files").items())
    {
      parse_state_label(label);
      std::filesystem::path p = file.get<std::string>();
      if (p.is_relative())
        p = base / p;
      if (!std::filesystem::exists(p))
        throw IoError("pattern file not found: " + p.string());
      out.pattern_files[label] = p;
    }
  }
  if (obj.contains("synthesize_missing_states"))
    out.synthesize_missing_states = obj.at("synthesize_missing_states").get<bool>();
}

std::vector<PerturbationLobe<double>> parse_perturbation(const json& obj)
{
  const std::string where = "perturbation";
  require_keys(obj, where, {"lobes"});
  std::vector<PerturbationLobe<double>> lobes;
  if (!obj.contains("lobes"))
    return lobes;
  for (std::size_t i = 0; i < obj.at("lobes").size(); ++i)
  {
    const auto& l = obj.at("lobes")[i];
    const std::string lw = where + ".lobes[" + std::to_string(i) + "]";
    require_keys(l, lw, {"state", "polarization", "theta_deg", "phi_deg", "width_deg", "amplitude", "phase_deg"});
    PerturbationLobe<double> lobe;
    const std::string state = l.value("state", "all");
    if (state != "all")
      lobe.state = parse_state_label(state);
    lobe.polarization = polarization(l.value("polarization", "both"), lw + ".polarization");
    lobe.theta = deg_to_rad(number(l, "theta_deg", lw, 90));
    lobe.phi = deg_to_rad(number(l, "phi_deg", lw, 0));
    lobe.width = deg_to_rad(number(l, "width_deg", lw, 30));
    lobe.amplitude = number(l, "amplitude", lw, 0);
    lobe.phase = deg_to_rad(number(l, "phase_deg", lw, 0));
    if (!(lobe.width > 0))
      throw InputError(lw + ".width_deg must be positive");
    lobes.push_back(lobe);
  }
  return lobes;
}

void parse_channel(const json& obj, RunConfig& cfg)
{
  const std::string where = "channel";
  require_keys(obj, where, {"basis", "rx_polarization", "condition_cap", "noise_variance"});
  const std::string basis = obj.value("basis", "perturbed");
  if (basis == "perturbed")
    cfg.channel_basis = ChannelBasis::perturbed;
  else if (basis == "free_space")
    cfg.channel_basis = ChannelBasis::free_space;
  else
    throw InputError(where + ".basis must be perturbed or free_space");

  if (obj.contains("rx_polarization"))
  {
    const auto& pols = obj.at("rx_polarization");
    if (!pols.is_array() || pols.size() != 2)
      throw InputError(where + ".rx_polarization: expected two entries");
    for (int m = 0; m < 2; ++m)
    {
      const std::string pw = where + ".rx_polarization[" + std::to_string(m) + "]";
      require_keys(pols[m], pw, {"theta", "phi"});
      Vector2c p(pols[m].contains("theta") ? complex_value(pols[m].at("theta"), pw + ".theta") : Complex(0),
                 pols[m].contains("phi") ? complex_value(pols[m].at("phi"), pw + ".phi") : Complex(0));
      if (std::abs(p.norm() - 1.0) > 1e-9)
        throw InputError(pw + ": polarization vector must have unit norm");
      cfg.monte_carlo.rx_polarizations[m] = p;
    }
  }
  cfg.monte_carlo.condition_cap = number(obj, "condition_cap", where, kDefaultConditionCap);
  if (!(cfg.monte_carlo.condition_cap >= 1))
    throw InputError(where + ".condition_cap must be at least 1");
  cfg.monte_carlo.noise.variance = number(obj, "noise_variance", where, 0);
  if (!(cfg.monte_carlo.noise.variance >= 0))
    throw InputError(where + ".noise_variance must be nonnegative");
}

void parse_monte_carlo(const json& obj, MonteCarloConfig& mc)
{
  const std::string where = "monte_carlo";
  require_keys(obj, where, {"scenarios", "separation_deg", "seed", "threads"});
  mc.scenarios = integer<std::size_t>(obj, "scenarios", where, mc.scenarios);
  mc.seed = integer<std::uint64_t>(obj, "seed", where, mc.seed);
  mc.threads = integer<unsigned>(obj, "threads", where, mc.threads);
  if (obj.contains("separation_deg"))
  {
    const auto& s = obj.at("separation_deg");
    if (!s.is_array() || s.size() != 2 || !s[0].is_number() || !s[1].is_number())
      throw InputError(where + ".separation_deg: expected [min, max]");
    mc.separation = {s[0].get<double>(), s[1].get<double>()};
  }
  if (mc.scenarios < 1)
    throw InputError(where + ".scenarios must be at least 1");
  if (!(mc.separation.min_deg > 0) || !(mc.separation.min_deg <= mc.separation.max_deg) ||
      !(mc.separation.max_deg <= 180))
    throw InputError(where + ".separation_deg must satisfy 0 < min <= max <= 180");
}

} // namespace

Complex parse_state_label(const std::string& label)
{
  if (label == "+1" || label == "1")
    return {1, 0};
  if (label == "-1")
    return {-1, 0};
  if (label == "+j" || label == "j")
    return {0, 1};
  if (label == "-j")
    return {0, -1};
  if (label.rfind("phase:", 0) == 0)
    return std::polar(1.0, deg_to_rad(parse_double(label.substr(6))));
  throw InputError("unknown antenna state '" + label + "'");
}

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir)
{
  require_keys(doc, "config",
               {"grid", "constellation", "antenna", "perturbation", "channel", "monte_carlo", "geometry", "output"});
  RunConfig cfg;
  if (doc.contains("grid"))
  {
    const auto& g = doc.at("grid");
    require_keys(g, "grid", {"n_theta", "n_phi"});
    cfg.n_theta = integer<Index>(g, "n_theta", "grid", cfg.n_theta);
    cfg.n_phi = integer<Index>(g, "n_phi", "grid", cfg.n_phi);
    if (cfg.n_theta < 3 || cfg.n_phi < 4)
      throw InputError("grid: n_theta >= 3 and n_phi >= 4 required");
  }
  if (doc.contains("constellation"))
  {
    const auto& c = doc.at("constellation");
    require_keys(c, "constellation", {"order", "offset_deg"});
    cfg.order = integer<int>(c, "order", "constellation", cfg.order);
    cfg.offset = deg_to_rad(number(c, "offset_deg", "constellation", 0));
    if (cfg.order < 2 || cfg.order % 2 != 0)
      throw InputError("constellation.order must be even and at least 2 (the +1/-1 states define the basis)");
  }
  if (doc.contains("antenna"))
    parse_antenna(doc.at("antenna"), base_dir, cfg.antenna);
  if (doc.contains("perturbation"))
    cfg.perturbation = parse_perturbation(doc.at("perturbation"));
  if (doc.contains("channel"))
    parse_channel(doc.at("channel"), cfg);
  if (doc.contains("monte_carlo"))
    parse_monte_carlo(doc.at("monte_carlo"), cfg.monte_carlo);
  if (doc.contains("geometry"))
  {
    const auto& g = doc.at("geometry");
    require_keys(g, "geometry", {"tx", "rx1", "rx2"});
    if (g.contains("tx"))
      cfg.tx_angle = direction(g.at("tx"), "geometry.tx", cfg.tx_angle);
    if (g.contains("rx1"))
      cfg.rx_angles[0] = direction(g.at("rx1"), "geometry.rx1", cfg.rx_angles[0]);
    if (g.contains("rx2"))
      cfg.rx_angles[1] = direction(g.at("rx2"), "geometry.rx2", cfg.rx_angles[1]);
  }
  if (doc.contains("output"))
  {
    require_keys(doc.at("output"), "output", {"dir"});
    cfg.out_dir = doc.at("output").value("dir", "out");
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open config " + path.string());
  json doc;
  try
  {
    doc = json::parse(in);
  }
  catch (const json::parse_error& e)
  {
    throw ParseError(path.string() + ": " + e.what());
  }
  try
  {
    return parse_config(doc, path.parent_path());
  }
  catch (const json::exception& e)
  {
    throw InputError(path.string() + ": " + e.what());
  }
}

} // namespace bsmimo
