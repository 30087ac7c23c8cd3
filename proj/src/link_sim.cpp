#include "bsmimo/link_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

namespace bsmimo
{
namespace
{
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kUnitTolerance = 1e-9;

double wrap_phi(double phi)
{
  double w = std::fmod(phi, kTwoPi);
  if (w < 0)
    w += kTwoPi;
  if (w >= kTwoPi)
    w = 0;
  return w;
}

Vector2c sample(const Pattern::Field& field, const Grid& grid, SolidAngle d)
{
  if (!std::isfinite(d.theta) || !std::isfinite(d.phi) || d.theta < 0 || d.theta > std::numbers::pi)
    throw AngleOutOfRange("direction (" + std::to_string(rad_to_deg(d.theta)) + ", " +
                          std::to_string(rad_to_deg(d.phi)) + ") deg is outside the pattern grid");

  const double t = d.theta / grid.theta_step();
  const Index i0 = std::min<Index>(static_cast<Index>(std::floor(t)), grid.n_theta() - 2);
  const double ft = t - double(i0);

  const double u = wrap_phi(d.phi) / grid.phi_step();
  const double u0 = std::floor(u);
  const Index j0 = static_cast<Index>(u0) % grid.n_phi();
  const Index j1 = (j0 + 1) % grid.n_phi();
  const double fu = u - u0;

  auto row = [&](Index i, Index j) -> Vector2c { return field.row(grid.index(i, j)).transpose(); };
  const Vector2c lower = (1 - fu) * row(i0, j0) + fu * row(i0, j1);
  const Vector2c upper = (1 - fu) * row(i0 + 1, j0) + fu * row(i0 + 1, j1);
  return (1 - ft) * lower + ft * upper;
}

} // namespace

double great_circle_angle(SolidAngle a, SolidAngle b)
{
  return bsmimo::great_circle_angle(a.theta, a.phi, b.theta, b.phi);
}

Vector2c sample_pattern(const Pattern& pattern, SolidAngle direction)
{
  return sample(pattern.field(), *pattern.grid(), direction);
}

void ReceiveGeometry::validate() const
{
  for (const auto& p : polarizations)
    if (!p.allFinite() || std::abs(p.norm() - 1.0) > kUnitTolerance)
      throw InvalidArgument("receive polarization vectors must have unit norm");
}

double condition_number(const Matrix2c& m)
{
  if (!m.allFinite())
    return std::numeric_limits<double>::infinity();
  Eigen::JacobiSVD<Matrix2c> svd(m);
  const auto& s = svd.singularValues();
  if (!(s[1] > 0))
    return std::numeric_limits<double>::infinity();
  return s[0] / s[1];
}

LinkScenario build_channel(const Basis& basis, const ReceiveGeometry& geometry)
{
  geometry.validate();
  Matrix2c h;
  for (int m = 0; m < 2; ++m)
  {
    const Vector2c& pol = geometry.polarizations[m];
    h(m, 0) = pol.dot(sample_pattern(basis.b1, geometry.angles[m]));
    h(m, 1) = pol.dot(sample_pattern(basis.b2, geometry.angles[m]));
  }
  return {geometry, h, condition_number(h)};
}

Vector2c transmit_and_receive(const States& states, Complex x1, Complex x2, const LinkScenario& scenario,
                              const NoiseModel& noise, std::mt19937_64* rng)
{
  if (x1 == Complex(0))
    throw UndefinedRatio("x1 = 0 leaves the symbol ratio undefined");
  const Pattern& state = states.pattern(x2 / x1);

  Vector2c y;
  for (int m = 0; m < 2; ++m)
    y[m] = scenario.geometry.polarizations[m].dot(x1 * sample_pattern(state, scenario.geometry.angles[m]));

  if (noise.enabled())
  {
    if (!rng)
      throw InvalidArgument("noise enabled without a random stream");
    std::normal_distribution<double> gauss(0.0, std::sqrt(noise.variance / 2));
    for (int m = 0; m < 2; ++m)
    {
      const double re = gauss(*rng);
      const double im = gauss(*rng);
      y[m] += Complex(re, im);
    }
  }
  return y;
}

Vector2c zf_equalize(const Vector2c& y, const LinkScenario& scenario, double condition_cap)
{
  if (!scenario.invertible(condition_cap))
    throw IllConditionedChannel(scenario.condition_number);
  return scenario.channel.partialPivLu().solve(y);
}

Vector2c quantize(const Vector2c& x, const Constellation& constellation)
{
  return {constellation.nearest(x[0]), constellation.nearest(x[1])};
}

std::vector<ConstellationPoint> receive_constellation(const States& states, const LinkScenario& scenario,
                                                      const Constellation& constellation, double condition_cap)
{
  if (!scenario.invertible(condition_cap))
    throw IllConditionedChannel(scenario.condition_number);
  const auto lu = scenario.channel.partialPivLu();

  std::vector<ConstellationPoint> out;
  out.reserve(constellation.points().size() * constellation.points().size());
  for (const Complex& x1 : constellation.points())
    for (const Complex& x2 : constellation.points())
    {
      const Vector2c x_hat = lu.solve(transmit_and_receive(states, x1, x2, scenario));
      out.push_back({x1, x2, x2 / x1, x_hat[0], x_hat[1]});
    }
  return out;
}

std::vector<ConstellationPoint> transmit_constellation(const Basis& basis, const States& states,
                                                       const Constellation& constellation, SolidAngle direction,
                                                       double condition_cap)
{
  ReceiveGeometry probe{{direction, direction}, {Vector2c(1, 0), Vector2c(0, 1)}};
  return receive_constellation(states, build_channel(basis, probe), constellation, condition_cap);
}

std::vector<ErrorRecord> symbol_errors(const std::vector<ConstellationPoint>& points)
{
  std::vector<ErrorRecord> out;
  out.reserve(2 * points.size());
  for (const auto& p : points)
  {
    const Complex e1 = p.x1_hat - p.x1;
    const Complex e2 = p.x2_hat - p.x2;
    out.push_back({1, p.ratio, e1, std::abs(e1)});
    out.push_back({2, p.ratio, e2, std::abs(e2)});
  }
  return out;
}

double uniform01(std::mt19937_64& rng)
{
  return double(rng() >> 11) * 0x1.0p-53;
}

std::mt19937_64 scenario_stream(std::uint64_t seed, std::uint64_t scenario)
{
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(scenario),
                    std::uint32_t(scenario >> 32)};
  return std::mt19937_64(seq);
}

SolidAngle draw_uniform_direction(std::mt19937_64& rng)
{
  const double z = 1.0 - 2.0 * uniform01(rng);
  const double phi = kTwoPi * uniform01(rng);
  return {std::acos(std::clamp(z, -1.0, 1.0)), phi};
}

SolidAngle offset_direction(SolidAngle origin, double distance, double bearing)
{
  const double st = std::sin(origin.theta), ct = std::cos(origin.theta);
  const double sp = std::sin(origin.phi), cp = std::cos(origin.phi);
  const Eigen::Vector3d r(st * cp, st * sp, ct);
  const Eigen::Vector3d e_theta(ct * cp, ct * sp, -st);
  const Eigen::Vector3d e_phi(-sp, cp, 0);
  const Eigen::Vector3d t = std::cos(bearing) * e_theta + std::sin(bearing) * e_phi;
  const Eigen::Vector3d v = std::cos(distance) * r + std::sin(distance) * t;
  return {std::atan2(std::hypot(v.x(), v.y()), v.z()), wrap_phi(std::atan2(v.y(), v.x()))};
}

ReceiveGeometry draw_geometry(std::mt19937_64& rng, const MonteCarloConfig& config)
{
  const SolidAngle first = draw_uniform_direction(rng);
  const double lo = deg_to_rad(config.separation.min_deg);
  const double hi = deg_to_rad(config.separation.max_deg);
  const double distance = lo + (hi - lo) * uniform01(rng);
  const double bearing = kTwoPi * uniform01(rng);
  return {{first, offset_direction(first, distance, bearing)}, config.rx_polarizations};
}

MonteCarloResult run_monte_carlo(const States& states, const Basis& basis, const Constellation& constellation,
                                 const MonteCarloConfig& config)
{
  if (config.scenarios < 1)
    throw InvalidArgument("Monte-Carlo run needs at least one scenario");
  if (!(config.separation.min_deg > 0) || !(config.separation.min_deg <= config.separation.max_deg) ||
      !(config.separation.max_deg <= 180))
    throw InvalidArgument("invalid receive separation interval");
  if (config.noise.variance < 0)
    throw InvalidArgument("noise variance must be nonnegative");
  for (const auto& x : constellation.ratio_set())
    states.ratios().index_of(x);

  const std::size_t pairs = constellation.points().size() * constellation.points().size();
  const std::size_t n = config.scenarios;
  std::vector<double> err1(n * pairs), err2(n * pairs);
  std::vector<char> rejected(n, 0);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;

  auto worker = [&] {
    try
    {
      for (std::size_t s = next.fetch_add(1); s < n; s = next.fetch_add(1))
      {
        auto rng = scenario_stream(config.seed, s);
        const auto scenario = build_channel(basis, draw_geometry(rng, config));
        if (!scenario.invertible(config.condition_cap))
        {
          rejected[s] = 1;
          continue;
        }
        const auto lu = scenario.channel.partialPivLu();
        std::size_t k = s * pairs;
        for (const Complex& x1 : constellation.points())
          for (const Complex& x2 : constellation.points())
          {
            const Vector2c y = transmit_and_receive(states, x1, x2, scenario, config.noise, &rng);
            const Vector2c x_hat = lu.solve(y);
            err1[k] = std::abs(x_hat[0] - x1);
            err2[k] = std::abs(x_hat[1] - x2);
            ++k;
          }
      }
    }
    catch (...)
    {
      std::lock_guard lock(failure_lock);
      if (!failure)
        failure = std::current_exception();
      next = n;
    }
  };

  unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t)
      pool.emplace_back(worker);
    worker();
  }
  if (failure)
    std::rethrow_exception(failure);

  MonteCarloResult result;
  for (std::size_t s = 0; s < n; ++s)
  {
    if (rejected[s])
    {
      ++result.rejected;
      continue;
    }
    ++result.accepted;
    result.errors[0].insert(result.errors[0].end(), err1.begin() + s * pairs, err1.begin() + (s + 1) * pairs);
    result.errors[1].insert(result.errors[1].end(), err2.begin() + s * pairs, err2.begin() + (s + 1) * pairs);
  }
  std::sort(result.errors[0].begin(), result.errors[0].end());
  std::sort(result.errors[1].begin(), result.errors[1].end());
  return result;
}

double quantile(std::span<const double> sorted, double p)
{
  if (sorted.empty())
    throw InvalidArgument("quantile of an empty sample");
  const double h = (double(sorted.size()) - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - double(lo)) * (sorted[hi] - sorted[lo]);
}

CdfSummary cdf_summary(std::span<const double> values)
{
  if (values.empty())
    throw InvalidArgument("CDF summary needs at least one record");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  CdfSummary summary;
  summary.count = sorted.size();
  for (double p : kSummaryProbabilities)
    summary.quantiles.emplace_back(p, quantile(sorted, p));
  for (double t : kExceedanceThresholds)
  {
    const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), t);
    summary.exceedance.emplace_back(t, double(above) / double(sorted.size()));
  }
  return summary;
}

std::vector<double> cdf_probabilities(std::size_t n)
{
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i)
    p[i] = double(i + 1) / double(n);
  return p;
}

} // namespace bsmimo
