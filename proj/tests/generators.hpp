#pragma once

// Random inputs for property tests.

#include "bsmimo/beamspace.hpp"
#include "bsmimo/link_sim.hpp"

#include <numbers>
#include <random>

namespace gen
{

using bsmimo::Complex;

inline double uniform(std::mt19937_64& rng, double lo, double hi)
{
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Complex complex_normal(std::mt19937_64& rng)
{
  std::normal_distribution<double> n;
  return {n(rng), n(rng)};
}

inline bsmimo::Pattern pattern(const bsmimo::GridPtr<double>& grid, std::mt19937_64& rng)
{
  bsmimo::Pattern::Field f(grid->size(), 2);
  for (bsmimo::Index i = 0; i < f.rows(); ++i)
  {
    f(i, 0) = complex_normal(rng);
    f(i, 1) = complex_normal(rng);
  }
  return {grid, f};
}

inline bsmimo::AntennaProfile<double> profile(std::mt19937_64& rng)
{
  bsmimo::AntennaProfile<double> p;
  const int lobes = 1 + int(rng() % 3);
  for (int k = 0; k < lobes; ++k)
    p.lobes.push_back({uniform(rng, 0.3, 2.8), uniform(rng, 0.2, 2 * std::numbers::pi - 0.2),
                       uniform(rng, 0.4, 0.9), complex_normal(rng), complex_normal(rng)});
  return p;
}

// Lobes that differ per state, so the +-j states leave the perturbed basis.
inline std::vector<bsmimo::PerturbationLobe<double>> asymmetric_perturbation(std::mt19937_64& rng,
                                                                             const bsmimo::Ratios& ratios)
{
  std::vector<bsmimo::PerturbationLobe<double>> lobes;
  for (const auto& r : ratios)
  {
    bsmimo::PerturbationLobe<double> l;
    l.state = r;
    l.polarization = bsmimo::PolarizationSelect::both;
    l.theta = uniform(rng, 0.2, 2.9);
    l.phi = uniform(rng, 0, 2 * std::numbers::pi);
    l.width = uniform(rng, 0.4, 1.0);
    l.amplitude = uniform(rng, 0.3, 0.7) * (rng() % 2 ? 1 : -1);
    l.phase = uniform(rng, -std::numbers::pi, std::numbers::pi);
    lobes.push_back(l);
  }
  return lobes;
}

// Same lobes for every state.
inline std::vector<bsmimo::PerturbationLobe<double>> common_perturbation(std::mt19937_64& rng)
{
  std::vector<bsmimo::PerturbationLobe<double>> lobes;
  const int n = 1 + int(rng() % 3);
  for (int k = 0; k < n; ++k)
  {
    bsmimo::PerturbationLobe<double> l;
    l.polarization = static_cast<bsmimo::PolarizationSelect>(rng() % 3);
    l.theta = uniform(rng, 0.2, 2.9);
    l.phi = uniform(rng, 0, 2 * std::numbers::pi);
    l.width = uniform(rng, 0.3, 1.0);
    l.amplitude = uniform(rng, -0.8, 0.8);
    l.phase = uniform(rng, -std::numbers::pi, std::numbers::pi);
    lobes.push_back(l);
  }
  return lobes;
}

// Random direction away from the poles plus a second one 3-5 degrees off.
inline bsmimo::ReceiveGeometry geometry(std::mt19937_64& rng)
{
  const bsmimo::SolidAngle a{uniform(rng, 0.3, 2.8), uniform(rng, 0, 2 * std::numbers::pi)};
  const auto b = bsmimo::offset_direction(a, bsmimo::deg_to_rad(uniform(rng, 3, 5)), uniform(rng, 0, 6.28));
  return {{a, b}, {bsmimo::Vector2c(1, 0), bsmimo::Vector2c(1, 0)}};
}

} // namespace gen
