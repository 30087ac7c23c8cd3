#pragma once

// Single-path LOS link between the beam-space transmitter and a two-element
// receive array, zero-forcing equalization and seeded Monte-Carlo sweeps.

#include "bsmimo/beamspace.hpp"
#include "bsmimo/sphere_field.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace bsmimo
{

using Complex = std::complex<double>;
using Vector2c = Eigen::Vector2cd;
using Matrix2c = Eigen::Matrix2cd;
using Basis = BasisPair<double>;
using States = StatePatternSet<double>;
using Constellation = PskConstellation<double>;
using Ratios = RatioSet<double>;

inline constexpr double kDefaultConditionCap = 1e8;

// Direction in radians.
struct SolidAngle
{
  double theta = 0;
  double phi = 0;

  static SolidAngle from_degrees(double theta_deg, double phi_deg)
  {
    return {deg_to_rad(theta_deg), deg_to_rad(phi_deg)};
  }
};

double great_circle_angle(SolidAngle a, SolidAngle b);

// Bilinear interpolation in (theta, phi) with periodic phi.
Vector2c sample_pattern(const Pattern& pattern, SolidAngle direction);

struct ReceiveGeometry
{
  std::array<SolidAngle, 2> angles;
  // Unit (theta-hat, phi-hat) polarization vector of each receive element.
  std::array<Vector2c, 2> polarizations{Vector2c(1, 0), Vector2c(1, 0)};

  void validate() const;
};

struct LinkScenario
{
  ReceiveGeometry geometry;
  // channel(m, n): response of receive element m to basis pattern n.
  Matrix2c channel;
  double condition_number;

  bool invertible(double condition_cap = kDefaultConditionCap) const
  {
    return condition_number <= condition_cap;
  }
};

// Complex circular Gaussian noise per receive branch; variance 0 disables it.
struct NoiseModel
{
  double variance = 0;

  bool enabled() const { return variance > 0; }
};

double condition_number(const Matrix2c& m);

LinkScenario build_channel(const Basis& basis, const ReceiveGeometry& geometry);

// Radiates x1 * E^{x2/x1} (the physical state pattern) and samples it at both receivers.
Vector2c transmit_and_receive(const States& states, Complex x1, Complex x2, const LinkScenario& scenario,
                              const NoiseModel& noise = {}, std::mt19937_64* rng = nullptr);

Vector2c zf_equalize(const Vector2c& y, const LinkScenario& scenario, double condition_cap = kDefaultConditionCap);

Vector2c quantize(const Vector2c& x, const Constellation& constellation);

struct ErrorRecord
{
  int stream; // 1 or 2
  Complex ratio;
  Complex error;
  double magnitude;
};

struct ConstellationPoint
{
  Complex x1;
  Complex x2;
  Complex ratio;
  Complex x1_hat;
  Complex x2_hat;
};

// All M^2 symbol pairs through the noiseless link and ZF, pair order (x1 outer, x2 inner).
std::vector<ConstellationPoint> receive_constellation(const States& states, const LinkScenario& scenario,
                                                      const Constellation& constellation,
                                                      double condition_cap = kDefaultConditionCap);

// Symbols seen at one angle: the radiated field projected onto the perturbed basis
// using both polarization components.
std::vector<ConstellationPoint> transmit_constellation(const Basis& basis, const States& states,
                                                       const Constellation& constellation, SolidAngle direction,
                                                       double condition_cap = kDefaultConditionCap);

std::vector<ErrorRecord> symbol_errors(const std::vector<ConstellationPoint>& points);

struct SeparationRange
{
  double min_deg = 3;
  double max_deg = 5;
};

struct MonteCarloConfig
{
  std::size_t scenarios = 10000;
  SeparationRange separation;
  std::uint64_t seed = 1;
  // 0 uses the hardware concurrency.
  unsigned threads = 0;
  std::array<Vector2c, 2> rx_polarizations{Vector2c(1, 0), Vector2c(1, 0)};
  NoiseModel noise;
  double condition_cap = kDefaultConditionCap;
};

struct MonteCarloResult
{
  // Sorted error magnitudes per stream.
  std::array<std::vector<double>, 2> errors;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

// Uniform double in [0, 1) from the top 53 bits.
double uniform01(std::mt19937_64& rng);

std::mt19937_64 scenario_stream(std::uint64_t seed, std::uint64_t scenario);

SolidAngle draw_uniform_direction(std::mt19937_64& rng);

// Point at great-circle distance `distance` from `origin`, heading `bearing` measured from theta-hat.
SolidAngle offset_direction(SolidAngle origin, double distance, double bearing);

ReceiveGeometry draw_geometry(std::mt19937_64& rng, const MonteCarloConfig& config);

MonteCarloResult run_monte_carlo(const States& states, const Basis& basis, const Constellation& constellation,
                                 const MonteCarloConfig& config);

// Linear interpolation between order statistics, h = (n - 1) p.
double quantile(std::span<const double> sorted, double p);

struct CdfSummary
{
  std::size_t count = 0;
  std::vector<std::pair<double, double>> quantiles;  // (probability, value)
  std::vector<std::pair<double, double>> exceedance; // (threshold, fraction above)
};

inline const std::vector<double> kSummaryProbabilities{0.01, 0.05, 0.25, 0.50, 0.75, 0.95, 0.99};
inline const std::vector<double> kExceedanceThresholds{1e-6, 1e-4, 1e-3, 1e-2, 1e-1, 1.0};

CdfSummary cdf_summary(std::span<const double> values);

// Empirical CDF value at each sorted sample: (i + 1) / n.
std::vector<double> cdf_probabilities(std::size_t n);

} // namespace bsmimo
