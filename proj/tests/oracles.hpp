#pragma once

// Brute-force reference computations. These work on plain std::vector /
// std::complex copies of the data and never call the library's algebra.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle
{

using cd = std::complex<double>;

struct RawField
{
  std::vector<cd> theta;
  std::vector<cd> phi;
};

template <typename Pattern>
RawField raw(const Pattern& p)
{
  RawField f;
  for (long i = 0; i < p.field().rows(); ++i)
  {
    f.theta.push_back(p.field()(i, 0));
    f.phi.push_back(p.field()(i, 1));
  }
  return f;
}

template <typename Grid>
std::vector<double> raw_weights(const Grid& g)
{
  return std::vector<double>(g.weights().data(), g.weights().data() + g.weights().size());
}

inline cd inner_product(const std::vector<double>& w, const RawField& a, const RawField& b)
{
  cd sum = 0;
  for (std::size_t i = 0; i < w.size(); ++i)
  {
    sum += w[i] * std::conj(a.theta[i]) * b.theta[i];
    sum += w[i] * std::conj(a.phi[i]) * b.phi[i];
  }
  return sum;
}

inline double power(const std::vector<double>& w, const RawField& a)
{
  double sum = 0;
  for (std::size_t i = 0; i < w.size(); ++i)
    sum += w[i] * (std::norm(a.theta[i]) + std::norm(a.phi[i]));
  return sum;
}

// EVM at point i written out from the definition: perturbed basis from the
// +1 / -1 states, ideal points B1 + x B2 against the radiated state fields.
inline double evm(const std::vector<cd>& ratios, const std::vector<RawField>& states, std::size_t plus,
                  std::size_t minus, std::size_t i)
{
  const cd b1t = 0.5 * (states[plus].theta[i] + states[minus].theta[i]);
  const cd b1p = 0.5 * (states[plus].phi[i] + states[minus].phi[i]);
  const cd b2t = 0.5 * (states[plus].theta[i] - states[minus].theta[i]);
  const cd b2p = 0.5 * (states[plus].phi[i] - states[minus].phi[i]);
  double num = 0, den = 0;
  for (std::size_t s = 0; s < ratios.size(); ++s)
  {
    const cd it = b1t + ratios[s] * b2t;
    const cd ip = b1p + ratios[s] * b2p;
    num += std::norm(it - states[s].theta[i]) + std::norm(ip - states[s].phi[i]);
    den += std::norm(it) + std::norm(ip);
  }
  return std::sqrt(num / den);
}

// Bilinear lookup on an equiangular theta-major table.
inline cd bilinear(const std::vector<cd>& table, long n_theta, long n_phi, double theta, double phi)
{
  const double dt = std::numbers::pi / double(n_theta - 1);
  const double dp = 2 * std::numbers::pi / double(n_phi);
  phi = std::fmod(phi, 2 * std::numbers::pi);
  if (phi < 0)
    phi += 2 * std::numbers::pi;
  long i = std::min(long(theta / dt), n_theta - 2);
  long j = long(phi / dp) % n_phi;
  const double a = theta / dt - double(i);
  const double b = phi / dp - std::floor(phi / dp);
  auto at = [&](long r, long c) { return table[r * n_phi + (c % n_phi)]; };
  return (1 - a) * (1 - b) * at(i, j) + (1 - a) * b * at(i, j + 1) + a * (1 - b) * at(i + 1, j) +
         a * b * at(i + 1, j + 1);
}

// Number of groups when points closer than tol are merged (single linkage).
inline int count_clusters(const std::vector<cd>& points, double tol)
{
  std::vector<int> label(points.size(), -1);
  int clusters = 0;
  for (std::size_t i = 0; i < points.size(); ++i)
  {
    if (label[i] >= 0)
      continue;
    label[i] = clusters;
    std::vector<std::size_t> stack{i};
    while (!stack.empty())
    {
      const auto k = stack.back();
      stack.pop_back();
      for (std::size_t m = 0; m < points.size(); ++m)
        if (label[m] < 0 && std::abs(points[m] - points[k]) <= tol)
        {
          label[m] = clusters;
          stack.push_back(m);
        }
    }
    ++clusters;
  }
  return clusters;
}

// Dvoretzky-Kiefer-Wolfowitz half-width at confidence 1 - alpha.
inline double dkw_epsilon(std::size_t n, double alpha)
{
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * double(n)));
}

} // namespace oracle
