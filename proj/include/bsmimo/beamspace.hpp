#pragma once

// Beam-space MIMO pattern algebra.
//
// A single-feed antenna switched per symbol period radiates
//   x1 * E^{xbar} = x1 * B1 + x2 * B2,   xbar = x2 / x1,
// with basis patterns B1 = (E^{+1} + E^{-1}) / 2 and B2 = (E^{+1} - E^{-1}) / 2.
// A near-field perturbation multiplies each state pattern by its own angular
// factor; states other than +-1 then stop decomposing onto the perturbed basis.

#include "bsmimo/errors.hpp"
#include "bsmimo/sphere_field.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bsmimo
{

// exp(j*2*pi*k/m), exact for quarter turns.
template <typename Real>
std::complex<Real> unit_phasor(long k, long m)
{
  k = ((k % m) + m) % m;
  if ((4 * k) % m == 0)
  {
    switch ((4 * k) / m)
    {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
    }
  }
  const Real angle = Real(2) * std::numbers::pi_v<Real> * Real(k) / Real(m);
  return std::polar(Real(1), angle);
}

template <typename Real>
std::string format_ratio(std::complex<Real> r)
{
  constexpr Real tol = Real(1e-12);
  if (std::abs(r - std::complex<Real>(1, 0)) < tol) return "+1";
  if (std::abs(r - std::complex<Real>(-1, 0)) < tol) return "-1";
  if (std::abs(r - std::complex<Real>(0, 1)) < tol) return "+j";
  if (std::abs(r - std::complex<Real>(0, -1)) < tol) return "-j";
  return std::to_string(r.real()) + (r.imag() < 0 ? "-" : "+") + std::to_string(std::abs(r.imag())) + "j";
}

// The symbol ratios x2/x1 an antenna must support: the M-th roots of unity.
template <typename Real>
class RatioSet
{
public:
  using Complex = std::complex<Real>;
  static constexpr Real kMatchTolerance = Real(1e-9);

  RatioSet() = default;
  explicit RatioSet(std::vector<Complex> values) : values_(std::move(values))
  {
    for (std::size_t i = 0; i < values_.size(); ++i)
      for (std::size_t k = 0; k < i; ++k)
        if (std::abs(values_[i] - values_[k]) < kMatchTolerance)
          throw InvalidArgument("duplicate symbol ratio " + format_ratio(values_[i]));
  }

  static RatioSet roots_of_unity(int order)
  {
    std::vector<Complex> v;
    for (int k = 0; k < order; ++k)
      v.push_back(unit_phasor<Real>(k, order));
    return RatioSet(std::move(v));
  }

  std::size_t size() const { return values_.size(); }
  const Complex& operator[](std::size_t i) const { return values_[i]; }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  std::optional<std::size_t> find(Complex r) const
  {
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (std::abs(values_[i] - r) < kMatchTolerance)
        return i;
    return std::nullopt;
  }

  std::size_t index_of(Complex r) const
  {
    if (auto i = find(r))
      return *i;
    throw UndefinedRatio("symbol ratio " + format_ratio(r) + " is not an antenna state");
  }

  bool contains(Complex r) const { return find(r).has_value(); }

  // Same members, any order.
  bool same_members(const RatioSet& other) const
  {
    if (other.size() != size())
      return false;
    for (const auto& r : values_)
      if (!other.contains(r))
        return false;
    return true;
  }

private:
  std::vector<Complex> values_;
};

template <typename Real>
class PskConstellation
{
public:
  using Complex = std::complex<Real>;

  explicit PskConstellation(int order, Real offset = 0) : order_(order), offset_(offset)
  {
    if (order < 2)
      throw InvalidArgument("PSK order must be at least 2, got " + std::to_string(order));
    const Complex rot = std::polar(Real(1), offset);
    for (int k = 0; k < order; ++k)
      points_.push_back(offset == Real(0) ? unit_phasor<Real>(k, order) : rot * unit_phasor<Real>(k, order));
  }

  static PskConstellation qpsk(Real offset = 0) { return PskConstellation(4, offset); }

  int order() const { return order_; }
  Real offset() const { return offset_; }
  const std::vector<Complex>& points() const { return points_; }

  // The offset cancels in x2/x1, so the ratios are the M-th roots of unity.
  RatioSet<Real> ratio_set() const { return RatioSet<Real>::roots_of_unity(order_); }

  Complex nearest(Complex z) const
  {
    std::size_t best = 0;
    Real best_d = std::numeric_limits<Real>::infinity();
    for (std::size_t k = 0; k < points_.size(); ++k)
    {
      const Real d = std::norm(z - points_[k]);
      if (d < best_d)
      {
        best_d = d;
        best = k;
      }
    }
    return points_[best];
  }

private:
  int order_;
  Real offset_;
  std::vector<Complex> points_;
};

template <typename Real>
struct BasisPair
{
  VectorPattern<Real> b1;
  VectorPattern<Real> b2;

  const GridPtr<Real>& grid() const { return b1.grid(); }
};

// Embedded radiation pattern per antenna state, keyed by symbol ratio.
template <typename Real>
class StatePatternSet
{
public:
  using Complex = std::complex<Real>;

  StatePatternSet(RatioSet<Real> ratios, std::vector<VectorPattern<Real>> patterns)
      : ratios_(std::move(ratios)), patterns_(std::move(patterns))
  {
    if (patterns_.size() != ratios_.size() || patterns_.empty())
      throw KeySetMismatch("state pattern count does not match the ratio set");
    for (std::size_t i = 0; i < patterns_.size(); ++i)
    {
      require_same_grid(patterns_[0], patterns_[i]);
      if (!(integrate_power(patterns_[i]) > Real(0)))
        throw InvalidArgument("state " + format_ratio(ratios_[i]) + " radiates zero power");
    }
  }

  const RatioSet<Real>& ratios() const { return ratios_; }
  const GridPtr<Real>& grid() const { return patterns_.front().grid(); }
  std::size_t size() const { return patterns_.size(); }
  const VectorPattern<Real>& pattern_at(std::size_t i) const { return patterns_[i]; }
  const VectorPattern<Real>& pattern(Complex ratio) const { return patterns_[ratios_.index_of(ratio)]; }

private:
  RatioSet<Real> ratios_;
  std::vector<VectorPattern<Real>> patterns_;
};

// Per-state, per-polarization complex angular factor (a diagonal 2x2 map).
template <typename Real>
class PerturbationField
{
public:
  using Complex = std::complex<Real>;
  using Factor = typename VectorPattern<Real>::Field;

  PerturbationField(GridPtr<Real> grid, RatioSet<Real> ratios, std::vector<Factor> factors)
      : grid_(std::move(grid)), ratios_(std::move(ratios)), factors_(std::move(factors))
  {
    if (factors_.size() != ratios_.size())
      throw KeySetMismatch("perturbation factor count does not match the ratio set");
    for (const auto& f : factors_)
    {
      if (f.rows() != grid_->size())
        throw GridMismatch();
      if (!f.allFinite())
        throw InvalidArgument("perturbation factor contains non-finite values");
    }
  }

  static PerturbationField identity(GridPtr<Real> grid, RatioSet<Real> ratios)
  {
    std::vector<Factor> f(ratios.size(), Factor::Ones(grid->size(), 2));
    return PerturbationField(std::move(grid), std::move(ratios), std::move(f));
  }

  const GridPtr<Real>& grid() const { return grid_; }
  const RatioSet<Real>& ratios() const { return ratios_; }
  const Factor& factor_at(std::size_t i) const { return factors_[i]; }
  const Factor& factor(Complex ratio) const { return factors_[ratios_.index_of(ratio)]; }

  ScalarAngularMap<Complex, Real> theta_factor(Complex ratio) const { return {grid_, factor(ratio).col(0)}; }
  ScalarAngularMap<Complex, Real> phi_factor(Complex ratio) const { return {grid_, factor(ratio).col(1)}; }

private:
  GridPtr<Real> grid_;
  RatioSet<Real> ratios_;
  std::vector<Factor> factors_;
};

template <typename Real>
BasisPair<Real> compute_basis(const VectorPattern<Real>& e_plus, const VectorPattern<Real>& e_minus)
{
  using C = std::complex<Real>;
  const C half(Real(0.5), 0);
  return {lincomb(half, e_plus, half, e_minus), lincomb(half, e_plus, -half, e_minus)};
}

template <typename Real>
VectorPattern<Real> synthesize_pattern(const BasisPair<Real>& basis, std::complex<Real> x1, std::complex<Real> x2)
{
  if (x1 == std::complex<Real>(0))
    throw UndefinedRatio("x1 = 0 leaves the symbol ratio undefined");
  return lincomb(x1, basis.b1, x2, basis.b2);
}

template <typename Real>
StatePatternSet<Real> apply_perturbation(const StatePatternSet<Real>& states, const PerturbationField<Real>& psi)
{
  if (!states.ratios().same_members(psi.ratios()))
    throw KeySetMismatch("perturbation states do not match the antenna states");
  if (!same_grid(states.grid(), psi.grid()))
    throw GridMismatch();

  std::vector<VectorPattern<Real>> out;
  out.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i)
  {
    const auto& e = states.pattern_at(i);
    const auto& factor = psi.factor(states.ratios()[i]);
    out.emplace_back(e.grid(), factor.cwiseProduct(e.field()));
  }
  return StatePatternSet<Real>(states.ratios(), std::move(out));
}

template <typename Real>
BasisPair<Real> perturbed_basis(const StatePatternSet<Real>& perturbed)
{
  using C = std::complex<Real>;
  const auto& r = perturbed.ratios();
  if (!r.contains(C(1)) || !r.contains(C(-1)))
    throw KeySetMismatch("basis requires the +1 and -1 antenna states");
  return compute_basis(perturbed.pattern(C(1)), perturbed.pattern(C(-1)));
}

// EVM at one grid point: sqrt(sum_S |B1 + x_S B2 - E^{x_S}|^2 / sum_S |B1 + x_S B2|^2),
// norms taken over the two polarization components.
template <typename Real>
Real evm_at_angle(const BasisPair<Real>& basis, const StatePatternSet<Real>& states, const RatioSet<Real>& ratios,
                  Index point)
{
  if (!same_grid(basis.grid(), states.grid()))
    throw GridMismatch();
  if (point < 0 || point >= basis.grid()->size())
    throw AngleOutOfRange("grid point " + std::to_string(point) + " is outside the grid");

  const auto b1 = basis.b1.at(point);
  const auto b2 = basis.b2.at(point);
  Real num = 0;
  Real den = 0;
  for (const auto& x : ratios)
  {
    const typename VectorPattern<Real>::Sample ideal = b1 + x * b2;
    num += (ideal - states.pattern(x).at(point)).squaredNorm();
    den += ideal.squaredNorm();
  }
  if (!(den > Real(0)))
    throw DegenerateAngle("EVM undefined at grid point " + std::to_string(point) + ": ideal constellation is zero");
  return std::sqrt(num / den);
}

template <typename Real>
struct EvmMap
{
  // Masked points hold 0.
  ScalarAngularMap<Real> evm;
  Eigen::Array<bool, Eigen::Dynamic, 1> masked;

  Real masked_fraction() const { return Real(masked.count()) / Real(masked.size()); }
};

template <typename Real>
EvmMap<Real> evm_map(const BasisPair<Real>& basis, const StatePatternSet<Real>& states, const RatioSet<Real>& ratios)
{
  const Index n = basis.grid()->size();
  Eigen::Matrix<Real, Eigen::Dynamic, 1> values(n);
  Eigen::Array<bool, Eigen::Dynamic, 1> masked(n);
  for (Index p = 0; p < n; ++p)
  {
    try
    {
      values[p] = evm_at_angle(basis, states, ratios, p);
      masked[p] = false;
    }
    catch (const DegenerateAngle&)
    {
      values[p] = 0;
      masked[p] = true;
    }
  }
  return {ScalarAngularMap<Real>(basis.grid(), std::move(values)), std::move(masked)};
}

template <typename Real>
Real linear_to_db20(Real x)
{
  return x > Real(0) ? Real(20) * std::log10(x) : -std::numeric_limits<Real>::infinity();
}

// Solid-angle-weighted EVM average over the unmasked sphere, in two conventions:
// power domain (rms of the linear EVM, then dB) and dB domain (mean of per-angle dB).
template <typename Real>
struct EvmAverage
{
  Real rms_linear;
  Real rms_db;
  Real mean_db;
};

template <typename Real>
EvmAverage<Real> average_evm(const EvmMap<Real>& map)
{
  const auto& w = map.evm.grid()->weights();
  Real wsum = 0;
  Real power = 0;
  Real db = 0;
  for (Index p = 0; p < w.size(); ++p)
  {
    if (map.masked[p])
      continue;
    const Real e = map.evm[p];
    wsum += w[p];
    power += w[p] * e * e;
    db += w[p] * linear_to_db20(e);
  }
  if (!(wsum > Real(0)))
    throw DegenerateAngle("EVM map is fully masked");
  const Real rms = std::sqrt(power / wsum);
  return {rms, linear_to_db20(rms), std::isnan(db) ? -std::numeric_limits<Real>::infinity() : db / wsum};
}

// Basis power below this fraction of its partner is treated as zero.
inline constexpr double kBasisPowerFloor = 1e-24;
// Normalized correlations below this magnitude are rounding noise and reported as -inf dB.
inline constexpr double kCorrelationFloor = 1e-12;

template <typename Real>
std::pair<Real, Real> checked_basis_powers(const BasisPair<Real>& basis)
{
  const Real p1 = integrate_power(basis.b1);
  const Real p2 = integrate_power(basis.b2);
  const Real hi = std::max(p1, p2);
  const Real lo = std::min(p1, p2);
  if (!(hi > Real(0)) || !(lo > Real(kBasisPowerFloor) * hi))
    throw DegenerateBasis("basis pattern " + std::string(p1 < p2 ? "B1" : "B2") + " radiates no power");
  return {p1, p2};
}

template <typename Real>
Real basis_correlation_db(const BasisPair<Real>& basis)
{
  const auto [p1, p2] = checked_basis_powers(basis);
  const Real rho = std::abs(inner_product(basis.b1, basis.b2)) / std::sqrt(p1 * p2);
  if (rho < Real(kCorrelationFloor))
    return -std::numeric_limits<Real>::infinity();
  return Real(20) * std::log10(std::min(rho, Real(1)));
}

template <typename Real>
Real power_imbalance_db(const BasisPair<Real>& basis)
{
  const auto [p1, p2] = checked_basis_powers(basis);
  return std::abs(Real(10) * std::log10(p1 / p2));
}

// Gaussian lobe of the synthetic antenna; width is the angular standard deviation.
template <typename Real>
struct FieldLobe
{
  Real theta;
  Real phi;
  Real width;
  std::complex<Real> e_theta;
  std::complex<Real> e_phi;
};

template <typename Real>
struct AntennaProfile
{
  std::vector<FieldLobe<Real>> lobes;

  // Calibrated so the free-space basis power imbalance is 0.8 dB on the default grid.
  static AntennaProfile default_profile()
  {
    using C = std::complex<Real>;
    AntennaProfile p;
    p.lobes.push_back({deg_to_rad<Real>(70), deg_to_rad<Real>(80), deg_to_rad<Real>(40), C(1, 0), C(0, Real(0.35))});
    p.lobes.push_back({deg_to_rad<Real>(110), deg_to_rad<Real>(180), deg_to_rad<Real>(50), C(Real(kDefaultBackLobe), 0),
                       C(0, 0)});
    return p;
  }

  static constexpr double kDefaultBackLobe = 0.042;
};

template <typename Real>
Real gaussian_lobe(Real theta, Real phi, Real center_theta, Real center_phi, Real width)
{
  const Real d = great_circle_angle(theta, phi, center_theta, center_phi);
  return std::exp(-d * d / (Real(2) * width * width));
}

template <typename Real>
VectorPattern<Real> lobe_pattern(const std::vector<FieldLobe<Real>>& lobes, const GridPtr<Real>& grid)
{
  typename VectorPattern<Real>::Field f = VectorPattern<Real>::Field::Zero(grid->size(), 2);
  for (const auto& lobe : lobes)
  {
    if (!(lobe.width > Real(0)))
      throw InvalidArgument("lobe width must be positive");
    for (Index p = 0; p < grid->size(); ++p)
    {
      const Real g = gaussian_lobe(grid->theta_at(p), grid->phi_at(p), lobe.theta, lobe.phi, lobe.width);
      f(p, 0) += g * lobe.e_theta;
      f(p, 1) += g * lobe.e_phi;
    }
  }
  return VectorPattern<Real>(grid, std::move(f));
}

// Reflection about the phi = 0 plane: (e_theta, e_phi)(theta, phi) -> (e_theta, -e_phi)(theta, 2pi - phi).
// Exact on the grid since phi_j maps onto phi_{(n_phi - j) mod n_phi}.
template <typename Real>
VectorPattern<Real> mirror_pattern(const VectorPattern<Real>& p)
{
  const auto& grid = *p.grid();
  typename VectorPattern<Real>::Field f(grid.size(), 2);
  for (Index i = 0; i < grid.n_theta(); ++i)
    for (Index j = 0; j < grid.n_phi(); ++j)
    {
      const Index src = grid.index(i, (grid.n_phi() - j) % grid.n_phi());
      const Index dst = grid.index(i, j);
      f(dst, 0) = p.field()(src, 0);
      f(dst, 1) = -p.field()(src, 1);
    }
  return VectorPattern<Real>(p.grid(), std::move(f));
}

// Synthetic free-space antenna: E^{+1} from lobes, E^{-1} its mirror image, every
// other state synthesized from the resulting basis so the decomposition holds exactly.
template <typename Real>
StatePatternSet<Real> generate_mirror_pair(const AntennaProfile<Real>& profile, const GridPtr<Real>& grid,
                                           const RatioSet<Real>& ratios = RatioSet<Real>::roots_of_unity(4))
{
  using C = std::complex<Real>;
  if (profile.lobes.empty())
    throw InvalidArgument("antenna profile has no lobes");
  if (!ratios.contains(C(1)) || !ratios.contains(C(-1)))
    throw KeySetMismatch("mirror-pair antenna requires the +1 and -1 states");

  auto e_plus = lobe_pattern(profile.lobes, grid);
  auto e_minus = mirror_pattern(e_plus);
  const auto basis = compute_basis(e_plus, e_minus);

  std::vector<VectorPattern<Real>> states;
  for (const auto& x : ratios)
  {
    if (x == C(1))
      states.push_back(e_plus);
    else if (x == C(-1))
      states.push_back(e_minus);
    else
      states.push_back(synthesize_pattern(basis, C(1), x));
  }
  return StatePatternSet<Real>(ratios, std::move(states));
}

enum class PolarizationSelect
{
  theta,
  phi,
  both
};

template <typename Real>
struct PerturbationLobe
{
  // nullopt applies the lobe to every state.
  std::optional<std::complex<Real>> state;
  PolarizationSelect polarization = PolarizationSelect::both;
  Real theta = 0;
  Real phi = 0;
  Real width = 1;
  Real amplitude = 0;
  Real phase = 0;
};

// psi^{x}(Omega) = 1 + sum_k a_k exp(-d(Omega, Omega_k)^2 / (2 sigma_k^2)) exp(j delta_k)
template <typename Real>
PerturbationField<Real> generate_perturbation(const std::vector<PerturbationLobe<Real>>& lobes,
                                              const GridPtr<Real>& grid, const RatioSet<Real>& ratios)
{
  using C = std::complex<Real>;
  using Factor = typename PerturbationField<Real>::Factor;
  std::vector<Factor> factors(ratios.size(), Factor::Ones(grid->size(), 2));
  for (const auto& lobe : lobes)
  {
    if (!(lobe.width > Real(0)))
      throw InvalidArgument("perturbation lobe width must be positive");
    std::vector<std::size_t> targets;
    if (lobe.state)
      targets.push_back(ratios.index_of(*lobe.state));
    else
      for (std::size_t i = 0; i < ratios.size(); ++i)
        targets.push_back(i);

    const C coeff = lobe.amplitude * std::polar(Real(1), lobe.phase);
    for (Index p = 0; p < grid->size(); ++p)
    {
      const C term = coeff * gaussian_lobe(grid->theta_at(p), grid->phi_at(p), lobe.theta, lobe.phi, lobe.width);
      for (auto s : targets)
      {
        if (lobe.polarization != PolarizationSelect::phi)
          factors[s](p, 0) += term;
        if (lobe.polarization != PolarizationSelect::theta)
          factors[s](p, 1) += term;
      }
    }
  }
  return PerturbationField<Real>(grid, ratios, std::move(factors));
}

} // namespace bsmimo
