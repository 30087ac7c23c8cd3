#pragma once

// Complex vector fields sampled on an equiangular spherical grid.
//
// Grid points are flattened theta-major: index = i_theta * n_phi + i_phi.
// Field matrices are N x 2, column 0 holding the theta-hat component and
// column 1 the phi-hat component.

#include "bsmimo/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <string>

namespace bsmimo
{

using Index = Eigen::Index;

template <typename Real>
class SphericalGrid
{
public:
  using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

  // Theta rows at k*pi/(n_theta-1) including both poles, phi columns at
  // j*2pi/n_phi. Theta weights are Clenshaw-Curtis weights in cos(theta),
  // which integrate sin(theta) dtheta exactly for trigonometric polynomials
  // of degree < n_theta; phi weights are the (periodic) trapezoid rule.
  static SphericalGrid equiangular(Index n_theta, Index n_phi)
  {
    if (n_theta < 3)
      throw InvalidArgument("n_theta must be at least 3, got " + std::to_string(n_theta));
    if (n_phi < 4)
      throw InvalidArgument("n_phi must be at least 4, got " + std::to_string(n_phi));

    SphericalGrid grid;
    grid.n_theta_ = n_theta;
    grid.n_phi_ = n_phi;
    grid.theta_.resize(n_theta);
    grid.phi_.resize(n_phi);
    grid.theta_weights_.resize(n_theta);

    const Index n = n_theta - 1;
    const Real pi = std::numbers::pi_v<Real>;
    for (Index k = 0; k < n_theta; ++k)
      grid.theta_[k] = pi * Real(k) / Real(n);
    // Exact endpoint so the south pole row is bit-identical to pi.
    grid.theta_[n] = pi;
    for (Index j = 0; j < n_phi; ++j)
      grid.phi_[j] = Real(2) * pi * Real(j) / Real(n_phi);

    for (Index k = 0; k <= n; ++k)
    {
      Real sum = 0;
      for (Index j = 1; 2 * j <= n; ++j)
      {
        const Real b = (2 * j == n) ? Real(1) : Real(2);
        sum += b / Real(4 * j * j - 1) * std::cos(Real(2 * j * k) * pi / Real(n));
      }
      const Real c = (k == 0 || k == n) ? Real(1) : Real(2);
      grid.theta_weights_[k] = c / Real(n) * (Real(1) - sum);
    }

    const Real dphi = Real(2) * pi / Real(n_phi);
    grid.weights_.resize(n_theta * n_phi);
    for (Index i = 0; i < n_theta; ++i)
      grid.weights_.segment(i * n_phi, n_phi).setConstant(grid.theta_weights_[i] * dphi);
    return grid;
  }

  Index n_theta() const { return n_theta_; }
  Index n_phi() const { return n_phi_; }
  Index size() const { return n_theta_ * n_phi_; }
  Index index(Index i_theta, Index i_phi) const { return i_theta * n_phi_ + i_phi; }
  Index theta_index(Index point) const { return point / n_phi_; }
  Index phi_index(Index point) const { return point % n_phi_; }

  Real theta_step() const { return theta_[1] - theta_[0]; }
  Real phi_step() const { return Real(2) * std::numbers::pi_v<Real> / Real(n_phi_); }

  const RealVector& theta() const { return theta_; }
  const RealVector& phi() const { return phi_; }
  // Per-point weights in steradians, flattened like the field samples.
  const RealVector& weights() const { return weights_; }
  const RealVector& theta_weights() const { return theta_weights_; }

  Real theta_at(Index point) const { return theta_[theta_index(point)]; }
  Real phi_at(Index point) const { return phi_[phi_index(point)]; }

  bool operator==(const SphericalGrid& other) const
  {
    return n_theta_ == other.n_theta_ && n_phi_ == other.n_phi_ && theta_ == other.theta_ && phi_ == other.phi_;
  }

private:
  SphericalGrid() = default;

  Index n_theta_ = 0;
  Index n_phi_ = 0;
  RealVector theta_;
  RealVector phi_;
  RealVector theta_weights_;
  RealVector weights_;
};

template <typename Real>
using GridPtr = std::shared_ptr<const SphericalGrid<Real>>;

template <typename Real = double>
GridPtr<Real> build_grid(Index n_theta, Index n_phi)
{
  return std::make_shared<const SphericalGrid<Real>>(SphericalGrid<Real>::equiangular(n_theta, n_phi));
}

template <typename Real>
bool same_grid(const GridPtr<Real>& a, const GridPtr<Real>& b)
{
  return a == b || (a && b && *a == *b);
}

template <typename Real>
class VectorPattern
{
public:
  using Complex = std::complex<Real>;
  using Field = Eigen::Matrix<Complex, Eigen::Dynamic, 2>;
  using Sample = Eigen::Matrix<Complex, 2, 1>;

  VectorPattern(GridPtr<Real> grid, Field field) : grid_(std::move(grid)), field_(std::move(field))
  {
    if (!grid_)
      throw InvalidArgument("pattern requires a grid");
    if (field_.rows() != grid_->size())
      throw InvalidArgument("pattern has " + std::to_string(field_.rows()) + " samples, grid has " +
                            std::to_string(grid_->size()));
    if (!field_.allFinite())
      throw InvalidArgument("pattern contains non-finite samples");
  }

  static VectorPattern zeros(GridPtr<Real> grid)
  {
    const Index n = grid->size();
    return VectorPattern(std::move(grid), Field::Zero(n, 2));
  }

  static VectorPattern constant(GridPtr<Real> grid, Complex e_theta, Complex e_phi)
  {
    Field f(grid->size(), 2);
    f.col(0).setConstant(e_theta);
    f.col(1).setConstant(e_phi);
    return VectorPattern(std::move(grid), std::move(f));
  }

  const GridPtr<Real>& grid() const { return grid_; }
  const Field& field() const { return field_; }
  auto e_theta() const { return field_.col(0); }
  auto e_phi() const { return field_.col(1); }
  Sample at(Index point) const { return field_.row(point).transpose(); }

private:
  GridPtr<Real> grid_;
  Field field_;
};

template <typename T, typename Real = typename Eigen::NumTraits<T>::Real>
class ScalarAngularMap
{
public:
  using Values = Eigen::Matrix<T, Eigen::Dynamic, 1>;

  ScalarAngularMap(GridPtr<Real> grid, Values values) : grid_(std::move(grid)), values_(std::move(values))
  {
    if (!grid_ || values_.size() != grid_->size())
      throw InvalidArgument("angular map size does not match its grid");
    if (!values_.allFinite())
      throw InvalidArgument("angular map contains non-finite values");
  }

  const GridPtr<Real>& grid() const { return grid_; }
  const Values& values() const { return values_; }
  T operator[](Index point) const { return values_[point]; }

private:
  GridPtr<Real> grid_;
  Values values_;
};

template <typename Real>
void require_same_grid(const VectorPattern<Real>& a, const VectorPattern<Real>& b)
{
  if (!same_grid(a.grid(), b.grid()))
    throw GridMismatch();
}

// Total radiated power: sum of w * (|e_theta|^2 + |e_phi|^2).
template <typename Real>
Real integrate_power(const VectorPattern<Real>& p)
{
  return p.grid()->weights().dot(p.field().rowwise().squaredNorm());
}

// <a, b> = sum of w * (conj(a_theta) b_theta + conj(a_phi) b_phi); conjugate-linear in a.
template <typename Real>
std::complex<Real> inner_product(const VectorPattern<Real>& a, const VectorPattern<Real>& b)
{
  require_same_grid(a, b);
  const auto pointwise = a.field().conjugate().cwiseProduct(b.field()).rowwise().sum();
  return (pointwise.array() * a.grid()->weights().array().template cast<std::complex<Real>>()).sum();
}

template <typename Real>
VectorPattern<Real> lincomb(std::complex<Real> alpha, const VectorPattern<Real>& a, std::complex<Real> beta,
                            const VectorPattern<Real>& b)
{
  require_same_grid(a, b);
  return VectorPattern<Real>(a.grid(), alpha * a.field() + beta * b.field());
}

template <typename Real>
VectorPattern<Real> scaled(std::complex<Real> alpha, const VectorPattern<Real>& a)
{
  return VectorPattern<Real>(a.grid(), alpha * a.field());
}

// Great-circle angle between two directions given in radians.
template <typename Real>
Real great_circle_angle(Real theta1, Real phi1, Real theta2, Real phi2)
{
  // Haversine form stays accurate for small separations.
  const Real s_theta = std::sin((theta2 - theta1) / 2);
  const Real s_phi = std::sin((phi2 - phi1) / 2);
  Real h = s_theta * s_theta + std::sin(theta1) * std::sin(theta2) * s_phi * s_phi;
  h = std::min(Real(1), std::max(Real(0), h));
  return Real(2) * std::asin(std::sqrt(h));
}

template <typename Real>
constexpr Real deg_to_rad(Real deg)
{
  return deg * std::numbers::pi_v<Real> / Real(180);
}

template <typename Real>
constexpr Real rad_to_deg(Real rad)
{
  return rad * Real(180) / std::numbers::pi_v<Real>;
}

using Grid = SphericalGrid<double>;
using Pattern = VectorPattern<double>;

} // namespace bsmimo
