#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bsmimo/sphere_field.hpp"

#include "generators.hpp"
#include "oracles.hpp"

#include <limits>
#include <numbers>

using namespace bsmimo;

namespace
{
constexpr double kFourPi = 4 * std::numbers::pi;
}

TEST_CASE("default grid weights sum to the sphere area")
{
  const auto g = build_grid(91, 180);
  CHECK(g->size() == 91 * 180);
  CHECK(std::abs(g->weights().sum() - kFourPi) <= 1e-9 * kFourPi);
}

TEST_CASE("coarse 3x4 grid matches hand arithmetic")
{
  // Rows at 0, pi/2, pi; Clenshaw-Curtis weights 1/3, 4/3, 1/3; four phi columns of pi/2.
  const auto g = build_grid(3, 4);
  const double dphi = std::numbers::pi / 2;
  const double expected_rows[3] = {1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0};
  double hand_sum = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j)
    {
      CHECK(g->weights()[g->index(i, j)] == doctest::Approx(expected_rows[i] * dphi).epsilon(1e-15));
      hand_sum += expected_rows[i] * dphi;
    }
  CHECK(std::abs(g->weights().sum() - kFourPi) <= 2e-2 * kFourPi);
  CHECK(g->weights().sum() == doctest::Approx(hand_sum).epsilon(1e-15));
}

TEST_CASE("grid size preconditions")
{
  CHECK_THROWS_AS(build_grid(2, 8), InvalidArgument);
  CHECK_THROWS_AS(build_grid(5, 3), InvalidArgument);
  CHECK_NOTHROW(build_grid(3, 4));
}

TEST_CASE("grid samples are ordered and weights positive")
{
  for (auto [nt, np] : {std::pair{3, 4}, {10, 7}, {91, 180}})
  {
    const auto g = build_grid(nt, np);
    CHECK(g->theta()[0] == 0.0);
    CHECK(g->theta()[nt - 1] == std::numbers::pi);
    CHECK(g->phi()[0] == 0.0);
    for (Index i = 1; i < nt; ++i)
      CHECK(g->theta()[i] > g->theta()[i - 1]);
    for (Index j = 1; j < np; ++j)
      CHECK(g->phi()[j] > g->phi()[j - 1]);
    CHECK(g->phi()[np - 1] < 2 * std::numbers::pi);
    CHECK((g->weights().array() > 0).all());
  }
}

TEST_CASE("area error does not grow under refinement")
{
  // Both errors sit at rounding level for these weights, which grows with the row count.
  const double floor = 1e-12 * kFourPi;
  for (auto [nt, np] : {std::pair{3, 4}, {5, 8}, {10, 12}, {46, 90}, {91, 180}})
  {
    const double coarse = std::abs(build_grid(nt, np)->weights().sum() - kFourPi);
    const double fine = std::abs(build_grid(2 * nt, 2 * np)->weights().sum() - kFourPi);
    CHECK(fine <= std::max(coarse, floor));
  }
}

TEST_CASE("integrate_power on analytic fields")
{
  const auto g = build_grid(91, 180);
  CHECK(integrate_power(Pattern::constant(g, 1.0, 0.0)) == doctest::Approx(kFourPi).epsilon(1e-9));
  CHECK(integrate_power(Pattern::zeros(g)) == 0.0);

  Pattern::Field f = Pattern::Field::Zero(g->size(), 2);
  for (Index p = 0; p < g->size(); ++p)
    f(p, 0) = std::cos(g->theta_at(p));
  CHECK(std::abs(integrate_power(Pattern(g, f)) - kFourPi / 3) <= 1e-4);
}

TEST_CASE("pattern rejects non-finite samples and wrong sizes")
{
  const auto g = build_grid(3, 4);
  Pattern::Field f = Pattern::Field::Zero(g->size(), 2);
  f(2, 1) = Complex(std::numeric_limits<double>::quiet_NaN(), 0);
  CHECK_THROWS_AS(Pattern(g, f), InvalidArgument);
  CHECK_THROWS_AS(Pattern(g, Pattern::Field::Zero(5, 2)), InvalidArgument);
}

TEST_CASE("inner_product")
{
  std::mt19937_64 rng(11);
  const auto g = build_grid(5, 8);

  SUBCASE("self product is the power")
  {
    const auto p = gen::pattern(g, rng);
    const Complex ip = inner_product(p, p);
    CHECK(ip.real() == doctest::Approx(integrate_power(p)).epsilon(1e-14));
    CHECK(std::abs(ip.imag()) <= 1e-14 * ip.real());
  }

  SUBCASE("orthogonal polarizations")
  {
    CHECK(std::abs(inner_product(Pattern::constant(g, 1.0, 0.0), Pattern::constant(g, 0.0, 1.0))) == 0.0);
  }

  SUBCASE("matches summation loop on random 5x8 fields")
  {
    for (int t = 0; t < 20; ++t)
    {
      const auto a = gen::pattern(g, rng);
      const auto b = gen::pattern(g, rng);
      const auto expected = oracle::inner_product(oracle::raw_weights(*g), oracle::raw(a), oracle::raw(b));
      CHECK(std::abs(inner_product(a, b) - expected) <= 1e-12 * std::abs(expected));
      CHECK(std::abs(inner_product(a, b) - std::conj(inner_product(b, a))) <= 1e-12 * std::abs(expected));
    }
  }

  SUBCASE("grid mismatch")
  {
    const auto other = build_grid(5, 10);
    CHECK_THROWS_AS(inner_product(Pattern::zeros(g), Pattern::zeros(other)), GridMismatch);
    CHECK_THROWS_AS(lincomb(Complex(1), Pattern::zeros(g), Complex(1), Pattern::zeros(other)), GridMismatch);
  }

  SUBCASE("equal grids built separately are compatible")
  {
    CHECK_NOTHROW(inner_product(Pattern::zeros(g), Pattern::zeros(build_grid(5, 8))));
  }
}

TEST_CASE("inner product properties on random fields")
{
  std::mt19937_64 rng(2024);
  const auto g = build_grid(7, 12);
  for (int t = 0; t < 50; ++t)
  {
    const auto a = gen::pattern(g, rng);
    const auto b = gen::pattern(g, rng);
    const auto c = gen::pattern(g, rng);
    const Complex alpha = gen::complex_normal(rng);
    const Complex beta = gen::complex_normal(rng);

    // Cauchy-Schwarz.
    CHECK(std::norm(inner_product(a, b)) <= integrate_power(a) * integrate_power(b) * (1 + 1e-12));

    // Linear in the second argument.
    const Complex lhs2 = inner_product(a, lincomb(alpha, b, beta, c));
    const Complex rhs2 = alpha * inner_product(a, b) + beta * inner_product(a, c);
    CHECK(std::abs(lhs2 - rhs2) <= 1e-12 * (std::abs(lhs2) + std::abs(rhs2) + 1));

    // Conjugate-linear in the first.
    const Complex lhs1 = inner_product(lincomb(alpha, b, beta, c), a);
    const Complex rhs1 = std::conj(alpha) * inner_product(b, a) + std::conj(beta) * inner_product(c, a);
    CHECK(std::abs(lhs1 - rhs1) <= 1e-12 * (std::abs(lhs1) + std::abs(rhs1) + 1));
  }
}

TEST_CASE("lincomb")
{
  std::mt19937_64 rng(5);
  const auto g = build_grid(4, 6);
  const auto a = gen::pattern(g, rng);
  const auto b = gen::pattern(g, rng);

  CHECK(lincomb(Complex(1), a, Complex(0), b).field() == a.field());
  CHECK(lincomb(Complex(1), a, Complex(-1), a).field().isZero(0.0));

  const auto c = lincomb(Complex(2), a, Complex(0, 3), b);
  const Index p = 7;
  for (int pol = 0; pol < 2; ++pol)
  {
    const Complex x = a.field()(p, pol), y = b.field()(p, pol);
    const Complex hand(2 * x.real() - 3 * y.imag(), 2 * x.imag() + 3 * y.real());
    CHECK(std::abs(c.field()(p, pol) - hand) <= 1e-15 * std::abs(hand));
  }
}

TEST_CASE("great-circle angle")
{
  CHECK(great_circle_angle(0.0, 0.0, std::numbers::pi, 0.0) == doctest::Approx(std::numbers::pi));
  CHECK(great_circle_angle(std::numbers::pi / 2, 0.0, std::numbers::pi / 2, std::numbers::pi / 2) ==
        doctest::Approx(std::numbers::pi / 2));
  CHECK(great_circle_angle(1.0, 0.1, 1.0, 0.1 + 2 * std::numbers::pi) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(great_circle_angle(0.0, 0.0, 0.0, 2.0) == 0.0);
}
