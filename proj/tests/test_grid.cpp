#include "sgn/grid.hpp"
#include "sgn/modal.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace sgn;

namespace {

constexpr double pi = std::numbers::pi;

Field smooth_2d(GridHandle const &g)
{
  return Field::sample(g, [](double x, double y) { return std::sin(x) * std::cos(2 * y) + 0.3 * std::cos(x + y); });
}

} // namespace

TEST(Grid, RejectsBadShapes)
{
  EXPECT_THROW(Grid::line(7, 1.0), std::invalid_argument);
  EXPECT_THROW(Grid::line(4, 1.0), std::invalid_argument);
  EXPECT_THROW(Grid::line(16, 0.0), std::invalid_argument);
  EXPECT_THROW(Grid({16, 16, 16}, {1.0, 1.0, 1.0}), std::invalid_argument);
}

TEST(Grid, ForwardInverseRoundTrip)
{
  auto const g = Grid::plane(32, 16, 2 * pi, 3.0);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  Grid::RealArray x(g->size());
  for (Index j = 0; j < x.size(); ++j) {
    x[j] = n(rng);
  }
  EXPECT_LT((g->inverse(g->forward(x)) - x).abs().maxCoeff(), 1e-13);
}

TEST(Grid, SpectralDerivativeOfTrigIsExact)
{
  auto const g = Grid::line(32, 2 * pi);
  Field const f = Field::sample(g, [](double x, double) { return std::sin(3 * x); });
  Field const df = Field::sample(g, [](double x, double) { return 3 * std::cos(3 * x); });
  EXPECT_LT(max_abs(gradient(f)[0] - df), 1e-13);
  EXPECT_LT(max_abs(laplacian(f) + f * 9.0), 1e-12);
}

TEST(Grid, MixedPartials)
{
  auto const g = Grid::plane(32, 32, 2 * pi, 2 * pi);
  Field const f = Field::sample(g, [](double x, double y) { return std::sin(x) * std::sin(2 * y); });
  Field const fxy = Field::sample(g, [](double x, double y) { return 2 * std::cos(x) * std::cos(2 * y); });
  EXPECT_LT(max_abs(partial(f, {1, 1}) - fxy), 1e-12);
  EXPECT_LT(max_abs(partial(f, {0, 0}) - f), 0.0 + 1e-15);
}

TEST(Grid, CalculusIdentities)
{
  auto const g = Grid::plane(32, 32, 2 * pi, 2 * pi);
  Field const f = smooth_2d(g);
  EXPECT_LT(max_abs(divergence(gradient(f)) - laplacian(f)), 1e-12);
  EXPECT_LT(max_abs(curl2d(gradient(f))), 1e-12);
  EXPECT_LT(max_abs(divergence(perp(gradient(f)))), 1e-12);
}

TEST(Grid, ParsevalMatchesQuadrature)
{
  auto const g = Grid::plane(16, 24, 3.0, 5.0);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n;
  Grid::RealArray a(g->size()), b(g->size());
  for (Index j = 0; j < a.size(); ++j) {
    a[j] = n(rng);
    b[j] = n(rng);
  }
  Field const fa(g, a), fb(g, b);
  EXPECT_NEAR(spectral_inner_product(fa, fb), inner_product(fa, fb), 1e-12 * g->volume());
}

TEST(Grid, DealiasIsIdempotentAndKillsHighModes)
{
  auto const g = Grid::line(48, 2 * pi);
  Field const hi = Field::sample(g, [](double x, double) { return std::cos(17 * x); });
  Field const lo = Field::sample(g, [](double x, double) { return std::cos(16 * x); });
  EXPECT_LT(max_abs(dealias(hi)), 1e-14);
  EXPECT_LT(max_abs(dealias(lo) - lo), 1e-13);
  Field const f = hi + lo;
  EXPECT_LT(max_abs(dealias(dealias(f)) - dealias(f)), 1e-15);
}

TEST(Grid, MismatchedGridsThrow)
{
  auto const a = Grid::line(16, 1.0);
  auto const b = Grid::line(32, 1.0);
  EXPECT_THROW(Field(a) + Field(b), GridMismatch);
  EXPECT_THROW(inner_product(Field(a), Field(b)), GridMismatch);
}

TEST(Grid, IntegrateConstant)
{
  auto const g = Grid::plane(16, 16, 2.0, 3.0);
  EXPECT_NEAR(integrate(Field::constant(g, 2.0)), 12.0, 1e-13);
}

TEST(Grid, FloatScalarWorks)
{
  using G = PeriodicGrid<float>;
  auto const g = G::line(32, 2 * std::numbers::pi_v<float>);
  ScalarField<float> const f = ScalarField<float>::sample(g, [](float x, float) { return std::sin(2 * x); });
  ScalarField<float> const df = ScalarField<float>::sample(g, [](float x, float) { return 2 * std::cos(2 * x); });
  EXPECT_LT(max_abs(gradient(f)[0] - df), 1e-5f);
}

TEST(Modal, SampleAgreesAcrossGrids)
{
  std::mt19937_64 rng(1);
  ModalField const m = random_modal(2, {2 * pi, 2 * pi}, 3, 0.5, rng);
  auto const a = Grid::plane(16, 16, 2 * pi, 2 * pi);
  auto const b = Grid::plane(32, 32, 2 * pi, 2 * pi);
  Field const fa = m.sample(a), fb = m.sample(b);
  // Same values on the shared points.
  EXPECT_NEAR(fa.values()[0], fb.values()[0], 1e-15);
  EXPECT_NEAR(fa.values()[1], fb.values()[2], 1e-14);
  EXPECT_LE(max_abs(fa), 0.5 + 1e-12);
  EXPECT_NEAR(integrate(fa), 0.0, 1e-12);
}

TEST(Modal, GradientMatchesSpectralGradient)
{
  std::mt19937_64 rng(2);
  ModalField const m = random_modal(2, {4.0, 6.0}, 3, 1.0, rng);
  auto const g = Grid::plane(32, 32, 4.0, 6.0);
  VecField const exact = sample(m.gradient(), g);
  EXPECT_LT(max_abs(gradient(m.sample(g)) - exact), 1e-12);
}

TEST(Modal, WrongBoxRejected)
{
  std::mt19937_64 rng(2);
  ModalField const m = random_modal(1, {4.0, 0.0}, 3, 1.0, rng);
  EXPECT_THROW(m.sample(Grid::line(16, 5.0)), GridMismatch);
}
