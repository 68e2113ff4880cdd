#include "sgn/verify.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace sgn;

TEST(Report, FloorOrSuperalgebraicDecay)
{
  EXPECT_TRUE(make_report("floor", {16, 32}, {1e-3, 1e-12}).pass);
  // Exponential decay: local orders grow with N.
  ResidualReport const expo = make_report("exp", {8, 16, 32, 64}, {1e-1, 1e-3, 1e-7, 1e-15}, 1e-20);
  EXPECT_TRUE(expo.pass);
  EXPECT_GT(expo.decay_rate, 0.0);
  // Algebraic second order stalls at a constant local order.
  ResidualReport const alg = make_report("alg", {8, 16, 32, 64}, {1e-2, 2.5e-3, 6.25e-4, 1.5625e-4}, 1e-20);
  EXPECT_FALSE(alg.pass);
  EXPECT_FALSE(alg.summary().empty());
}

TEST(Report, LinearFrequency)
{
  EXPECT_DOUBLE_EQ(linear_frequency(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(linear_frequency(2, 0), 2.0);
  EXPECT_NEAR(linear_frequency(3, 1), 3 / std::sqrt(4.0), 1e-15);
}

TEST(Verify, EquivalenceIdentityDecays)
{
  ModelParams p;
  p.epsilon = 0.3;
  p.beta = 0.3;
  RefinementProblem const prob = RefinementProblem::random(2, {4 * std::numbers::pi, 4 * std::numbers::pi}, 3, 11, p);
  ResidualReport const r = check_equivalence_identity(prob, {16, 32, 64});
  EXPECT_TRUE(r.pass) << r.summary();
  EXPECT_LT(r.residuals.back(), 1e-9);
}

TEST(Verify, FlatRestHasNoIdentityResidual)
{
  auto const g = Grid::line(32, 10.0);
  ModelParams p;
  VecField const r = equivalence_identity_residual(Field(g), VecField(g), p, BathymetryState::flat(g));
  EXPECT_EQ(max_abs(r), 0.0);
}

TEST(Verify, DispersionOnCoarseGrid)
{
  ModelParams p;
  p.mu = 0.5;
  auto const g = Grid::line(32, 2 * std::numbers::pi);
  DispersionOptions opt;
  opt.steps_per_period = 100;
  opt.periods = 2;
  auto const rows = dispersion_study(p, g, {1, 3}, opt);
  ASSERT_EQ(rows.size(), 2u);
  for (auto const &r : rows) {
    EXPECT_TRUE(r.fit_ok);
    EXPECT_NEAR(r.predicted, linear_frequency(r.k, p.mu), 1e-15);
    EXPECT_LT(r.rel_error, 1e-4) << r.mode;
  }
  EXPECT_THROW(dispersion_study(p, Grid::plane(16, 16, 1, 1), {1}), std::invalid_argument);
}

TEST(Verify, PhaseSpeedDecreasesWithWavenumber)
{
  ModelParams p;
  p.mu = 1.0;
  auto const g = Grid::line(64, 2 * std::numbers::pi);
  DispersionOptions opt;
  opt.steps_per_period = 100;
  opt.periods = 2;
  auto const rows = dispersion_study(p, g, {1, 2, 4, 8, 16}, opt);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LT(rows[i].measured / rows[i].k, rows[i - 1].measured / rows[i - 1].k);
  }
}

TEST(Verify, TimeConvergenceIsFourthOrder)
{
  auto const g = Grid::line(32, 2 * std::numbers::pi);
  FluidState const s(Field::sample(g, [](double x, double) { return 0.4 * std::cos(x); }), VecField(g),
                     VelocityKind::v_variable);
  IntegrationConfig cfg;
  cfg.t_end = 1.0;
  ResidualReport const r = convergence_in_dt(s, ModelParams{}, BathymetryState::flat(g), cfg, {0.2, 0.1, 0.05, 0.0125});
  EXPECT_TRUE(r.pass) << r.summary();
}

TEST(Verify, SuiteRunsClean)
{
  for (auto const &c : run_verification_suite(7)) {
    EXPECT_TRUE(c.pass) << c.name << ": " << c.detail;
  }
}
