#include "sgn/modal.hpp"
#include "sgn/timeloop.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace sgn;

namespace {

constexpr double pi = std::numbers::pi;

FluidState wave_1d(GridHandle const &g, double amp)
{
  Field const z = Field::sample(g, [&](double x, double) { return amp * std::cos(x); });
  return {z, VecField(g), VelocityKind::v_variable};
}

} // namespace

TEST(Scheme, Names)
{
  EXPECT_EQ(parse_scheme(to_string(Scheme::rk3_ssp)), Scheme::rk3_ssp);
  EXPECT_THROW(parse_scheme("euler"), std::invalid_argument);
}

TEST(Timeloop, RestStaysAtRest)
{
  std::mt19937_64 rng(1);
  auto const g = Grid::plane(16, 16, 4 * pi, 4 * pi);
  ModelParams p;
  p.beta = 0.3;
  BathymetryState const bath(random_modal(2, {4 * pi, 4 * pi}, 2, 0.5, rng).sample(g), p.beta);
  IntegrationConfig cfg;
  cfg.dt = 0.1;
  cfg.t_end = 1.0;
  Integrator integ(p, bath, cfg);
  RunReport const r = integ.run(FluidState::rest(g, VelocityKind::v_variable));
  EXPECT_EQ(r.cause, Termination::completed);
  EXPECT_LT(max_abs(r.final_state.zeta), 1e-14);
  EXPECT_LT(max_abs(r.final_state.vel), 1e-14);
}

TEST(Timeloop, LandsExactlyOnEndTime)
{
  auto const g = Grid::line(16, 2 * pi);
  IntegrationConfig cfg;
  cfg.dt = 0.3;
  cfg.t_end = 1.0;
  Integrator integ(ModelParams{}, BathymetryState::flat(g), cfg);
  MemoryDiagnostics diag;
  RunReport const r = integ.run(wave_1d(g, 0.1), &diag);
  EXPECT_EQ(r.steps, 4);
  EXPECT_EQ(r.final_state.time, 1.0);
  ASSERT_EQ(diag.records.size(), 5u);
  EXPECT_EQ(diag.records.back().time, 1.0);
  EXPECT_GT(r.cg_iterations, 0);
}

TEST(Timeloop, FourthOrderInTime)
{
  auto const g = Grid::line(32, 2 * pi);
  ModelParams p;
  p.epsilon = 0.3;
  FluidState const s0 = wave_1d(g, 0.5);
  auto run = [&](double dt, Scheme scheme) {
    IntegrationConfig cfg;
    cfg.dt = dt;
    cfg.t_end = 0.5;
    cfg.scheme = scheme;
    Integrator integ(p, BathymetryState::flat(g), cfg);
    return integ.run(s0).final_state.zeta;
  };
  for (auto [scheme, order] : {std::pair{Scheme::rk4, 4.0}, std::pair{Scheme::rk3_ssp, 3.0}}) {
    Field const ref = run(0.5 / 256, scheme);
    double const e1 = max_abs(run(0.5 / 16, scheme) - ref);
    double const e2 = max_abs(run(0.5 / 32, scheme) - ref);
    EXPECT_NEAR(std::log2(e1 / e2), order, 0.3) << to_string(scheme);
  }
}

TEST(Timeloop, CoercivityFailureIsReported)
{
  auto const g = Grid::line(32, 2 * pi);
  ModelParams p;
  p.epsilon = 1.0;
  p.h_star = 0.8;
  IntegrationConfig cfg;
  cfg.dt = 0.05;
  cfg.t_end = 5.0;
  Integrator integ(p, BathymetryState::flat(g), cfg);
  // Flat surface, flow diverging from x = 0 drains the column below h_star / 2.
  VecField v(g);
  v[0] = Field::sample(g, [](double x, double) { return 1.5 * std::sin(x); });
  RunReport const r = integ.run({Field(g), v, VelocityKind::v_variable});
  EXPECT_EQ(r.cause, Termination::coercivity_violation);
  ASSERT_TRUE(r.failure_time.has_value());
  EXPECT_GT(*r.failure_time, 0.0);
  EXPECT_LT(*r.failure_time, 5.0);
  EXPECT_FALSE(r.message.empty());
}

TEST(Timeloop, InitialDataMustSatisfyTheBounds)
{
  auto const g = Grid::line(32, 2 * pi);
  ModelParams p;
  p.epsilon = 1.0;
  p.h_star = 0.8;
  Integrator integ(p, BathymetryState::flat(g), IntegrationConfig{});
  // Trough depth 0.7: inside the evolution band, outside the initial one.
  RunReport const r = integ.run(wave_1d(g, 0.3));
  EXPECT_EQ(r.cause, Termination::coercivity_violation);
  EXPECT_EQ(r.steps, 0);
  EXPECT_EQ(r.failure_time, 0.0);
}

TEST(Timeloop, RejectsMollifierOutsideGnV)
{
  auto const g = Grid::line(16, 2 * pi);
  ModelParams p;
  p.formulation = Formulation::gn_u;
  IntegrationConfig cfg;
  cfg.mollifier.iota = 0.1;
  EXPECT_THROW(Integrator(p, BathymetryState::flat(g), cfg), ValidationError);
}

TEST(Timeloop, RejectsWrongVelocityKind)
{
  auto const g = Grid::line(16, 2 * pi);
  ModelParams p;
  p.formulation = Formulation::gn_u;
  Integrator integ(p, BathymetryState::flat(g), IntegrationConfig{});
  EXPECT_THROW(integ.run(wave_1d(g, 0.1)), std::invalid_argument);
}

TEST(Timeloop, WarnsAboveCflStep)
{
  auto const g = Grid::line(64, 2 * pi);
  ModelParams p;
  p.mu = 0;
  p.formulation = Formulation::sv;
  FluidState s = wave_1d(g, 0.1);
  s.kind = VelocityKind::u_variable;
  double const dt_cfl = cfl_time_step(s, p, BathymetryState::flat(g), 0.5);
  EXPECT_GT(dt_cfl, 0.0);
  IntegrationConfig cfg;
  cfg.dt = 2 * dt_cfl;
  cfg.t_end = cfg.dt;
  Integrator integ(p, BathymetryState::flat(g), cfg);
  RunReport const r = integ.run(s);
  EXPECT_EQ(r.warnings.size(), 1u);
}

TEST(Timeloop, NoticePastAnalogyTime)
{
  auto const g = Grid::line(16, 2 * pi);
  ModelParams p;
  p.epsilon = 0.5;
  FluidState const s = wave_1d(g, 0.4);
  BathymetryState const flat = BathymetryState::flat(g);
  EXPECT_NEAR(analogy_time(s, p, flat), 5.0, 1e-12);
  EXPECT_TRUE(std::isinf(analogy_time(FluidState::rest(g, VelocityKind::v_variable), p, flat)));
  IntegrationConfig cfg;
  cfg.dt = 0.1;
  cfg.t_end = 6.0;
  Integrator integ(p, flat, cfg);
  RunReport const r = integ.run(s);
  EXPECT_EQ(r.cause, Termination::completed);
  EXPECT_EQ(r.notices.size(), 1u);
}

TEST(Timeloop, DeterministicAndMassConservingOverLongRuns)
{
  std::mt19937_64 rng(6);
  auto const g = Grid::line(64, 4 * pi);
  ModelParams p;
  p.epsilon = 0.2;
  p.beta = 0.2;
  BathymetryState const bath(random_modal(1, {4 * pi, 0}, 3, 0.5, rng).sample(g), p.beta);
  FluidState const s(random_modal(1, {4 * pi, 0}, 3, 0.5, rng).sample(g) + Field::constant(g, 0.3),
                     sample(random_modal_vector(1, {4 * pi, 0}, 3, 0.3, rng), g), VelocityKind::v_variable);
  IntegrationConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 10.0;
  cfg.diag_stride = 1000;
  cfg.diagnostics_energies = false;
  auto run = [&] {
    Integrator integ(p, bath, cfg);
    return integ.run(s).final_state;
  };
  FluidState const a = run(), b = run();
  EXPECT_TRUE((a.zeta.values() == b.zeta.values()).all());
  EXPECT_TRUE((a.vel[0].values() == b.vel[0].values()).all());
  double const m0 = integrate(s.zeta);
  EXPECT_LT(std::abs(integrate(a.zeta) - m0), 1e-12 * std::abs(m0));
}

TEST(Timeloop, ConfigValidation)
{
  IntegrationConfig cfg;
  cfg.dt = -1;
  cfg.diag_stride = 0;
  try {
    cfg.validate();
    FAIL();
  } catch (ValidationError const &e) {
    EXPECT_GE(e.violations().size(), 2u);
  }
}

TEST(Timeloop, MassConservedInTwoDimensions)
{
  std::mt19937_64 rng(5);
  std::array<double, 2> const box{4 * pi, 4 * pi};
  auto const g = Grid::plane(16, 16, box[0], box[1]);
  ModelParams p;
  p.beta = 0.2;
  BathymetryState const bath(random_modal(2, box, 2, 0.5, rng).sample(g), p.beta);
  FluidState const s(random_modal(2, box, 2, 0.5, rng).sample(g), sample(random_modal_vector(2, box, 2, 0.3, rng), g),
                     VelocityKind::v_variable);
  IntegrationConfig cfg;
  cfg.dt = 0.05;
  cfg.t_end = 0.5;
  MemoryDiagnostics diag;
  Integrator integ(p, bath, cfg);
  RunReport const r = integ.run(s, &diag);
  ASSERT_EQ(r.cause, Termination::completed);
  for (auto const &rec : diag.records) {
    EXPECT_NEAR(rec.mass, diag.records.front().mass, 1e-12);
  }
}
