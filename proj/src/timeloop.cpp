#include "sgn/timeloop.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace sgn {

namespace {

constexpr double blow_up_threshold = 1e8;

FluidState project(FluidState const &s) { return {dealias(s.zeta), dealias(s.vel), s.kind, s.time}; }

} // namespace

std::string to_string(Scheme s) { return s == Scheme::rk4 ? "rk4" : "rk3_ssp"; }

Scheme parse_scheme(std::string const &name)
{
  if (name == "rk4") return Scheme::rk4;
  if (name == "rk3_ssp") return Scheme::rk3_ssp;
  throw std::invalid_argument("unknown scheme '" + name + "' (expected rk4 or rk3_ssp)");
}

std::string to_string(Termination t)
{
  switch (t) {
  case Termination::completed: return "completed";
  case Termination::coercivity_violation: return "coercivity_violation";
  case Termination::non_convergence: return "non_convergence";
  case Termination::blow_up: return "blow_up";
  }
  return "?";
}

void IntegrationConfig::validate() const
{
  std::vector<FieldViolation> v;
  if (!(dt > 0) || !std::isfinite(dt)) {
    v.push_back({"time.dt", "must be > 0"});
  }
  if (!(t_end >= 0) || !std::isfinite(t_end)) {
    v.push_back({"time.t_end", "must be >= 0"});
  }
  if (diag_stride < 1) {
    v.push_back({"output.diag_stride", "must be >= 1"});
  }
  if (snapshot_stride < 0) {
    v.push_back({"output.snapshot_stride", "must be >= 0"});
  }
  if (!(cfl_guard > 0)) {
    v.push_back({"time.cfl_guard", "must be > 0"});
  }
  if (diag_order < 0) {
    v.push_back({"output.diag_order", "must be >= 0"});
  }
  try {
    mollifier.validate();
  } catch (ValidationError const &e) {
    v.insert(v.end(), e.violations().begin(), e.violations().end());
  }
  if (!v.empty()) {
    throw ValidationError(std::move(v));
  }
}

double cfl_time_step(FluidState const &s, ModelParams const &p, BathymetryState const &bath, double guard)
{
  DepthState const d = DepthState::from_surface(s.zeta, bath, p.epsilon);
  auto const &g = s.zeta.grid();
  double dx = g.spacing(0);
  for (int a = 1; a < g.dim(); ++a) {
    dx = std::min(dx, g.spacing(a));
  }
  double const speed = std::sqrt(std::max(d.max, 0.0)) + p.epsilon * max_abs(s.vel);
  return guard * dx / speed;
}

double analogy_time(FluidState const &s, ModelParams const &p, BathymetryState const &bath)
{
  double const rate = std::max({p.epsilon * max_abs(s.zeta), p.epsilon * max_abs(s.vel), max_abs(bath.slope())});
  return rate > 0 ? 1.0 / rate : std::numeric_limits<double>::infinity();
}

Integrator::Integrator(ModelParams params, BathymetryState bath, IntegrationConfig icfg, EllipticSolveConfig ecfg)
  : params_(params), bath_(std::move(bath)), icfg_(icfg), solver_(ecfg), diag_solver_([&] {
      EllipticSolveConfig c = ecfg;
      c.warm_start = false;
      return c;
    }())
{
  params_.validate();
  icfg_.validate();
  if (!icfg_.mollifier.is_identity() && params_.formulation != Formulation::gn_v) {
    throw ValidationError("mollifier.iota", "mollified evolution is defined for the gn_v formulation only");
  }
}

RhsResult Integrator::rhs(FluidState const &s)
{
  if (params_.formulation == Formulation::gn_v && !icfg_.mollifier.is_identity()) {
    return rhs_gn_v_mollified(s, params_, bath_, icfg_.mollifier, solver_);
  }
  return evaluate_rhs(s, params_, bath_, solver_);
}

void Integrator::check_stage(FluidState const &s, bool initial) const
{
  if (!all_finite(s.zeta) || !all_finite(s.vel)) {
    throw BlowUp("non-finite values in the state");
  }
  double const m = std::max(max_abs(s.zeta), max_abs(s.vel));
  if (m > blow_up_threshold) {
    std::ostringstream os;
    os << "state magnitude " << m << " exceeds " << blow_up_threshold;
    throw BlowUp(os.str());
  }
  DepthState const d = DepthState::from_surface(s.zeta, bath_, params_.epsilon);
  // Initial data obey the bounds; evolved states may use the band [h_star/2, 2 h_star_upper].
  double const lower = initial ? params_.h_star : 0.5 * params_.h_star;
  double const upper = initial ? params_.h_star_upper : 2.0 * params_.h_star_upper;
  if (d.min <= lower || d.max >= upper) {
    std::ostringstream os;
    os << "depth left the admissible band at t = " << s.time << ": min " << d.min << ", max " << d.max;
    throw CoercivityViolation(os.str(), d.min);
  }
}

FluidState Integrator::combine(FluidState const &base, double t,
                               std::vector<std::pair<double, RhsResult const *>> const &terms, double dt) const
{
  FluidState out = base;
  for (auto const &[c, k] : terms) {
    if (c == 0) {
      continue;
    }
    out.zeta += k->dzeta * (c * dt);
    out.vel += k->dvel * (c * dt);
  }
  out.time = t;
  return out;
}

FluidState Integrator::step(FluidState const &s_in, std::optional<double> dt_opt)
{
  double const dt = dt_opt.value_or(icfg_.dt);
  FluidState const s = project(s_in);
  check_stage(s);
  double const t = s.time;
  if (icfg_.scheme == Scheme::rk4) {
    RhsResult const k1 = rhs(s);
    FluidState const s2 = combine(s, t + 0.5 * dt, {{0.5, &k1}}, dt);
    check_stage(s2);
    RhsResult const k2 = rhs(s2);
    FluidState const s3 = combine(s, t + 0.5 * dt, {{0.5, &k2}}, dt);
    check_stage(s3);
    RhsResult const k3 = rhs(s3);
    FluidState const s4 = combine(s, t + dt, {{1.0, &k3}}, dt);
    check_stage(s4);
    RhsResult const k4 = rhs(s4);
    FluidState out = combine(s, t + dt, {{1.0 / 6, &k1}, {1.0 / 3, &k2}, {1.0 / 3, &k3}, {1.0 / 6, &k4}}, dt);
    check_stage(out);
    return out;
  }
  // Shu-Osher three-stage strong-stability-preserving scheme
  RhsResult const k1 = rhs(s);
  FluidState const s1 = combine(s, t + dt, {{1.0, &k1}}, dt);
  check_stage(s1);
  RhsResult const k2 = rhs(s1);
  FluidState const s2 = combine(s, t + 0.5 * dt, {{0.25, &k1}, {0.25, &k2}}, dt);
  check_stage(s2);
  RhsResult const k3 = rhs(s2);
  FluidState out = combine(s, t + dt, {{1.0 / 6, &k1}, {1.0 / 6, &k2}, {2.0 / 3, &k3}}, dt);
  check_stage(out);
  return out;
}

DiagnosticsRecord Integrator::diagnose(FluidState const &s)
{
  if (icfg_.diagnostics_energies) {
    return make_record(s, params_, bath_, icfg_.diag_order, diag_solver_, solver_.total_iterations());
  }
  FluidState const sv = s.kind == VelocityKind::v_variable ? s : v_from_u(s, params_, bath_);
  DiagnosticsRecord r;
  r.time = s.time;
  r.mass = integrate(s.zeta);
  r.hamiltonian = hamiltonian_gn(sv.zeta, sv.vel, params_, bath_, diag_solver_);
  r.vorticity_l2 = vorticity_norm(sv.vel);
  r.min_depth = DepthState::from_surface(s.zeta, bath_, params_.epsilon).min;
  r.cg_iterations = solver_.total_iterations();
  r.order = icfg_.diag_order;
  return r;
}

RunReport Integrator::run(FluidState const &initial, DiagnosticsSink *diagnostics, SnapshotSink *snapshots)
{
  auto const start = std::chrono::steady_clock::now();
  long const iterations_before = solver_.total_iterations();
  RunReport report{initial, 0, 0, 0, Termination::completed, {}, std::nullopt, {}, {}};
  if (initial.kind != velocity_kind(params_.formulation)) {
    throw std::invalid_argument("run: initial state carries the wrong velocity variable for the formulation");
  }
  double const dt_cfl = cfl_time_step(initial, params_, bath_, icfg_.cfl_guard);
  if (icfg_.dt > dt_cfl) {
    std::ostringstream os;
    os << "dt = " << icfg_.dt << " exceeds the advisory CFL step " << dt_cfl;
    report.warnings.push_back(os.str());
  }
  double const t_analogy = analogy_time(initial, params_, bath_);
  if (icfg_.t_end - initial.time > t_analogy) {
    std::ostringstream os;
    os << "t_end = " << icfg_.t_end << " runs past the analogy existence time " << t_analogy;
    report.notices.push_back(os.str());
  }

  // Number of steps; the last one is shortened to land on t_end.
  double const span = icfg_.t_end - initial.time;
  long const n_steps = span <= 0 ? 0 : static_cast<long>(std::ceil(span / icfg_.dt - 1e-9));
  FluidState state = initial;
  try {
    check_stage(state, true);
    if (diagnostics) {
      diagnostics->record(diagnose(state));
    }
    if (snapshots && icfg_.snapshot_stride > 0) {
      snapshots->snapshot(state, params_);
    }
    for (long n = 1; n <= n_steps; ++n) {
      double const dt = n == n_steps ? icfg_.t_end - state.time : icfg_.dt;
      state = step(state, dt);
      if (n == n_steps) {
        state.time = icfg_.t_end;
      }
      report.steps = n;
      if (diagnostics && (n % icfg_.diag_stride == 0 || n == n_steps)) {
        diagnostics->record(diagnose(state));
      }
      if (snapshots && icfg_.snapshot_stride > 0 && n % icfg_.snapshot_stride == 0) {
        snapshots->snapshot(state, params_);
      }
    }
  } catch (CoercivityViolation const &e) {
    report.cause = Termination::coercivity_violation;
    report.message = e.what();
  } catch (NonConvergence const &e) {
    report.cause = Termination::non_convergence;
    report.message = e.what();
  } catch (BlowUp const &e) {
    report.cause = Termination::blow_up;
    report.message = e.what();
  }
  if (report.cause != Termination::completed) {
    report.failure_time = state.time;
  }
  report.final_state = state;
  report.cg_iterations = solver_.total_iterations() - iterations_before;
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

} // namespace sgn
