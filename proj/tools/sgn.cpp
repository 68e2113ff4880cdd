// Command-line driver: run, verify, converge, dispersion, equivalence, info.

#include "sgn/io.hpp"
#include "sgn/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

namespace {

using namespace sgn;

enum Exit { ok = 0, validation = 1, runtime = 2, verification = 3 };

struct Options
{
  std::string config;
  std::vector<std::string> overrides;
  std::string out;
  std::uint64_t seed = 7;
  std::vector<int> sizes;
  std::vector<int> modes;
};

RunConfig configuration(Options const &o)
{
  if (o.config.empty()) {
    RunConfig c = load_config("", o.overrides);
    if (!o.out.empty()) {
      c.output.directory = o.out;
    }
    return c;
  }
  if (!std::filesystem::exists(o.config)) {
    throw ValidationError("--config", "file '" + o.config + "' does not exist");
  }
  RunConfig c = load_config_file(o.config, o.overrides);
  if (!o.out.empty()) {
    c.output.directory = o.out;
  }
  return c;
}

std::string sci(double x)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

void print(ResidualReport const &r)
{
  std::cout << "  " << r.name << "\n";
  for (std::size_t i = 0; i < r.sizes.size(); ++i) {
    std::cout << "    " << r.sizes[i] << "  " << sci(r.residuals[i]);
    if (i < r.secondary.size()) {
      std::cout << "  (" << sci(r.secondary[i]) << ")";
    }
    std::cout << "\n";
  }
  std::cout << "    decay rate " << sci(r.decay_rate) << "  " << (r.pass ? "PASS" : "FAIL") << "\n";
}

int cmd_run(Options const &o)
{
  RunConfig const cfg = configuration(o);
  GridHandle const grid = make_grid(cfg.grid);
  BathymetryState const bath = make_bathymetry(cfg, grid);
  FluidState const init = make_initial_state(cfg, grid, bath);
  std::filesystem::path const dir = cfg.output.directory;
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "config.ini");
    f << save_config(cfg);
  }
  std::unique_ptr<CsvDiagnostics> csv;
  if (cfg.output.csv) {
    csv = std::make_unique<CsvDiagnostics>(dir / "diagnostics.csv");
  }
  std::unique_ptr<SnapshotDirectory> snaps;
  if (cfg.output.snapshots && cfg.integration.snapshot_stride > 0) {
    snaps = std::make_unique<SnapshotDirectory>(dir / "snapshots");
  }
  Integrator integ(cfg.params, bath, cfg.integration, cfg.elliptic);
  RunReport const r = integ.run(init, csv.get(), snaps.get());
  if (cfg.output.snapshots) {
    write_snapshot(r.final_state, cfg.params, dir / "final.bin");
  }
  for (auto const &w : r.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  for (auto const &n : r.notices) {
    std::cerr << "notice: " << n << "\n";
  }
  std::cout << "seed " << o.seed << ", formulation " << to_string(cfg.params.formulation) << ", " << r.steps << " steps, "
            << r.cg_iterations << " CG iterations, t = " << r.final_state.time << "\n";
  std::cout << "termination: " << to_string(r.cause) << "\n";
  if (r.cause != Termination::completed) {
    std::cerr << "error: " << r.message << " (t = " << r.failure_time.value_or(0) << ")\n";
    return runtime;
  }
  return ok;
}

int cmd_verify(Options const &o)
{
  std::cout << "verification suite, seed " << o.seed << "\n";
  bool all = true;
  for (auto const &c : run_verification_suite(o.seed)) {
    std::printf("  %-4s  %-45s %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
    all = all && c.pass;
  }
  return all ? ok : verification;
}

RefinementProblem problem(RunConfig const &cfg, std::uint64_t seed)
{
  return RefinementProblem::random(cfg.grid.dim, cfg.grid.lengths, 2, seed, cfg.params, 0.3, 0.3, 0.3);
}

int cmd_converge(Options const &o)
{
  RunConfig const cfg = configuration(o);
  std::cout << "convergence study, seed " << o.seed << "\n";
  RefinementProblem const prob = problem(cfg, o.seed);
  std::vector<int> sizes = o.sizes.empty() ? std::vector<int>{16, 32, 64} : o.sizes;
  double const t_end = std::min(cfg.integration.t_end, 1.0);
  ResidualReport const rn = convergence_in_n(prob, sizes, t_end, cfg.integration.dt);
  print(rn);

  auto const g = prob.grid(sizes.back());
  BathymetryState const bath = prob.bathymetry(g);
  FluidState s = prob.state_u(g);
  if (velocity_kind(cfg.params.formulation) == VelocityKind::v_variable) {
    s = v_from_u(s, cfg.params, bath);
  }
  IntegrationConfig icfg = cfg.integration;
  icfg.t_end = t_end;
  icfg.mollifier = {};
  double const dt = cfg.integration.dt;
  ResidualReport const rt = convergence_in_dt(s, cfg.params, bath, icfg, {dt, dt / 2, dt / 4, dt / 8});
  print(rt);
  std::cout << "  observed orders:";
  for (double p : rt.secondary) {
    std::cout << " " << p;
  }
  std::cout << "\n";
  return rn.pass && rt.pass ? ok : verification;
}

int cmd_dispersion(Options const &o)
{
  RunConfig cfg = configuration(o);
  if (cfg.grid.dim != 1) {
    throw ValidationError("grid.dim", "dispersion study runs on a 1D grid");
  }
  GridHandle const grid = make_grid(cfg.grid);
  std::vector<int> modes = o.modes;
  if (modes.empty()) {
    for (int m = 1; m <= cfg.grid.points[0] / 4; m *= 2) {
      modes.push_back(m);
    }
  }
  std::cout << "dispersion, formulation " << to_string(cfg.params.formulation) << ", mu "
            << cfg.params.effective_mu() << "\n";
  std::printf("  %5s %12s %14s %14s %10s\n", "mode", "k", "measured", "predicted", "rel.err");
  bool all = true;
  for (auto const &r : dispersion_study(cfg.params, grid, modes)) {
    std::printf("  %5d %12.6f %14.9f %14.9f %10.2e %s\n", r.mode, r.k, r.measured, r.predicted, r.rel_error,
                r.fit_ok ? "" : "(no fit)");
    all = all && r.fit_ok && r.rel_error <= 1e-3;
  }
  return all ? ok : verification;
}

int cmd_equivalence(Options const &o)
{
  RunConfig const cfg = configuration(o);
  std::vector<int> sizes = o.sizes.empty() ? std::vector<int>{32, 64, 128} : o.sizes;
  std::cout << "equivalence checks, seed " << o.seed << "\n";
  bool all = true;
  if (cfg.initial.kind == InitialKind::rest || o.config.empty()) {
    RefinementProblem const prob = problem(cfg, o.seed);
    ResidualReport const a = check_equivalence_identity(prob, sizes);
    ResidualReport const b = check_rhs_equivalence(prob, sizes, cfg.elliptic);
    print(a);
    print(b);
    all = a.pass && b.pass;
  } else {
    // Supplied state: single-resolution gaps only.
    GridHandle const grid = make_grid(cfg.grid);
    BathymetryState const bath = make_bathymetry(cfg, grid);
    RunConfig ucfg = cfg;
    ucfg.params.formulation = Formulation::gn_u;
    FluidState const s = make_initial_state(ucfg, grid, bath);
    double const id = max_abs(equivalence_identity_residual(s.zeta, s.vel, cfg.params, bath));
    RhsEquivalence const e = rhs_equivalence_gap(s, cfg.params, bath, cfg.elliptic);
    std::cout << "  identity residual " << sci(id) << "\n  du gap " << sci(e.du_gap) << "\n  dv gap "
              << sci(e.dv_gap) << "\n  dzeta gap " << sci(e.dzeta_gap) << "\n";
  }
  return all ? ok : verification;
}

int cmd_info(Options const &o)
{
  RunConfig const cfg = configuration(o);
  GridHandle const grid = make_grid(cfg.grid);
  BathymetryState const bath = make_bathymetry(cfg, grid);
  FluidState const s = make_initial_state(cfg, grid, bath);
  DepthState const d = DepthState::from_surface(s.zeta, bath, cfg.params.epsilon);
  std::cout << save_config(cfg) << "\n";
  std::cout << "; grid points " << grid->size() << ", spacing " << grid->spacing(0) << "\n";
  std::cout << "; initial depth in [" << d.min << ", " << d.max << "]\n";
  std::cout << "; advisory dt " << cfl_time_step(s, cfg.params, bath, cfg.integration.cfl_guard) << "\n";
  return ok;
}

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Serre-Green-Naghdi pseudospectral solver"};
  app.require_subcommand(1, 1);
  Options o;
  auto common = [&](CLI::App *sub) {
    sub->add_option("-c,--config", o.config, "configuration file (INI)");
    sub->add_option("-s,--set", o.overrides, "override, section.key=value")->take_all();
    sub->add_option("-o,--out", o.out, "output directory");
    sub->add_option("--seed", o.seed, "random seed");
  };
  auto *run = app.add_subcommand("run", "integrate and write diagnostics and snapshots");
  common(run);
  run->get_option("--config")->required();
  auto *verify = app.add_subcommand("verify", "identity and invariant suite");
  common(verify);
  auto *converge = app.add_subcommand("converge", "self-convergence in N and dt");
  common(converge);
  converge->add_option("--sizes", o.sizes, "grid sizes");
  auto *dispersion = app.add_subcommand("dispersion", "linear dispersion relation");
  common(dispersion);
  dispersion->add_option("--modes", o.modes, "mode numbers");
  auto *equivalence = app.add_subcommand("equivalence", "GN-u / GN-v equivalence checks");
  common(equivalence);
  equivalence->add_option("--sizes", o.sizes, "grid sizes");
  auto *info = app.add_subcommand("info", "print the normalized configuration");
  common(info);

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const &e) {
    int const code = app.exit(e);
    return code == 0 ? ok : validation;
  }

  try {
    if (run->parsed()) {
      return cmd_run(o);
    }
    if (verify->parsed()) {
      return cmd_verify(o);
    }
    if (converge->parsed()) {
      return cmd_converge(o);
    }
    if (dispersion->parsed()) {
      return cmd_dispersion(o);
    }
    if (equivalence->parsed()) {
      return cmd_equivalence(o);
    }
    return cmd_info(o);
  } catch (ValidationError const &e) {
    std::cerr << "error: " << e.what() << "\n";
    return validation;
  } catch (ParseError const &e) {
    std::cerr << "error: " << e.what() << "\n";
    return validation;
  } catch (std::invalid_argument const &e) {
    std::cerr << "error: " << e.what() << "\n";
    return validation;
  } catch (std::exception const &e) {
    std::cerr << "error: " << e.what() << "\n";
    return runtime;
  }
}
