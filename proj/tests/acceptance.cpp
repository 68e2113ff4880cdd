// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include "sgn/io.hpp"
#include "sgn/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

using namespace sgn;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome
{
  bool pass = false;
  std::string detail;
};

std::string fmt(char const *f, auto... args)
{
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

/// Quadratic form of 𝔗 written out as a sum of squares.
double quadratic_form(DepthState const &d, BathymetryState const &bath, VecField const &u, double mu)
{
  Grid::RealArray const s = divergence(u).values();
  Grid::RealArray const gu = dot(bath.slope(), u).values();
  Grid::RealArray const h = d.h.values();
  Grid::RealArray density = h * dot(u, u).values();
  density += mu * h * ((h * s - 1.5 * gu).square() / 3.0 + 0.25 * gu.square());
  return integrate(Field(u.grid_ptr(), density));
}

// 1. Symmetry, coercivity rewriting, inverse round trip.
Outcome operator_algebra()
{
  double const L = 4 * pi;
  double worst_sym = 0, worst_quad = 0, worst_rt = 0;
  EllipticSolveConfig cfg;
  for (double mu : {0.1, 1.0}) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      ModelParams p;
      p.epsilon = 0.3;
      p.beta = 0.3;
      p.mu = mu;
      RefinementProblem const prob = RefinementProblem::random(2, {L, L}, 4, seed, p, 0.5, 0.5, 0.5);
      auto const g = prob.grid(64);
      BathymetryState const bath = prob.bathymetry(g);
      FluidState const s = prob.state_u(g);
      DepthState const d = DepthState::from_surface(s.zeta, bath, p.epsilon);
      std::mt19937_64 rng(1000 + seed);
      VecField const w = sample(random_modal_vector(2, {L, L}, 4, 0.5, rng), g);
      VecField const Tu = apply_frakT(d, bath, s.vel, mu);
      VecField const Tw = apply_frakT(d, bath, w, mu);
      double const sym = std::abs(inner_product(Tu, w) - inner_product(s.vel, Tw)) / (l2_norm(Tu) * l2_norm(w));
      double const q = inner_product(Tu, s.vel);
      double const quad = std::abs(q - quadratic_form(d, bath, s.vel, mu)) / std::abs(q);
      VecField const x = invert_frakT(d, bath, w, mu, cfg);
      double const rt = l2_norm(apply_frakT(d, bath, x, mu) - dealias(w)) / l2_norm(dealias(w));
      worst_sym = std::max(worst_sym, sym);
      worst_quad = std::max(worst_quad, quad);
      worst_rt = std::max(worst_rt, rt);
    }
  }
  bool const pass = worst_sym <= 1e-12 && worst_quad <= 1e-10 && worst_rt <= 10 * cfg.rel_tolerance;
  return {pass, fmt("symmetry %.2e (<=1e-12), quadratic form %.2e (<=1e-10), round trip %.2e (<=%.0e)", worst_sym,
                    worst_quad, worst_rt, 10 * cfg.rel_tolerance)};
}

// 2. Shape derivative against central differences in h.
Outcome shape_derivative()
{
  double const L = 4 * pi;
  ModelParams p;
  p.epsilon = 0.3;
  p.beta = 0.3;
  RefinementProblem const prob = RefinementProblem::random(2, {L, L}, 3, 11, p, 0.5, 0.5, 0.5);
  auto const g = prob.grid(32);
  BathymetryState const bath = prob.bathymetry(g);
  FluidState const s = prob.state_u(g);
  Field const h = DepthState::from_surface(s.zeta, bath, p.epsilon).h;
  std::mt19937_64 rng(5);
  Field const f = random_modal(2, {L, L}, 3, 0.5, rng).sample(g);
  DepthState const d(h);
  VecField const exact_T = dh_T(d, bath, f, s.vel);
  VecField const exact_frak = dh_frakT(d, bath, f, s.vel, 1.0);
  std::vector<double> eT, eF;
  for (double delta : {1e-3, 5e-4, 2.5e-4}) {
    DepthState const dp(h + f * delta), dm(h - f * delta);
    VecField const fdT = (apply_T(dp, bath, s.vel) - apply_T(dm, bath, s.vel)) * (0.5 / delta);
    VecField const fdF = (apply_frakT(dp, bath, s.vel, 1.0) - apply_frakT(dm, bath, s.vel, 1.0)) * (0.5 / delta);
    eT.push_back(max_abs(fdT - exact_T));
    eF.push_back(max_abs(fdF - exact_frak));
  }
  // T is quadratic in h, so its central differences are exact: only round-off remains.
  double const roundoff = *std::max_element(eT.begin(), eT.end());
  bool pass = roundoff <= 1e-10;
  std::string orders;
  for (std::size_t i = 0; i + 1 < eF.size(); ++i) {
    double const o = std::log2(eF[i] / eF[i + 1]);
    pass = pass && std::abs(o - 2.0) <= 0.2;
    orders += fmt(" %.3f", o);
  }
  return {pass, "frakT orders" + orders + " (2.0 +- 0.2), T difference error " + fmt("%.1e", roundoff) + " (<= 1e-10)"};
}

RefinementProblem identity_problem()
{
  ModelParams p;
  p.epsilon = 0.3;
  p.beta = 0.3;
  p.mu = 1.0;
  // Enough modes that the products alias at N = 32.
  return RefinementProblem::random(2, {4 * pi, 4 * pi}, 5, 2024, p, 0.5, 0.5, 0.5);
}

// 3. The identity behind the formulation equivalence.
Outcome equivalence_identity()
{
  ResidualReport const r = check_equivalence_identity(identity_problem(), {32, 64, 128});
  double const drop = r.residuals.front() / std::max(r.residuals.back(), 1e-300);
  bool const pass = drop >= 100 && r.residuals.back() <= 1e-9;
  return {pass, fmt("N=32 %.2e, N=64 %.2e, N=128 %.2e; drop %.1e (>=100), final <=1e-9", r.residuals[0],
                    r.residuals[1], r.residuals[2], drop)};
}

// 4. GN-u and GN-v right-hand sides.
Outcome formulation_equivalence()
{
  ResidualReport const r = check_rhs_equivalence(identity_problem(), {32, 64, 128});
  double const drop = r.residuals.front() / std::max(r.residuals.back(), 1e-300);
  return {drop >= 100, fmt("du/dt gap N=32 %.2e, N=64 %.2e, N=128 %.2e; drop %.1e (>=100); dv/dt gap %.2e",
                           r.residuals[0], r.residuals[1], r.residuals[2], drop, r.secondary.back())};
}

// 5. Variational structure.
Outcome hamiltonian_structure()
{
  ModelParams p;
  p.epsilon = 0.2;
  p.beta = 0.2;
  p.mu = 0.5;
  double const L = 4 * pi;
  RefinementProblem const prob = RefinementProblem::random(2, {L, L}, 2, 7, p, 0.5, 0.5, 0.5);
  auto const g = prob.grid(32);
  VariationalReport const v =
      check_variational_structure(prob.zeta.sample(g), sample(prob.velocity, g), p, prob.bathymetry(g), 7);
  std::string ratios;
  for (std::size_t i = 0; i + 1 < v.zeta_mismatch.size(); ++i) {
    ratios += fmt(" %.3f", v.zeta_mismatch[i] / v.zeta_mismatch[i + 1]);
  }
  return {v.pass, fmt("assembled gap %.2e vs tolerance %.2e; FD mismatch ratios", v.assembled_gap, v.tolerance) +
                      ratios + fmt(" (4 +- 1); v-direction %.1e", v.v_mismatch)};
}

// 6. Mass, Hamiltonian and vorticity along a GN-v run.
Outcome conservation()
{
  double const L = 20;
  auto const g = Grid::plane(64, 64, L, L);
  ModelParams p;
  p.epsilon = 0.1;
  p.mu = 0.5;
  p.formulation = Formulation::gn_v;
  BathymetryState const bath = BathymetryState::flat(g);
  Field const zeta = Field::sample(g, [&](double x, double y) {
    double const r2 = (x - L / 2) * (x - L / 2) + (y - L / 2) * (y - L / 2);
    return std::exp(-r2 / 4);
  });
  FluidState const init{zeta, VecField(g), VelocityKind::v_variable, 0.0};
  double drift[2] = {0, 0};
  double mass_drift = 0, vort = 0;
  double const dts[2] = {0.1, 0.05};
  for (int i = 0; i < 2; ++i) {
    IntegrationConfig icfg;
    icfg.dt = dts[i];
    icfg.t_end = 5;
    icfg.diagnostics_energies = false;
    Integrator integ(p, bath, icfg);
    MemoryDiagnostics diag;
    RunReport const r = integ.run(init, &diag);
    if (r.cause != Termination::completed) {
      return {false, "run failed: " + r.message};
    }
    double const m0 = diag.records.front().mass, h0 = diag.records.front().hamiltonian;
    for (auto const &rec : diag.records) {
      drift[i] = std::max(drift[i], std::abs(rec.hamiltonian - h0));
      mass_drift = std::max(mass_drift, std::abs(rec.mass - m0) / std::abs(m0));
    }
    vort = std::max(vort, vorticity_norm(r.final_state.vel) / l2_norm(r.final_state.vel));
  }
  double const ratio = drift[0] / drift[1];
  bool const pass = mass_drift <= 1e-12 && std::abs(ratio - 16) <= 0.3 * 16 && vort <= 1e-8;
  return {pass, fmt("mass drift %.1e (<=1e-12); H drift %.2e / %.2e, ratio %.2f (16 +- 30%%); curl v / v %.1e (<=1e-8)",
                    mass_drift, drift[0], drift[1], ratio, vort)};
}

// 7. Linear dispersion.
Outcome dispersion()
{
  auto const g = Grid::line(32, 2 * pi);
  std::vector<int> modes;
  for (int m = 1; m <= 8; ++m) {
    modes.push_back(m);
  }
  DispersionOptions opt{1e-6, 100, 3};
  double worst_gn = 0, worst_sv = 0;
  bool fits = true;
  ModelParams p;
  p.epsilon = 1;
  for (double mu : {0.5, 1.0}) {
    p.mu = mu;
    for (auto const &r : dispersion_study(p, g, modes, opt)) {
      fits = fits && r.fit_ok;
      worst_gn = std::max(worst_gn, r.rel_error);
    }
  }
  p.formulation = Formulation::sv;
  for (auto const &r : dispersion_study(p, g, modes, opt)) {
    fits = fits && r.fit_ok && std::abs(r.predicted - std::abs(r.k)) < 1e-14;
    worst_sv = std::max(worst_sv, r.rel_error);
  }
  return {fits && worst_gn <= 1e-3 && worst_sv <= 1e-3,
          fmt("modes 1..8 on N=32: GN worst %.2e, Saint-Venant worst %.2e (<=1e-3)", worst_gn, worst_sv)};
}

// 8. Solitary wave over ten traversals of the box.
Outcome solitary_wave()
{
  double const a = 1.0, eps = 0.2, mu = 1.0, L = 100.0;
  int const N = 256;
  auto const g = Grid::line(N, L);
  SolitaryWave const w = solve_solitary_wave(a, eps, mu);
  ModelParams p;
  p.epsilon = eps;
  p.mu = mu;
  p.formulation = Formulation::gn_v;
  BathymetryState const bath = BathymetryState::flat(g);
  FluidState const init = w.state(g, L / 2, VelocityKind::v_variable);
  IntegrationConfig icfg;
  icfg.dt = cfl_time_step(init, p, bath, icfg.cfl_guard) / 4;
  double const period = L / w.speed;
  icfg.t_end = 10 * period;
  icfg.diagnostics_energies = false;
  Integrator integ(p, bath, icfg);
  RunReport const r = integ.run(init);
  if (r.cause != Termination::completed) {
    return {false, "run failed: " + r.message};
  }
  // Realign: locate the crest by Newton on the spectral derivative, then shift by a phase.
  Field const &z = r.final_state.zeta;
  auto const zh = spectrum(z);
  Grid::RealArray const &k = g->wavenumber(0);
  auto eval = [&](double x, int order) {
    double acc = 0;
    for (Index s = 0; s < g->spectral_size(); ++s) {
      std::complex<double> c = zh[s] * std::exp(std::complex<double>(0, k[s] * x));
      for (int o = 0; o < order; ++o) {
        c *= std::complex<double>(0, k[s]);
      }
      acc += g->parseval_weight()[s] * 2 * c.real();
    }
    return acc;
  };
  Index jmax = 0;
  z.values().maxCoeff(&jmax);
  double x = g->coordinate(0, jmax);
  for (int it = 0; it < 50; ++it) {
    x -= eval(x, 1) / eval(x, 2);
  }
  double const shift = x - L / 2;
  Grid::ComplexArray shifted = zh;
  for (Index s = 0; s < g->spectral_size(); ++s) {
    shifted[s] *= std::exp(std::complex<double>(0, k[s] * shift));
  }
  Field const aligned = from_spectrum(g, shifted);
  double const err = l2_norm(aligned - init.zeta) / l2_norm(init.zeta);
  return {err <= 1e-4, fmt("speed %.10f, dt %.4f, %ld steps; relative L2 shape error %.2e (<=1e-4)", w.speed,
                           icfg.dt, r.steps, err)};
}

// 9. Boussinesq-Peregrine against GN-u as epsilon shrinks.
Outcome boussinesq_ordering()
{
  double const L = 4 * pi;
  ModelParams base;
  base.mu = 0.5;
  base.beta = 0.2;
  RefinementProblem const prob = RefinementProblem::random(2, {L, L}, 3, 99, base, 0.5, 0.5, 0.5);
  auto const g = prob.grid(64);
  BathymetryState const bath = prob.bathymetry(g);
  FluidState const s = prob.state_u(g);
  std::vector<double> eps{0.2, 0.1, 0.05}, gap;
  EllipticSolver solver;
  for (double e : eps) {
    ModelParams p = base;
    p.epsilon = e;
    p.formulation = Formulation::gn_u;
    RhsResult const gn = rhs_gn_u(s, p, bath, solver);
    p.formulation = Formulation::bp;
    RhsResult const bp = rhs_bp(s, p, bath, solver);
    gap.push_back(l2_norm(bp.dvel - gn.dvel) + l2_norm(bp.dzeta - gn.dzeta));
  }
  // Least-squares slope in log-log.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    double const x = std::log(eps[i]), y = std::log(gap[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double const n = eps.size();
  double const slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {std::abs(slope - 1.0) <= 0.2,
          fmt("gaps %.3e %.3e %.3e; fitted exponent %.3f (1.0 +- 0.2)", gap[0], gap[1], gap[2], slope)};
}

// 10. Comparability of F^4 and E^4.
Outcome energy_comparability()
{
  double const L = 4 * pi;
  auto band = [&](int N) {
    double lo = 1e300, hi = 0;
    EllipticSolver solver;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      ModelParams p;
      p.epsilon = 0.3;
      p.beta = 0.3;
      p.mu = 0.5;
      RefinementProblem const prob = RefinementProblem::random(2, {L, L}, 3, 300 + seed, p, 0.5, 0.5, 0.5);
      auto const g = prob.grid(N);
      BathymetryState const bath = prob.bathymetry(g);
      FluidState const s{prob.zeta.sample(g), sample(prob.velocity, g), VelocityKind::v_variable, 0.0};
      DepthState::from_surface(s.zeta, bath, p.epsilon).require_bounds(p.bounds());
      double const ratio = energy_F(s, p, bath, 4, solver) / energy_E(s.zeta, s.vel, 4, p.mu);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    return std::max(hi, 1 / lo);
  };
  double const c64 = band(64), c128 = band(128);
  double const change = std::abs(c128 / c64 - 1);
  return {change <= 0.2, fmt("C(64) = %.6f, C(128) = %.6f, relative change %.1e (<=20%%)", c64, c128, change)};
}

// 11. Mollifier.
Outcome mollifier()
{
  double const L = 2 * pi;
  auto const g = Grid::line(256, L);
  // Algebraic spectrum so every cut-off removes something.
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> phase(0, 2 * pi);
  ModalField mf(1, {L, L});
  for (int m = 1; m <= 60; ++m) {
    mf.add({m, 0}, std::polar(std::pow(double(m), -3.0), phase(rng)));
  }
  Field const f = mf.sample(g);
  int const n = 3;
  double const fn = norm_Hn(f, n);
  bool contraction = true;
  std::vector<double> iotas{0.2, 0.1, 0.05}, scaled;
  for (auto profile : {MollifierProfile::sharp_cutoff, MollifierProfile::smooth_bump}) {
    for (double iota : iotas) {
      MollifierSpec const spec{iota, profile};
      Field const j = mollify(f, spec);
      contraction = contraction && norm_Hn(j, n) <= fn;
      if (profile == MollifierProfile::sharp_cutoff) {
        scaled.push_back(norm_Hn(f - j, n - 1) / iota);
      }
    }
  }
  bool const bounded = *std::max_element(scaled.begin(), scaled.end()) <= fn;

  // Mollified GN-v runs from rough-ish data: divergence between iota and iota/2.
  ModelParams p;
  p.epsilon = 0.2;
  p.mu = 0.5;
  BathymetryState const bath = BathymetryState::flat(g);
  FluidState const init{f * 0.3, VecField(std::vector<Field>{f * 0.2}), VelocityKind::v_variable, 0.0};
  std::vector<double> runs{0.2, 0.1, 0.05, 0.025};
  std::vector<FluidState> finals;
  for (double iota : runs) {
    IntegrationConfig icfg;
    icfg.dt = 0.01;
    icfg.t_end = 1;
    icfg.mollifier = {iota, MollifierProfile::sharp_cutoff};
    icfg.diagnostics_energies = false;
    Integrator integ(p, bath, icfg);
    RunReport const r = integ.run(init);
    if (r.cause != Termination::completed) {
      return {false, "mollified run failed: " + r.message};
    }
    finals.push_back(r.final_state);
  }
  std::vector<double> div;
  for (std::size_t i = 0; i + 1 < finals.size(); ++i) {
    div.push_back(l2_norm(finals[i].zeta - finals[i + 1].zeta) + l2_norm(finals[i].vel - finals[i + 1].vel));
  }
  bool order_ok = true;
  std::string orders;
  for (std::size_t i = 0; i + 1 < div.size(); ++i) {
    double const o = std::log2(div[i] / div[i + 1]);
    order_ok = order_ok && o >= 0.8;
    orders += fmt(" %.2f", o);
  }
  return {contraction && bounded && order_ok,
          fmt("contraction %s; iota^-1 |f - Jf|_H2 = %.3f %.3f %.3f (<= |f|_H3 = %.3f); run divergence %.2e %.2e %.2e, "
              "orders",
              contraction ? "holds" : "FAILS", scaled[0], scaled[1], scaled[2], fn, div[0], div[1], div[2]) +
              orders + " (>=0.8)"};
}

} // namespace

int main()
{
  struct Criterion
  {
    char const *name;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> const criteria{
      {"operator algebra", operator_algebra},
      {"shape derivative", shape_derivative},
      {"equivalence identity", equivalence_identity},
      {"formulation equivalence", formulation_equivalence},
      {"Hamiltonian structure", hamiltonian_structure},
      {"conservation along flow", conservation},
      {"linear dispersion", dispersion},
      {"solitary wave fidelity", solitary_wave},
      {"Boussinesq-Peregrine ordering", boussinesq_ordering},
      {"energy comparability", energy_comparability},
      {"mollifier", mollifier},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    auto const t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (std::exception const &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %2zu %-30s %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, o.detail.c_str(),
                secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
