#include "sgn/verify.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace sgn {

namespace {

using Array = Grid::RealArray;

double max_gap(VecField const &a, VecField const &b) { return max_abs(a - b); }

/// Samples cos or sin of the mode stored at spectral entry s.
Field fourier_mode(GridHandle const &g, Index s, bool sine)
{
  std::array<double, 2> k{g->wavenumber(0)[s], g->dim() == 2 ? g->wavenumber(1)[s] : 0.0};
  return Field::sample(g, [&](double x, double y) {
    double const phase = k[0] * x + k[1] * y;
    return sine ? std::sin(phase) : std::cos(phase);
  });
}

struct BasisFunction
{
  Field phi;
  double norm2;
};

/// Real orthogonal basis of the dealiased range.
std::vector<BasisFunction> dealiased_basis(GridHandle const &g)
{
  std::vector<BasisFunction> out;
  Array const &mask = g->dealias_mask();
  for (Index s = 0; s < g->spectral_size(); ++s) {
    if (mask[s] == 0) {
      continue;
    }
    int const m0 = g->mode(0, s);
    int const m1 = g->dim() == 2 ? g->mode(1, s) : 0;
    bool const upper = g->dim() == 1 ? m0 >= 0 : (m1 > 0 || (m1 == 0 && m0 >= 0));
    if (!upper) {
      continue;
    }
    bool const mean = m0 == 0 && m1 == 0;
    out.push_back({fourier_mode(g, s, false), mean ? g->volume() : 0.5 * g->volume()});
    if (!mean) {
      out.push_back({fourier_mode(g, s, true), 0.5 * g->volume()});
    }
  }
  return out;
}

double cubic_root(double const *t, double const *c)
{
  // Lagrange cubic through four samples, root bracketed in [t1, t2].
  auto p = [&](double x) {
    double acc = 0;
    for (int i = 0; i < 4; ++i) {
      double term = c[i];
      for (int j = 0; j < 4; ++j) {
        if (j != i) {
          term *= (x - t[j]) / (t[i] - t[j]);
        }
      }
      acc += term;
    }
    return acc;
  };
  double a = t[1], b = t[2];
  double fa = p(a);
  for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
    double const m = 0.5 * (a + b);
    double const fm = p(m);
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

} // namespace

std::string ResidualReport::summary() const
{
  std::ostringstream os;
  os << name << ":";
  os << std::scientific << std::setprecision(3);
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    os << " N=" << sizes[i] << " " << residuals[i];
  }
  os << (pass ? " [pass]" : " [FAIL]");
  return os.str();
}

ResidualReport make_report(std::string name, std::vector<int> sizes, std::vector<double> residuals, double floor)
{
  ResidualReport r;
  r.name = std::move(name);
  r.sizes = std::move(sizes);
  r.residuals = std::move(residuals);
  r.floor = floor;
  std::size_t const n = r.residuals.size();
  if (n == 0) {
    return r;
  }
  if (n >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double const x = r.sizes[i];
      double const y = -std::log(std::max(r.residuals[i], 1e-300));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    double const den = n * sxx - sx * sx;
    r.decay_rate = den != 0 ? (n * sxy - sx * sy) / den : 0;
  }
  bool super = n >= 3;
  double prev = -1e300;
  for (std::size_t i = 0; i + 1 < n && super; ++i) {
    double const order = std::log(std::max(r.residuals[i], 1e-300) / std::max(r.residuals[i + 1], 1e-300)) /
                         std::log(double(r.sizes[i + 1]) / r.sizes[i]);
    super = order > prev;
    prev = order;
  }
  super = super && prev >= 6;
  r.pass = r.residuals.back() <= floor || super;
  return r;
}

RefinementProblem RefinementProblem::random(int dim, std::array<double, 2> lengths, int max_mode, std::uint64_t seed,
                                            ModelParams params, double zeta_amp, double bottom_amp,
                                            double velocity_amp)
{
  std::mt19937_64 rng(seed);
  RefinementProblem p;
  p.dim = dim;
  p.lengths = lengths;
  p.params = params;
  p.zeta = random_modal(dim, lengths, max_mode, zeta_amp, rng);
  p.bottom = random_modal(dim, lengths, max_mode, bottom_amp, rng);
  p.velocity = random_modal_vector(dim, lengths, max_mode, velocity_amp, rng);
  return p;
}

GridHandle RefinementProblem::grid(int n) const
{
  return dim == 1 ? Grid::line(n, lengths[0]) : Grid::plane(n, n, lengths[0], lengths[1]);
}

BathymetryState RefinementProblem::bathymetry(GridHandle const &g) const
{
  return {bottom.sample(g), params.beta};
}

FluidState RefinementProblem::state_u(GridHandle const &g) const
{
  return {zeta.sample(g), sample(velocity, g), VelocityKind::u_variable, 0.0};
}

// ---------------------------------------------------------------------------

VecField equivalence_identity_residual(Field const &zeta, VecField const &u, ModelParams const &p,
                                       BathymetryState const &bath)
{
  double const eps = p.epsilon;
  auto const &g = u.grid_ptr();
  DepthState const d = DepthState::from_surface(zeta, bath, eps);
  Field const dtz = dealias(divergence(pointwise(d.h, u))) * -1.0;
  VecField const Tu = apply_T(d, bath, u);
  Field const w = good_unknown_w(d, bath, u);

  VecField lhs = dh_T(d, bath, dtz * eps, u);
  if (u.dim() == 2) {
    Array const c = curl2d(Tu).values();
    lhs[0] -= dealias(Field(g, eps * u[1].values() * c));
    lhs[1] += dealias(Field(g, eps * u[0].values() * c));
  }
  lhs += dealias(gradient(Field(g, dot(u, Tu).values() - 0.5 * w.values().square()))) * eps;
  VecField rhs = apply_Q(d, u);
  if (bath.beta != 0) {
    rhs += apply_Qb(d, bath, u);
  }
  return lhs - rhs * eps;
}

ResidualReport check_equivalence_identity(RefinementProblem const &prob, std::vector<int> const &sizes)
{
  std::vector<double> res;
  for (int n : sizes) {
    auto const g = prob.grid(n);
    FluidState const s = prob.state_u(g);
    res.push_back(max_abs(equivalence_identity_residual(s.zeta, s.vel, prob.params, prob.bathymetry(g))));
  }
  return make_report("equivalence identity", sizes, res);
}

RhsEquivalence rhs_equivalence_gap(FluidState const &state_u, ModelParams const &p, BathymetryState const &bath,
                                   EllipticSolveConfig const &cfg)
{
  EllipticSolver solver(cfg);
  double const mu = p.effective_mu();
  ModelParams pu = p;
  pu.formulation = Formulation::gn_u;
  RhsResult const ru = rhs_gn_u(state_u, pu, bath, solver);
  FluidState const sv = v_from_u(state_u, pu, bath);
  RhsResult const rv = rhs_gn_v(sv, pu, bath, solver);

  DepthState const d = DepthState::from_surface(state_u.zeta, bath, p.epsilon);
  VecField const &u = state_u.vel;
  Field const f = ru.dzeta * p.epsilon;
  VecField const dT = dh_frakT(d, bath, f, u, mu);
  VecField const fv = pointwise(f, sv.vel);

  // h dv/dt = 𝔗 du/dt + d_h𝔗(eps dzeta/dt) u - eps dzeta/dt v
  VecField hdv = apply_frakT(d, bath, ru.dvel, mu) + dT - fv;
  VecField dv_b(u.grid_ptr());
  for (int a = 0; a < u.dim(); ++a) {
    dv_b[a] = dealias(Field(u.grid_ptr(), hdv[a].values() * d.inv_h.values()));
  }
  VecField const back = pointwise(d.h, rv.dvel) + fv - dT;
  VecField const du_mapped = solver.solve(d, bath, back, mu);

  RhsEquivalence out;
  out.du_gap = max_gap(ru.dvel, du_mapped);
  out.dv_gap = max_gap(rv.dvel, dv_b);
  out.dzeta_gap = max_abs(ru.dzeta - rv.dzeta);
  return out;
}

ResidualReport check_rhs_equivalence(RefinementProblem const &prob, std::vector<int> const &sizes,
                                     EllipticSolveConfig const &cfg)
{
  std::vector<double> du, dv;
  for (int n : sizes) {
    auto const g = prob.grid(n);
    RhsEquivalence const e = rhs_equivalence_gap(prob.state_u(g), prob.params, prob.bathymetry(g), cfg);
    du.push_back(e.du_gap);
    dv.push_back(e.dv_gap);
  }
  ResidualReport r = make_report("rhs equivalence (du/dt)", sizes, du);
  r.secondary = dv;
  return r;
}

// ---------------------------------------------------------------------------

VariationalReport check_variational_structure(Field const &zeta, VecField const &v, ModelParams const &p,
                                              BathymetryState const &bath, std::uint64_t seed, double delta)
{
  auto const &g = zeta.grid_ptr();
  int const dim = g->dim();
  double const eps = p.epsilon;
  double const mu = p.effective_mu();
  EllipticSolveConfig cfg;
  cfg.warm_start = true;
  EllipticSolver solver(cfg);
  auto H = [&](Field const &z, VecField const &w) { return hamiltonian_gn(z, w, p, bath, solver); };

  // Analytic variational derivatives at the base point.
  DepthState const d = DepthState::from_surface(zeta, bath, eps);
  VecField const u = solver.solve(d, bath, pointwise(d.h, v), mu);
  Array wv = -d.h.values() * divergence(u).values();
  if (bath.beta != 0) {
    wv += dot(bath.slope(), u).values();
  }
  Field const dH_zeta(g, zeta.values() + eps * (dot(u, v).values() - 0.5 * dot(u, u).values() - 0.5 * mu * wv.square()));
  VecField const dH_v = pointwise(d.h, u);

  VariationalReport rep;
  // (a) directional derivatives
  std::mt19937_64 rng(seed);
  std::array<double, 2> const box{g->length(0), dim == 2 ? g->length(1) : 0.0};
  int const band = std::max(1, static_cast<int>(g->min_points() / 8));
  double const zscale = std::max(max_abs(zeta), 1e-3);
  Field const phi = random_modal(dim, box, band, zscale, rng).sample(g);
  double const pairing = inner_product(dH_zeta, phi);
  for (double dl : {0.2, 0.1, 0.05}) {
    double const fd = (H(zeta + phi * dl, v) - H(zeta - phi * dl, v)) / (2 * dl);
    rep.deltas.push_back(dl);
    rep.zeta_mismatch.push_back(std::abs(fd - pairing));
  }
  rep.min_quartering = 1e300;
  for (std::size_t i = 0; i + 1 < rep.zeta_mismatch.size(); ++i) {
    rep.min_quartering = std::min(rep.min_quartering, rep.zeta_mismatch[i] / rep.zeta_mismatch[i + 1]);
  }
  double const vscale = std::max(max_abs(v), 1e-3);
  VecField const psi = sample(random_modal_vector(dim, box, band, vscale, rng), g);
  double const fdv = (H(zeta, v + psi * 1e-2) - H(zeta, v - psi * 1e-2)) / 2e-2;
  rep.v_mismatch = std::abs(fdv - inner_product(dH_v, psi));

  // (b) numerical variational derivatives over the dealiased Fourier basis
  auto const basis = dealiased_basis(g);
  auto numerical = [&](int which, double dl) {
    // which = -1: zeta, else velocity component
    Field acc(g);
    double const scale = dl * (which < 0 ? zscale : vscale);
    for (auto const &b : basis) {
      double hp, hm;
      if (which < 0) {
        hp = H(zeta + b.phi * scale, v);
        hm = H(zeta - b.phi * scale, v);
      } else {
        VecField vp = v, vm = v;
        vp[which] += b.phi * scale;
        vm[which] -= b.phi * scale;
        hp = H(zeta, vp);
        hm = H(zeta, vm);
      }
      acc.values() += ((hp - hm) / (2 * scale * b.norm2)) * b.phi.values();
    }
    return acc;
  };
  Array const q = eps * curl2d(v).values() * d.inv_h.values();
  auto assemble = [&](double dl) {
    Field const dz = numerical(-1, dl);
    VecField dvh(g);
    for (int a = 0; a < dim; ++a) {
      dvh[a] = numerical(a, dl);
    }
    Field dzeta = dealias(divergence(dvh)) * -1.0;
    VecField dvel = dealias(gradient(dz)) * -1.0;
    if (dim == 2) {
      dvel[0] += dealias(Field(g, q * dvh[1].values()));
      dvel[1] -= dealias(Field(g, q * dvh[0].values()));
    }
    std::vector<Field> comps{dzeta};
    for (int a = 0; a < dim; ++a) {
      comps.push_back(dvel[a]);
    }
    return comps;
  };
  auto const coarse = assemble(delta);
  auto const fine = assemble(0.5 * delta);
  FluidState const sv{zeta, v, VelocityKind::v_variable, 0.0};
  RhsResult const r = rhs_gn_v(sv, p, bath, solver);
  std::vector<Field> reference{r.dzeta};
  for (int a = 0; a < dim; ++a) {
    reference.push_back(r.dvel[a]);
  }
  for (std::size_t i = 0; i < fine.size(); ++i) {
    rep.truncation = std::max(rep.truncation, max_abs(coarse[i] - fine[i]));
    rep.assembled_gap = std::max(rep.assembled_gap, max_abs(fine[i] - reference[i]));
  }
  rep.tolerance = std::max(1e-7, 10 * rep.truncation);
  rep.pass = rep.assembled_gap <= rep.tolerance && rep.min_quartering > 3.0 && rep.min_quartering < 5.0;
  return rep;
}

// ---------------------------------------------------------------------------

double linear_frequency(double k, double mu) { return std::abs(k) / std::sqrt(1 + mu * k * k / 3); }

std::vector<DispersionRow> dispersion_study(ModelParams params, GridHandle const &grid, std::vector<int> const &modes,
                                            DispersionOptions const &opt)
{
  if (grid->dim() != 1) {
    throw std::invalid_argument("dispersion_study: one-dimensional grid expected");
  }
  params.beta = 0;
  BathymetryState const bath = BathymetryState::flat(grid);
  std::vector<DispersionRow> rows;
  for (int m : modes) {
    DispersionRow row;
    row.mode = m;
    row.k = 2 * std::numbers::pi * m / grid->length(0);
    row.predicted = linear_frequency(row.k, params.effective_mu());
    double const period = 2 * std::numbers::pi / row.predicted;
    IntegrationConfig icfg;
    icfg.dt = period / opt.steps_per_period;
    icfg.t_end = opt.periods * period;
    icfg.diagnostics_energies = false;
    Integrator integ(params, bath, icfg);
    Field const carrier = Field::sample(grid, [&](double x, double) { return std::cos(row.k * x); });
    FluidState s{carrier * opt.amplitude, VecField(grid), velocity_kind(params.formulation), 0.0};
    std::vector<double> t{0.0}, c{inner_product(s.zeta, carrier)};
    long const steps = std::lround(opt.periods * opt.steps_per_period);
    for (long n = 0; n < steps; ++n) {
      s = integ.step(s);
      t.push_back(s.time);
      c.push_back(inner_product(s.zeta, carrier));
    }
    std::vector<double> crossings;
    for (std::size_t i = 1; i + 2 < c.size(); ++i) {
      if ((c[i] < 0) != (c[i + 1] < 0)) {
        crossings.push_back(cubic_root(&t[i - 1], &c[i - 1]));
      }
    }
    if (crossings.size() >= 3) {
      row.measured = std::numbers::pi * double(crossings.size() - 1) / (crossings.back() - crossings.front());
      row.rel_error = std::abs(row.measured - row.predicted) / row.predicted;
      row.fit_ok = true;
    }
    rows.push_back(row);
  }
  return rows;
}

ResidualReport convergence_in_dt(FluidState const &initial, ModelParams const &p, BathymetryState const &bath,
                                 IntegrationConfig icfg, std::vector<double> const &dts)
{
  if (dts.size() < 2) {
    throw std::invalid_argument("convergence_in_dt: need at least two step sizes");
  }
  std::vector<FluidState> finals;
  for (double dt : dts) {
    icfg.dt = dt;
    Integrator integ(p, bath, icfg);
    RunReport const r = integ.run(initial);
    if (r.cause != Termination::completed) {
      throw BlowUp("convergence_in_dt: run failed: " + r.message);
    }
    finals.push_back(r.final_state);
  }
  FluidState const &ref = finals.back();
  std::vector<int> steps;
  std::vector<double> err;
  for (std::size_t i = 0; i + 1 < finals.size(); ++i) {
    steps.push_back(static_cast<int>(std::lround((icfg.t_end - initial.time) / dts[i])));
    err.push_back(l2_norm(finals[i].zeta - ref.zeta) + l2_norm(finals[i].vel - ref.vel));
  }
  ResidualReport r = make_report("dt self-convergence", steps, err, 0.0);
  for (std::size_t i = 0; i + 1 < err.size(); ++i) {
    r.secondary.push_back(std::log(err[i] / err[i + 1]) / std::log(dts[i] / dts[i + 1]));
  }
  r.pass = !r.secondary.empty() && std::abs(r.secondary.back() - 4.0) < 0.5;
  return r;
}

ResidualReport convergence_in_n(RefinementProblem const &prob, std::vector<int> const &sizes, double t_end, double dt)
{
  std::vector<Field> finals;
  for (int n : sizes) {
    auto const g = prob.grid(n);
    BathymetryState const bath = prob.bathymetry(g);
    FluidState s = prob.state_u(g);
    if (prob.params.formulation == Formulation::gn_v) {
      s = v_from_u(s, prob.params, bath);
    }
    IntegrationConfig icfg;
    icfg.dt = dt;
    icfg.t_end = t_end;
    Integrator integ(prob.params, bath, icfg);
    RunReport const r = integ.run(s);
    if (r.cause != Termination::completed) {
      throw BlowUp("convergence_in_n: run failed: " + r.message);
    }
    finals.push_back(r.final_state.zeta);
  }
  Field const &ref = finals.back();
  int const nf = sizes.back();
  std::vector<int> used;
  std::vector<double> err;
  for (std::size_t i = 0; i + 1 < finals.size(); ++i) {
    int const n = sizes[i];
    if (nf % n != 0) {
      throw std::invalid_argument("convergence_in_n: grid sizes must divide the finest size");
    }
    int const r = nf / n;
    auto const &g = finals[i].grid();
    double e = 0;
    for (Index j = 0; j < g.size(); ++j) {
      auto const ij = g.unravel(j);
      Index const jf = prob.dim == 1 ? ij[0] * r : (ij[0] * r) * nf + ij[1] * r;
      e = std::max(e, std::abs(finals[i].values()[j] - ref.values()[jf]));
    }
    used.push_back(n);
    err.push_back(e);
  }
  return make_report("N self-convergence", used, err);
}

// ---------------------------------------------------------------------------

std::vector<CheckResult> run_verification_suite(std::uint64_t seed)
{
  std::vector<CheckResult> out;
  auto add = [&](std::string name, bool pass, std::string detail) {
    out.push_back({std::move(name), pass, std::move(detail)});
  };
  auto sci = [](double x) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(2) << x;
    return os.str();
  };
  double const L = 4 * std::numbers::pi;
  ModelParams p;
  p.epsilon = 0.2;
  p.beta = 0.2;
  p.mu = 0.5;
  RefinementProblem const prob = RefinementProblem::random(2, {L, L}, 2, seed, p, 0.5, 0.5, 0.4);

  // Spectral calculus
  {
    auto const g = prob.grid(32);
    Field const f = prob.zeta.sample(g);
    double const e = max_abs(divergence(gradient(f)) - laplacian(f));
    double const c = max_abs(curl2d(gradient(f)));
    add("grid: div grad = laplacian, curl grad = 0", e < 1e-12 && c < 1e-12, sci(std::max(e, c)));
  }
  // Operator algebra
  {
    auto const g = prob.grid(32);
    BathymetryState const bath = prob.bathymetry(g);
    FluidState const s = prob.state_u(g);
    DepthState const d = DepthState::from_surface(s.zeta, bath, p.epsilon);
    std::mt19937_64 rng(seed + 1);
    VecField const u2 = sample(random_modal_vector(2, {L, L}, 2, 0.4, rng), g);
    double const a = inner_product(apply_frakT(d, bath, s.vel, p.mu), u2);
    double const b = inner_product(apply_frakT(d, bath, u2, p.mu), s.vel);
    double const sym = std::abs(a - b) / (l2_norm(s.vel) * l2_norm(u2));
    add("operators: 𝔗 symmetric", sym < 1e-12, sci(sym));
    SolveStats st;
    VecField const x = invert_frakT(d, bath, s.vel, p.mu, {}, &st);
    double const rt = l2_norm(apply_frakT(d, bath, x, p.mu) - dealias(s.vel)) / l2_norm(dealias(s.vel));
    add("operators: 𝔗 inverse round trip", rt < 1e-11, sci(rt) + " in " + std::to_string(st.iterations) + " it");
  }
  // Lake at rest
  {
    auto const g = prob.grid(32);
    BathymetryState const bath = prob.bathymetry(g);
    double worst = 0;
    EllipticSolver solver;
    for (Formulation f : {Formulation::gn_u, Formulation::gn_v, Formulation::bp, Formulation::sv}) {
      ModelParams q = p;
      q.formulation = f;
      RhsResult const r = evaluate_rhs(FluidState::rest(g, velocity_kind(f)), q, bath, solver);
      worst = std::max({worst, max_abs(r.dzeta), max_abs(r.dvel)});
    }
    add("models: lake at rest", worst < 1e-13, sci(worst));
  }
  // Exact identities under refinement
  {
    ResidualReport const r = check_equivalence_identity(prob, {16, 32, 64});
    add("verify: equivalence identity", r.pass, sci(r.residuals.back()));
    ResidualReport const e = check_rhs_equivalence(prob, {16, 32, 64});
    add("verify: GN-u / GN-v right-hand sides", e.pass, sci(e.residuals.back()));
  }
  // Vorticity law
  {
    auto const g = prob.grid(64);
    BathymetryState const bath = prob.bathymetry(g);
    std::mt19937_64 rng(seed + 2);
    FluidState const s{prob.zeta.sample(g), sample(random_modal_vector(2, {L, L}, 2, 0.4, rng), g),
                       VelocityKind::v_variable, 0.0};
    EllipticSolver solver;
    RhsResult const r = rhs_gn_v(s, p, bath, solver);
    Field const law = dealias(divergence(pointwise(curl2d(s.vel), r.u))) * -p.epsilon;
    double const gap = max_abs(curl2d(r.dvel) - law);
    add("models: vorticity law", gap < 1e-9, sci(gap));
  }
  // Hamiltonian structure
  {
    auto const g = prob.grid(16);
    BathymetryState const bath = prob.bathymetry(g);
    RefinementProblem const small = RefinementProblem::random(2, {L, L}, 1, seed, p, 0.3, 0.3, 0.3);
    FluidState const s{small.zeta.sample(g), sample(small.velocity, g), VelocityKind::v_variable, 0.0};
    VariationalReport const v = check_variational_structure(s.zeta, s.vel, p, bath, seed);
    add("verify: Hamiltonian skew structure", v.pass,
        sci(v.assembled_gap) + " (tol " + sci(v.tolerance) + ", FD ratio " + sci(v.min_quartering) + ")");
  }
  // Dispersion
  {
    ModelParams q;
    q.epsilon = 1;
    q.mu = 1;
    auto const rows = dispersion_study(q, Grid::line(32, 2 * std::numbers::pi), {1, 2, 4}, {1e-6, 100, 3});
    double worst = 0;
    bool ok = true;
    for (auto const &r : rows) {
      ok = ok && r.fit_ok;
      worst = std::max(worst, r.rel_error);
    }
    add("verify: linear dispersion", ok && worst < 1e-3, sci(worst));
  }
  return out;
}

} // namespace sgn
