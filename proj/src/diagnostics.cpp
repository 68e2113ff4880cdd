#include "sgn/diagnostics.hpp"

#include <cmath>
#include <sstream>

namespace sgn {

namespace {

using Array = Grid::RealArray;
using CArray = Grid::ComplexArray;

void require_resolution(Grid const &g, int n)
{
  if (n < 0) {
    throw std::invalid_argument("norm order must be >= 0");
  }
  if (n > g.min_points() / 3) {
    std::ostringstream os;
    os << "norm of order " << n << " needs at least " << 3 * n << " points per axis, grid has " << g.min_points();
    throw ResolutionError(os.str());
  }
}

double weighted_sum(Grid const &g, Array const &density)
{
  return g.volume() * (g.parseval_weight() * density).sum();
}

/// |k . v|^2 per mode with derivative wavenumbers.
Array divergence_density(VecField const &v, std::vector<CArray> const &vh)
{
  auto const &g = v.grid();
  CArray kv = vh[0] * g.derivative_wavenumber(0);
  for (int a = 1; a < g.dim(); ++a) {
    kv += vh[a] * g.derivative_wavenumber(a);
  }
  return kv.abs2();
}

std::vector<CArray> spectra(VecField const &v)
{
  std::vector<CArray> out;
  for (int a = 0; a < v.dim(); ++a) {
    out.push_back(spectrum(v[a]));
  }
  return out;
}

Array energy_density(std::vector<CArray> const &vh)
{
  Array e = vh[0].abs2();
  for (std::size_t a = 1; a < vh.size(); ++a) {
    e += vh[a].abs2();
  }
  return e;
}

double pairing_h(Field const &h, VecField const &a, VecField const &b)
{
  double acc = 0;
  for (int i = 0; i < a.dim(); ++i) {
    acc += (h.values() * a[i].values() * b[i].values()).sum();
  }
  return acc * h.grid().cell_volume();
}

} // namespace

std::vector<MultiIndex> multi_indices(int dim, int n)
{
  std::vector<MultiIndex> out;
  for (int order = 0; order <= n; ++order) {
    if (dim == 1) {
      out.push_back({order, 0});
      continue;
    }
    for (int a = order; a >= 0; --a) {
      out.push_back({a, order - a});
    }
  }
  return out;
}

Array sobolev_weight(Grid const &g, int n)
{
  Array w = Array::Zero(g.spectral_size());
  for (auto const &alpha : multi_indices(g.dim(), n)) {
    Array term = Array::Ones(g.spectral_size());
    for (int a = 0; a < g.dim(); ++a) {
      term *= g.derivative_wavenumber(a).pow(2 * alpha[a]);
    }
    w += term;
  }
  return w;
}

double norm_Hn(Field const &f, int n)
{
  auto const &g = f.grid();
  require_resolution(g, n);
  return std::sqrt(weighted_sum(g, sobolev_weight(g, n) * spectrum(f).abs2()));
}

double norm_Xn(VecField const &u, int n, double mu)
{
  auto const &g = u.grid();
  require_resolution(g, n);
  auto const uh = spectra(u);
  Array const density = energy_density(uh) + mu * divergence_density(u, uh);
  return std::sqrt(weighted_sum(g, sobolev_weight(g, n) * density));
}

double norm_Yn(VecField const &v, int n, double mu)
{
  auto const &g = v.grid();
  require_resolution(g, n);
  auto const vh = spectra(v);
  Array k2 = g.derivative_wavenumber(0).square();
  for (int a = 1; a < g.dim(); ++a) {
    k2 += g.derivative_wavenumber(a).square();
  }
  Array const density = energy_density(vh) - mu * divergence_density(v, vh) / (1.0 + mu * k2);
  return std::sqrt(weighted_sum(g, sobolev_weight(g, n) * density));
}

double energy_E(Field const &zeta, VecField const &v, int n, double mu)
{
  double const a = norm_Hn(zeta, n);
  double const b = norm_Yn(v, n, mu);
  return a * a + b * b;
}

double energy_F(FluidState const &s, ModelParams const &p, BathymetryState const &bath, int n,
                EllipticSolver &solver)
{
  if (s.kind != VelocityKind::v_variable) {
    throw std::invalid_argument("energy_F: state must carry v");
  }
  require_resolution(s.zeta.grid(), n);
  double const mu = p.effective_mu();
  DepthState const d = DepthState::from_surface(s.zeta, bath, p.epsilon);
  VecField const u = solver.solve(d, bath, pointwise(d.h, s.vel), mu);
  Field const w = good_unknown_w(d, bath, u);
  double total = 0;
  for (auto const &alpha : multi_indices(s.zeta.grid().dim(), n)) {
    Field const za = partial(s.zeta, alpha);
    VecField va = partial(s.vel, alpha);
    bool const zero = alpha[0] == 0 && alpha[1] == 0;
    if (!zero && mu * p.epsilon != 0) {
      va -= dealias(gradient(pointwise(w, za))) * (mu * p.epsilon);
    }
    VecField const ua = solver.solve(d, bath, pointwise(d.h, va), mu);
    total += inner_product(za, za) + pairing_h(d.h, va, ua);
  }
  return total;
}

double hamiltonian_gn(Field const &zeta, VecField const &v, ModelParams const &p, BathymetryState const &bath,
                      EllipticSolver &solver)
{
  DepthState const d = DepthState::from_surface(zeta, bath, p.epsilon);
  VecField const hv = pointwise(d.h, v);
  double const mu = p.effective_mu();
  VecField const u = solver.solve(d, bath, hv, mu);
  // Stationary form <b,u> - <𝔗u,u>/2: the solver error enters quadratically.
  double const kinetic = inner_product(hv, u) - 0.5 * inner_product(apply_frakT(d, bath, u, mu), u);
  return 0.5 * inner_product(zeta, zeta) + kinetic;
}

AppendixAEnergy energy_appendixA(FluidState const &s, ModelParams const &p, BathymetryState const &bath,
                                 MultiIndex const &alpha)
{
  if (s.kind != VelocityKind::u_variable) {
    throw std::invalid_argument("energy_appendixA: state must carry u");
  }
  double const mu = p.effective_mu();
  auto const &grid = s.grid_ptr();
  DepthState const d = DepthState::from_surface(s.zeta, bath, p.epsilon);
  VecField const &u = s.vel;
  Field const za = partial(s.zeta, alpha);
  VecField const ua = partial(u, alpha);

  AppendixAEnergy out;
  out.F = 0.5 * (inner_product(za, za) + inner_product(apply_frakT(d, bath, ua, mu), ua));

  Array const dtz = -divergence(pointwise(d.h, u)).values();
  Array const div_hu = divergence(pointwise(d.h, u)).values();
  Array const div_h2u = divergence(pointwise(d.h2, u)).values();
  Array const div_h3u = divergence(pointwise(d.h3, u)).values();
  Array const sa = divergence(ua).values();
  Array const ga = dot(bath.slope(), ua).values();
  Array const h = d.h.values();
  Array g = divergence(u).values() * za.values().square();
  g -= (dtz + div_hu) * dot(ua, ua).values();
  g -= mu / 3.0 * (3.0 * d.h2.values() * dtz + div_h3u) * sa.square();
  g += mu * (2.0 * h * dtz + div_h2u) * ga * sa;
  g -= mu * (dtz + div_hu) * ga.square();
  out.G = 0.5 * integrate(Field(grid, std::move(g)));
  return out;
}

double appendixA_source(FluidState const &s, Field const &dzeta, VecField const &du, ModelParams const &p,
                        BathymetryState const &bath, MultiIndex const &alpha)
{
  double const mu = p.effective_mu();
  double const eps = p.epsilon;
  DepthState const d = DepthState::from_surface(s.zeta, bath, eps);
  VecField const &u = s.vel;
  Field const za = partial(s.zeta, alpha);
  VecField const ua = partial(u, alpha);

  Field r = partial(dzeta, alpha);
  r += divergence(pointwise(za, u)) * eps;
  r += divergence(pointwise(d.h, ua));

  // h times the velocity residual
  VecField hr = apply_frakT(d, bath, partial(du, alpha), mu);
  hr += pointwise(d.h, gradient(za));
  if (eps != 0) {
    hr += pointwise(d.h, advect(u, ua)) * eps;
    if (mu != 0) {
      hr += pointwise(d.h, apply_Q_alpha(d, bath, u, ua)) * (mu * eps);
    }
  }
  return inner_product(r, za) + inner_product(hr, ua);
}

double vorticity_norm(VecField const &v) { return l2_norm(curl2d(v)); }

DiagnosticsRecord make_record(FluidState const &s, ModelParams const &p, BathymetryState const &bath, int order,
                              EllipticSolver &solver, long cg_iterations)
{
  FluidState const sv = s.kind == VelocityKind::v_variable ? s : v_from_u(s, p, bath);
  DepthState const d = DepthState::from_surface(s.zeta, bath, p.epsilon);
  DiagnosticsRecord r;
  r.time = s.time;
  r.mass = integrate(s.zeta);
  r.hamiltonian = hamiltonian_gn(sv.zeta, sv.vel, p, bath, solver);
  r.e_norm = energy_E(sv.zeta, sv.vel, order, p.effective_mu());
  r.f_norm = energy_F(sv, p, bath, order, solver);
  r.vorticity_l2 = vorticity_norm(sv.vel);
  r.min_depth = d.min;
  r.cg_iterations = cg_iterations;
  r.order = order;
  return r;
}

} // namespace sgn
