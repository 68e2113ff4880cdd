#include "sgn/models.hpp"

#include <cmath>

namespace sgn {

namespace {

using Array = Grid::RealArray;

void require_kind(FluidState const &s, VelocityKind k, char const *who)
{
  if (s.kind != k) {
    throw std::invalid_argument(std::string(who) + ": state carries the wrong velocity variable");
  }
}

void require_same_grid(FluidState const &s, BathymetryState const &bath, char const *who)
{
  if (s.grid_ptr() != bath.b.grid_ptr() && s.zeta.grid() != bath.b.grid()) {
    throw GridMismatch(std::string(who) + ": state and bathymetry live on different grids");
  }
}

/// -div(h u), projected.
Field mass_flux_divergence(DepthState const &d, VecField const &u)
{
  return dealias(divergence(pointwise(d.h, u))) * -1.0;
}

VecField projected_gradient(Field const &f) { return dealias(gradient(f)); }

/// -grad zeta - eps (u.grad) u
VecField saint_venant_forcing(FluidState const &s, VecField const &u, double eps)
{
  VecField f = projected_gradient(s.zeta) * -1.0;
  if (eps != 0) {
    f -= advect(u, u) * eps;
  }
  return f;
}

} // namespace

std::string to_string(Formulation f)
{
  switch (f) {
  case Formulation::gn_u: return "gn_u";
  case Formulation::gn_v: return "gn_v";
  case Formulation::bp: return "bp";
  case Formulation::sv: return "sv";
  }
  return "?";
}

Formulation parse_formulation(std::string const &name)
{
  if (name == "gn_u") return Formulation::gn_u;
  if (name == "gn_v") return Formulation::gn_v;
  if (name == "bp") return Formulation::bp;
  if (name == "sv") return Formulation::sv;
  throw std::invalid_argument("unknown formulation '" + name + "' (expected gn_u, gn_v, bp or sv)");
}

VelocityKind velocity_kind(Formulation f)
{
  return f == Formulation::gn_v ? VelocityKind::v_variable : VelocityKind::u_variable;
}

void ModelParams::validate() const
{
  std::vector<FieldViolation> v;
  auto nonneg = [&](double x, char const *name) {
    if (!(x >= 0) || !std::isfinite(x)) {
      v.push_back({name, "must be finite and >= 0"});
    }
  };
  nonneg(epsilon, "model.epsilon");
  nonneg(beta, "model.beta");
  nonneg(mu, "model.mu");
  if (!(h_star > 0)) {
    v.push_back({"model.h_star", "must be > 0"});
  }
  if (!(h_star_upper > h_star)) {
    v.push_back({"model.h_star_upper", "must exceed model.h_star"});
  }
  if (!(h_star < 1 && h_star_upper > 1)) {
    v.push_back({"model.h_star", "depth bounds must bracket the rest depth 1"});
  }
  if (!v.empty()) {
    throw ValidationError(std::move(v));
  }
}

FluidState::FluidState(Field z, VecField velocity, VelocityKind k, double t)
  : zeta(std::move(z)), vel(std::move(velocity)), kind(k), time(t)
{
  zeta.require_same(vel[0]);
}

FluidState FluidState::rest(GridHandle const &grid, VelocityKind k) { return {Field(grid), VecField(grid), k, 0.0}; }

RhsResult rhs_sv(FluidState const &s, ModelParams const &p, BathymetryState const &bath)
{
  require_kind(s, VelocityKind::u_variable, "rhs_sv");
  require_same_grid(s, bath, "rhs_sv");
  DepthState const d = DepthState::from_surface(s.zeta, bath, p.epsilon);
  return {mass_flux_divergence(d, s.vel), saint_venant_forcing(s, s.vel, p.epsilon), {}, s.vel};
}

RhsResult rhs_gn_u(FluidState const &s, ModelParams const &p, BathymetryState const &bath, EllipticSolver &solver)
{
  require_kind(s, VelocityKind::u_variable, "rhs_gn_u");
  require_same_grid(s, bath, "rhs_gn_u");
  double const mu = p.effective_mu();
  if (mu == 0) {
    return rhs_sv(s, p, bath);
  }
  DepthState const d = DepthState::from_surface(s.zeta, bath, p.epsilon);
  VecField const &u = s.vel;
  VecField forcing = saint_venant_forcing(s, u, p.epsilon);
  // 𝔗 du/dt = h (forcing - mu eps (Q + Q_b))
  VecField rhs = pointwise(d.h, forcing);
  if (p.epsilon != 0) {
    VecField q = apply_Q(d, u);
    if (bath.beta != 0) {
      q += apply_Qb(d, bath, u);
    }
    rhs -= pointwise(d.h, q) * (mu * p.epsilon);
  }
  RhsResult out{mass_flux_divergence(d, u), VecField(u.grid_ptr()), {}, u};
  out.dvel = solver.solve(d, bath, rhs, mu, &out.stats);
  return out;
}

namespace detail {

RhsResult rhs_gn_v_filtered(FluidState const &s, ModelParams const &p, BathymetryState const &bath,
                            EllipticSolver &solver, std::function<Field(Field const &)> const &scalar_filter,
                            std::function<VecField(VecField const &)> const &vector_filter)
{
  require_kind(s, VelocityKind::v_variable, "rhs_gn_v");
  require_same_grid(s, bath, "rhs_gn_v");
  double const mu = p.effective_mu();
  double const eps = p.epsilon;
  DepthState const d = DepthState::from_surface(s.zeta, bath, eps);
  VecField const &v = s.vel;
  SolveStats stats;
  VecField const u = solver.solve(d, bath, pointwise(d.h, v), mu, &stats);

  Field dzeta = mass_flux_divergence(d, u);
  // Potential: zeta + eps/2 |u|^2 - mu eps (R + R_b)
  Field phi = s.zeta;
  if (eps != 0) {
    phi.values() += 0.5 * eps * dot(u, u).values();
    if (mu != 0) {
      Field r = apply_R(d, u);
      if (bath.beta != 0) {
        r += apply_Rb(d, bath, u);
      }
      phi.values() -= mu * eps * r.values();
    }
  }
  VecField group = projected_gradient(phi);
  if (eps != 0 && v.dim() == 2) {
    // eps u^perp curl v
    Array const c = curl2d(v).values();
    group[0] -= dealias(Field(v.grid_ptr(), eps * u[1].values() * c));
    group[1] += dealias(Field(v.grid_ptr(), eps * u[0].values() * c));
  }
  if (scalar_filter) {
    dzeta = scalar_filter(dzeta);
  }
  if (vector_filter) {
    group = vector_filter(group);
  }
  return {std::move(dzeta), group * -1.0, stats, u};
}

} // namespace detail

RhsResult rhs_gn_v(FluidState const &s, ModelParams const &p, BathymetryState const &bath, EllipticSolver &solver)
{
  return detail::rhs_gn_v_filtered(s, p, bath, solver, {}, {});
}

RhsResult rhs_bp(FluidState const &s, ModelParams const &p, BathymetryState const &bath, EllipticSolver &solver)
{
  require_kind(s, VelocityKind::u_variable, "rhs_bp");
  require_same_grid(s, bath, "rhs_bp");
  DepthState const d = DepthState::from_surface(s.zeta, bath, p.epsilon);
  DepthState const rest = DepthState::at_rest(bath);
  VecField const forcing = saint_venant_forcing(s, s.vel, p.epsilon);
  RhsResult out{mass_flux_divergence(d, s.vel), VecField(s.grid_ptr()), {}, s.vel};
  out.dvel = solver.solve(rest, bath, pointwise(rest.h, forcing), p.effective_mu(), &out.stats);
  return out;
}

RhsResult evaluate_rhs(FluidState const &s, ModelParams const &p, BathymetryState const &bath, EllipticSolver &solver)
{
  switch (p.formulation) {
  case Formulation::gn_u: return rhs_gn_u(s, p, bath, solver);
  case Formulation::gn_v: return rhs_gn_v(s, p, bath, solver);
  case Formulation::bp: return rhs_bp(s, p, bath, solver);
  case Formulation::sv: return rhs_sv(s, p, bath);
  }
  throw std::logic_error("evaluate_rhs: unknown formulation");
}

FluidState v_from_u(FluidState const &s, ModelParams const &p, BathymetryState const &bath)
{
  require_kind(s, VelocityKind::u_variable, "v_from_u");
  DepthState const d = DepthState::from_surface(s.zeta, bath, p.epsilon);
  VecField const t = apply_frakT(d, bath, s.vel, p.effective_mu());
  VecField v(s.grid_ptr());
  for (int a = 0; a < v.dim(); ++a) {
    v[a].values() = t[a].values() * d.inv_h.values();
  }
  return {s.zeta, std::move(v), VelocityKind::v_variable, s.time};
}

FluidState u_from_v(FluidState const &s, ModelParams const &p, BathymetryState const &bath, EllipticSolver &solver)
{
  require_kind(s, VelocityKind::v_variable, "u_from_v");
  DepthState const d = DepthState::from_surface(s.zeta, bath, p.epsilon);
  VecField u = solver.solve(d, bath, pointwise(d.h, s.vel), p.effective_mu());
  return {s.zeta, std::move(u), VelocityKind::u_variable, s.time};
}

} // namespace sgn
