#include "sgn/operators.hpp"

#include <cmath>
#include <sstream>

namespace sgn {

namespace {

using Array = Grid::RealArray;
using CArray = Grid::ComplexArray;

Field make(GridHandle const &g, Array a) { return Field(g, std::move(a)); }

/// Gradient of X with the two-thirds mask folded in.
VecField grad_P(Field const &x)
{
  auto const &g = x.grid();
  CArray const xh = spectrum(x);
  VecField out(x.grid_ptr());
  for (int a = 0; a < g.dim(); ++a) {
    CArray s = xh * (std::complex<double>(0, 1) * g.derivative_wavenumber(a) * g.dealias_mask());
    out[a] = from_spectrum<double>(x.grid_ptr(), s);
  }
  return out;
}

/// Product of a scalar array with every component of g, projected.
VecField scale_P(Array const &c, VecField const &v)
{
  VecField out(v.grid_ptr());
  for (int a = 0; a < v.dim(); ++a) {
    out[a] = dealias(make(v.grid_ptr(), c * v[a].values()));
  }
  return out;
}

Array dot_values(VecField const &u, VecField const &v)
{
  Array acc = u[0].values() * v[0].values();
  for (int a = 1; a < u.dim(); ++a) {
    acc += u[a].values() * v[a].values();
  }
  return acc;
}

/// (u . grad) f, pointwise, no projection.
Array directional(VecField const &u, Field const &f)
{
  return dot_values(u, gradient(f));
}

void require_grid(GridHandle const &a, GridHandle const &b, char const *who)
{
  if (a != b && *a != *b) {
    throw GridMismatch(std::string(who) + ": arguments live on different grids");
  }
}

void check_args(DepthState const &d, BathymetryState const &bath, VecField const &u, char const *who)
{
  require_grid(d.grid_ptr(), u.grid_ptr(), who);
  require_grid(d.grid_ptr(), bath.b.grid_ptr(), who);
}

} // namespace

BathymetryState::BathymetryState(Field bottom, double beta_)
  : b(std::move(bottom)), grad_b(gradient(b)), beta(beta_), slope_(grad_b * beta_)
{
  if (beta < 0 || !std::isfinite(beta)) {
    throw std::invalid_argument("BathymetryState: beta must be finite and >= 0");
  }
  if (!all_finite(b)) {
    throw std::invalid_argument("BathymetryState: bottom profile is not finite");
  }
}

DepthState::DepthState(Field depth) : h(std::move(depth)), h2(h.grid_ptr()), h3(h.grid_ptr()), inv_h(h.grid_ptr())
{
  if (!all_finite(h)) {
    throw BlowUp("DepthState: depth is not finite");
  }
  min = h.values().minCoeff();
  max = h.values().maxCoeff();
  mean = h.values().mean();
  h2 = dealias(make(h.grid_ptr(), h.values().square()));
  h3 = dealias(make(h.grid_ptr(), h.values().cube()));
  inv_h.values() = h.values().inverse();
}

DepthState DepthState::from_surface(Field const &zeta, BathymetryState const &bath, double eps)
{
  require_grid(zeta.grid_ptr(), bath.b.grid_ptr(), "DepthState");
  return DepthState(make(zeta.grid_ptr(), 1.0 + eps * zeta.values() - bath.beta * bath.b.values()));
}

DepthState DepthState::at_rest(BathymetryState const &bath)
{
  return DepthState(make(bath.b.grid_ptr(), 1.0 - bath.beta * bath.b.values()));
}

void DepthState::require_bounds(DepthBounds const &bounds) const
{
  if (min < bounds.lower || max > bounds.upper) {
    std::ostringstream os;
    os << "depth outside [" << bounds.lower << ", " << bounds.upper << "]: min " << min << ", max " << max;
    throw CoercivityViolation(os.str(), min);
  }
}

void EllipticSolveConfig::validate() const
{
  std::vector<FieldViolation> v;
  if (!(rel_tolerance > 0 && rel_tolerance <= 1e-6)) {
    v.push_back({"elliptic.rel_tolerance", "must lie in (0, 1e-6]"});
  }
  if (max_iterations < 0) {
    v.push_back({"elliptic.max_iterations", "must be >= 1 (0 selects the default)"});
  }
  if (!v.empty()) {
    throw ValidationError(std::move(v));
  }
}

// ---------------------------------------------------------------------------

namespace {

/// P(c_h h u + mu hT u), summed in spectral space before a single inverse per component.
VecField frakT_combination(DepthState const &d, BathymetryState const &bath, VecField const &u, double c_h, double mu)
{
  auto const &grid = u.grid_ptr();
  auto const &g = u.grid();
  int const dim = u.dim();
  std::vector<Array> direct(dim);
  for (int a = 0; a < dim; ++a) {
    direct[a] = c_h * d.h.values() * u[a].values();
  }
  CArray potential_hat;
  if (mu != 0) {
    Array const s = divergence(u).values();
    Array potential = d.h3.values() * s * (-1.0 / 3.0);
    if (bath.beta != 0) {
      VecField const &slope = bath.slope();
      Array const gu = dot_values(slope, u);
      potential += 0.5 * d.h2.values() * gu;
      Array const c = d.h.values() * gu - 0.5 * d.h2.values() * s;
      for (int a = 0; a < dim; ++a) {
        direct[a] += mu * c * slope[a].values();
      }
    }
    potential_hat = g.forward(potential) * mu;
  }
  VecField out(grid);
  for (int a = 0; a < dim; ++a) {
    CArray acc = g.forward(direct[a]);
    if (mu != 0) {
      acc += potential_hat * (std::complex<double>(0, 1) * g.derivative_wavenumber(a));
    }
    out[a] = from_spectrum<double>(grid, acc * g.dealias_mask());
  }
  return out;
}

} // namespace

VecField apply_hT(DepthState const &d, BathymetryState const &bath, VecField const &u)
{
  check_args(d, bath, u, "apply_T");
  return frakT_combination(d, bath, u, 0.0, 1.0);
}

VecField apply_T(DepthState const &d, BathymetryState const &bath, VecField const &u)
{
  VecField const s = apply_hT(d, bath, u);
  VecField out(u.grid_ptr());
  for (int a = 0; a < u.dim(); ++a) {
    out[a] = dealias(make(u.grid_ptr(), d.inv_h.values() * s[a].values()));
  }
  return out;
}

VecField apply_frakT(DepthState const &d, BathymetryState const &bath, VecField const &u, double mu)
{
  check_args(d, bath, u, "apply_frakT");
  return frakT_combination(d, bath, u, 1.0, mu);
}

namespace {

/// Shape derivative of h*T (without the mu factor).
VecField dh_hT(DepthState const &d, BathymetryState const &bath, Field const &f, VecField const &u)
{
  auto const &grid = u.grid_ptr();
  Field const s = divergence(u);
  VecField out = grad_P(make(grid, -d.h2.values() * f.values() * s.values()));
  if (bath.beta != 0) {
    VecField const &g = bath.slope();
    Array const gu = dot_values(g, u);
    Array const fh = f.values() * d.h.values();
    out += grad_P(make(grid, fh * gu));
    out -= scale_P(fh * s.values(), g);
    out += scale_P(f.values() * gu, g);
  }
  return out;
}

} // namespace

VecField dh_frakT(DepthState const &d, BathymetryState const &bath, Field const &f, VecField const &u, double mu)
{
  check_args(d, bath, u, "dh_frakT");
  require_grid(f.grid_ptr(), u.grid_ptr(), "dh_frakT");
  VecField out = scale_P(f.values(), u);
  if (mu != 0) {
    out += dh_hT(d, bath, f, u) * mu;
  }
  return out;
}

VecField dh_T(DepthState const &d, BathymetryState const &bath, Field const &f, VecField const &u)
{
  check_args(d, bath, u, "dh_T");
  require_grid(f.grid_ptr(), u.grid_ptr(), "dh_T");
  VecField const ds = dh_hT(d, bath, f, u);
  VecField const s = apply_hT(d, bath, u);
  VecField out(u.grid_ptr());
  Array const fh = f.values() * d.inv_h.values();
  for (int a = 0; a < u.dim(); ++a) {
    out[a] = dealias(make(u.grid_ptr(), d.inv_h.values() * (ds[a].values() - fh * s[a].values())));
  }
  return out;
}

namespace {

/// h*Q[h,u].
VecField h_Q(DepthState const &d, VecField const &u, Field const &s)
{
  Array const inner = directional(u, s) - s.values().square();
  return grad_P(make(u.grid_ptr(), d.h3.values() * inner)) * (-1.0 / 3.0);
}

/// h*Q_b given A = u.grad(beta grad b . u) and B = (u.grad) div u - (div u)^2.
VecField h_Qb(DepthState const &d, BathymetryState const &bath, Array const &A, Array const &B, GridHandle const &grid)
{
  VecField const &g = bath.slope();
  VecField out = grad_P(make(grid, d.h2.values() * A)) * 0.5;
  out -= scale_P(d.h2.values() * B, g) * 0.5;
  out += scale_P(d.h.values() * A, g);
  return out;
}

VecField divide_h(DepthState const &d, VecField const &v)
{
  return scale_P(d.inv_h.values(), v);
}

} // namespace

VecField apply_Q(DepthState const &d, VecField const &u)
{
  require_grid(d.grid_ptr(), u.grid_ptr(), "apply_Q");
  return divide_h(d, h_Q(d, u, divergence(u)));
}

VecField apply_Qb(DepthState const &d, BathymetryState const &bath, VecField const &u)
{
  check_args(d, bath, u, "apply_Qb");
  if (bath.beta == 0) {
    return VecField(u.grid_ptr());
  }
  auto const &grid = u.grid_ptr();
  Field const s = divergence(u);
  Array const A = directional(u, make(grid, dot_values(bath.slope(), u)));
  Array const B = directional(u, s) - s.values().square();
  return divide_h(d, h_Qb(d, bath, A, B, grid));
}

VecField apply_Q_alpha(DepthState const &d, BathymetryState const &bath, VecField const &u, VecField const &ua)
{
  check_args(d, bath, u, "apply_Q_alpha");
  require_grid(u.grid_ptr(), ua.grid_ptr(), "apply_Q_alpha");
  auto const &grid = u.grid_ptr();
  Array const B = directional(u, divergence(ua));
  VecField out = grad_P(make(grid, d.h3.values() * B)) * (-1.0 / 3.0);
  if (bath.beta != 0) {
    Array const A = directional(u, make(grid, dot_values(bath.slope(), ua)));
    out += h_Qb(d, bath, A, B, grid);
  }
  return divide_h(d, out);
}

Field apply_R(DepthState const &d, VecField const &u)
{
  require_grid(d.grid_ptr(), u.grid_ptr(), "apply_R");
  auto const &grid = u.grid_ptr();
  Field const s = divergence(u);
  Array const flux = dot_values(u, gradient(make(grid, d.h3.values() * s.values())));
  return dealias(make(grid, d.inv_h.values() * flux / 3.0 + 0.5 * d.h2.values() * s.values().square()));
}

Field apply_Rb(DepthState const &d, BathymetryState const &bath, VecField const &u)
{
  check_args(d, bath, u, "apply_Rb");
  auto const &grid = u.grid_ptr();
  if (bath.beta == 0) {
    return Field(grid);
  }
  Field const s = divergence(u);
  Array const gu = dot_values(bath.slope(), u);
  Array const flux = dot_values(u, gradient(make(grid, d.h2.values() * gu)));
  Array const r = d.inv_h.values() * flux + d.h.values() * gu * s.values() + gu.square();
  return dealias(make(grid, -0.5 * r));
}

Field good_unknown_w(DepthState const &d, BathymetryState const &bath, VecField const &u)
{
  check_args(d, bath, u, "good_unknown_w");
  auto const &grid = u.grid_ptr();
  Array w = -d.h.values() * divergence(u).values();
  if (bath.beta != 0) {
    w += dot_values(bath.slope(), u);
  }
  return dealias(make(grid, std::move(w)));
}

VecField advect(VecField const &u, VecField const &v)
{
  VecField out(u.grid_ptr());
  for (int a = 0; a < v.dim(); ++a) {
    out[a] = dealias(make(u.grid_ptr(), directional(u, v[a])));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Conjugate gradients

namespace {

/// Inverse of the constant-coefficient operator hbar (I + mu hbar^2 k k^T / 3), masked.
VecField precondition(VecField const &r, double hbar, double mu)
{
  auto const &g = r.grid();
  double const a = mu * hbar * hbar / 3.0;
  Array const &mask = g.dealias_mask();
  VecField out(r.grid_ptr());
  if (g.dim() == 1) {
    Array const &k = g.derivative_wavenumber(0);
    CArray s = spectrum(r[0]) * (mask / (hbar * (1.0 + a * k.square())));
    out[0] = from_spectrum<double>(r.grid_ptr(), s);
    return out;
  }
  Array const &k0 = g.derivative_wavenumber(0);
  Array const &k1 = g.derivative_wavenumber(1);
  CArray const r0 = spectrum(r[0]);
  CArray const r1 = spectrum(r[1]);
  Array const c = a / (1.0 + a * (k0.square() + k1.square()));
  CArray const kr = k0 * r0 + k1 * r1;
  CArray const s0 = (r0 - c * k0 * kr) * (mask / hbar);
  CArray const s1 = (r1 - c * k1 * kr) * (mask / hbar);
  out[0] = from_spectrum<double>(r.grid_ptr(), s0);
  out[1] = from_spectrum<double>(r.grid_ptr(), s1);
  return out;
}

} // namespace

EllipticSolver::EllipticSolver(EllipticSolveConfig cfg) : cfg_(cfg) { cfg_.validate(); }

VecField EllipticSolver::solve(DepthState const &d, BathymetryState const &bath, VecField const &rhs_in, double mu,
                               SolveStats *stats)
{
  check_args(d, bath, rhs_in, "invert_frakT");
  if (!(d.min > 0)) {
    throw CoercivityViolation("invert_frakT: non-positive depth, operator is not coercive", d.min);
  }
  if (mu < 0) {
    throw std::invalid_argument("invert_frakT: mu must be >= 0");
  }
  auto const &grid = rhs_in.grid_ptr();
  int const max_it = cfg_.max_iterations > 0 ? cfg_.max_iterations : static_cast<int>(10 * grid->max_points());
  VecField const rhs = dealias(rhs_in);
  double const rhs_norm = l2_norm(rhs);
  SolveStats local;
  if (rhs_norm == 0) {
    if (stats) {
      *stats = local;
    }
    if (cfg_.warm_start) {
      guess_ = VecField(grid);
    }
    return VecField(grid);
  }

  auto apply_M = [&](VecField const &r) {
    if (cfg_.preconditioner == Preconditioner::flat_state) {
      return precondition(r, d.mean, mu);
    }
    return dealias(r);
  };

  VecField x(grid);
  if (cfg_.warm_start && guess_ && guess_->grid() == *grid) {
    x = dealias(*guess_);
    // A guess far larger than the rhs would put round-off above the target.
    if (!(l2_norm(rhs - apply_frakT(d, bath, x, mu)) < rhs_norm)) {
      x = VecField(grid);
    }
  }
  double const target = cfg_.rel_tolerance * rhs_norm;
  int it = 0;
  double true_res = 0;
  // Outer loop restarts from the true residual if the recursive one drifted.
  for (int restart = 0; restart < 5; ++restart) {
    VecField r = rhs - apply_frakT(d, bath, x, mu);
    true_res = l2_norm(r);
    if (true_res <= target) {
      break;
    }
    VecField z = apply_M(r);
    VecField p = z;
    double rz = inner_product(r, z);
    while (it < max_it) {
      VecField const Ap = apply_frakT(d, bath, p, mu);
      double const pAp = inner_product(p, Ap);
      if (!(pAp > 0)) {
        throw CoercivityViolation("invert_frakT: operator lost positivity", d.min);
      }
      double const alpha = rz / pAp;
      x += p * alpha;
      r -= Ap * alpha;
      ++it;
      if (l2_norm(r) <= 0.5 * target) {
        break;
      }
      z = apply_M(r);
      double const rz_new = inner_product(r, z);
      p = z + p * (rz_new / rz);
      rz = rz_new;
    }
    if (it >= max_it) {
      break;
    }
  }
  true_res = l2_norm(rhs - apply_frakT(d, bath, x, mu));
  local.iterations = it;
  local.residual = true_res / rhs_norm;
  total_iterations_ += it;
  if (stats) {
    *stats = local;
  }
  if (true_res > target) {
    throw NonConvergence("invert_frakT: conjugate gradients did not converge", it, local.residual);
  }
  if (cfg_.warm_start) {
    guess_ = x;
  }
  return x;
}

VecField invert_frakT(DepthState const &d, BathymetryState const &bath, VecField const &rhs, double mu,
                      EllipticSolveConfig const &cfg, SolveStats *stats)
{
  EllipticSolveConfig c = cfg;
  c.warm_start = false;
  EllipticSolver solver(c);
  return solver.solve(d, bath, rhs, mu, stats);
}

} // namespace sgn
