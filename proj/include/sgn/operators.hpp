#pragma once

#include "grid.hpp"

#include <optional>

namespace sgn {

struct BathymetryState
{
  Field b;
  VecField grad_b; ///< spectral gradient of b
  double beta = 0;

  BathymetryState(Field bottom, double beta_);
  static BathymetryState flat(GridHandle const &grid) { return {Field(grid), 0.0}; }

  /// beta * grad b, the combination every operator consumes.
  VecField const &slope() const { return slope_; }
  bool is_flat() const { return beta == 0 || max_abs(b) == 0; }

private:
  VecField slope_;
};

struct DepthBounds
{
  double lower = 0.1; ///< h_*
  double upper = 10;  ///< h^*
};

/**
 * Fluid depth h and the pointwise powers the operators need.
 *
 * The powers are exact grid products (not truncated): the operators project
 * their outputs instead, which keeps the discrete form of 𝔗 symmetric.
 */
struct DepthState
{
  Field h, h2, h3, inv_h;
  double min = 0, max = 0, mean = 0;

  explicit DepthState(Field depth);
  /// h = 1 + eps*zeta - beta*b.
  static DepthState from_surface(Field const &zeta, BathymetryState const &bath, double eps);
  /// Rest depth 1 - beta*b.
  static DepthState at_rest(BathymetryState const &bath);

  GridHandle const &grid_ptr() const { return h.grid_ptr(); }
  /// Throws CoercivityViolation unless lower <= min(h) and max(h) <= upper.
  void require_bounds(DepthBounds const &bounds) const;
};

enum class Preconditioner { none, flat_state };

struct EllipticSolveConfig
{
  double rel_tolerance = 1e-12;
  int max_iterations = 0; ///< 0 selects 10 * max(N_i)
  Preconditioner preconditioner = Preconditioner::flat_state;
  bool warm_start = true;

  void validate() const;
  bool operator==(EllipticSolveConfig const &) const = default;
};

struct SolveStats
{
  int iterations = 0;
  double residual = 0; ///< relative, ||frakT u - rhs|| / ||rhs||
};

// ---------------------------------------------------------------------------
// Operators. All outputs are two-thirds dealiased.

/// h*T[h, beta b] u, the symmetric part of 𝔗 scaled out of mu.
VecField apply_hT(DepthState const &d, BathymetryState const &bath, VecField const &u);
VecField apply_T(DepthState const &d, BathymetryState const &bath, VecField const &u);
/// 𝔗u = h u + mu h T u.
VecField apply_frakT(DepthState const &d, BathymetryState const &bath, VecField const &u, double mu);

/// Shape derivative of 𝔗 in h along f.
VecField dh_frakT(DepthState const &d, BathymetryState const &bath, Field const &f, VecField const &u, double mu);
/// Shape derivative of T in h along f.
VecField dh_T(DepthState const &d, BathymetryState const &bath, Field const &f, VecField const &u);

VecField apply_Q(DepthState const &d, VecField const &u);
VecField apply_Qb(DepthState const &d, BathymetryState const &bath, VecField const &u);
/// Q applied to a perturbation ua, linearised around u (order-zero parts dropped).
VecField apply_Q_alpha(DepthState const &d, BathymetryState const &bath, VecField const &u, VecField const &ua);
Field apply_R(DepthState const &d, VecField const &u);
Field apply_Rb(DepthState const &d, BathymetryState const &bath, VecField const &u);

/// w = -h div u + beta grad b . u
Field good_unknown_w(DepthState const &d, BathymetryState const &bath, VecField const &u);

/// (u . grad) v, componentwise, dealiased.
VecField advect(VecField const &u, VecField const &v);

/**
 * Preconditioned conjugate gradients for 𝔗u = rhs.
 *
 * A session owns the warm-start guess; use one per concurrent simulation.
 */
class EllipticSolver
{
public:
  explicit EllipticSolver(EllipticSolveConfig cfg = {});

  VecField solve(DepthState const &d, BathymetryState const &bath, VecField const &rhs, double mu,
                 SolveStats *stats = nullptr);

  EllipticSolveConfig const &config() const { return cfg_; }
  void reset() { guess_.reset(); }
  long total_iterations() const { return total_iterations_; }

private:
  EllipticSolveConfig cfg_;
  std::optional<VecField> guess_;
  long total_iterations_ = 0;
};

/// One-shot solve without warm start.
VecField invert_frakT(DepthState const &d, BathymetryState const &bath, VecField const &rhs, double mu,
                      EllipticSolveConfig const &cfg = {}, SolveStats *stats = nullptr);

} // namespace sgn
