#pragma once

#include "operators.hpp"

#include <functional>
#include <string>

namespace sgn {

enum class Formulation { gn_u, gn_v, bp, sv };
enum class VelocityKind { u_variable, v_variable };

std::string to_string(Formulation f);
Formulation parse_formulation(std::string const &name);
VelocityKind velocity_kind(Formulation f);

struct ModelParams
{
  double epsilon = 0.1;
  double beta = 0;
  double mu = 1;
  Formulation formulation = Formulation::gn_v;
  double h_star = 0.1;        ///< lower depth bound
  double h_star_upper = 10.0; ///< upper depth bound

  /// Saint-Venant ignores mu.
  double effective_mu() const { return formulation == Formulation::sv ? 0.0 : mu; }
  DepthBounds bounds() const { return {h_star, h_star_upper}; }
  void validate() const;
  bool operator==(ModelParams const &) const = default;
};

struct FluidState
{
  Field zeta;
  VecField vel; ///< u or v depending on kind
  VelocityKind kind = VelocityKind::u_variable;
  double time = 0;

  FluidState(Field z, VecField velocity, VelocityKind k, double t = 0);
  static FluidState rest(GridHandle const &grid, VelocityKind k);
  GridHandle const &grid_ptr() const { return zeta.grid_ptr(); }
};

struct RhsResult
{
  Field dzeta;
  VecField dvel;
  SolveStats stats;
  VecField u; ///< layer-averaged velocity used in the evaluation
};

RhsResult rhs_gn_u(FluidState const &s, ModelParams const &p, BathymetryState const &bath, EllipticSolver &solver);
RhsResult rhs_gn_v(FluidState const &s, ModelParams const &p, BathymetryState const &bath, EllipticSolver &solver);
/// Boussinesq-Peregrine: dispersive operator frozen at rest depth 1 - beta b.
RhsResult rhs_bp(FluidState const &s, ModelParams const &p, BathymetryState const &bath, EllipticSolver &solver);
RhsResult rhs_sv(FluidState const &s, ModelParams const &p, BathymetryState const &bath);

/// Dispatches on p.formulation.
RhsResult evaluate_rhs(FluidState const &s, ModelParams const &p, BathymetryState const &bath, EllipticSolver &solver);

/// v = u + mu T u, evaluated as (𝔗u)/h so that u_from_v inverts it exactly.
FluidState v_from_u(FluidState const &s, ModelParams const &p, BathymetryState const &bath);
FluidState u_from_v(FluidState const &s, ModelParams const &p, BathymetryState const &bath, EllipticSolver &solver);

namespace detail {
/// GN-v right-hand side with optional filters around the two flux groups.
RhsResult rhs_gn_v_filtered(FluidState const &s, ModelParams const &p, BathymetryState const &bath,
                            EllipticSolver &solver, std::function<Field(Field const &)> const &scalar_filter,
                            std::function<VecField(VecField const &)> const &vector_filter);
} // namespace detail

} // namespace sgn
