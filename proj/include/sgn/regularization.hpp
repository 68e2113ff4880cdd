#pragma once

#include "models.hpp"

namespace sgn {

enum class MollifierProfile { sharp_cutoff, smooth_bump };

/// Fourier multiplier phi(iota |k|). iota = 0 is the identity.
struct MollifierSpec
{
  double iota = 0;
  MollifierProfile profile = MollifierProfile::sharp_cutoff;
  double r0 = 0.5; ///< smooth_bump: phi = 1 below r0
  double r1 = 1.0; ///< smooth_bump: phi = 0 above r1

  bool is_identity() const { return iota == 0; }
  double profile_value(double x) const;
  void validate() const;
  bool operator==(MollifierSpec const &) const = default;
};

Grid::RealArray mollifier_symbol(Grid const &grid, MollifierSpec const &spec);

Field mollify(Field const &f, MollifierSpec const &spec);
VecField mollify(VecField const &v, MollifierSpec const &spec);

/// GN-v with J^iota around the mass flux and around the whole velocity forcing.
RhsResult rhs_gn_v_mollified(FluidState const &s, ModelParams const &p, BathymetryState const &bath,
                             MollifierSpec const &spec, EllipticSolver &solver);

} // namespace sgn
