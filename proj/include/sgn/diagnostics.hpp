#pragma once

#include "models.hpp"

#include <vector>

namespace sgn {

/// Sum over |alpha| <= n of prod_i k_i^(2 alpha_i), per spectral entry.
Grid::RealArray sobolev_weight(Grid const &grid, int n);
/// All multi-indices with |alpha| <= n in the grid dimension, graded order.
std::vector<MultiIndex> multi_indices(int dim, int n);

double norm_Hn(Field const &f, int n);
double norm_Xn(VecField const &u, int n, double mu);
/// Dual of X^0 realised per mode by (I + mu k k^T)^{-1}, then derivative-weighted.
double norm_Yn(VecField const &v, int n, double mu);

/// E^n = |zeta|^2_{H^n} + |v|^2_{Y^n}.
double energy_E(Field const &zeta, VecField const &v, int n, double mu);

/// F^n built from the good unknowns; state carries v.
double energy_F(FluidState const &s, ModelParams const &p, BathymetryState const &bath, int n,
                EllipticSolver &solver);

/// H_GN = 1/2 int zeta^2 + (h v) . 𝔗^{-1}(h v).
double hamiltonian_gn(Field const &zeta, VecField const &v, ModelParams const &p, BathymetryState const &bath,
                      EllipticSolver &solver);

struct AppendixAEnergy
{
  double F = 0;
  double G = 0;
};

/// Energy pair of the direct u-formulation estimate; state carries u.
AppendixAEnergy energy_appendixA(FluidState const &s, ModelParams const &p, BathymetryState const &bath,
                                 MultiIndex const &alpha);

/**
 * int r zeta_a + h rr . u_a, where (r, rr) are the residuals of the
 * linearised u-system for (d^alpha zeta, d^alpha u) given the time
 * derivatives (dzeta, du) of the state.
 */
double appendixA_source(FluidState const &s, Field const &dzeta, VecField const &du, ModelParams const &p,
                        BathymetryState const &bath, MultiIndex const &alpha);

double vorticity_norm(VecField const &v);

struct DiagnosticsRecord
{
  double time = 0;
  double mass = 0;
  double hamiltonian = 0;
  double e_norm = 0;
  double f_norm = 0;
  double vorticity_l2 = 0;
  double min_depth = 0;
  long cg_iterations = 0;
  int order = 4;
};

DiagnosticsRecord make_record(FluidState const &s, ModelParams const &p, BathymetryState const &bath, int order,
                              EllipticSolver &solver, long cg_iterations = 0);

} // namespace sgn
