#pragma once

#include "models.hpp"

#include <vector>

namespace sgn {

/**
 * Flat-bottom traveling wave of the one-dimensional system, obtained by
 * shooting the profile ODE from the crest and bisecting on the speed.
 *
 * With U the velocity profile, the travelling ansatz gives
 *   h = c / (c - eps U),  zeta = U / (c - eps U),
 *   v (c - eps U) = zeta - eps/2 U^2 - eps mu/2 h^2 U'^2,
 *   (h^3 U')' = (3 h / mu) (U - v).
 */
struct SolitaryWave
{
  double amplitude = 0; ///< crest elevation of zeta
  double speed = 0;
  double epsilon = 0;
  double mu = 0;
  double step = 0;            ///< ODE step
  double decay_rate = 0;      ///< exponent of the linear tail
  std::vector<double> u, du;  ///< U and U' at x = i * step, i >= 0

  /// Profile values at signed distance x from the crest.
  double velocity(double x) const;
  double velocity_slope(double x) const;
  double elevation(double x) const;
  /// The v-variable of the v-formulation.
  double v_variable(double x) const;

  /// Sampled on a 1D grid with the crest at x0.
  FluidState state(GridHandle const &grid, double x0, VelocityKind kind) const;
};

/// Solves the profile ODE; step should divide the target grid spacing.
SolitaryWave solve_solitary_wave(double amplitude, double epsilon, double mu, double step = 1.0 / 256);

} // namespace sgn
