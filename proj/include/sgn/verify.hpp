#pragma once

#include "modal.hpp"
#include "solitary.hpp"
#include "timeloop.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sgn {

struct ResidualReport
{
  std::string name;
  std::vector<int> sizes;
  std::vector<double> residuals;
  std::vector<double> secondary; ///< companion measure per size, check-specific
  double decay_rate = 0;         ///< fitted exponential rate of -log(residual) in N
  double floor = 1e-9;
  bool pass = false;

  std::string summary() const;
};

/// Pass iff the last residual is below the floor or the local algebraic order keeps growing.
ResidualReport make_report(std::string name, std::vector<int> sizes, std::vector<double> residuals,
                           double floor = 1e-9);

/// Grid-independent smooth data for refinement studies.
struct RefinementProblem
{
  int dim = 2;
  std::array<double, 2> lengths{0, 0};
  ModalField zeta{2, {0, 0}};
  ModalField bottom{2, {0, 0}};
  std::vector<ModalField> velocity;
  ModelParams params;

  /// Modes |m| <= max_mode with fixed seed.
  static RefinementProblem random(int dim, std::array<double, 2> lengths, int max_mode, std::uint64_t seed,
                                  ModelParams params, double zeta_amp = 0.5, double bottom_amp = 0.5,
                                  double velocity_amp = 0.5);

  GridHandle grid(int n) const;
  BathymetryState bathymetry(GridHandle const &g) const;
  FluidState state_u(GridHandle const &g) const;
};

/// Residual of [d_t, T]u + eps u^perp curl(Tu) + eps grad(u.Tu - w^2/2) - eps (Q + Q_b).
VecField equivalence_identity_residual(Field const &zeta, VecField const &u, ModelParams const &p,
                                       BathymetryState const &bath);
ResidualReport check_equivalence_identity(RefinementProblem const &prob, std::vector<int> const &sizes);

struct RhsEquivalence
{
  double du_gap = 0; ///< |du/dt(GN-u) - du/dt mapped back from GN-v|
  double dv_gap = 0; ///< |dv/dt(GN-v) - d/dt of (𝔗u)/h along GN-u|
  double dzeta_gap = 0;
};
RhsEquivalence rhs_equivalence_gap(FluidState const &state_u, ModelParams const &p, BathymetryState const &bath,
                                   EllipticSolveConfig const &cfg);
/// residuals = du gaps, secondary = dv gaps.
ResidualReport check_rhs_equivalence(RefinementProblem const &prob, std::vector<int> const &sizes,
                                     EllipticSolveConfig const &cfg = {});

struct VariationalReport
{
  /// Directional-derivative mismatch along a smooth zeta-direction per step size.
  std::vector<double> deltas;
  std::vector<double> zeta_mismatch;
  double v_mismatch = 0;     ///< same along a v-direction (H is quadratic in v)
  double assembled_gap = 0;  ///< |skew structure applied to numerical derivatives - rhs_gn_v|
  double truncation = 0;     ///< step-halving difference of the assembled field
  double tolerance = 0;      ///< max(1e-7, 10 * truncation)
  double min_quartering = 0; ///< smallest mismatch ratio between consecutive steps
  bool pass = false;
};

/**
 * Numerical variational derivatives of H_GN over the Fourier basis of the
 * dealiased range, assembled through the skew-symmetric structure with
 * q = eps curl v / h, compared with rhs_gn_v.
 */
VariationalReport check_variational_structure(Field const &zeta, VecField const &v, ModelParams const &p,
                                              BathymetryState const &bath, std::uint64_t seed,
                                              double delta = 1e-5);

struct DispersionRow
{
  int mode = 0;
  double k = 0;
  double measured = 0;
  double predicted = 0;
  double rel_error = 0;
  bool fit_ok = false;
};

struct DispersionOptions
{
  double amplitude = 1e-6;
  int steps_per_period = 200;
  double periods = 4;
};

/// omega^2 = k^2 / (1 + mu k^2 / 3)
double linear_frequency(double k, double mu);

/// Standing-wave frequency fit per mode on a flat bottom.
std::vector<DispersionRow> dispersion_study(ModelParams params, GridHandle const &grid, std::vector<int> const &modes,
                                            DispersionOptions const &opt = {});

/// Self-convergence in dt: residual i = |state(dt_i) - state(finest)|, orders in secondary.
ResidualReport convergence_in_dt(FluidState const &initial, ModelParams const &p, BathymetryState const &bath,
                                 IntegrationConfig icfg, std::vector<double> const &dts);

/// Self-convergence in N against the finest grid (sampled on the coarse points).
ResidualReport convergence_in_n(RefinementProblem const &prob, std::vector<int> const &sizes, double t_end,
                                double dt);

struct CheckResult
{
  std::string name;
  bool pass = false;
  std::string detail;
};

/// The quick identity/invariant suite run by the command line `verify`.
std::vector<CheckResult> run_verification_suite(std::uint64_t seed);

} // namespace sgn
