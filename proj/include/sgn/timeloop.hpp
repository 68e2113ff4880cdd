#pragma once

#include "diagnostics.hpp"
#include "regularization.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sgn {

enum class Scheme { rk4, rk3_ssp };

std::string to_string(Scheme s);
Scheme parse_scheme(std::string const &name);

struct IntegrationConfig
{
  double dt = 1e-2;
  double t_end = 1.0;
  Scheme scheme = Scheme::rk4;
  MollifierSpec mollifier;
  int diag_stride = 1;
  int snapshot_stride = 0; ///< 0 disables snapshots
  double cfl_guard = 0.5;
  int diag_order = 4;
  bool diagnostics_energies = true; ///< E^n and F^n are the costly part of a record

  void validate() const;
  bool operator==(IntegrationConfig const &) const = default;
};

enum class Termination { completed, coercivity_violation, non_convergence, blow_up };
std::string to_string(Termination t);

struct RunReport
{
  FluidState final_state;
  double wall_seconds = 0;
  long cg_iterations = 0;
  long steps = 0;
  Termination cause = Termination::completed;
  std::string message;
  std::optional<double> failure_time;
  std::vector<std::string> warnings;
  std::vector<std::string> notices;
};

class DiagnosticsSink
{
public:
  virtual ~DiagnosticsSink() = default;
  virtual void record(DiagnosticsRecord const &r) = 0;
};

class SnapshotSink
{
public:
  virtual ~SnapshotSink() = default;
  virtual void snapshot(FluidState const &s, ModelParams const &p) = 0;
};

/// Keeps every record in memory.
class MemoryDiagnostics : public DiagnosticsSink
{
public:
  void record(DiagnosticsRecord const &r) override { records.push_back(r); }
  std::vector<DiagnosticsRecord> records;
};

/// Advisory time step: guard * min spacing / (sqrt(max h) + eps max|vel|).
/// 1 / max(eps |zeta|, eps |vel|, beta |grad b|): the existence-time scale with unit constants.
double analogy_time(FluidState const &s, ModelParams const &p, BathymetryState const &bath);

double cfl_time_step(FluidState const &s, ModelParams const &p, BathymetryState const &bath, double guard);

/**
 * Explicit Runge-Kutta integration of one model. Holds the elliptic solver
 * session (with its warm start) for the evolution and a separate one for
 * diagnostics, so one Integrator serves one simulation at a time.
 */
class Integrator
{
public:
  Integrator(ModelParams params, BathymetryState bath, IntegrationConfig icfg, EllipticSolveConfig ecfg = {});

  RhsResult rhs(FluidState const &s);
  /// One step of size dt (defaults to the configured dt).
  FluidState step(FluidState const &s, std::optional<double> dt = std::nullopt);
  RunReport run(FluidState const &initial, DiagnosticsSink *diagnostics = nullptr, SnapshotSink *snapshots = nullptr);

  DiagnosticsRecord diagnose(FluidState const &s);

  ModelParams const &params() const { return params_; }
  BathymetryState const &bathymetry() const { return bath_; }
  IntegrationConfig const &config() const { return icfg_; }
  long cg_iterations() const { return solver_.total_iterations(); }

private:
  void check_stage(FluidState const &s, bool initial = false) const;
  FluidState combine(FluidState const &base, double t, std::vector<std::pair<double, RhsResult const *>> const &terms,
                     double dt) const;

  ModelParams params_;
  BathymetryState bath_;
  IntegrationConfig icfg_;
  EllipticSolver solver_;
  EllipticSolver diag_solver_;
};

} // namespace sgn
