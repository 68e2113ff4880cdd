#pragma once

#include "modal.hpp"
#include "timeloop.hpp"

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace sgn {

/// Unreadable, truncated or inconsistent snapshot file.
class SnapshotError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Output file could not be written.
class WriteError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct GridSpec
{
  int dim = 1;
  std::array<int, 2> points{64, 64};
  std::array<double, 2> lengths{20.0, 20.0};

  bool operator==(GridSpec const &) const = default;
};

/// One term amplitude * cos(k.x + phase), k = 2 pi m / L.
struct FourierTerm
{
  int m0 = 0;
  int m1 = 0;
  double amplitude = 0;
  double phase = 0;

  bool operator==(FourierTerm const &) const = default;
};

enum class InitialKind { rest, fourier_modes, gaussian, solitary_wave, file };
enum class BathymetryKind { flat, fourier_modes, gaussian_bump, file };

struct InitialSpec
{
  InitialKind kind = InitialKind::rest;
  std::vector<FourierTerm> zeta;
  std::array<std::vector<FourierTerm>, 2> velocity;
  /// Which variable the velocity terms describe; converted to the formulation's own.
  VelocityKind velocity_kind = VelocityKind::v_variable;
  std::array<double, 2> center{0, 0};
  double width = 1;
  double amplitude = 0;
  std::string path;

  bool operator==(InitialSpec const &) const = default;
};

struct BathymetrySpec
{
  BathymetryKind kind = BathymetryKind::flat;
  std::vector<FourierTerm> modes;
  std::array<double, 2> center{0, 0};
  double width = 1;
  double amplitude = 0;
  std::string path;

  bool operator==(BathymetrySpec const &) const = default;
};

struct OutputSpec
{
  std::string directory = "out";
  bool csv = true;
  bool snapshots = true;

  bool operator==(OutputSpec const &) const = default;
};

struct RunConfig
{
  ModelParams params;
  GridSpec grid;
  IntegrationConfig integration; ///< carries the mollifier
  EllipticSolveConfig elliptic;
  InitialSpec initial;
  BathymetrySpec bathymetry;
  OutputSpec output;

  bool operator==(RunConfig const &) const = default;
};

/**
 * INI text: [section] headers and key = value lines, ';' or '#' comments.
 * overrides are "section.key=value" and take precedence over the text.
 * Throws ParseError on malformed text, ValidationError listing every
 * violation otherwise.
 */
RunConfig load_config(std::string const &text, std::vector<std::string> const &overrides = {});
RunConfig load_config_file(std::filesystem::path const &path, std::vector<std::string> const &overrides = {});

/// Canonical text: every key, fixed order, 17 significant digits.
std::string save_config(RunConfig const &cfg);

/// Re-validates a programmatically built config.
void validate_config(RunConfig const &cfg);

GridHandle make_grid(GridSpec const &spec);
BathymetryState make_bathymetry(RunConfig const &cfg, GridHandle const &grid);
/// Initial state in the velocity variable of cfg.params.formulation.
FluidState make_initial_state(RunConfig const &cfg, GridHandle const &grid, BathymetryState const &bath);

struct Snapshot
{
  FluidState state;
  ModelParams params;
};

/// Layout: "GNWV1", u8 dim, u8 formulation, u8 velocity kind, u32 N0, u32 N1,
/// f64 L0, L1, eps, beta, mu, time, then little-endian f64 zeta and velocity components.
void write_snapshot(FluidState const &s, ModelParams const &p, std::filesystem::path const &path);
Snapshot read_snapshot(std::filesystem::path const &path);
/// Rejects files whose grid differs from expected (GridMismatch).
Snapshot read_snapshot(std::filesystem::path const &path, Grid const &expected);

inline constexpr char const *diagnostics_header =
    "time,mass,hamiltonian,e_norm,f_norm,vorticity_l2,min_depth,cg_iterations";

std::string format_record(DiagnosticsRecord const &r);

/// One CSV row per record; header written at construction.
class CsvDiagnostics : public DiagnosticsSink
{
public:
  explicit CsvDiagnostics(std::filesystem::path path);
  explicit CsvDiagnostics(std::ostream &os);
  ~CsvDiagnostics() override;

  void record(DiagnosticsRecord const &r) override;

private:
  std::unique_ptr<std::ostream> owned_;
  std::ostream *os_;
  std::string name_;
};

std::vector<DiagnosticsRecord> read_diagnostics_csv(std::istream &is);
std::vector<DiagnosticsRecord> read_diagnostics_csv(std::filesystem::path const &path);

/// Writes snapshot_<index>.bin files into a directory.
class SnapshotDirectory : public SnapshotSink
{
public:
  explicit SnapshotDirectory(std::filesystem::path dir);
  void snapshot(FluidState const &s, ModelParams const &p) override;
  std::vector<std::filesystem::path> const &written() const { return written_; }

private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> written_;
};

std::string to_string(InitialKind k);
std::string to_string(BathymetryKind k);

} // namespace sgn
