#include "sgn/io.hpp"
#include "sgn/solitary.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace sgn {

namespace pt = boost::property_tree;

namespace {

std::string num(double x)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string trim(std::string s)
{
  auto const b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return {};
  }
  auto const e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(std::string const &s, char sep)
{
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) {
    out.push_back(trim(item));
  }
  return out;
}

std::vector<std::string> words(std::string const &s)
{
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string w;
  while (is >> w) {
    out.push_back(w);
  }
  return out;
}

bool to_double(std::string const &s, double &out)
{
  if (s.empty()) {
    return false;
  }
  char *end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

bool to_int(std::string const &s, int &out)
{
  double d;
  if (!to_double(s, d) || d != std::floor(d) || std::abs(d) > 1e9) {
    return false;
  }
  out = static_cast<int>(d);
  return true;
}

std::map<std::string, std::set<std::string>> const &known_keys()
{
  static std::map<std::string, std::set<std::string>> const keys{
      {"model", {"epsilon", "beta", "mu", "formulation", "h_star", "h_star_upper"}},
      {"grid", {"dim", "points", "lengths"}},
      {"time", {"dt", "t_end", "scheme", "cfl_guard"}},
      {"mollifier", {"iota", "profile", "r0", "r1"}},
      {"elliptic", {"rel_tolerance", "max_iterations", "preconditioner", "warm_start"}},
      {"initial", {"type", "zeta", "velocity0", "velocity1", "velocity_kind", "center", "width", "amplitude", "path"}},
      {"bathymetry", {"type", "modes", "center", "width", "amplitude", "path"}},
      {"output", {"directory", "csv", "snapshots", "diag_stride", "snapshot_stride", "diag_order", "energies"}},
  };
  return keys;
}

/// Typed access to the parsed tree; violations are collected, not thrown.
class Reader
{
public:
  Reader(pt::ptree const &tree, std::vector<FieldViolation> &v) : tree_(tree), v_(v) {}

  std::optional<std::string> raw(std::string const &key) const
  {
    auto const node = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (!node) {
      return std::nullopt;
    }
    return trim(*node);
  }

  void real(std::string const &key, double &out)
  {
    if (auto s = raw(key)) {
      if (!to_double(*s, out)) {
        v_.push_back({key, "expected a number, got '" + *s + "'"});
      }
    }
  }

  void integer(std::string const &key, int &out)
  {
    if (auto s = raw(key)) {
      if (!to_int(*s, out)) {
        v_.push_back({key, "expected an integer, got '" + *s + "'"});
      }
    }
  }

  void boolean(std::string const &key, bool &out)
  {
    if (auto s = raw(key)) {
      if (*s == "true" || *s == "1" || *s == "yes" || *s == "on") {
        out = true;
      } else if (*s == "false" || *s == "0" || *s == "no" || *s == "off") {
        out = false;
      } else {
        v_.push_back({key, "expected true or false, got '" + *s + "'"});
      }
    }
  }

  void text(std::string const &key, std::string &out)
  {
    if (auto s = raw(key)) {
      out = *s;
    }
  }

  template <typename E, typename Parse> void enumeration(std::string const &key, E &out, Parse parse)
  {
    if (auto s = raw(key)) {
      try {
        out = parse(*s);
      } catch (std::exception const &e) {
        v_.push_back({key, e.what()});
      }
    }
  }

  /// One or two numbers; a single value is repeated.
  template <typename T> void pair(std::string const &key, std::array<T, 2> &out)
  {
    auto s = raw(key);
    if (!s) {
      return;
    }
    auto const w = words(*s);
    if (w.empty() || w.size() > 2) {
      v_.push_back({key, "expected one or two values"});
      return;
    }
    std::array<T, 2> tmp{};
    for (std::size_t i = 0; i < 2; ++i) {
      std::string const &item = w[std::min(i, w.size() - 1)];
      bool ok;
      if constexpr (std::is_same_v<T, int>) {
        ok = to_int(item, tmp[i]);
      } else {
        ok = to_double(item, tmp[i]);
      }
      if (!ok) {
        v_.push_back({key, "bad value '" + item + "'"});
        return;
      }
    }
    out = tmp;
  }

  void terms(std::string const &key, std::vector<FourierTerm> &out)
  {
    auto s = raw(key);
    if (!s) {
      return;
    }
    out.clear();
    if (s->empty()) {
      return;
    }
    for (auto const &item : split(*s, ',')) {
      auto const w = words(item);
      std::vector<double> x(w.size());
      bool ok = w.size() == 3 || w.size() == 4;
      for (std::size_t i = 0; ok && i < w.size(); ++i) {
        ok = to_double(w[i], x[i]);
      }
      if (!ok) {
        v_.push_back({key, "term '" + item + "' must read 'm0 [m1] amplitude phase'"});
        continue;
      }
      FourierTerm t;
      t.m0 = static_cast<int>(x[0]);
      t.m1 = w.size() == 4 ? static_cast<int>(x[1]) : 0;
      t.amplitude = x[w.size() - 2];
      t.phase = x[w.size() - 1];
      if (t.m0 != x[0] || (w.size() == 4 && t.m1 != x[1])) {
        v_.push_back({key, "mode numbers must be integers in '" + item + "'"});
        continue;
      }
      out.push_back(t);
    }
  }

private:
  pt::ptree const &tree_;
  std::vector<FieldViolation> &v_;
};

Preconditioner parse_preconditioner(std::string const &s)
{
  if (s == "none") {
    return Preconditioner::none;
  }
  if (s == "flat_state") {
    return Preconditioner::flat_state;
  }
  throw std::invalid_argument("unknown preconditioner '" + s + "' (expected none or flat_state)");
}

std::string to_string(Preconditioner p) { return p == Preconditioner::none ? "none" : "flat_state"; }

MollifierProfile parse_profile(std::string const &s)
{
  if (s == "sharp_cutoff") {
    return MollifierProfile::sharp_cutoff;
  }
  if (s == "smooth_bump") {
    return MollifierProfile::smooth_bump;
  }
  throw std::invalid_argument("unknown profile '" + s + "' (expected sharp_cutoff or smooth_bump)");
}

std::string to_string(MollifierProfile p) { return p == MollifierProfile::sharp_cutoff ? "sharp_cutoff" : "smooth_bump"; }

VelocityKind parse_velocity_kind(std::string const &s)
{
  if (s == "u") {
    return VelocityKind::u_variable;
  }
  if (s == "v") {
    return VelocityKind::v_variable;
  }
  throw std::invalid_argument("unknown velocity kind '" + s + "' (expected u or v)");
}

InitialKind parse_initial(std::string const &s)
{
  for (auto k : {InitialKind::rest, InitialKind::fourier_modes, InitialKind::gaussian, InitialKind::solitary_wave,
                 InitialKind::file}) {
    if (s == to_string(k)) {
      return k;
    }
  }
  throw std::invalid_argument("unknown initial condition '" + s +
                              "' (expected rest, fourier_modes, gaussian, solitary_wave or file)");
}

BathymetryKind parse_bathymetry(std::string const &s)
{
  for (auto k : {BathymetryKind::flat, BathymetryKind::fourier_modes, BathymetryKind::gaussian_bump,
                 BathymetryKind::file}) {
    if (s == to_string(k)) {
      return k;
    }
  }
  throw std::invalid_argument("unknown bathymetry '" + s + "' (expected flat, fourier_modes, gaussian_bump or file)");
}

template <typename F> void collect(std::vector<FieldViolation> &v, F &&check)
{
  try {
    check();
  } catch (ValidationError const &e) {
    v.insert(v.end(), e.violations().begin(), e.violations().end());
  }
}

std::vector<FieldViolation> violations_of(RunConfig const &c)
{
  std::vector<FieldViolation> v;
  collect(v, [&] { c.params.validate(); });
  collect(v, [&] { c.integration.validate(); });
  collect(v, [&] { c.elliptic.validate(); });

  GridSpec const &g = c.grid;
  bool const dim_ok = g.dim == 1 || g.dim == 2;
  if (!dim_ok) {
    v.push_back({"grid.dim", "must be 1 or 2"});
  }
  for (int a = 0; a < (g.dim == 2 ? 2 : 1); ++a) {
    if (g.points[a] < 8 || g.points[a] % 2 != 0) {
      v.push_back({"grid.points", "must be even and >= 8"});
    }
    if (!(g.lengths[a] > 0) || !std::isfinite(g.lengths[a])) {
      v.push_back({"grid.lengths", "must be > 0"});
    }
  }
  if (c.params.formulation != Formulation::gn_v && !c.integration.mollifier.is_identity()) {
    v.push_back({"mollifier.iota", "mollified evolution is defined for the gn_v formulation only"});
  }

  int const nmin = g.dim == 2 ? std::min(g.points[0], g.points[1]) : g.points[0];
  auto check_terms = [&](std::string const &key, std::vector<FourierTerm> const &terms) {
    for (auto const &t : terms) {
      if (g.dim == 1 && t.m1 != 0) {
        v.push_back({key, "second mode number must be 0 on a 1D grid"});
      }
      if (3 * std::max(std::abs(t.m0), std::abs(t.m1)) > nmin) {
        v.push_back({key, "mode " + std::to_string(t.m0) + "," + std::to_string(t.m1) +
                              " is not resolved by the dealiased grid"});
      }
      if (!std::isfinite(t.amplitude) || !std::isfinite(t.phase)) {
        v.push_back({key, "amplitude and phase must be finite"});
      }
    }
  };

  InitialSpec const &ic = c.initial;
  switch (ic.kind) {
  case InitialKind::rest:
    break;
  case InitialKind::fourier_modes:
    check_terms("initial.zeta", ic.zeta);
    check_terms("initial.velocity0", ic.velocity[0]);
    check_terms("initial.velocity1", ic.velocity[1]);
    if (g.dim == 1 && !ic.velocity[1].empty()) {
      v.push_back({"initial.velocity1", "must be empty on a 1D grid"});
    }
    break;
  case InitialKind::gaussian:
    if (!(ic.width > 0)) {
      v.push_back({"initial.width", "must be > 0"});
    }
    break;
  case InitialKind::solitary_wave:
    if (g.dim != 1) {
      v.push_back({"initial.type", "solitary_wave needs a 1D grid"});
    }
    if (!(ic.amplitude > 0)) {
      v.push_back({"initial.amplitude", "solitary wave amplitude must be > 0"});
    }
    if (!(c.params.epsilon > 0) || !(c.params.effective_mu() > 0)) {
      v.push_back({"initial.type", "solitary_wave needs epsilon > 0 and a dispersive formulation with mu > 0"});
    }
    if (c.bathymetry.kind != BathymetryKind::flat && c.params.beta != 0) {
      v.push_back({"initial.type", "solitary_wave needs a flat bottom"});
    }
    break;
  case InitialKind::file:
    if (ic.path.empty()) {
      v.push_back({"initial.path", "required for type = file"});
    }
    break;
  }

  BathymetrySpec const &b = c.bathymetry;
  switch (b.kind) {
  case BathymetryKind::flat:
    break;
  case BathymetryKind::fourier_modes:
    check_terms("bathymetry.modes", b.modes);
    break;
  case BathymetryKind::gaussian_bump:
    if (!(b.width > 0)) {
      v.push_back({"bathymetry.width", "must be > 0"});
    }
    break;
  case BathymetryKind::file:
    if (b.path.empty()) {
      v.push_back({"bathymetry.path", "required for type = file"});
    }
    break;
  }
  if (c.output.directory.empty()) {
    v.push_back({"output.directory", "must not be empty"});
  }
  return v;
}

RunConfig from_tree(pt::ptree const &tree)
{
  std::vector<FieldViolation> v;
  for (auto const &[section, node] : tree) {
    auto const it = known_keys().find(section);
    if (!node.data().empty()) {
      v.push_back({section, "key outside any section"});
      continue;
    }
    if (it == known_keys().end()) {
      v.push_back({section, "unknown section"});
      continue;
    }
    for (auto const &[key, leaf] : node) {
      if (!it->second.count(key) || !leaf.empty()) {
        v.push_back({section + "." + key, "unknown key"});
      }
    }
  }

  RunConfig c;
  Reader r(tree, v);
  r.real("model.epsilon", c.params.epsilon);
  r.real("model.beta", c.params.beta);
  r.real("model.mu", c.params.mu);
  r.enumeration("model.formulation", c.params.formulation, parse_formulation);
  r.real("model.h_star", c.params.h_star);
  r.real("model.h_star_upper", c.params.h_star_upper);

  r.integer("grid.dim", c.grid.dim);
  r.pair("grid.points", c.grid.points);
  r.pair("grid.lengths", c.grid.lengths);

  r.real("time.dt", c.integration.dt);
  r.real("time.t_end", c.integration.t_end);
  r.enumeration("time.scheme", c.integration.scheme, parse_scheme);
  r.real("time.cfl_guard", c.integration.cfl_guard);

  r.real("mollifier.iota", c.integration.mollifier.iota);
  r.enumeration("mollifier.profile", c.integration.mollifier.profile, parse_profile);
  r.real("mollifier.r0", c.integration.mollifier.r0);
  r.real("mollifier.r1", c.integration.mollifier.r1);

  r.real("elliptic.rel_tolerance", c.elliptic.rel_tolerance);
  r.integer("elliptic.max_iterations", c.elliptic.max_iterations);
  r.enumeration("elliptic.preconditioner", c.elliptic.preconditioner, parse_preconditioner);
  r.boolean("elliptic.warm_start", c.elliptic.warm_start);

  c.initial.velocity_kind = velocity_kind(c.params.formulation);
  r.enumeration("initial.type", c.initial.kind, parse_initial);
  r.terms("initial.zeta", c.initial.zeta);
  r.terms("initial.velocity0", c.initial.velocity[0]);
  r.terms("initial.velocity1", c.initial.velocity[1]);
  r.enumeration("initial.velocity_kind", c.initial.velocity_kind, parse_velocity_kind);
  r.pair("initial.center", c.initial.center);
  r.real("initial.width", c.initial.width);
  r.real("initial.amplitude", c.initial.amplitude);
  r.text("initial.path", c.initial.path);

  r.enumeration("bathymetry.type", c.bathymetry.kind, parse_bathymetry);
  r.terms("bathymetry.modes", c.bathymetry.modes);
  r.pair("bathymetry.center", c.bathymetry.center);
  r.real("bathymetry.width", c.bathymetry.width);
  r.real("bathymetry.amplitude", c.bathymetry.amplitude);
  r.text("bathymetry.path", c.bathymetry.path);

  r.text("output.directory", c.output.directory);
  r.boolean("output.csv", c.output.csv);
  r.boolean("output.snapshots", c.output.snapshots);
  r.integer("output.diag_stride", c.integration.diag_stride);
  r.integer("output.snapshot_stride", c.integration.snapshot_stride);
  r.integer("output.diag_order", c.integration.diag_order);
  r.boolean("output.energies", c.integration.diagnostics_energies);

  auto more = violations_of(c);
  v.insert(v.end(), more.begin(), more.end());
  if (!v.empty()) {
    throw ValidationError(std::move(v));
  }
  return c;
}

std::string terms_text(std::vector<FourierTerm> const &terms)
{
  std::string out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    auto const &t = terms[i];
    out += (i ? ", " : "") + std::to_string(t.m0) + " " + std::to_string(t.m1) + " " + num(t.amplitude) + " " +
           num(t.phase);
  }
  return out;
}

// Little-endian encoding independent of the host byte order.
void put_u(std::string &out, std::uint64_t x, int bytes)
{
  for (int i = 0; i < bytes; ++i) {
    out.push_back(static_cast<char>((x >> (8 * i)) & 0xff));
  }
}

void put_f64(std::string &out, double x) { put_u(out, std::bit_cast<std::uint64_t>(x), 8); }

class ByteReader
{
public:
  ByteReader(std::string const &data, std::string name) : data_(data), name_(std::move(name)) {}

  std::uint64_t u(int bytes)
  {
    need(bytes);
    std::uint64_t x = 0;
    for (int i = 0; i < bytes; ++i) {
      x |= std::uint64_t(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += bytes;
    return x;
  }
  double f64() { return std::bit_cast<double>(u(8)); }
  std::size_t remaining() const { return data_.size() - pos_; }

private:
  void need(std::size_t n) const
  {
    if (pos_ + n > data_.size()) {
      throw SnapshotError(name_ + ": truncated header");
    }
  }
  std::string const &data_;
  std::string name_;
  std::size_t pos_ = 0;
};

constexpr char magic[] = "GNWV1";
constexpr std::size_t magic_size = 5;

Field modal_field(int dim, GridHandle const &grid, std::vector<FourierTerm> const &terms)
{
  ModalField f(dim, {grid->length(0), dim == 2 ? grid->length(1) : grid->length(0)});
  for (auto const &t : terms) {
    f.add({t.m0, t.m1}, std::polar(t.amplitude, t.phase));
  }
  return f.sample(grid);
}

Field gaussian(GridHandle const &grid, std::array<double, 2> c, double width, double amplitude)
{
  int const dim = grid->dim();
  return Field::sample(grid, [&](double x, double y) {
    double const dx = std::remainder(x - c[0], grid->length(0));
    double const dy = dim == 2 ? std::remainder(y - c[1], grid->length(1)) : 0.0;
    return amplitude * std::exp(-(dx * dx + dy * dy) / (width * width));
  });
}

} // namespace

std::string to_string(InitialKind k)
{
  switch (k) {
  case InitialKind::rest:
    return "rest";
  case InitialKind::fourier_modes:
    return "fourier_modes";
  case InitialKind::gaussian:
    return "gaussian";
  case InitialKind::solitary_wave:
    return "solitary_wave";
  case InitialKind::file:
    return "file";
  }
  return "?";
}

std::string to_string(BathymetryKind k)
{
  switch (k) {
  case BathymetryKind::flat:
    return "flat";
  case BathymetryKind::fourier_modes:
    return "fourier_modes";
  case BathymetryKind::gaussian_bump:
    return "gaussian_bump";
  case BathymetryKind::file:
    return "file";
  }
  return "?";
}

RunConfig load_config(std::string const &text, std::vector<std::string> const &overrides)
{
  // '#' comments are accepted in addition to the native ';'.
  std::string cleaned;
  for (auto const &line : split(text, '\n')) {
    cleaned += (line.rfind('#', 0) == 0 ? std::string() : line) + "\n";
  }
  pt::ptree tree;
  std::istringstream is(cleaned);
  try {
    pt::read_ini(is, tree);
  } catch (pt::ini_parser_error const &e) {
    throw ParseError("config: " + e.message() + " (line " + std::to_string(e.line()) + ")",
                     static_cast<int>(e.line()));
  }
  std::vector<FieldViolation> bad;
  for (auto const &o : overrides) {
    auto const eq = o.find('=');
    std::string const key = trim(o.substr(0, eq));
    auto const dot = key.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot == 0 || dot + 1 == key.size() ||
        key.find('.', dot + 1) != std::string::npos) {
      bad.push_back({o, "override must read section.key=value"});
      continue;
    }
    tree.put(pt::ptree::path_type(key, '.'), trim(o.substr(eq + 1)));
  }
  if (!bad.empty()) {
    throw ValidationError(std::move(bad));
  }
  return from_tree(tree);
}

RunConfig load_config_file(std::filesystem::path const &path, std::vector<std::string> const &overrides)
{
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("config", "cannot open '" + path.string() + "'");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return load_config(ss.str(), overrides);
}

std::string save_config(RunConfig const &c)
{
  std::ostringstream os;
  auto b = [](bool x) { return x ? "true" : "false"; };
  os << "[model]\n"
     << "epsilon = " << num(c.params.epsilon) << "\n"
     << "beta = " << num(c.params.beta) << "\n"
     << "mu = " << num(c.params.mu) << "\n"
     << "formulation = " << to_string(c.params.formulation) << "\n"
     << "h_star = " << num(c.params.h_star) << "\n"
     << "h_star_upper = " << num(c.params.h_star_upper) << "\n\n";
  os << "[grid]\n"
     << "dim = " << c.grid.dim << "\n"
     << "points = " << c.grid.points[0] << " " << c.grid.points[1] << "\n"
     << "lengths = " << num(c.grid.lengths[0]) << " " << num(c.grid.lengths[1]) << "\n\n";
  os << "[time]\n"
     << "dt = " << num(c.integration.dt) << "\n"
     << "t_end = " << num(c.integration.t_end) << "\n"
     << "scheme = " << to_string(c.integration.scheme) << "\n"
     << "cfl_guard = " << num(c.integration.cfl_guard) << "\n\n";
  os << "[mollifier]\n"
     << "iota = " << num(c.integration.mollifier.iota) << "\n"
     << "profile = " << to_string(c.integration.mollifier.profile) << "\n"
     << "r0 = " << num(c.integration.mollifier.r0) << "\n"
     << "r1 = " << num(c.integration.mollifier.r1) << "\n\n";
  os << "[elliptic]\n"
     << "rel_tolerance = " << num(c.elliptic.rel_tolerance) << "\n"
     << "max_iterations = " << c.elliptic.max_iterations << "\n"
     << "preconditioner = " << to_string(c.elliptic.preconditioner) << "\n"
     << "warm_start = " << b(c.elliptic.warm_start) << "\n\n";
  os << "[initial]\n"
     << "type = " << to_string(c.initial.kind) << "\n"
     << "zeta = " << terms_text(c.initial.zeta) << "\n"
     << "velocity0 = " << terms_text(c.initial.velocity[0]) << "\n"
     << "velocity1 = " << terms_text(c.initial.velocity[1]) << "\n"
     << "velocity_kind = " << (c.initial.velocity_kind == VelocityKind::u_variable ? "u" : "v") << "\n"
     << "center = " << num(c.initial.center[0]) << " " << num(c.initial.center[1]) << "\n"
     << "width = " << num(c.initial.width) << "\n"
     << "amplitude = " << num(c.initial.amplitude) << "\n"
     << "path = " << c.initial.path << "\n\n";
  os << "[bathymetry]\n"
     << "type = " << to_string(c.bathymetry.kind) << "\n"
     << "modes = " << terms_text(c.bathymetry.modes) << "\n"
     << "center = " << num(c.bathymetry.center[0]) << " " << num(c.bathymetry.center[1]) << "\n"
     << "width = " << num(c.bathymetry.width) << "\n"
     << "amplitude = " << num(c.bathymetry.amplitude) << "\n"
     << "path = " << c.bathymetry.path << "\n\n";
  os << "[output]\n"
     << "directory = " << c.output.directory << "\n"
     << "csv = " << b(c.output.csv) << "\n"
     << "snapshots = " << b(c.output.snapshots) << "\n"
     << "diag_stride = " << c.integration.diag_stride << "\n"
     << "snapshot_stride = " << c.integration.snapshot_stride << "\n"
     << "diag_order = " << c.integration.diag_order << "\n"
     << "energies = " << b(c.integration.diagnostics_energies) << "\n";
  return os.str();
}

void validate_config(RunConfig const &cfg)
{
  auto v = violations_of(cfg);
  if (!v.empty()) {
    throw ValidationError(std::move(v));
  }
}

GridHandle make_grid(GridSpec const &spec)
{
  if (spec.dim == 1) {
    return Grid::line(spec.points[0], spec.lengths[0]);
  }
  return Grid::plane(spec.points[0], spec.points[1], spec.lengths[0], spec.lengths[1]);
}

BathymetryState make_bathymetry(RunConfig const &cfg, GridHandle const &grid)
{
  BathymetrySpec const &b = cfg.bathymetry;
  double const beta = cfg.params.beta;
  switch (b.kind) {
  case BathymetryKind::flat:
    return {Field(grid), beta};
  case BathymetryKind::fourier_modes:
    return {modal_field(grid->dim(), grid, b.modes), beta};
  case BathymetryKind::gaussian_bump:
    return {gaussian(grid, b.center, b.width, b.amplitude), beta};
  case BathymetryKind::file:
    // The elevation payload of the snapshot is read as the bottom profile.
    return {read_snapshot(b.path, *grid).state.zeta, beta};
  }
  throw std::logic_error("make_bathymetry: unknown kind");
}

FluidState make_initial_state(RunConfig const &cfg, GridHandle const &grid, BathymetryState const &bath)
{
  InitialSpec const &ic = cfg.initial;
  ModelParams const &p = cfg.params;
  VelocityKind const want = velocity_kind(p.formulation);
  int const dim = grid->dim();
  auto convert = [&](FluidState s) {
    if (s.kind == want) {
      return s;
    }
    if (want == VelocityKind::v_variable) {
      return v_from_u(s, p, bath);
    }
    EllipticSolver solver(cfg.elliptic);
    return u_from_v(s, p, bath, solver);
  };
  switch (ic.kind) {
  case InitialKind::rest:
    return FluidState::rest(grid, want);
  case InitialKind::fourier_modes: {
    VecField vel(grid);
    for (int a = 0; a < dim; ++a) {
      vel[a] = modal_field(dim, grid, ic.velocity[a]);
    }
    return convert({modal_field(dim, grid, ic.zeta), std::move(vel), ic.velocity_kind, 0.0});
  }
  case InitialKind::gaussian:
    return {gaussian(grid, ic.center, ic.width, ic.amplitude), VecField(grid), want, 0.0};
  case InitialKind::solitary_wave: {
    SolitaryWave const w = solve_solitary_wave(ic.amplitude, p.epsilon, p.mu);
    return w.state(grid, ic.center[0], want);
  }
  case InitialKind::file: {
    Snapshot snap = read_snapshot(ic.path, *grid);
    return convert(std::move(snap.state));
  }
  }
  throw std::logic_error("make_initial_state: unknown kind");
}

// ---------------------------------------------------------------------------

void write_snapshot(FluidState const &s, ModelParams const &p, std::filesystem::path const &path)
{
  auto const &g = s.zeta.grid();
  std::string out(magic, magic_size);
  put_u(out, static_cast<std::uint64_t>(g.dim()), 1);
  put_u(out, static_cast<std::uint64_t>(p.formulation), 1);
  put_u(out, static_cast<std::uint64_t>(s.kind), 1);
  put_u(out, static_cast<std::uint64_t>(g.points(0)), 4);
  put_u(out, static_cast<std::uint64_t>(g.dim() == 2 ? g.points(1) : 1), 4);
  put_f64(out, g.length(0));
  put_f64(out, g.dim() == 2 ? g.length(1) : 0.0);
  put_f64(out, p.epsilon);
  put_f64(out, p.beta);
  put_f64(out, p.mu);
  put_f64(out, s.time);
  auto payload = [&](Field const &f) {
    for (Index j = 0; j < f.values().size(); ++j) {
      put_f64(out, f.values()[j]);
    }
  };
  payload(s.zeta);
  for (int a = 0; a < g.dim(); ++a) {
    payload(s.vel[a]);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) {
    throw WriteError("cannot write snapshot '" + path.string() + "'");
  }
}

Snapshot read_snapshot(std::filesystem::path const &path)
{
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw SnapshotError("cannot open snapshot '" + path.string() + "'");
  }
  std::string const data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  std::string const name = path.string();
  if (data.size() < magic_size || data.compare(0, magic_size, magic) != 0) {
    throw SnapshotError(name + ": not a snapshot file (bad magic)");
  }
  ByteReader r(data, name);
  for (std::size_t i = 0; i < magic_size; ++i) {
    r.u(1);
  }
  auto const dim = static_cast<int>(r.u(1));
  auto const form = r.u(1);
  auto const kind = r.u(1);
  auto const n0 = r.u(4);
  auto const n1 = r.u(4);
  double const l0 = r.f64(), l1 = r.f64();
  ModelParams p;
  p.epsilon = r.f64();
  p.beta = r.f64();
  p.mu = r.f64();
  double const time = r.f64();
  if ((dim != 1 && dim != 2) || form > 3 || kind > 1 || n0 < 2 || n1 < 1 || n0 > (1u << 20) || n1 > (1u << 20) ||
      (dim == 1 && n1 != 1)) {
    throw SnapshotError(name + ": inconsistent header");
  }
  p.formulation = static_cast<Formulation>(form);
  std::uint64_t const count = n0 * n1;
  std::uint64_t const expected = (1 + dim) * count * 8;
  if (r.remaining() != expected) {
    throw SnapshotError(name + ": payload has " + std::to_string(r.remaining()) + " bytes, header implies " +
                        std::to_string(expected));
  }
  GridHandle const g = dim == 1 ? Grid::line(static_cast<int>(n0), l0)
                                : Grid::plane(static_cast<int>(n0), static_cast<int>(n1), l0, l1);
  auto field = [&] {
    Grid::RealArray a(static_cast<Index>(count));
    for (Index j = 0; j < a.size(); ++j) {
      a[j] = r.f64();
    }
    return Field(g, std::move(a));
  };
  Field zeta = field();
  VecField vel(g);
  for (int a = 0; a < dim; ++a) {
    vel[a] = field();
  }
  return {FluidState(std::move(zeta), std::move(vel), static_cast<VelocityKind>(kind), time), p};
}

Snapshot read_snapshot(std::filesystem::path const &path, Grid const &expected)
{
  Snapshot s = read_snapshot(path);
  if (!(s.state.zeta.grid() == expected)) {
    throw GridMismatch(path.string() + ": snapshot resolution or box differs from the run grid");
  }
  return s;
}

// ---------------------------------------------------------------------------

std::string format_record(DiagnosticsRecord const &r)
{
  return num(r.time) + "," + num(r.mass) + "," + num(r.hamiltonian) + "," + num(r.e_norm) + "," + num(r.f_norm) +
         "," + num(r.vorticity_l2) + "," + num(r.min_depth) + "," + std::to_string(r.cg_iterations);
}

CsvDiagnostics::CsvDiagnostics(std::filesystem::path path)
  : owned_(std::make_unique<std::ofstream>(path, std::ios::trunc)), os_(owned_.get()), name_(path.string())
{
  *os_ << diagnostics_header << "\n";
  if (!*os_) {
    throw WriteError("cannot write diagnostics '" + name_ + "'");
  }
}

CsvDiagnostics::CsvDiagnostics(std::ostream &os) : os_(&os), name_("stream")
{
  *os_ << diagnostics_header << "\n";
}

CsvDiagnostics::~CsvDiagnostics() = default;

void CsvDiagnostics::record(DiagnosticsRecord const &r)
{
  *os_ << format_record(r) << "\n";
  os_->flush();
  if (!*os_) {
    throw WriteError("write to diagnostics '" + name_ + "' failed");
  }
}

std::vector<DiagnosticsRecord> read_diagnostics_csv(std::istream &is)
{
  std::string line;
  if (!std::getline(is, line) || trim(line) != diagnostics_header) {
    throw ParseError("diagnostics csv: missing or unexpected header", 1);
  }
  std::vector<DiagnosticsRecord> out;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) {
      continue;
    }
    auto const cells = split(line, ',');
    std::array<double, 8> x{};
    bool ok = cells.size() == 8;
    for (std::size_t i = 0; ok && i < 8; ++i) {
      ok = to_double(cells[i], x[i]);
    }
    if (!ok) {
      throw ParseError("diagnostics csv: malformed row", lineno);
    }
    DiagnosticsRecord r;
    r.time = x[0];
    r.mass = x[1];
    r.hamiltonian = x[2];
    r.e_norm = x[3];
    r.f_norm = x[4];
    r.vorticity_l2 = x[5];
    r.min_depth = x[6];
    r.cg_iterations = static_cast<long>(x[7]);
    out.push_back(r);
  }
  return out;
}

std::vector<DiagnosticsRecord> read_diagnostics_csv(std::filesystem::path const &path)
{
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open '" + path.string() + "'", 0);
  }
  return read_diagnostics_csv(in);
}

SnapshotDirectory::SnapshotDirectory(std::filesystem::path dir) : dir_(std::move(dir))
{
  std::filesystem::create_directories(dir_);
}

void SnapshotDirectory::snapshot(FluidState const &s, ModelParams const &p)
{
  char name[32];
  std::snprintf(name, sizeof name, "snapshot_%06zu.bin", written_.size());
  auto const path = dir_ / name;
  write_snapshot(s, p, path);
  written_.push_back(path);
}

} // namespace sgn
