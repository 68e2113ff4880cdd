#include "sgn/regularization.hpp"

#include <cmath>

namespace sgn {

double MollifierSpec::profile_value(double x) const
{
  x = std::abs(x);
  if (profile == MollifierProfile::sharp_cutoff) {
    return x <= 1.0 ? 1.0 : 0.0;
  }
  if (x <= r0) {
    return 1.0;
  }
  if (x >= r1) {
    return 0.0;
  }
  auto psi = [](double s) { return s > 0 ? std::exp(-1.0 / s) : 0.0; };
  double const t = (x - r0) / (r1 - r0);
  return psi(1 - t) / (psi(1 - t) + psi(t));
}

void MollifierSpec::validate() const
{
  std::vector<FieldViolation> v;
  if (!(iota >= 0 && iota < 1)) {
    v.push_back({"mollifier.iota", "must lie in [0, 1)"});
  }
  if (profile == MollifierProfile::smooth_bump && !(r0 > 0 && r1 > r0)) {
    v.push_back({"mollifier.r0", "smooth bump needs 0 < r0 < r1"});
  }
  if (!v.empty()) {
    throw ValidationError(std::move(v));
  }
}

Grid::RealArray mollifier_symbol(Grid const &grid, MollifierSpec const &spec)
{
  Grid::RealArray const &k = grid.wavenumber_norm();
  Grid::RealArray out(k.size());
  for (Index i = 0; i < k.size(); ++i) {
    out[i] = spec.is_identity() ? 1.0 : spec.profile_value(spec.iota * k[i]);
  }
  return out;
}

Field mollify(Field const &f, MollifierSpec const &spec)
{
  if (spec.is_identity()) {
    return f;
  }
  return from_spectrum<double>(f.grid_ptr(), spectrum(f) * mollifier_symbol(f.grid(), spec));
}

VecField mollify(VecField const &v, MollifierSpec const &spec)
{
  if (spec.is_identity()) {
    return v;
  }
  Grid::RealArray const sym = mollifier_symbol(v.grid(), spec);
  VecField out(v.grid_ptr());
  for (int a = 0; a < v.dim(); ++a) {
    out[a] = from_spectrum<double>(v.grid_ptr(), spectrum(v[a]) * sym);
  }
  return out;
}

RhsResult rhs_gn_v_mollified(FluidState const &s, ModelParams const &p, BathymetryState const &bath,
                             MollifierSpec const &spec, EllipticSolver &solver)
{
  if (spec.is_identity()) {
    return rhs_gn_v(s, p, bath, solver);
  }
  return detail::rhs_gn_v_filtered(
    s, p, bath, solver, [&](Field const &f) { return mollify(f, spec); },
    [&](VecField const &v) { return mollify(v, spec); });
}

} // namespace sgn
