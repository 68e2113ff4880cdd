#pragma once

#include "errors.hpp"

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

namespace sgn {

using Index = Eigen::Index;

/// Multi-index for spatial derivatives; entries beyond dim() are ignored.
using MultiIndex = std::array<int, 2>;

/**
 * Uniform tensor grid on a periodic box in one or two dimensions.
 *
 * Samples are stored row-major (last axis fastest). Spectra use the
 * real-to-complex layout: the last axis keeps modes 0..N/2, the first axis
 * (in 2D) keeps all N modes in FFT order. Transforms are normalised so that
 * coefficient 0 is the grid mean; the L2 inner product then reads
 * volume * sum_m w_m Re(f_m conj(g_m)) with w_m the conjugate-pair weight.
 */
template <typename Scalar> class PeriodicGrid
{
public:
  using Complex = std::complex<Scalar>;
  using RealArray = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  using ComplexArray = Eigen::Array<Complex, Eigen::Dynamic, 1>;

  PeriodicGrid(std::vector<Index> points, std::vector<Scalar> lengths)
    : points_(std::move(points)), lengths_(std::move(lengths))
  {
    if (points_.empty() || points_.size() > 2 || points_.size() != lengths_.size()) {
      throw std::invalid_argument("PeriodicGrid: dimension must be 1 or 2 with one length per axis");
    }
    for (std::size_t a = 0; a < points_.size(); ++a) {
      if (points_[a] < 8 || points_[a] % 2 != 0) {
        throw std::invalid_argument("PeriodicGrid: points per axis must be even and >= 8");
      }
      if (!(lengths_[a] > 0) || !std::isfinite(lengths_[a])) {
        throw std::invalid_argument("PeriodicGrid: box lengths must be positive");
      }
    }
    build_tables();
  }

  static std::shared_ptr<PeriodicGrid const> line(Index n, Scalar length)
  {
    return std::make_shared<PeriodicGrid const>(std::vector<Index>{n}, std::vector<Scalar>{length});
  }
  static std::shared_ptr<PeriodicGrid const> plane(Index n0, Index n1, Scalar l0, Scalar l1)
  {
    return std::make_shared<PeriodicGrid const>(std::vector<Index>{n0, n1}, std::vector<Scalar>{l0, l1});
  }

  int dim() const { return static_cast<int>(points_.size()); }
  Index points(int axis) const { return points_[axis]; }
  Scalar length(int axis) const { return lengths_[axis]; }
  Scalar spacing(int axis) const { return lengths_[axis] / Scalar(points_[axis]); }
  Index size() const { return size_; }
  Index spectral_size() const { return spectral_size_; }
  Scalar volume() const { return volume_; }
  Scalar cell_volume() const { return volume_ / Scalar(size_); }
  Index min_points() const { return dim() == 1 ? points_[0] : std::min(points_[0], points_[1]); }
  Index max_points() const { return dim() == 1 ? points_[0] : std::max(points_[0], points_[1]); }

  /// Signed integer mode of spectral entry s along an axis.
  int mode(int axis, Index s) const { return modes_[axis][s]; }
  /// k_j = 2 pi m_j / L_j, Nyquist kept (used by even-order operators).
  RealArray const &wavenumber(int axis) const { return k_[axis]; }
  /// Same as wavenumber() with Nyquist entries zeroed (odd-order derivatives).
  RealArray const &derivative_wavenumber(int axis) const { return kd_[axis]; }
  RealArray const &wavenumber_squared() const { return k2_; }
  RealArray const &wavenumber_norm() const { return knorm_; }
  /// 1 on modes with |m_i| <= floor(N_i/3) on every axis, 0 elsewhere.
  RealArray const &dealias_mask() const { return mask_; }
  RealArray const &parseval_weight() const { return weight_; }

  Scalar coordinate(int axis, Index i) const { return spacing(axis) * Scalar(i); }

  /// Sample index -> per-axis point indices.
  std::array<Index, 2> unravel(Index j) const
  {
    if (dim() == 1) {
      return {j, 0};
    }
    return {j / points_[1], j % points_[1]};
  }

  bool operator==(PeriodicGrid const &o) const { return points_ == o.points_ && lengths_ == o.lengths_; }
  bool operator!=(PeriodicGrid const &o) const { return !(*this == o); }

  ComplexArray forward(RealArray const &samples) const
  {
    auto &fft = engine();
    ComplexArray out(spectral_size_);
    Scalar const scale = Scalar(1) / Scalar(size_);
    if (dim() == 1) {
      fft.fwd(out.data(), samples.data(), points_[0]);
    } else {
      Index const n0 = points_[0], n1 = points_[1], h = n1 / 2 + 1;
      for (Index i0 = 0; i0 < n0; ++i0) {
        fft.fwd(out.data() + i0 * h, samples.data() + i0 * n1, n1);
      }
      std::vector<Complex> col(n0), tmp(n0);
      for (Index i1 = 0; i1 < h; ++i1) {
        for (Index i0 = 0; i0 < n0; ++i0) {
          col[i0] = out[i0 * h + i1];
        }
        fft.fwd(tmp.data(), col.data(), n0);
        for (Index i0 = 0; i0 < n0; ++i0) {
          out[i0 * h + i1] = tmp[i0];
        }
      }
    }
    out *= scale;
    return out;
  }

  RealArray inverse(ComplexArray const &spectrum) const
  {
    auto &fft = engine();
    RealArray out(size_);
    if (dim() == 1) {
      fft.inv(out.data(), spectrum.data(), points_[0]);
    } else {
      Index const n0 = points_[0], n1 = points_[1], h = n1 / 2 + 1;
      std::vector<Complex> work(spectrum_size_2d()), col(n0), tmp(n0);
      for (Index i1 = 0; i1 < h; ++i1) {
        for (Index i0 = 0; i0 < n0; ++i0) {
          col[i0] = spectrum[i0 * h + i1];
        }
        fft.inv(tmp.data(), col.data(), n0);
        for (Index i0 = 0; i0 < n0; ++i0) {
          work[i0 * h + i1] = tmp[i0];
        }
      }
      for (Index i0 = 0; i0 < n0; ++i0) {
        fft.inv(out.data() + i0 * n1, work.data() + i0 * h, n1);
      }
    }
    return out;
  }

private:
  Index spectrum_size_2d() const { return spectral_size_; }

  static Eigen::FFT<Scalar> &engine()
  {
    thread_local Eigen::FFT<Scalar> fft = [] {
      Eigen::FFT<Scalar> f;
      f.SetFlag(Eigen::FFT<Scalar>::HalfSpectrum);
      f.SetFlag(Eigen::FFT<Scalar>::Unscaled);
      return f;
    }();
    return fft;
  }

  void build_tables()
  {
    size_ = 1;
    volume_ = 1;
    for (std::size_t a = 0; a < points_.size(); ++a) {
      size_ *= points_[a];
      volume_ *= lengths_[a];
    }
    Index const last = points_.back();
    Index const h = last / 2 + 1;
    spectral_size_ = dim() == 1 ? h : points_[0] * h;
    for (int a = 0; a < dim(); ++a) {
      modes_[a].assign(spectral_size_, 0);
      k_[a].setZero(spectral_size_);
      kd_[a].setZero(spectral_size_);
    }
    mask_.setOnes(spectral_size_);
    weight_.setZero(spectral_size_);
    Scalar const two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    for (Index s = 0; s < spectral_size_; ++s) {
      std::array<int, 2> m{0, 0};
      Index i_last = 0;
      if (dim() == 1) {
        m[0] = static_cast<int>(s);
        i_last = s;
      } else {
        Index const i0 = s / h;
        i_last = s % h;
        m[0] = static_cast<int>(i0 <= points_[0] / 2 - 1 ? i0 : i0 - points_[0]);
        m[1] = static_cast<int>(i_last);
      }
      weight_[s] = (i_last == 0 || i_last == last / 2) ? Scalar(1) : Scalar(2);
      for (int a = 0; a < dim(); ++a) {
        modes_[a][s] = m[a];
        Scalar const k = two_pi * Scalar(m[a]) / lengths_[a];
        k_[a][s] = k;
        bool const nyquist = std::abs(m[a]) == points_[a] / 2;
        kd_[a][s] = nyquist ? Scalar(0) : k;
        if (std::abs(m[a]) > points_[a] / 3) {
          mask_[s] = 0;
        }
      }
    }
    k2_ = k_[0].square();
    if (dim() == 2) {
      k2_ += k_[1].square();
    }
    knorm_ = k2_.sqrt();
  }

  std::vector<Index> points_;
  std::vector<Scalar> lengths_;
  Index size_ = 0;
  Index spectral_size_ = 0;
  Scalar volume_ = 0;
  std::array<std::vector<int>, 2> modes_;
  std::array<RealArray, 2> k_, kd_;
  RealArray k2_, knorm_, mask_, weight_;
};

template <typename Scalar> using GridPtr = std::shared_ptr<PeriodicGrid<Scalar> const>;

template <typename Scalar> class ScalarField
{
public:
  using Grid = PeriodicGrid<Scalar>;
  using RealArray = typename Grid::RealArray;

  explicit ScalarField(GridPtr<Scalar> grid) : grid_(std::move(grid)) { values_.setZero(grid_->size()); }
  ScalarField(GridPtr<Scalar> grid, RealArray values) : grid_(std::move(grid)), values_(std::move(values))
  {
    if (values_.size() != grid_->size()) {
      throw GridMismatch("ScalarField: sample count does not match grid");
    }
  }

  static ScalarField constant(GridPtr<Scalar> grid, Scalar c)
  {
    ScalarField f(std::move(grid));
    f.values_.setConstant(c);
    return f;
  }

  /// Samples fn(x) (1D) or fn(x, y) (2D) at the grid points; y is 0 in 1D.
  static ScalarField sample(GridPtr<Scalar> grid, std::function<Scalar(Scalar, Scalar)> const &fn)
  {
    ScalarField f(grid);
    for (Index j = 0; j < grid->size(); ++j) {
      auto const ij = grid->unravel(j);
      Scalar const x = grid->coordinate(0, ij[0]);
      Scalar const y = grid->dim() == 2 ? grid->coordinate(1, ij[1]) : Scalar(0);
      f.values_[j] = fn(x, y);
    }
    return f;
  }

  Grid const &grid() const { return *grid_; }
  GridPtr<Scalar> const &grid_ptr() const { return grid_; }
  RealArray const &values() const { return values_; }
  RealArray &values() { return values_; }
  Index size() const { return values_.size(); }

  ScalarField &operator+=(ScalarField const &o)
  {
    require_same(o);
    values_ += o.values_;
    return *this;
  }
  ScalarField &operator-=(ScalarField const &o)
  {
    require_same(o);
    values_ -= o.values_;
    return *this;
  }
  ScalarField &operator*=(Scalar s)
  {
    values_ *= s;
    return *this;
  }
  friend ScalarField operator+(ScalarField a, ScalarField const &b) { return a += b; }
  friend ScalarField operator-(ScalarField a, ScalarField const &b) { return a -= b; }
  friend ScalarField operator*(Scalar s, ScalarField a) { return a *= s; }
  friend ScalarField operator*(ScalarField a, Scalar s) { return a *= s; }
  friend ScalarField operator-(ScalarField a)
  {
    a.values_ = -a.values_;
    return a;
  }

  void require_same(ScalarField const &o) const
  {
    if (grid_ != o.grid_ && *grid_ != *o.grid_) {
      throw GridMismatch("fields live on different grids");
    }
  }

private:
  GridPtr<Scalar> grid_;
  RealArray values_;
};

/// d components on one grid (d = grid dimension).
template <typename Scalar> class VectorField
{
public:
  using Field = ScalarField<Scalar>;

  explicit VectorField(GridPtr<Scalar> const &grid)
  {
    for (int a = 0; a < grid->dim(); ++a) {
      comps_.emplace_back(grid);
    }
  }
  explicit VectorField(std::vector<Field> comps) : comps_(std::move(comps))
  {
    if (comps_.empty() || static_cast<int>(comps_.size()) != comps_.front().grid().dim()) {
      throw GridMismatch("VectorField: component count must equal grid dimension");
    }
    for (auto const &c : comps_) {
      comps_.front().require_same(c);
    }
  }

  int dim() const { return static_cast<int>(comps_.size()); }
  PeriodicGrid<Scalar> const &grid() const { return comps_.front().grid(); }
  GridPtr<Scalar> const &grid_ptr() const { return comps_.front().grid_ptr(); }
  Field const &operator[](int i) const { return comps_[i]; }
  Field &operator[](int i) { return comps_[i]; }

  VectorField &operator+=(VectorField const &o)
  {
    for (int i = 0; i < dim(); ++i) {
      comps_[i] += o.comps_[i];
    }
    return *this;
  }
  VectorField &operator-=(VectorField const &o)
  {
    for (int i = 0; i < dim(); ++i) {
      comps_[i] -= o.comps_[i];
    }
    return *this;
  }
  VectorField &operator*=(Scalar s)
  {
    for (auto &c : comps_) {
      c *= s;
    }
    return *this;
  }
  friend VectorField operator+(VectorField a, VectorField const &b) { return a += b; }
  friend VectorField operator-(VectorField a, VectorField const &b) { return a -= b; }
  friend VectorField operator*(Scalar s, VectorField a) { return a *= s; }
  friend VectorField operator*(VectorField a, Scalar s) { return a *= s; }
  friend VectorField operator-(VectorField a) { return a *= Scalar(-1); }

private:
  std::vector<Field> comps_;
};

// ---------------------------------------------------------------------------
// Spectral calculus

template <typename Scalar> auto spectrum(ScalarField<Scalar> const &f) { return f.grid().forward(f.values()); }

template <typename Scalar>
ScalarField<Scalar> from_spectrum(GridPtr<Scalar> const &grid, typename PeriodicGrid<Scalar>::ComplexArray const &s)
{
  return ScalarField<Scalar>(grid, grid->inverse(s));
}

namespace detail {
template <typename Scalar> std::complex<Scalar> constexpr I{0, 1};
}

/// Component j of the result has spectrum i k_j f(k).
template <typename Scalar> VectorField<Scalar> gradient(ScalarField<Scalar> const &f)
{
  auto const &g = f.grid();
  auto const fh = spectrum(f);
  VectorField<Scalar> out(f.grid_ptr());
  for (int a = 0; a < g.dim(); ++a) {
    out[a] = from_spectrum<Scalar>(f.grid_ptr(), fh * (detail::I<Scalar> * g.derivative_wavenumber(a)));
  }
  return out;
}

template <typename Scalar> ScalarField<Scalar> divergence(VectorField<Scalar> const &u)
{
  auto const &g = u.grid();
  typename PeriodicGrid<Scalar>::ComplexArray acc = spectrum(u[0]) * (detail::I<Scalar> * g.derivative_wavenumber(0));
  for (int a = 1; a < g.dim(); ++a) {
    acc += spectrum(u[a]) * (detail::I<Scalar> * g.derivative_wavenumber(a));
  }
  return from_spectrum<Scalar>(u.grid_ptr(), acc);
}

/// curl(u1, u2) = d1 u2 - d2 u1; identically zero in one dimension.
template <typename Scalar> ScalarField<Scalar> curl2d(VectorField<Scalar> const &u)
{
  auto const &g = u.grid();
  if (g.dim() == 1) {
    return ScalarField<Scalar>(u.grid_ptr());
  }
  typename PeriodicGrid<Scalar>::ComplexArray const s =
    spectrum(u[1]) * (detail::I<Scalar> * g.derivative_wavenumber(0)) -
    spectrum(u[0]) * (detail::I<Scalar> * g.derivative_wavenumber(1));
  return from_spectrum<Scalar>(u.grid_ptr(), s);
}

/// (u1, u2)^perp = (-u2, u1). Only defined in two dimensions.
template <typename Scalar> VectorField<Scalar> perp(VectorField<Scalar> const &u)
{
  if (u.dim() != 2) {
    throw std::invalid_argument("perp: requires a two-dimensional field");
  }
  return VectorField<Scalar>(std::vector<ScalarField<Scalar>>{-u[1], u[0]});
}

template <typename Scalar> ScalarField<Scalar> laplacian(ScalarField<Scalar> const &f)
{
  return from_spectrum<Scalar>(f.grid_ptr(), spectrum(f) * (-f.grid().wavenumber_squared()));
}

/// Spectral derivative d^alpha f.
template <typename Scalar> ScalarField<Scalar> partial(ScalarField<Scalar> const &f, MultiIndex const &alpha)
{
  auto const &g = f.grid();
  auto s = spectrum(f);
  for (int a = 0; a < g.dim(); ++a) {
    for (int r = 0; r < alpha[a]; ++r) {
      s *= detail::I<Scalar> * g.derivative_wavenumber(a);
    }
  }
  return from_spectrum<Scalar>(f.grid_ptr(), s);
}

template <typename Scalar> VectorField<Scalar> partial(VectorField<Scalar> const &u, MultiIndex const &alpha)
{
  VectorField<Scalar> out(u.grid_ptr());
  for (int a = 0; a < u.dim(); ++a) {
    out[a] = partial(u[a], alpha);
  }
  return out;
}

/// Two-thirds rule projection.
template <typename Scalar> ScalarField<Scalar> dealias(ScalarField<Scalar> const &f)
{
  return from_spectrum<Scalar>(f.grid_ptr(), spectrum(f) * f.grid().dealias_mask());
}

template <typename Scalar> VectorField<Scalar> dealias(VectorField<Scalar> const &u)
{
  VectorField<Scalar> out(u.grid_ptr());
  for (int a = 0; a < u.dim(); ++a) {
    out[a] = dealias(u[a]);
  }
  return out;
}

/// Pointwise product, no filtering.
template <typename Scalar> ScalarField<Scalar> pointwise(ScalarField<Scalar> const &f, ScalarField<Scalar> const &g)
{
  f.require_same(g);
  return ScalarField<Scalar>(f.grid_ptr(), f.values() * g.values());
}

template <typename Scalar> VectorField<Scalar> pointwise(ScalarField<Scalar> const &f, VectorField<Scalar> const &u)
{
  VectorField<Scalar> out(u.grid_ptr());
  for (int a = 0; a < u.dim(); ++a) {
    out[a] = pointwise(f, u[a]);
  }
  return out;
}

template <typename Scalar> ScalarField<Scalar> dot(VectorField<Scalar> const &u, VectorField<Scalar> const &v)
{
  ScalarField<Scalar> out = pointwise(u[0], v[0]);
  for (int a = 1; a < u.dim(); ++a) {
    out.values() += u[a].values() * v[a].values();
  }
  return out;
}

template <typename Scalar>
ScalarField<Scalar> multiply_dealiased(ScalarField<Scalar> const &f, ScalarField<Scalar> const &g)
{
  return dealias(pointwise(f, g));
}

template <typename Scalar>
VectorField<Scalar> multiply_dealiased(ScalarField<Scalar> const &f, VectorField<Scalar> const &u)
{
  return dealias(pointwise(f, u));
}

// ---------------------------------------------------------------------------
// Quadrature

template <typename Scalar> Scalar integrate(ScalarField<Scalar> const &f)
{
  return f.values().sum() * f.grid().cell_volume();
}

template <typename Scalar> Scalar inner_product(ScalarField<Scalar> const &f, ScalarField<Scalar> const &g)
{
  f.require_same(g);
  return (f.values() * g.values()).sum() * f.grid().cell_volume();
}

template <typename Scalar> Scalar inner_product(VectorField<Scalar> const &u, VectorField<Scalar> const &v)
{
  Scalar acc = 0;
  for (int a = 0; a < u.dim(); ++a) {
    acc += inner_product(u[a], v[a]);
  }
  return acc;
}

template <typename Scalar> Scalar l2_norm(ScalarField<Scalar> const &f) { return std::sqrt(inner_product(f, f)); }
template <typename Scalar> Scalar l2_norm(VectorField<Scalar> const &u) { return std::sqrt(inner_product(u, u)); }

/// Inner product evaluated in mode space; equals inner_product() by Parseval.
template <typename Scalar> Scalar spectral_inner_product(ScalarField<Scalar> const &f, ScalarField<Scalar> const &g)
{
  auto const a = spectrum(f);
  auto const b = spectrum(g);
  return f.grid().volume() * (f.grid().parseval_weight() * (a * b.conjugate()).real()).sum();
}

template <typename Scalar> Scalar max_abs(ScalarField<Scalar> const &f) { return f.values().abs().maxCoeff(); }
template <typename Scalar> Scalar max_abs(VectorField<Scalar> const &u)
{
  Scalar m = 0;
  for (int a = 0; a < u.dim(); ++a) {
    m = std::max(m, max_abs(u[a]));
  }
  return m;
}

template <typename Scalar> bool all_finite(ScalarField<Scalar> const &f) { return f.values().allFinite(); }
template <typename Scalar> bool all_finite(VectorField<Scalar> const &u)
{
  for (int a = 0; a < u.dim(); ++a) {
    if (!all_finite(u[a])) {
      return false;
    }
  }
  return true;
}

// Double-precision aliases used by the physics layers.
using Grid = PeriodicGrid<double>;
using GridHandle = GridPtr<double>;
using Field = ScalarField<double>;
using VecField = VectorField<double>;

} // namespace sgn
