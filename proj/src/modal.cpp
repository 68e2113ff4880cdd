#include "sgn/modal.hpp"

#include <cmath>
#include <numbers>

namespace sgn {

int ModalField::max_mode() const
{
  int m = 0;
  for (auto const &t : terms_) {
    m = std::max({m, std::abs(t.mode[0]), std::abs(t.mode[1])});
  }
  return m;
}

double ModalField::value(double x, double y) const
{
  double const two_pi = 2 * std::numbers::pi;
  double acc = 0;
  for (auto const &t : terms_) {
    double phase = two_pi * t.mode[0] * x / lengths_[0];
    if (dim_ == 2) {
      phase += two_pi * t.mode[1] * y / lengths_[1];
    }
    acc += t.amplitude.real() * std::cos(phase) - t.amplitude.imag() * std::sin(phase);
  }
  return acc;
}

std::vector<ModalField> ModalField::gradient() const
{
  std::vector<ModalField> out(dim_, ModalField(dim_, lengths_));
  double const two_pi = 2 * std::numbers::pi;
  for (auto const &t : terms_) {
    for (int a = 0; a < dim_; ++a) {
      double const k = two_pi * t.mode[a] / lengths_[a];
      out[a].add(t.mode, std::complex<double>(0, k) * t.amplitude);
    }
  }
  return out;
}

Field ModalField::sample(GridHandle const &grid) const
{
  if (grid->dim() != dim_ || grid->length(0) != lengths_[0] || (dim_ == 2 && grid->length(1) != lengths_[1])) {
    throw GridMismatch("ModalField: grid box differs from the field's box");
  }
  return Field::sample(grid, [this](double x, double y) { return value(x, y); });
}

ModalField ModalField::scaled(double s) const
{
  ModalField out = *this;
  for (auto &t : out.terms_) {
    t.amplitude *= s;
  }
  return out;
}

ModalField random_modal(int dim, std::array<double, 2> lengths, int max_mode, double amplitude, std::mt19937_64 &rng,
                        bool keep_mean)
{
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  ModalField f(dim, lengths);
  int const m1max = dim == 2 ? max_mode : 0;
  double const width = std::max(1.0, 0.5 * max_mode);
  double bound = 0;
  // Half-plane of modes: each real cosine/sine pair appears once.
  for (int m0 = 0; m0 <= max_mode; ++m0) {
    for (int m1 = -m1max; m1 <= m1max; ++m1) {
      if (m0 == 0 && m1 < 0) {
        continue;
      }
      bool const mean = m0 == 0 && m1 == 0;
      double const re = uni(rng);
      double const im = mean ? 0.0 : uni(rng);
      if (mean && !keep_mean) {
        continue;
      }
      double const env = std::exp(-double(m0 * m0 + m1 * m1) / (2 * width * width));
      std::complex<double> c(re * env, im * env);
      f.add({m0, m1}, c);
      bound += std::abs(c);
    }
  }
  return bound > 0 ? f.scaled(amplitude / bound) : f;
}

std::vector<ModalField> random_modal_vector(int dim, std::array<double, 2> lengths, int max_mode, double amplitude,
                                            std::mt19937_64 &rng)
{
  std::vector<ModalField> out;
  for (int a = 0; a < dim; ++a) {
    out.push_back(random_modal(dim, lengths, max_mode, amplitude, rng, true));
  }
  return out;
}

VecField sample(std::vector<ModalField> const &components, GridHandle const &grid)
{
  std::vector<Field> c;
  for (auto const &m : components) {
    c.push_back(m.sample(grid));
  }
  return VecField(std::move(c));
}

} // namespace sgn
