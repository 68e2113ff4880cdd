#pragma once

#include "grid.hpp"

#include <cstdint>
#include <random>

namespace sgn {

/**
 * Real trigonometric polynomial on a periodic box, independent of any grid.
 * Sampling the same ModalField on several grids gives the refinement studies
 * a common exact input.
 */
class ModalField
{
public:
  struct Term
  {
    std::array<int, 2> mode{0, 0};
    std::complex<double> amplitude;
  };

  ModalField(int dim, std::array<double, 2> lengths) : dim_(dim), lengths_(lengths) {}

  void add(std::array<int, 2> mode, std::complex<double> amplitude) { terms_.push_back({mode, amplitude}); }
  std::vector<Term> const &terms() const { return terms_; }
  int max_mode() const;

  double value(double x, double y) const;
  /// Gradient of the polynomial, as d ModalFields.
  std::vector<ModalField> gradient() const;
  Field sample(GridHandle const &grid) const;

  ModalField scaled(double s) const;

private:
  int dim_;
  std::array<double, 2> lengths_;
  std::vector<Term> terms_;
};

/**
 * Random smooth field with modes |m_i| <= max_mode, amplitudes drawn
 * uniformly with a Gaussian envelope, then rescaled to the given max-norm
 * bound (estimated from the coefficient sum). Zero mean unless keep_mean.
 */
ModalField random_modal(int dim, std::array<double, 2> lengths, int max_mode, double amplitude, std::mt19937_64 &rng,
                        bool keep_mean = false);

/// Random smooth vector field (d components).
std::vector<ModalField> random_modal_vector(int dim, std::array<double, 2> lengths, int max_mode, double amplitude,
                                            std::mt19937_64 &rng);

VecField sample(std::vector<ModalField> const &components, GridHandle const &grid);

} // namespace sgn
