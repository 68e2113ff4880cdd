#include "sgn/solitary.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace sgn {

namespace {

struct ProfileOde
{
  double c, eps, mu;

  double depth(double U) const { return c / (c - eps * U); }
  double elevation(double U) const { return U / (c - eps * U); }
  double v(double U, double P) const
  {
    double const h = depth(U);
    return (elevation(U) - 0.5 * eps * U * U - 0.5 * eps * mu * h * h * P * P) / (c - eps * U);
  }
  double second(double U, double P) const
  {
    double const den = c - eps * U;
    double const h = c / den;
    double const dh = c * eps / (den * den);
    return ((3.0 * h / mu) * (U - v(U, P)) - 3.0 * h * h * dh * P * P) / (h * h * h);
  }
  std::array<double, 2> rk4(double U, double P, double dx) const
  {
    double const k1u = P, k1p = second(U, P);
    double const k2u = P + 0.5 * dx * k1p, k2p = second(U + 0.5 * dx * k1u, P + 0.5 * dx * k1p);
    double const k3u = P + 0.5 * dx * k2p, k3p = second(U + 0.5 * dx * k2u, P + 0.5 * dx * k2p);
    double const k4u = P + dx * k3p, k4p = second(U + dx * k3u, P + dx * k3p);
    return {U + dx / 6 * (k1u + 2 * k2u + 2 * k3u + k4u), P + dx / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)};
  }
};

enum class Outcome { crossed, turned, decayed };

struct Shot
{
  Outcome outcome;
  std::vector<double> u, du;
};

/// Integrates from the crest until the trajectory leaves the homoclinic branch.
Shot shoot(ProfileOde const &ode, double u0, double dx, double tail, bool keep)
{
  Shot s{Outcome::decayed, {}, {}};
  double U = u0, P = 0;
  long const max_steps = static_cast<long>(1e7);
  for (long i = 0; i < max_steps; ++i) {
    if (keep) {
      s.u.push_back(U);
      s.du.push_back(P);
    }
    if (U < tail * u0) {
      s.outcome = Outcome::decayed;
      return s;
    }
    auto const next = ode.rk4(U, P, dx);
    U = next[0];
    P = next[1];
    if (U < 0) {
      s.outcome = Outcome::crossed;
      return s;
    }
    if (P > 0) {
      s.outcome = Outcome::turned;
      return s;
    }
  }
  return s;
}

} // namespace

SolitaryWave solve_solitary_wave(double amplitude, double epsilon, double mu, double step)
{
  if (!(amplitude > 0) || !(epsilon > 0) || !(mu > 0) || !(step > 0)) {
    throw std::invalid_argument("solve_solitary_wave: amplitude, epsilon, mu and step must be positive");
  }
  double const tail = 1e-7;
  auto crest = [&](double c) { return amplitude * c / (1 + epsilon * amplitude); };
  auto classify = [&](double c) {
    return shoot({c, epsilon, mu}, crest(c), step, -1.0, false).outcome;
  };
  // Bracket the speed: slow waves fall through zero, fast ones turn back up (or vice versa).
  double lo = 1.0 + 1e-9;
  double hi = std::sqrt(1.0 + 4.0 * epsilon * amplitude) + 0.5;
  Outcome const olo = classify(lo);
  Outcome const ohi = classify(hi);
  if (olo == ohi) {
    throw std::runtime_error("solve_solitary_wave: could not bracket the wave speed");
  }
  for (int it = 0; it < 200 && hi - lo > 4e-16 * hi; ++it) {
    double const mid = 0.5 * (lo + hi);
    (classify(mid) == olo ? lo : hi) = mid;
  }
  double const c = 0.5 * (lo + hi);

  SolitaryWave w;
  w.amplitude = amplitude;
  w.speed = c;
  w.epsilon = epsilon;
  w.mu = mu;
  w.step = step;
  w.decay_rate = std::sqrt(3.0 * (1.0 - 1.0 / (c * c)) / mu);
  Shot const s = shoot({c, epsilon, mu}, crest(c), step, tail, true);
  w.u = s.u;
  w.du = s.du;
  // Drop the part where the shooting error starts to grow; the linear tail takes over.
  while (w.du.size() > 2 && w.du.back() >= 0) {
    w.u.pop_back();
    w.du.pop_back();
  }
  return w;
}

double SolitaryWave::velocity(double x) const
{
  x = std::abs(x);
  double const pos = x / step;
  auto const last = static_cast<double>(u.size() - 1);
  if (pos >= last) {
    return u.back() * std::exp(-decay_rate * (x - last * step));
  }
  auto const i = static_cast<std::size_t>(pos);
  double const t = pos - double(i);
  // Cubic Hermite on (U, U').
  double const h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
  double const h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
  return h00 * u[i] + h10 * step * du[i] + h01 * u[i + 1] + h11 * step * du[i + 1];
}

double SolitaryWave::velocity_slope(double x) const
{
  double const sign = x < 0 ? -1.0 : 1.0;
  x = std::abs(x);
  double const pos = x / step;
  auto const last = static_cast<double>(u.size() - 1);
  if (pos >= last) {
    return -sign * decay_rate * velocity(x);
  }
  auto const i = static_cast<std::size_t>(pos);
  double const t = pos - double(i);
  ProfileOde const ode{speed, epsilon, mu};
  double const a0 = ode.second(u[i], du[i]), a1 = ode.second(u[i + 1], du[i + 1]);
  double const h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
  double const h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
  return sign * (h00 * du[i] + h10 * step * a0 + h01 * du[i + 1] + h11 * step * a1);
}

double SolitaryWave::elevation(double x) const
{
  return ProfileOde{speed, epsilon, mu}.elevation(velocity(x));
}

double SolitaryWave::v_variable(double x) const
{
  return ProfileOde{speed, epsilon, mu}.v(velocity(x), velocity_slope(x));
}

FluidState SolitaryWave::state(GridHandle const &grid, double x0, VelocityKind kind) const
{
  if (grid->dim() != 1) {
    throw std::invalid_argument("SolitaryWave::state: one-dimensional grids only");
  }
  double const L = grid->length(0);
  // Periodic distance to the crest.
  auto dist = [&](double x) { return std::remainder(x - x0, L); };
  Field zeta = Field::sample(grid, [&](double x, double) { return elevation(dist(x)); });
  VecField vel(grid);
  if (kind == VelocityKind::u_variable) {
    vel[0] = Field::sample(grid, [&](double x, double) { return velocity(dist(x)); });
  } else {
    vel[0] = Field::sample(grid, [&](double x, double) { return v_variable(dist(x)); });
  }
  return {std::move(zeta), std::move(vel), kind, 0.0};
}

} // namespace sgn
