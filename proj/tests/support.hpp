#pragma once

// Shared helpers for the unit tests: small independent reference formulas
// that do not go through the library code under test.

#include <cmath>
#include <complex>
#include <random>

#include "core/error.hpp"
#include "core/geometry.hpp"

namespace hyptest {

using hyperbolize::Complex;

inline bool near(Complex a, Complex b, double tol) { return std::abs(a - b) <= tol; }

/// cosh of the side joining the corners with angles a and b, opposite angle c.
inline double cosh_side(double a, double b, double c) {
  return (std::cos(c) + std::cos(a) * std::cos(b)) / (std::sin(a) * std::sin(b));
}

/// Euclidean radius in the unit disk of a point at hyperbolic distance d from 0.
inline double disk_radius(double d) { return std::tanh(d / 2.0); }

/// Hyperbolic distance in the unit disk, written out directly.
inline double hdist(Complex z, Complex w) {
  const double num = 2.0 * std::norm(z - w);
  const double den = (1.0 - std::norm(z)) * (1.0 - std::norm(w));
  return std::acosh(1.0 + num / den);
}

inline Complex random_in_disk(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  for (;;) {
    const Complex z{u(rng), u(rng)};
    if (std::abs(z) < radius) return z;
  }
}

template <class F>
hyperbolize::ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const hyperbolize::Error& e) {
    return e.code();
  }
  throw std::runtime_error("expected an error");
}

}  // namespace hyptest
