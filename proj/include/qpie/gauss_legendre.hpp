#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace qpie {

/// Gauss–Legendre quadrature rule: n nodes and weights, exact for
/// polynomials of degree <= 2n-1.
struct QuadRule {
  std::vector<double> x, w;
};

/// Rule on the reference interval [-1, 1]. Nodes are the roots of the
/// Legendre polynomial P_n, found by Newton iteration from Chebyshev-like
/// initial guesses; symmetric pairs are filled together.
inline QuadRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("quadrature needs n >= 1");
  QuadRule q;
  q.x.assign(n, 0.0);
  q.w.assign(n, 0.0);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double p1 = 0, pp = 0;
    for (int it = 0; it < 100; ++it) {
      p1 = 1.0;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    q.x[i] = -z;
    q.x[n - 1 - i] = z;
    double w = 2.0 / ((1.0 - z * z) * pp * pp);
    q.w[i] = w;
    q.w[n - 1 - i] = w;
  }
  return q;
}

/// Rule mapped affinely to [a, b].
inline QuadRule gauss_legendre(int n, double a, double b) {
  QuadRule q = gauss_legendre(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    q.x[i] = mid + half * q.x[i];
    q.w[i] *= half;
  }
  return q;
}

}  // namespace qpie
