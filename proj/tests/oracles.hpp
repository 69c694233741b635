#pragma once
// Slow reference implementations used only to cross-check the library.
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "latdisp/lattice.hpp"

namespace oracle {

using cplx = std::complex<double>;
constexpr double pi = 3.141592653589793238462643383279502884;

// h^2 sum_n f(hn) exp(-i h n . xi_k), straight double sum (d = 2)
inline std::vector<cplx> direct_dft(const latdisp::ComplexField& f) {
  const auto& g = f.grid();
  const int m = g.points_per_axis();
  const double h = g.mesh(), L = g.period();
  std::vector<cplx> out(static_cast<std::size_t>(m) * m);
  for (int k1 = 0; k1 < m; ++k1)
    for (int k2 = 0; k2 < m; ++k2) {
      const double xi1 = 2 * pi * g.signed_index(k1) / L, xi2 = 2 * pi * g.signed_index(k2) / L;
      cplx acc = 0;
      for (int n1 = 0; n1 < m; ++n1)
        for (int n2 = 0; n2 < m; ++n2)
          acc += f[static_cast<std::size_t>(n1) * m + n2] * std::polar(1.0, -h * (n1 * xi1 + n2 * xi2));
      out[static_cast<std::size_t>(k1) * m + k2] = h * h * acc;
    }
  return out;
}

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (z * p1 - p0) / (z * z - 1.0);
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

// Tensor Gauss-Legendre quadrature of f over [a1,b1] x [a2,b2] split into
// panels x panels squares with n nodes per axis per panel.
inline cplx panel_quadrature(const std::function<cplx(double, double)>& f, double a1, double b1, double a2,
                             double b2, int panels, int n) {
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  const double d1 = (b1 - a1) / panels, d2 = (b2 - a2) / panels;
  cplx acc = 0;
  for (int p = 0; p < panels; ++p)
    for (int q = 0; q < panels; ++q)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double u = a1 + d1 * (p + 0.5 * (x[i] + 1.0));
          const double v = a2 + d2 * (q + 0.5 * (x[j] + 1.0));
          acc += w[i] * w[j] * f(u, v);
        }
  return acc * (0.25 * d1 * d2);
}

}  // namespace oracle
