#pragma once

#include "perhf/types.hpp"

namespace perhf {

/// Periodic Green kernel G(x) = h + sum_{K != 0} 4pi/|K|^2 e^{iK.x}, min G = 0.
struct GreenKernel {
  double h = 0.0;
  int realspace_cutoff = 0; // Fourier truncation radius (max |m| component)
  double truncation_error = 0.0; // |h(r) - h(2r)|
};

/// Value standing in for 4pi/|q|^2 at q = 0 on a k-grid of order n.
struct SingularCorrection {
  double v0 = 0.0;
  int n = 1;
};

/// Fourier coefficient of G at K = 2*pi*m: h at m = 0, else 4pi/|K|^2.
double green_fourier(const Miller &m, double h);
/// Same for a Cartesian K; throws invalid-parameter if K is off the lattice.
double green_fourier(const Vec3 &K, double h);

/// Truncated synthesis S(x) = sum_{0 < |m|_inf <= radius} 4pi/|K|^2 e^{iK.x}.
double green_series(const Vec3 &x, int radius);

/// Evaluates h = -min_x S(x) on a uniform grid of resolution `grid` over the
/// cell (corner included when `grid` is even). Also evaluates at 2*radius and
/// throws truncation-error when |h(r) - h(2r)| > 1e-2 h(r).
GreenKernel compute_h(int fourier_radius = 32, int grid = 8);

/// G(x) synthesized with the given truncation radius.
double green_eval(const Vec3 &x, double h, int radius);

/// W(eta, x) = 4pi e^{-i eta.x} sum_{|m|_inf <= radius} e^{iK.x}/|eta - K|^2.
cplx w_eval(const Vec3 &eta, const Vec3 &x, int radius = 32);

/// Regular remainder f(xi, x) of W after removing the 4pi/|xi|^2 pole and
/// the Green kernel: W e^{i xi.x} = 4pi/|xi|^2 + G(x) - h + f(xi, x).
cplx w_regular_part(const Vec3 &xi, const Vec3 &x, int radius = 32);

/// v0(n) = n^3/(2pi)^3 * integral over [-pi/n, pi/n)^3 of 4pi/|q|^2.
SingularCorrection singular_average(int n);

/// Coulomb factor used by the discrete exchange: 4pi/|q|^2, or v0 at q = 0.
double coulomb_factor(const Vec3 &q, double v0);

} // namespace perhf
