#include "perhf/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "perhf/error.hpp"

namespace perhf {

namespace {

// Momentum transfers below this norm are treated as exactly zero. Grid and
// lattice vectors are separated by at least 2pi/n, far above it.
constexpr double zero_transfer = 1e-9;

// Per-axis phase tables e^{2 pi i m x_d} for m in [-radius, radius].
struct PhaseTable {
  int radius;
  std::vector<cplx> e[3];

  PhaseTable(const Vec3 &x, int r) : radius(r) {
    for (int d = 0; d < 3; ++d) {
      e[d].resize(2 * r + 1);
      for (int m = -r; m <= r; ++m)
        e[d][m + r] = std::polar(1.0, two_pi * m * x[d]);
    }
  }
  cplx operator()(int a, int b, int c) const {
    return e[0][a + radius] * e[1][b + radius] * e[2][c + radius];
  }
};

bool on_reciprocal_lattice(const Vec3 &v) {
  for (int d = 0; d < 3; ++d) {
    const double c = v[d] / two_pi;
    if (std::abs(c - std::round(c)) > 1e-12)
      return false;
  }
  return true;
}

} // namespace

double green_fourier(const Miller &m, double h) {
  const int n2 = norm2(m);
  if (n2 == 0)
    return h;
  return 4.0 * pi / (two_pi * two_pi * n2);
}

double green_fourier(const Vec3 &K, double h) {
  Miller m{};
  for (int d = 0; d < 3; ++d) {
    const double c = K[d] / two_pi;
    const double r = std::round(c);
    if (std::abs(c - r) > 1e-9)
      throw Error(ErrorKind::invalid_parameter,
                  "green_fourier: K is not a reciprocal lattice vector");
    m[d] = static_cast<int>(r);
  }
  return green_fourier(m, h);
}

double green_series(const Vec3 &x, int radius) {
  const PhaseTable ph(x, radius);
  double s = 0.0;
  for (int a = -radius; a <= radius; ++a)
    for (int b = -radius; b <= radius; ++b)
      for (int c = -radius; c <= radius; ++c) {
        const int n2 = a * a + b * b + c * c;
        if (n2 == 0)
          continue;
        s += ph(a, b, c).real() / (pi * n2);
      }
  return s;
}

double green_eval(const Vec3 &x, double h, int radius) {
  return h + green_series(x, radius);
}

namespace {

// S is even in each coordinate and symmetric under axis permutations, so the
// grid minimum is found on 0 <= x1 <= x2 <= x3 <= 1/2.
double series_minimum(int radius, int grid) {
  double best = std::numeric_limits<double>::infinity();
  const int half = grid / 2;
  for (int i = 0; i <= half; ++i)
    for (int j = i; j <= half; ++j)
      for (int k = j; k <= half; ++k) {
        const Vec3 x(double(i) / grid, double(j) / grid, double(k) / grid);
        best = std::min(best, green_series(x, radius));
      }
  return best;
}

} // namespace

GreenKernel compute_h(int fourier_radius, int grid) {
  static std::mutex cache_mutex;
  static std::map<std::pair<int, int>, GreenKernel> cache;
  {
    std::lock_guard lock(cache_mutex);
    if (auto it = cache.find({fourier_radius, grid}); it != cache.end())
      return it->second;
  }
  if (fourier_radius < 8)
    throw Error(ErrorKind::invalid_parameter, "compute_h: radius must be >= 8");
  if (grid < 2)
    throw Error(ErrorKind::invalid_parameter, "compute_h: grid must be >= 2");
  const double h = -series_minimum(fourier_radius, grid);
  const double h2 = -series_minimum(2 * fourier_radius, grid);
  GreenKernel kernel{h, fourier_radius, std::abs(h - h2)};
  if (!(h > 0.0) || kernel.truncation_error > 1e-2 * h)
    throw Error(ErrorKind::truncation_error,
                "compute_h: Fourier synthesis of G not converged at radius " +
                    std::to_string(fourier_radius));
  std::lock_guard lock(cache_mutex);
  cache.emplace(std::pair{fourier_radius, grid}, kernel);
  return kernel;
}

cplx w_eval(const Vec3 &eta, const Vec3 &x, int radius) {
  if (on_reciprocal_lattice(eta))
    throw Error(ErrorKind::singular_argument,
                "w_eval: eta lies on the reciprocal lattice");
  const PhaseTable ph(x, radius);
  cplx s = 0.0;
  for (int a = -radius; a <= radius; ++a)
    for (int b = -radius; b <= radius; ++b)
      for (int c = -radius; c <= radius; ++c) {
        const Vec3 q = eta - to_cartesian({a, b, c});
        s += ph(a, b, c) / q.squaredNorm();
      }
  return 4.0 * pi * std::polar(1.0, -eta.dot(x)) * s;
}

cplx w_regular_part(const Vec3 &xi, const Vec3 &x, int radius) {
  // Sum of e^{iK.x}(1/|xi-K|^2 - 1/|K|^2) over K != 0: the m = 0 pole and
  // the Green kernel cancel term by term, which keeps f exact at xi -> 0.
  const PhaseTable ph(x, radius);
  cplx s = 0.0;
  for (int a = -radius; a <= radius; ++a)
    for (int b = -radius; b <= radius; ++b)
      for (int c = -radius; c <= radius; ++c) {
        if (a == 0 && b == 0 && c == 0)
          continue;
        const Vec3 K = to_cartesian({a, b, c});
        s += ph(a, b, c) * (1.0 / (xi - K).squaredNorm() - 1.0 / K.squaredNorm());
      }
  return 4.0 * pi * s;
}

SingularCorrection singular_average(int n) {
  if (n < 1)
    throw Error(ErrorKind::invalid_parameter, "singular_average: n must be >= 1");
  // Integrating 1/r^2 radially up to the cube surface turns the cell integral
  // into 6 * int_{[-1,1]^2} dy dz / (1 + y^2 + z^2) for the unit cube [-1,1]^3.
  using boost::math::quadrature::gauss_kronrod;
  double inner_error_max = 0.0;
  auto inner = [&](double y) {
    double err = 0.0;
    const double v = gauss_kronrod<double, 31>::integrate(
        [y](double z) { return 1.0 / (1.0 + y * y + z * z); }, -1.0, 1.0, 15,
        1e-13, &err);
    inner_error_max = std::max(inner_error_max, err);
    return v;
  };
  double outer_error = 0.0;
  const double face =
      gauss_kronrod<double, 31>::integrate(inner, -1.0, 1.0, 15, 1e-13, &outer_error);
  const double unit_cube = 6.0 * face;
  const double rel_error = (outer_error + 2.0 * inner_error_max) / face;
  if (!std::isfinite(unit_cube) || rel_error > 1e-4)
    throw Error(ErrorKind::numerical_integration_failure,
                "singular_average: quadrature did not converge");
  // Cell [-pi, pi)^3 has half-width pi: integral of 1/q^2 = pi * unit_cube.
  // v0(1) = 4pi / (2pi)^3 * pi * unit_cube = unit_cube / (2pi).
  const double v0_unit = unit_cube / two_pi;
  return {v0_unit * n * n, n};
}

double coulomb_factor(const Vec3 &q, double v0) {
  const double q2 = q.squaredNorm();
  if (q2 < zero_transfer * zero_transfer)
    return v0;
  return 4.0 * pi / q2;
}

double Nuclei::form_factor(const Miller &m) const {
  if (kind == Kind::point)
    return 1.0;
  const double k2 = to_cartesian(m).squaredNorm();
  return std::exp(-0.5 * sigma * sigma * k2);
}

} // namespace perhf
