#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>

#include <Eigen/Core>

namespace perhf {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

/// Integer coordinates m of a reciprocal lattice vector K = 2*pi*m.
using Miller = std::array<int, 3>;

inline Miller operator+(const Miller &a, const Miller &b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Miller operator-(const Miller &a, const Miller &b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Miller operator-(const Miller &a) { return {-a[0], -a[1], -a[2]}; }

inline Vec3 to_cartesian(const Miller &m) {
  return two_pi * Vec3(m[0], m[1], m[2]);
}

inline int norm2(const Miller &m) {
  return m[0] * m[0] + m[1] * m[1] + m[2] * m[2];
}

/// Packs a Miller triple into one key; components must lie in [-2^20, 2^20).
inline std::uint64_t miller_key(const Miller &m) {
  constexpr std::uint64_t off = 1u << 20;
  return ((static_cast<std::uint64_t>(m[0] + off)) << 42) |
         ((static_cast<std::uint64_t>(m[1] + off)) << 21) |
         static_cast<std::uint64_t>(m[2] + off);
}

enum class Mode { hf, reduced };

struct Nuclei {
  enum class Kind { point, smeared };
  Kind kind = Kind::point;
  double sigma = 0.0; // Gaussian width for smeared nuclei (bohr)

  static Nuclei point() { return {}; }
  static Nuclei smeared(double s) { return {Kind::smeared, s}; }
  /// Fourier coefficient of the nuclear charge distribution at K = 2*pi*m.
  double form_factor(const Miller &m) const;
};

/// Physical constants of one periodic Hartree-Fock problem.
struct Model {
  double Z = 1.0;
  double h = 0.0;  // zero mode of the periodic Green kernel
  double v0 = 0.0; // regularized Coulomb factor at zero momentum transfer
  Mode mode = Mode::hf;
  Nuclei nuclei{};
  /// Test mode: drops external, Hartree and exchange terms (free particles).
  bool potentials = true;

  bool with_exchange() const { return potentials && mode == Mode::hf; }
};

} // namespace perhf
