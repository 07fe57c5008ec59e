#pragma once

#include <map>
#include <vector>

#include "perhf/lattice_bz.hpp"
#include "perhf/types.hpp"

namespace perhf {

/// Lattice-periodic density matrix stored as one Hermitian matrix per Bloch
/// fiber, expressed in that fiber's plane-wave basis.
struct PeriodicState {
  int ngrid = 1;
  std::vector<PlaneWaveBasis> bases;
  std::vector<CMatrix> fibers;

  std::size_t nk() const { return bases.size(); }

  static PeriodicState zero(int ngrid, std::vector<PlaneWaveBasis> bases);
  /// Same grid and bases, fibers replaced.
  PeriodicState with_fibers(std::vector<CMatrix> f) const;
};

/// ca * a + cb * b on identical bases.
PeriodicState combine(double ca, const PeriodicState &a, double cb,
                      const PeriodicState &b);

/// Throws invalid-parameter unless a and b share grid and bases.
void require_same_layout(const PeriodicState &a, const PeriodicState &b);

/// Fourier coefficients rho^(K) of a periodic density (or density difference).
class DensityCoeffs {
public:
  cplx at(const Miller &m) const;
  void add(const Miller &m, cplx v) { coeffs_[m] += v; }
  const std::map<Miller, cplx> &coeffs() const { return coeffs_; }
  /// Largest |component| of any stored m.
  int max_component() const;

private:
  std::map<Miller, cplx> coeffs_;
};

DensityCoeffs density_from_state(const PeriodicState &state);
double electron_count(const PeriodicState &state);
double kinetic_energy(const PeriodicState &state);

struct AdmissibilityReport {
  double hermiticity_defect = 0.0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  double electron_count = 0.0;
  bool passed = false;
};

/// Tolerances: Hermiticity 1e-12, spectrum within [-1e-10, 1 + 1e-10].
AdmissibilityReport check_admissible(const PeriodicState &state);

/// Union of all fiber bases, as Miller indices in lexicographic order.
std::vector<Miller> union_basis(const PeriodicState &state);

/// Resolution N = 4M + 1 of the real-space grid used for pointwise checks,
/// where M is the largest |m| component in any fiber basis.
int sampling_resolution(const PeriodicState &state);

/// Uniform grid x = (a, b, c)/N, x index slowest; row count N^3.
std::vector<Vec3> real_space_grid(int N);

/// Values of a band-limited periodic function with coefficients `f` on the grid.
std::vector<cplx> synthesize(const DensityCoeffs &f, int N);

/// Matrix of gamma~(x_i, x_j) = sum_xi w e^{-i xi.x} gamma_xi(x,y) e^{i xi.y}
/// on the N^3 grid.
CMatrix reduced_kernel_on_grid(const PeriodicState &state, int N);

/// Weight-summed fibers embedded in the union basis (the Fourier matrix of
/// gamma~), with the basis used.
CMatrix reduced_fourier_matrix(const PeriodicState &state,
                               const std::vector<Miller> &basis);

} // namespace perhf
