#pragma once

#include <functional>
#include <vector>

#include "perhf/state.hpp"
#include "perhf/types.hpp"

namespace perhf {

/// Energy terms in Hartree; hartree = D(rho,rho)/2 and exchange = X(g,g)/2.
struct EnergyBreakdown {
  double kinetic = 0.0;
  double external = 0.0;
  double hartree = 0.0;
  double exchange = 0.0;
  double total = 0.0;
};

/// D(f, g) = sum_K G^(K) f^(K) conj(g^(K)).
double coulomb_bilinear(const DensityCoeffs &f, const DensityCoeffs &g, double h);

/// -Z sum_K G^(K) m^(K) conj(rho^(K)) with m^ the nuclear form factor.
double external_energy(const DensityCoeffs &rho, double Z, double h,
                       const Nuclei &nuclei);

/// Index pairs (i in fiber a, i' in fiber b) grouped by D = K_i - K_i'.
/// Exchange sums couple (i, j) of one fiber with (i', j') of the other only
/// when both pairs carry the same D.
struct TransferGroups {
  std::vector<Miller> shifts;
  std::vector<std::vector<std::pair<int, int>>> pairs;
};
TransferGroups transfer_groups(const PlaneWaveBasis &a, const PlaneWaveBasis &b);

/// Kernel of an exchange-type form: value for momentum transfer
/// q = (xi + K) - (xi' + K') whose lattice part is D = K - K'.
using ExchangeKernel = std::function<double(const Vec3 &q, const Miller &D)>;

/// sum_{xi,xi'} w w' sum a_xi(P,Q) conj(b_xi'(P',Q')) V(q), P-P' = Q-Q'.
double exchange_form(const PeriodicState &a, const PeriodicState &b,
                     const ExchangeKernel &kernel);

/// Discrete X(a, b) with V(q) = 4pi/|q|^2 and V(0) = v0.
double exchange_energy(const PeriodicState &a, const PeriodicState &b, double v0);

/// X_G(a, a): exchange with the xi-independent Green kernel G(x - y).
double exchange_energy_G(const PeriodicState &a, double h);

/// Same quantity as a real-space double sum of G(x-y)|gamma~(x,y)|^2 on a grid
/// of resolution N >= sampling_resolution(a).
double exchange_energy_G_realspace(const PeriodicState &a, double h, int N);

EnergyBreakdown total_energy(const PeriodicState &state, const Model &model);

/// D(rho_d, rho_d) - X(d, d) (exchange dropped in reduced mode): twice the
/// coefficient of t^2 in E(gamma + t d).
double curvature(const PeriodicState &delta, const Model &model);

} // namespace perhf
