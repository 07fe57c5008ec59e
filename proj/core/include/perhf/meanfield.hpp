#pragma once

#include <vector>

#include "perhf/state.hpp"
#include "perhf/types.hpp"

namespace perhf {

/// One Bloch fiber of the mean-field operator, split by origin.
struct FockFiber {
  CMatrix kinetic;
  CMatrix external;
  CMatrix hartree;
  CMatrix exchange; // already carries its minus sign
  CMatrix total;
};

struct FockOperator {
  std::vector<PlaneWaveBasis> bases;
  std::vector<FockFiber> fibers;
};

/// Per fiber: ascending eigenvalues and the matching orthonormal eigenvectors
/// (columns, in the fiber's plane-wave basis).
struct SpectrumTable {
  std::vector<PlaneWaveBasis> bases;
  std::vector<RVector> values;
  std::vector<CMatrix> vectors;

  std::size_t nk() const { return values.size(); }
};

/// Assembles H_gamma, the exact derivative of total_energy at `state`.
FockOperator assemble_fock(const PeriodicState &state, const Model &model);

/// Throws numerical-failure (with the fiber index) if an eigensolve fails.
SpectrumTable diagonalize(const FockOperator &fock);

/// sum_xi w_xi tr[(H)_xi d_xi], the first-order change of the energy along d.
double linear_response(const FockOperator &fock, const PeriodicState &delta);

/// max_xi ||[H_xi, gamma_xi]||_F.
double commutator_residual(const FockOperator &fock, const PeriodicState &state);

/// Largest spectral norm of the exchange block over the grid.
double exchange_block_norm(const FockOperator &fock);

/// Largest |lambda_k(xi) - lambda_k(xi')| / |xi - xi'|^{1/2} over grid
/// neighbours (one step along one axis, no zone wrap) and bands k < nbands.
/// Bands are matched by ascending order.
double band_holder_constant(const SpectrumTable &spectrum, int ngrid, int nbands);

} // namespace perhf
