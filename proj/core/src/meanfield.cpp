#include "perhf/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "perhf/energy.hpp"
#include "perhf/error.hpp"
#include "perhf/kernels.hpp"
#include "perhf/parallel.hpp"

namespace perhf {

FockOperator assemble_fock(const PeriodicState &state, const Model &model) {
  FockOperator fock;
  fock.bases = state.bases;
  fock.fibers.resize(state.nk());
  const DensityCoeffs rho =
      model.potentials ? density_from_state(state) : DensityCoeffs{};

  parallel_for(state.nk(), [&](std::size_t k) {
    const auto &basis = state.bases[k];
    const auto B = static_cast<Eigen::Index>(basis.size());
    FockFiber f;
    f.kinetic = CMatrix::Zero(B, B);
    f.external = CMatrix::Zero(B, B);
    f.hartree = CMatrix::Zero(B, B);
    f.exchange = CMatrix::Zero(B, B);
    for (Eigen::Index i = 0; i < B; ++i)
      f.kinetic(i, i) = basis.kinetic(i);

    if (model.potentials) {
      for (Eigen::Index i = 0; i < B; ++i)
        for (Eigen::Index j = 0; j < B; ++j) {
          const Miller d = basis.kvecs()[i] - basis.kvecs()[j];
          const double g = green_fourier(d, model.h);
          f.hartree(i, j) = g * rho.at(d);
          f.external(i, j) = -model.Z * g * model.nuclei.form_factor(d);
        }
    }

    if (model.with_exchange()) {
      for (std::size_t kp = 0; kp < state.nk(); ++kp) {
        const auto &other = state.bases[kp];
        const CMatrix &g = state.fibers[kp];
        if (g.size() == 0 || g.isZero(0.0))
          continue;
        const auto groups = transfer_groups(basis, other);
        const Vec3 dxi = basis.xi() - other.xi();
        for (std::size_t s = 0; s < groups.shifts.size(); ++s) {
          const double V =
              other.weight() *
              coulomb_factor(dxi + to_cartesian(groups.shifts[s]), model.v0);
          for (const auto &[i, ip] : groups.pairs[s])
            for (const auto &[j, jp] : groups.pairs[s])
              f.exchange(i, j) -= V * g(ip, jp);
        }
      }
    }
    f.total = f.kinetic + f.external + f.hartree + f.exchange;
    fock.fibers[k] = std::move(f);
  });
  return fock;
}

SpectrumTable diagonalize(const FockOperator &fock) {
  SpectrumTable table;
  table.bases = fock.bases;
  table.values.resize(fock.fibers.size());
  table.vectors.resize(fock.fibers.size());
  parallel_for(fock.fibers.size(), [&](std::size_t k) {
    const CMatrix &H = fock.fibers[k].total;
    if (H.size() == 0) {
      table.values[k] = RVector(0);
      table.vectors[k] = CMatrix(0, 0);
      return;
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (H + H.adjoint()));
    if (es.info() != Eigen::Success)
      throw Error(ErrorKind::numerical_failure,
                  "eigensolver failed on fiber " + std::to_string(k));
    table.values[k] = es.eigenvalues();
    table.vectors[k] = es.eigenvectors();
  });
  return table;
}

double linear_response(const FockOperator &fock, const PeriodicState &delta) {
  double s = 0.0;
  for (std::size_t k = 0; k < delta.nk(); ++k)
    s += delta.bases[k].weight() *
         (fock.fibers[k].total.cwiseProduct(delta.fibers[k].transpose())).sum().real();
  return s;
}

double commutator_residual(const FockOperator &fock, const PeriodicState &state) {
  double r = 0.0;
  for (std::size_t k = 0; k < state.nk(); ++k) {
    const CMatrix &H = fock.fibers[k].total;
    const CMatrix &g = state.fibers[k];
    r = std::max(r, (H * g - g * H).norm());
  }
  return r;
}

double exchange_block_norm(const FockOperator &fock) {
  double n = 0.0;
  for (const auto &f : fock.fibers) {
    if (f.exchange.size() == 0)
      continue;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(
        0.5 * (f.exchange + f.exchange.adjoint()), Eigen::EigenvaluesOnly);
    n = std::max(n, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  return n;
}

double band_holder_constant(const SpectrumTable &spectrum, int ngrid, int nbands) {
  auto index = [ngrid](int a, int b, int c) {
    return (static_cast<std::size_t>(a) * ngrid + b) * ngrid + c;
  };
  double C = 0.0;
  for (int a = 0; a < ngrid; ++a)
    for (int b = 0; b < ngrid; ++b)
      for (int c = 0; c < ngrid; ++c) {
        const auto k = index(a, b, c);
        const int next[3][3] = {{a + 1, b, c}, {a, b + 1, c}, {a, b, c + 1}};
        for (const auto &n : next) {
          if (n[0] >= ngrid || n[1] >= ngrid || n[2] >= ngrid)
            continue;
          const auto kp = index(n[0], n[1], n[2]);
          const double dist =
              (spectrum.bases[k].xi() - spectrum.bases[kp].xi()).norm();
          const auto nb = std::min<Eigen::Index>(
              {Eigen::Index(nbands), spectrum.values[k].size(),
               spectrum.values[kp].size()});
          for (Eigen::Index band = 0; band < nb; ++band)
            C = std::max(C, std::abs(spectrum.values[k][band] -
                                     spectrum.values[kp][band]) /
                                std::sqrt(dist));
        }
      }
  return C;
}

} // namespace perhf
