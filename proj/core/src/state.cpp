#include "perhf/state.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Eigenvalues>

#include "perhf/error.hpp"

namespace perhf {

PeriodicState PeriodicState::zero(int ngrid, std::vector<PlaneWaveBasis> bases) {
  PeriodicState s;
  s.ngrid = ngrid;
  s.fibers.reserve(bases.size());
  for (const auto &b : bases)
    s.fibers.push_back(CMatrix::Zero(b.size(), b.size()));
  s.bases = std::move(bases);
  return s;
}

PeriodicState PeriodicState::with_fibers(std::vector<CMatrix> f) const {
  if (f.size() != bases.size())
    throw Error(ErrorKind::invalid_parameter, "fiber count does not match grid");
  PeriodicState s;
  s.ngrid = ngrid;
  s.bases = bases;
  s.fibers = std::move(f);
  return s;
}

void require_same_layout(const PeriodicState &a, const PeriodicState &b) {
  if (a.ngrid != b.ngrid || a.nk() != b.nk())
    throw Error(ErrorKind::invalid_parameter, "states live on different k-grids");
  for (std::size_t k = 0; k < a.nk(); ++k)
    if (!(a.bases[k] == b.bases[k]))
      throw Error(ErrorKind::invalid_parameter, "states use different fiber bases");
}

PeriodicState combine(double ca, const PeriodicState &a, double cb,
                      const PeriodicState &b) {
  require_same_layout(a, b);
  std::vector<CMatrix> f(a.nk());
  for (std::size_t k = 0; k < a.nk(); ++k)
    f[k] = ca * a.fibers[k] + cb * b.fibers[k];
  return a.with_fibers(std::move(f));
}

cplx DensityCoeffs::at(const Miller &m) const {
  auto it = coeffs_.find(m);
  return it == coeffs_.end() ? cplx{} : it->second;
}

int DensityCoeffs::max_component() const {
  int M = 0;
  for (const auto &[m, v] : coeffs_)
    for (int d = 0; d < 3; ++d)
      M = std::max(M, std::abs(m[d]));
  return M;
}

DensityCoeffs density_from_state(const PeriodicState &state) {
  DensityCoeffs rho;
  for (std::size_t k = 0; k < state.nk(); ++k) {
    const auto &basis = state.bases[k];
    const auto &g = state.fibers[k];
    const double w = basis.weight();
    for (std::size_t i = 0; i < basis.size(); ++i)
      for (std::size_t j = 0; j < basis.size(); ++j)
        rho.add(basis.kvecs()[i] - basis.kvecs()[j], w * g(i, j));
  }
  return rho;
}

double electron_count(const PeriodicState &state) {
  double n = 0.0;
  for (std::size_t k = 0; k < state.nk(); ++k)
    n += state.bases[k].weight() * state.fibers[k].trace().real();
  return n;
}

double kinetic_energy(const PeriodicState &state) {
  double t = 0.0;
  for (std::size_t k = 0; k < state.nk(); ++k) {
    const auto &basis = state.bases[k];
    double fiber = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i)
      fiber += basis.kinetic(i) * state.fibers[k](i, i).real();
    t += basis.weight() * fiber;
  }
  return t;
}

AdmissibilityReport check_admissible(const PeriodicState &state) {
  AdmissibilityReport r;
  r.min_eigenvalue = state.nk() ? 1e300 : 0.0;
  r.max_eigenvalue = state.nk() ? -1e300 : 0.0;
  for (const auto &g : state.fibers) {
    if (g.size() == 0)
      continue;
    r.hermiticity_defect =
        std::max(r.hermiticity_defect, (g - g.adjoint()).cwiseAbs().maxCoeff());
    const CMatrix herm = 0.5 * (g + g.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
    r.min_eigenvalue = std::min(r.min_eigenvalue, es.eigenvalues().minCoeff());
    r.max_eigenvalue = std::max(r.max_eigenvalue, es.eigenvalues().maxCoeff());
  }
  r.electron_count = electron_count(state);
  r.passed = r.hermiticity_defect <= 1e-12 && r.min_eigenvalue >= -1e-10 &&
             r.max_eigenvalue <= 1.0 + 1e-10;
  return r;
}

std::vector<Miller> union_basis(const PeriodicState &state) {
  std::set<Miller> all;
  for (const auto &b : state.bases)
    all.insert(b.kvecs().begin(), b.kvecs().end());
  return {all.begin(), all.end()};
}

int sampling_resolution(const PeriodicState &state) {
  int M = 0;
  for (const auto &b : state.bases)
    for (const auto &m : b.kvecs())
      for (int d = 0; d < 3; ++d)
        M = std::max(M, std::abs(m[d]));
  return 4 * M + 1;
}

std::vector<Vec3> real_space_grid(int N) {
  std::vector<Vec3> pts;
  pts.reserve(static_cast<std::size_t>(N) * N * N);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      for (int c = 0; c < N; ++c)
        pts.emplace_back(double(a) / N, double(b) / N, double(c) / N);
  return pts;
}

namespace {

// e^{2 pi i m j / N} for j in [0, N), m in [-M, M].
cplx grid_phase(int m, int j, int N) {
  return std::polar(1.0, two_pi * double((static_cast<long>(m) * j) % N) / N);
}

CMatrix plane_wave_matrix(const std::vector<Miller> &basis, int N) {
  CMatrix E(static_cast<Eigen::Index>(N) * N * N, basis.size());
  for (std::size_t p = 0; p < basis.size(); ++p) {
    const auto &m = basis[p];
    Eigen::Index row = 0;
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b)
        for (int c = 0; c < N; ++c)
          E(row++, p) = grid_phase(m[0], a, N) * grid_phase(m[1], b, N) *
                        grid_phase(m[2], c, N);
  }
  return E;
}

} // namespace

std::vector<cplx> synthesize(const DensityCoeffs &f, int N) {
  std::vector<cplx> values(static_cast<std::size_t>(N) * N * N, cplx{});
  for (const auto &[m, v] : f.coeffs()) {
    if (v == cplx{})
      continue;
    std::size_t row = 0;
    for (int a = 0; a < N; ++a) {
      const cplx pa = v * grid_phase(m[0], a, N);
      for (int b = 0; b < N; ++b) {
        const cplx pb = pa * grid_phase(m[1], b, N);
        for (int c = 0; c < N; ++c)
          values[row++] += pb * grid_phase(m[2], c, N);
      }
    }
  }
  return values;
}

CMatrix reduced_fourier_matrix(const PeriodicState &state,
                               const std::vector<Miller> &basis) {
  std::map<Miller, int> pos;
  for (std::size_t i = 0; i < basis.size(); ++i)
    pos[basis[i]] = static_cast<int>(i);
  CMatrix A = CMatrix::Zero(basis.size(), basis.size());
  for (std::size_t k = 0; k < state.nk(); ++k) {
    const auto &b = state.bases[k];
    std::vector<int> map(b.size());
    for (std::size_t i = 0; i < b.size(); ++i)
      map[i] = pos.at(b.kvecs()[i]);
    for (std::size_t i = 0; i < b.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j)
        A(map[i], map[j]) += b.weight() * state.fibers[k](i, j);
  }
  return A;
}

CMatrix reduced_kernel_on_grid(const PeriodicState &state, int N) {
  const auto basis = union_basis(state);
  const CMatrix A = reduced_fourier_matrix(state, basis);
  const CMatrix E = plane_wave_matrix(basis, N);
  return E * A * E.adjoint();
}

} // namespace perhf
