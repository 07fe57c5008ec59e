#include "perhf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "perhf/energy.hpp"
#include "perhf/error.hpp"
#include "perhf/lattice_bz.hpp"
#include "perhf/meanfield.hpp"
#include "perhf/verify.hpp"

namespace perhf {

namespace {

PeriodicState single_fiber(const PlaneWaveBasis &basis, CMatrix g) {
  PeriodicState s;
  s.ngrid = 1;
  s.bases = {basis};
  s.fibers = {std::move(g)};
  return s;
}

double energy_of(const PlaneWaveBasis &basis, const CMatrix &g, const Model &m) {
  return total_energy(single_fiber(basis, g), m).total;
}

CMatrix fock_of(const PlaneWaveBasis &basis, const CMatrix &g, const Model &m) {
  return assemble_fock(single_fiber(basis, g), m).fibers[0].total;
}

/// Riemannian gradient descent on the unit sphere for E(|v><v|).
double polish_vector(const PlaneWaveBasis &basis, CVector &v, const Model &m) {
  double e = energy_of(basis, v * v.adjoint(), m);
  double step = 0.1;
  for (int it = 0; it < 20000; ++it) {
    const CMatrix H = fock_of(basis, v * v.adjoint(), m);
    const CVector Hv = H * v;
    const CVector g = Hv - v * (v.adjoint() * Hv)(0, 0);
    const double gn = g.squaredNorm();
    if (gn < 1e-26)
      break;
    bool moved = false;
    while (step > 1e-16) {
      CVector trial = (v - step * g).normalized();
      const double et = energy_of(basis, trial * trial.adjoint(), m);
      // dE along -g is -2|g|^2 for E(vv*) with gradient 2 g.
      if (et <= e - 0.5 * step * gn) {
        v = trial;
        e = et;
        step *= 1.5;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved)
      break;
  }
  return e;
}

CMatrix project_density(const CMatrix &g, double Z) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (g + g.adjoint()));
  const auto occ = project_occupations({es.eigenvalues()}, {1.0}, Z);
  const CMatrix &U = es.eigenvectors();
  return U * occ[0].cast<cplx>().asDiagonal() * U.adjoint();
}

double projected_descent(const PlaneWaveBasis &basis, CMatrix g, double Z,
                         const Model &m) {
  g = project_density(g, Z);
  double e = energy_of(basis, g, m);
  double step = 0.1;
  for (int it = 0; it < 20000; ++it) {
    const CMatrix H = fock_of(basis, g, m);
    bool moved = false;
    while (step > 1e-16) {
      const CMatrix trial = project_density(g - step * H, Z);
      const CMatrix d = trial - g;
      const double et = energy_of(basis, trial, m);
      if (et <= e - 1e-4 / step * d.squaredNorm()) {
        const double change = e - et;
        g = trial;
        e = et;
        step = std::min(step * 1.5, 1e3);
        moved = change > 1e-15 || d.norm() > 1e-13;
        break;
      }
      step *= 0.5;
    }
    if (!moved)
      break;
  }
  return e;
}

} // namespace

OracleResult brute_force_oracle(const ScfConfig &config, const Model &model,
                                int samples, int starts) {
  if (config.ngrid != 1 || std::abs(config.Z - 1.0) > 1e-12)
    throw Error(ErrorKind::invalid_parameter, "oracle needs ngrid = 1 and Z = 1");
  const auto basis = build_basis(build_kgrid(1).front(), config.ecut);
  const auto B = Eigen::Index(basis.size());
  if (B > 7)
    throw Error(ErrorKind::invalid_parameter, "oracle needs at most 7 plane waves");

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> gauss;
  auto random_vector = [&] {
    CVector v(B);
    for (Eigen::Index i = 0; i < B; ++i)
      v[i] = cplx(gauss(rng), gauss(rng));
    return CVector(v.normalized());
  };

  OracleResult res;
  res.samples = samples;
  std::vector<std::pair<double, CVector>> pool;
  for (int i = 0; i < samples; ++i) {
    CVector v = random_vector();
    pool.emplace_back(energy_of(basis, v * v.adjoint(), model), v);
  }
  for (Eigen::Index i = 0; i < B; ++i) {
    CVector e = CVector::Zero(B);
    e[i] = 1.0;
    pool.emplace_back(energy_of(basis, e * e.adjoint(), model), e);
  }
  std::sort(pool.begin(), pool.end(),
            [](const auto &a, const auto &b) { return a.first < b.first; });
  res.projector_min = std::numeric_limits<double>::infinity();
  const std::size_t keep = std::min<std::size_t>(pool.size(), 12);
  for (std::size_t i = 0; i < keep; ++i) {
    CVector v = pool[i].second;
    const double e = polish_vector(basis, v, model);
    if (e < res.projector_min) {
      res.projector_min = e;
      res.best_vector = v;
    }
  }

  res.relaxed_min = std::numeric_limits<double>::infinity();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int s = 0; s < starts; ++s) {
    CMatrix A(B, B);
    for (Eigen::Index j = 0; j < B; ++j)
      for (Eigen::Index i = 0; i < B; ++i)
        A(i, j) = cplx(gauss(rng), gauss(rng));
    CMatrix g = A * A.adjoint();
    g /= g.trace().real();
    res.relaxed_min = std::min(res.relaxed_min,
                               projected_descent(basis, g, config.Z, model));
  }
  return res;
}

} // namespace perhf
