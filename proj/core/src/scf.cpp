#include "perhf/scf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "perhf/error.hpp"
#include "perhf/kernels.hpp"
#include "perhf/lattice_bz.hpp"

namespace perhf {

void validate(const ScfConfig &c) {
  auto fail = [](const std::string &what) {
    throw Error(ErrorKind::invalid_parameter, what);
  };
  if (!(c.Z > 0.0) || !std::isfinite(c.Z))
    fail("Z must be positive");
  if (!(c.ecut > 0.0) || !std::isfinite(c.ecut))
    fail("ecut must be positive");
  if (c.ngrid < 1)
    fail("ngrid must be at least 1");
  if (c.max_iter < 1)
    fail("max_iter must be at least 1");
  if (!(c.tol_residual > 0.0) || !(c.tol_energy > 0.0))
    fail("tolerances must be positive");
  if (!(c.degeneracy_tol >= 0.0))
    fail("degeneracy_tol must be nonnegative");
  if (c.damping.kind == Damping::Kind::fixed &&
      !(c.damping.t > 0.0 && c.damping.t <= 1.0))
    fail("fixed damping needs 0 < t <= 1");
  if (c.nuclei.kind == Nuclei::Kind::smeared && !(c.nuclei.sigma > 0.0))
    fail("smeared nuclei need sigma > 0");
}

Model make_model(const ScfConfig &config) {
  validate(config);
  Model m;
  m.Z = config.Z;
  m.mode = config.mode;
  m.nuclei = config.nuclei;
  m.potentials = config.potentials;
  m.h = compute_h().h;
  m.v0 = singular_average(config.ngrid).v0;
  return m;
}

double counting_function(const SpectrumTable &spectrum, double kappa) {
  double c = 0.0;
  for (std::size_t k = 0; k < spectrum.nk(); ++k) {
    const auto &v = spectrum.values[k];
    const auto below = std::upper_bound(v.data(), v.data() + v.size(), kappa) - v.data();
    c += spectrum.bases[k].weight() * static_cast<double>(below);
  }
  return c;
}

namespace {

struct Level {
  double lambda;
  double weight;
  std::size_t k;
  Eigen::Index band;
};

PeriodicState state_from_occupations(int ngrid, const SpectrumTable &spectrum,
                                     const std::vector<RVector> &occ) {
  std::vector<CMatrix> fibers(spectrum.nk());
  for (std::size_t k = 0; k < spectrum.nk(); ++k) {
    const CMatrix &U = spectrum.vectors[k];
    fibers[k] = U * occ[k].cast<cplx>().asDiagonal() * U.adjoint();
    fibers[k] = 0.5 * (fibers[k] + fibers[k].adjoint()).eval();
  }
  PeriodicState s;
  s.ngrid = ngrid;
  s.bases = spectrum.bases;
  s.fibers = std::move(fibers);
  return s;
}

int grid_order(std::size_t nk) {
  return static_cast<int>(std::lround(std::cbrt(static_cast<double>(nk))));
}

} // namespace

AufbauResult aufbau_fill(const SpectrumTable &spectrum, double Z,
                         double degeneracy_tol) {
  std::vector<Level> levels;
  for (std::size_t k = 0; k < spectrum.nk(); ++k)
    for (Eigen::Index b = 0; b < spectrum.values[k].size(); ++b)
      levels.push_back({spectrum.values[k][b], spectrum.bases[k].weight(), k, b});
  std::stable_sort(levels.begin(), levels.end(),
                   [](const Level &a, const Level &b) { return a.lambda < b.lambda; });

  double total = 0.0;
  std::size_t top = levels.size();
  for (std::size_t i = 0; i < levels.size(); ++i) {
    total += levels[i].weight;
    if (total >= Z - 1e-12) {
      top = i;
      break;
    }
  }
  if (top == levels.size())
    throw Error(ErrorKind::capacity_error,
                "basis holds " + std::to_string(total) + " electrons, need " +
                    std::to_string(Z));

  const double lstar = levels[top].lambda;
  double below = 0.0, cap = 0.0, shell_max = lstar;
  int nshell = 0;
  double above = std::numeric_limits<double>::infinity();
  for (const auto &l : levels) {
    if (l.lambda < lstar - degeneracy_tol) {
      below += l.weight;
    } else if (l.lambda <= lstar + degeneracy_tol) {
      cap += l.weight;
      shell_max = std::max(shell_max, l.lambda);
      ++nshell;
    } else {
      above = std::min(above, l.lambda);
    }
  }
  double f = std::clamp((Z - below) / cap, 0.0, 1.0);
  const bool full = f >= 1.0 - 1e-12;
  if (full)
    f = 1.0;

  AufbauResult r;
  r.shell = {lstar, f, cap, nshell, !full};
  if (full)
    r.mu = std::isfinite(above) ? 0.5 * (shell_max + above) : lstar;
  else
    r.mu = lstar;

  r.occupations.resize(spectrum.nk());
  for (std::size_t k = 0; k < spectrum.nk(); ++k) {
    const auto &v = spectrum.values[k];
    RVector o(v.size());
    for (Eigen::Index b = 0; b < v.size(); ++b) {
      if (v[b] < lstar - degeneracy_tol)
        o[b] = 1.0;
      else if (v[b] <= lstar + degeneracy_tol)
        o[b] = f;
      else
        o[b] = 0.0;
    }
    r.occupations[k] = o;
  }
  r.state = state_from_occupations(grid_order(spectrum.nk()), spectrum,
                                   r.occupations);
  return r;
}

OdaResult oda_step(const PeriodicState &current, const PeriodicState &candidate,
                   const FockOperator &fock, const Model &model) {
  require_same_layout(current, candidate);
  const PeriodicState delta = combine(1.0, candidate, -1.0, current);
  OdaResult r;
  r.slope = linear_response(fock, delta);
  r.curvature = curvature(delta, model);
  if (r.slope > 1e-12) {
    r.stalled = true;
    r.t = 0.0;
    r.next = current;
    return r;
  }
  // Slope and curvature at round-off level: candidate and current agree to
  // working precision, so the step is the fixed-point convention t = 1.
  constexpr double noise = 1e-12;
  const double s = std::min(r.slope, 0.0);
  if (std::abs(r.slope) <= noise && std::abs(r.curvature) <= noise)
    r.t = 1.0;
  else if (r.curvature <= 0.0 || -s >= r.curvature)
    r.t = 1.0;
  else
    r.t = std::clamp(-s / r.curvature, 0.0, 1.0);
  r.next = combine(1.0, current, r.t, delta);
  return r;
}

std::vector<RVector> band_occupations(const PeriodicState &state,
                                      const SpectrumTable &spectrum) {
  std::vector<RVector> occ(spectrum.nk());
  for (std::size_t k = 0; k < spectrum.nk(); ++k) {
    const CMatrix &U = spectrum.vectors[k];
    occ[k] = (U.adjoint() * state.fibers[k] * U).diagonal().real();
  }
  return occ;
}

namespace {

/// Same charge as the fractional shell of `fill`, but concentrated on as few
/// shell states as possible: whole states first within each fiber, then the
/// leftover fractions pooled onto whole states in fiber order.
PeriodicState concentrated_shell(const SpectrumTable &spectrum,
                                 const AufbauResult &fill, double degeneracy_tol) {
  const double lstar = fill.shell.lambda;
  const double f = fill.shell.occupation;
  std::vector<RVector> occ = fill.occupations;
  std::vector<CMatrix> vectors = spectrum.vectors;
  std::vector<std::vector<Eigen::Index>> spare(spectrum.nk());
  double pool = 0.0;
  for (std::size_t k = 0; k < spectrum.nk(); ++k) {
    std::vector<Eigen::Index> shell;
    for (Eigen::Index b = 0; b < occ[k].size(); ++b)
      if (std::abs(spectrum.values[k][b] - lstar) <= degeneracy_tol)
        shell.push_back(b);
    if (shell.size() > 1) {
      // Inside a degenerate level the solver's eigenvector choice is
      // arbitrary; rotate to the basis diagonalizing m_x^2 + 2 m_y^2 + 4 m_z^2
      // so the occupied subspace lines up with the lattice axes.
      const auto &kv = spectrum.bases[k].kvecs();
      CMatrix U(spectrum.vectors[k].rows(), Eigen::Index(shell.size()));
      for (std::size_t i = 0; i < shell.size(); ++i)
        U.col(Eigen::Index(i)) = spectrum.vectors[k].col(shell[i]);
      RVector f_axes(U.rows());
      for (Eigen::Index i = 0; i < U.rows(); ++i)
        f_axes[i] = kv[i][0] * kv[i][0] + 2.0 * kv[i][1] * kv[i][1] +
                    4.0 * kv[i][2] * kv[i][2];
      const CMatrix A = U.adjoint() * f_axes.cast<cplx>().asDiagonal() * U;
      Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (A + A.adjoint()));
      const CMatrix rotated = U * es.eigenvectors();
      for (std::size_t i = 0; i < shell.size(); ++i)
        vectors[k].col(shell[i]) = rotated.col(Eigen::Index(i));
    }
    const double q = f * static_cast<double>(shell.size());
    const auto whole = static_cast<std::size_t>(std::floor(q + 1e-12));
    for (std::size_t i = 0; i < shell.size(); ++i)
      occ[k][shell[i]] = i < whole ? 1.0 : 0.0;
    pool += spectrum.bases[k].weight() * std::max(0.0, q - double(whole));
    spare[k].assign(shell.begin() + std::min(whole, shell.size()), shell.end());
  }
  for (std::size_t k = 0; k < spectrum.nk() && pool > 1e-15; ++k) {
    const double w = spectrum.bases[k].weight();
    for (Eigen::Index b : spare[k]) {
      if (pool <= 1e-15)
        break;
      const double o = std::min(1.0, pool / w);
      occ[k][b] = o;
      pool -= o * w;
    }
  }
  SpectrumTable rotated = spectrum;
  rotated.vectors = std::move(vectors);
  return state_from_occupations(grid_order(spectrum.nk()), rotated, occ);
}

double max_fiber_distance(const PeriodicState &a, const PeriodicState &b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.nk(); ++k)
    d = std::max(d, (a.fibers[k] - b.fibers[k]).norm());
  return d;
}

} // namespace

ScfResult run_scf(const ScfConfig &config) {
  return run_scf(config, make_model(config));
}

ScfResult run_scf(const ScfConfig &config, const Model &model) {
  validate(config);
  const auto bases = build_bases(build_kgrid(config.ngrid), config.ecut);

  PeriodicState gamma = PeriodicState::zero(config.ngrid, bases);
  {
    const auto core = diagonalize(assemble_fock(gamma, model));
    gamma = aufbau_fill(core, config.Z, config.degeneracy_tol).state;
  }

  ScfResult result;
  ScfReport &rep = result.report;
  double previous = std::numeric_limits<double>::quiet_NaN();
  for (int iter = 0; iter < config.max_iter; ++iter) {
    const FockOperator fock = assemble_fock(gamma, model);
    const double energy = total_energy(gamma, model).total;
    const double residual = commutator_residual(fock, gamma);
    rep.trace.push_back({iter, residual, energy});
    rep.iterations = iter + 1;

    const SpectrumTable spectrum = diagonalize(fock);
    const AufbauResult fill = aufbau_fill(spectrum, config.Z, config.degeneracy_tol);
    const double step = max_fiber_distance(fill.state, gamma);
    if (residual <= config.tol_residual && step <= 10.0 * config.tol_residual &&
        std::abs(energy - previous) <= config.tol_energy) {
      rep.converged = true;
      break;
    }
    previous = energy;

    if (config.damping.kind == Damping::Kind::fixed) {
      gamma = combine(1.0 - config.damping.t, gamma, config.damping.t, fill.state);
      continue;
    }

    OdaResult best = oda_step(gamma, fill.state, fock, model);
    auto gain = [](const OdaResult &r) {
      return r.t * r.slope + 0.5 * r.t * r.t * r.curvature;
    };
    if (fill.shell.fractional) {
      // Equal sharing keeps every symmetry of the shell; concentrating the
      // same charge on fewer states is the other descent candidate.
      const auto escape = oda_step(
          gamma, concentrated_shell(spectrum, fill, config.degeneracy_tol), fock,
          model);
      if (!escape.stalled && gain(escape) < gain(best) - 1e-14) {
        best = escape;
        ++rep.shell_escapes;
      }
    }
    if (best.stalled || best.t == 0.0) {
      if (residual <= config.tol_residual && step <= 10.0 * config.tol_residual)
        rep.converged = true;
      break;
    }
    gamma = std::move(best.next);
  }

  const FockOperator fock = assemble_fock(gamma, model);
  result.spectrum = diagonalize(fock);
  const AufbauResult fill =
      aufbau_fill(result.spectrum, config.Z, config.degeneracy_tol);
  const auto shell = fermi_shell_report(gamma, result.spectrum, fill.mu,
                                        config.degeneracy_tol);
  rep.energy = total_energy(gamma, model);
  rep.mu = fill.mu;
  rep.epsilon_flag = shell.flag;
  rep.shell_empty = shell.empty;
  rep.residual = commutator_residual(fock, gamma);
  rep.projector_residual = projector_residual(gamma);
  result.occupations = band_occupations(gamma, result.spectrum);
  result.model = model;
  result.state = std::move(gamma);
  return result;
}

} // namespace perhf
