#include "perhf/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "perhf/energy.hpp"
#include "perhf/error.hpp"
#include "perhf/kernels.hpp"
#include "perhf/scf.hpp"

namespace perhf {

std::string to_string(EpsilonFlag f) {
  switch (f) {
  case EpsilonFlag::zero:
    return "0";
  case EpsilonFlag::one:
    return "1";
  case EpsilonFlag::mixed:
    return "mixed";
  }
  return "?";
}

double projector_residual(const PeriodicState &state) {
  double r = 0.0;
  for (const auto &g : state.fibers) {
    if (g.size() == 0)
      continue;
    const CMatrix d = g * g - g;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (d + d.adjoint()),
                                              Eigen::EigenvaluesOnly);
    r = std::max(r, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  return r;
}

FermiShellReport fermi_shell_report(const PeriodicState &state,
                                    const SpectrumTable &spectrum, double mu,
                                    double degeneracy_tol) {
  FermiShellReport rep;
  for (std::size_t k = 0; k < spectrum.nk(); ++k) {
    std::vector<Eigen::Index> shell;
    for (Eigen::Index b = 0; b < spectrum.values[k].size(); ++b)
      if (std::abs(spectrum.values[k][b] - mu) <= degeneracy_tol)
        shell.push_back(b);
    if (shell.empty())
      continue;
    CMatrix U(spectrum.vectors[k].rows(), Eigen::Index(shell.size()));
    for (std::size_t i = 0; i < shell.size(); ++i)
      U.col(Eigen::Index(i)) = spectrum.vectors[k].col(shell[i]);
    const CMatrix M = U.adjoint() * state.fibers[k] * U;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (M + M.adjoint()),
                                              Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      rep.occupations.push_back(es.eigenvalues()[i]);
  }
  if (rep.occupations.empty()) {
    rep.empty = true;
    rep.flag = EpsilonFlag::zero;
    rep.note = "empty shell";
    return rep;
  }
  rep.empty = false;
  const bool all_zero = std::all_of(rep.occupations.begin(), rep.occupations.end(),
                                    [](double o) { return o <= 1e-6; });
  const bool all_one = std::all_of(rep.occupations.begin(), rep.occupations.end(),
                                   [](double o) { return o >= 1.0 - 1e-6; });
  rep.flag = all_zero ? EpsilonFlag::zero
                      : (all_one ? EpsilonFlag::one : EpsilonFlag::mixed);
  return rep;
}

InequalityReport inequality_suite(const PeriodicState &state, double h) {
  InequalityReport rep;
  const DensityCoeffs rho = density_from_state(state);
  rep.exchange_G_margin =
      coulomb_bilinear(rho, rho, h) - exchange_energy_G(state, h);

  const int N = sampling_resolution(state);
  rep.grid = N;
  const CMatrix kernel = reduced_kernel_on_grid(state, N);
  const auto npts = kernel.rows();
  RVector dens(npts);
  for (Eigen::Index i = 0; i < npts; ++i)
    dens[i] = kernel(i, i).real();
  double pw = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < npts; ++j)
    for (Eigen::Index i = 0; i < npts; ++i)
      pw = std::min(pw, dens[i] * dens[j] - std::norm(kernel(i, j)));
  rep.pointwise_margin = npts > 0 ? pw : 0.0;

  std::array<DensityCoeffs, 3> grad;
  for (const auto &[m, v] : rho.coeffs())
    for (int d = 0; d < 3; ++d)
      grad[d].add(m, cplx(0.0, two_pi * m[d]) * v);
  const auto rho_x = synthesize(rho, N);
  std::array<std::vector<cplx>, 3> grad_x;
  for (int d = 0; d < 3; ++d)
    grad_x[d] = synthesize(grad[d], N);
  double mean = 0.0;
  const double floor = 1e-12 * std::max(1.0, dens.cwiseAbs().maxCoeff());
  for (std::size_t i = 0; i < rho_x.size(); ++i) {
    const double r = rho_x[i].real();
    if (r <= floor)
      continue;
    double g2 = 0.0;
    for (int d = 0; d < 3; ++d)
      g2 += grad_x[d][i].real() * grad_x[d][i].real();
    mean += g2 / (4.0 * r);
  }
  mean /= static_cast<double>(rho_x.size());
  rep.kinetic_margin = 2.0 * kinetic_energy(state) - mean;
  return rep;
}

namespace {

cplx periodic_overlap(const PlaneWaveBasis &ba, const CVector &a,
                      const PlaneWaveBasis &bb, const CVector &b) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < ba.size(); ++i)
    if (auto j = bb.find(ba.kvecs()[i]))
      s += std::conj(a[Eigen::Index(i)]) * b[*j];
  return s;
}

/// Shell eigenvector at fiber k whose occupation is strictly fractional.
std::optional<Eigen::Index> fractional_shell_state(const PeriodicState &state,
                                                   const SpectrumTable &spectrum,
                                                   double mu, double tol,
                                                   std::size_t k) {
  const auto &vals = spectrum.values[k];
  for (Eigen::Index b = 0; b < vals.size(); ++b) {
    if (std::abs(vals[b] - mu) > tol)
      continue;
    const CVector u = spectrum.vectors[k].col(b);
    const double occ = (u.adjoint() * state.fibers[k] * u)(0, 0).real();
    if (occ > 1e-6 && occ < 1.0 - 1e-6)
      return b;
  }
  return std::nullopt;
}

/// Eigenvectors continued by maximal overlap from the centre outward over
/// the grid points within distance lambda of fiber `centre`.
std::map<std::size_t, CVector> continue_eigenvector(const SpectrumTable &spectrum,
                                                    std::size_t centre,
                                                    Eigen::Index band,
                                                    double lambda) {
  const Vec3 c = spectrum.bases[centre].xi();
  std::vector<std::pair<double, std::size_t>> near;
  for (std::size_t k = 0; k < spectrum.nk(); ++k) {
    const double d = zone_distance(spectrum.bases[k].xi(), c);
    if (d <= lambda)
      near.emplace_back(d, k);
  }
  std::sort(near.begin(), near.end());
  std::map<std::size_t, CVector> chosen;
  chosen[centre] = spectrum.vectors[centre].col(band);
  for (const auto &[d, k] : near) {
    if (k == centre)
      continue;
    std::size_t parent = centre;
    double best = std::numeric_limits<double>::infinity();
    for (const auto &[kp, v] : chosen) {
      const double dd = zone_distance(spectrum.bases[k].xi(), spectrum.bases[kp].xi());
      if (dd < best) {
        best = dd;
        parent = kp;
      }
    }
    const CVector &pv = chosen[parent];
    Eigen::Index pick = 0;
    double overlap = -1.0;
    for (Eigen::Index b = 0; b < spectrum.vectors[k].cols(); ++b) {
      const double o = std::abs(periodic_overlap(spectrum.bases[parent], pv,
                                                 spectrum.bases[k],
                                                 spectrum.vectors[k].col(b)));
      if (o > overlap) {
        overlap = o;
        pick = b;
      }
    }
    chosen[k] = spectrum.vectors[k].col(pick);
  }
  return chosen;
}

double self_term(const SpectrumTable &spectrum,
                 const std::map<std::size_t, CVector> &vecs, double v0) {
  const double M = static_cast<double>(vecs.size());
  double s = 0.0;
  for (const auto &[k, u] : vecs)
    for (const auto &[kp, up] : vecs) {
      const Vec3 q = spectrum.bases[k].xi() - spectrum.bases[kp].xi();
      s += coulomb_factor(q, v0) *
           std::norm(periodic_overlap(spectrum.bases[k], u, spectrum.bases[kp], up));
    }
  return -s / (M * M);
}

} // namespace

ProbeResult charge_transfer_probe(const PeriodicState &state,
                                  const SpectrumTable &spectrum,
                                  const Model &model, double mu,
                                  double degeneracy_tol, std::size_t k1,
                                  std::size_t k2,
                                  const std::vector<double> &lambdas) {
  if (k1 >= spectrum.nk() || k2 >= spectrum.nk())
    throw Error(ErrorKind::invalid_parameter, "probe fiber index out of range");
  const auto b1 = fractional_shell_state(state, spectrum, mu, degeneracy_tol, k1);
  const auto b2 = fractional_shell_state(state, spectrum, mu, degeneracy_tol, k2);
  if (!b1 || !b2)
    throw Error(ErrorKind::probe_not_applicable,
                "no partially occupied Fermi-shell state at a probe fiber");

  ProbeResult res;
  res.xi1 = spectrum.bases[k1].xi();
  res.xi2 = spectrum.bases[k2].xi();
  res.v0 = model.v0;
  for (double lambda : lambdas) {
    const auto n1 = continue_eigenvector(spectrum, k1, *b1, lambda);
    const auto n2 = continue_eigenvector(spectrum, k2, *b2, lambda);
    PeriodicState R = PeriodicState::zero(state.ngrid, state.bases);
    for (const auto &[k, u] : n1)
      R.fibers[k] += (u * u.adjoint()) /
                     (spectrum.bases[k].weight() * double(n1.size()));
    for (const auto &[k, u] : n2)
      R.fibers[k] -= (u * u.adjoint()) /
                     (spectrum.bases[k].weight() * double(n2.size()));
    const auto rho = density_from_state(R);
    ProbeLevel lvl;
    lvl.lambda = lambda;
    lvl.points1 = int(n1.size());
    lvl.points2 = int(n2.size());
    lvl.Q = coulomb_bilinear(rho, rho, model.h) - exchange_energy(R, R, model.v0);
    lvl.I1 = self_term(spectrum, n1, model.v0);
    lvl.I2 = self_term(spectrum, n2, model.v0);
    lvl.I0 = lvl.Q - lvl.I1 - lvl.I2;
    res.levels.push_back(lvl);
  }
  return res;
}

std::vector<RVector> project_occupations(const std::vector<RVector> &values,
                                         const std::vector<double> &weights,
                                         double Z) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double capacity = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k].size() == 0)
      continue;
    lo = std::min(lo, values[k].minCoeff());
    hi = std::max(hi, values[k].maxCoeff());
    capacity += weights[k] * double(values[k].size());
  }
  if (capacity < Z - 1e-12)
    throw Error(ErrorKind::capacity_error, "occupation capacity below Z");
  auto count = [&](double theta) {
    double c = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k)
      c += weights[k] *
           (values[k].array() - theta).max(0.0).min(1.0).sum();
    return c;
  };
  lo -= 1.0; // count(lo) = capacity
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (count(mid) > Z ? lo : hi) = mid;
  }
  const double theta = 0.5 * (lo + hi);
  std::vector<RVector> out(values.size());
  for (std::size_t k = 0; k < values.size(); ++k)
    out[k] = (values[k].array() - theta).max(0.0).min(1.0).matrix();
  return out;
}

namespace {

CMatrix random_gaussian(Eigen::Index r, Eigen::Index c, std::mt19937_64 &rng) {
  std::normal_distribution<double> g;
  CMatrix A(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i)
      A(i, j) = cplx(g(rng), g(rng));
  return A;
}

} // namespace

PeriodicState random_admissible_state(int ngrid,
                                      const std::vector<PlaneWaveBasis> &bases,
                                      double Z, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<CMatrix> unitaries(bases.size());
  std::vector<RVector> occ(bases.size());
  std::vector<double> weights(bases.size());
  for (std::size_t k = 0; k < bases.size(); ++k) {
    const auto B = Eigen::Index(bases[k].size());
    Eigen::HouseholderQR<CMatrix> qr(random_gaussian(B, B, rng));
    unitaries[k] = qr.householderQ() * CMatrix::Identity(B, B);
    occ[k] = RVector(B);
    for (Eigen::Index i = 0; i < B; ++i)
      occ[k][i] = u(rng);
    weights[k] = bases[k].weight();
  }
  if (Z >= 0.0)
    occ = project_occupations(occ, weights, Z);
  PeriodicState s = PeriodicState::zero(ngrid, bases);
  for (std::size_t k = 0; k < bases.size(); ++k) {
    const CMatrix &U = unitaries[k];
    s.fibers[k] = U * occ[k].cast<cplx>().asDiagonal() * U.adjoint();
    s.fibers[k] = 0.5 * (s.fibers[k] + s.fibers[k].adjoint()).eval();
  }
  return s;
}

PeriodicState random_hermitian_direction(const PeriodicState &like,
                                         std::mt19937_64 &rng) {
  PeriodicState d = PeriodicState::zero(like.ngrid, like.bases);
  for (std::size_t k = 0; k < like.nk(); ++k) {
    const auto B = Eigen::Index(like.bases[k].size());
    const CMatrix A = random_gaussian(B, B, rng);
    d.fibers[k] = 0.5 * (A + A.adjoint());
  }
  return d;
}

const std::vector<std::string> &check_names() {
  static const std::vector<std::string> names = {
      "admissibility",        "charge",
      "projector_residual",   "fermi_shell",
      "exchange_G_bound",     "pointwise_exchange_bound",
      "kinetic_density_bound", "stationarity",
      "fixed_point"};
  return names;
}

std::vector<VerificationCheck> run_checks(const CheckContext &ctx,
                                          const std::vector<std::string> &names) {
  if (!ctx.state || !ctx.model)
    throw Error(ErrorKind::invalid_parameter, "check context needs state and model");
  for (const auto &n : names)
    if (std::find(check_names().begin(), check_names().end(), n) == check_names().end())
      throw Error(ErrorKind::invalid_parameter, "unknown check: " + n);
  auto wanted = [&](const std::string &n) {
    return std::find(names.begin(), names.end(), n) != names.end();
  };

  const PeriodicState &state = *ctx.state;
  const Model &model = *ctx.model;
  std::optional<FockOperator> fock;
  std::optional<SpectrumTable> spectrum;
  std::optional<AufbauResult> fill;
  auto need_spectrum = [&] {
    if (!fock) {
      fock = assemble_fock(state, model);
      spectrum = diagonalize(*fock);
      fill = aufbau_fill(*spectrum, model.Z, ctx.degeneracy_tol);
    }
  };
  std::optional<InequalityReport> ineq;
  auto need_ineq = [&] {
    if (!ineq)
      ineq = inequality_suite(state, model.h);
  };

  std::vector<VerificationCheck> out;
  auto add = [&](std::string name, std::string anchor, double margin,
                 std::string note = {}) {
    out.push_back({std::move(name), std::move(anchor), margin, margin >= 0.0,
                   std::move(note)});
  };

  for (const auto &name : check_names()) {
    if (!wanted(name))
      continue;
    if (name == "admissibility") {
      const auto a = check_admissible(state);
      add(name, "gamma_xi Hermitian with spectrum in [0, 1]",
          std::min({1e-12 - a.hermiticity_defect, a.min_eigenvalue + 1e-10,
                    1.0 + 1e-10 - a.max_eigenvalue}));
    } else if (name == "charge") {
      add(name, "sum_xi w_xi tr gamma_xi = Z",
          1e-10 - std::abs(electron_count(state) - model.Z));
    } else if (name == "projector_residual") {
      const double r = projector_residual(state);
      add(name, "HF minimizers are projectors: gamma^2 = gamma", 1e-8 - r,
          "residual " + std::to_string(r));
    } else if (name == "fermi_shell") {
      need_spectrum();
      const auto rep = fermi_shell_report(state, *spectrum, fill->mu,
                                          ctx.degeneracy_tol);
      double worst = 0.0;
      for (double o : rep.occupations)
        worst = std::max(worst, std::min(o, 1.0 - o));
      add(name, "Fermi shell either empty (eps = 0) or filled (eps = 1)",
          1e-6 - worst,
          rep.empty ? "empty shell" : "epsilon = " + to_string(rep.flag));
    } else if (name == "exchange_G_bound") {
      need_ineq();
      add(name, "X_G(gamma, gamma) <= D(rho, rho)", ineq->exchange_G_margin + 1e-8);
    } else if (name == "pointwise_exchange_bound") {
      need_ineq();
      add(name, "|gamma(x, y)|^2 <= rho(x) rho(y)", ineq->pointwise_margin + 1e-8);
    } else if (name == "kinetic_density_bound") {
      need_ineq();
      add(name, "int |grad sqrt(rho)|^2 <= 2 T", ineq->kinetic_margin + 1e-8);
    } else if (name == "stationarity") {
      need_spectrum();
      std::mt19937_64 rng(ctx.seed);
      double worst = std::numeric_limits<double>::infinity();
      for (int i = 0; i < 50; ++i) {
        const auto other = random_admissible_state(state.ngrid, state.bases, model.Z, rng);
        worst = std::min(worst, linear_response(*fock, combine(1.0, other, -1.0, state)));
      }
      add(name, "gamma minimizes the linearized functional tr(H_gamma .)",
          worst + 1e-8);
    } else if (name == "fixed_point") {
      need_spectrum();
      double d = 0.0;
      for (std::size_t k = 0; k < state.nk(); ++k) {
        const CMatrix diff = state.fibers[k] - fill->state.fibers[k];
        if (diff.size() == 0)
          continue;
        Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (diff + diff.adjoint()),
                                                  Eigen::EigenvaluesOnly);
        d = std::max(d, es.eigenvalues().cwiseAbs().maxCoeff());
      }
      add(name, "gamma equals the aufbau filling of H_gamma",
          10.0 * ctx.tol_residual - d);
    }
  }
  return out;
}

} // namespace perhf
