#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "perhf/energy.hpp"
#include "perhf/meanfield.hpp"
#include "perhf/state.hpp"
#include "perhf/verify.hpp"

namespace perhf {

struct Damping {
  enum class Kind { oda, fixed };
  Kind kind = Kind::oda;
  double t = 0.5; // step for fixed damping
};

struct ScfConfig {
  double Z = 1.0;
  double ecut = 10.0;
  int ngrid = 1;
  Mode mode = Mode::hf;
  Nuclei nuclei{};
  int max_iter = 200;
  double tol_residual = 1e-10;
  double tol_energy = 1e-12;
  Damping damping{};
  double degeneracy_tol = 1e-7;
  std::uint64_t seed = 0;
  bool potentials = true;
};

/// Throws invalid-parameter on any out-of-range field.
void validate(const ScfConfig &config);

/// Computes h and v0(ngrid) for the configuration.
Model make_model(const ScfConfig &config);

/// sum_xi w_xi #{k : lambda_k(xi) <= kappa}.
double counting_function(const SpectrumTable &spectrum, double kappa);

struct ShellInfo {
  double lambda = 0.0;    // centre of the top occupied level
  double occupation = 1.0; // common occupation of the shell states
  double capacity = 0.0;  // sum of weights of the shell states
  int states = 0;
  bool fractional = false;
};

struct AufbauResult {
  double mu = 0.0;
  PeriodicState state;
  ShellInfo shell;
  std::vector<RVector> occupations; // per fiber, per band
};

/// Fills states in ascending order until the count reaches Z. States within
/// degeneracy_tol of the last level reached share the remaining charge
/// equally. When that level ends up full, mu is placed mid-gap above it.
/// Throws capacity-error if the bases cannot hold Z electrons.
AufbauResult aufbau_fill(const SpectrumTable &spectrum, double Z,
                         double degeneracy_tol);

struct OdaResult {
  PeriodicState next;
  double t = 0.0;
  double slope = 0.0;     // s
  double curvature = 0.0; // c, so E(t) = E + s t + c t^2 / 2
  bool stalled = false;
};

/// Exact line minimization of the quadratic energy on [current, candidate].
OdaResult oda_step(const PeriodicState &current, const PeriodicState &candidate,
                   const FockOperator &fock, const Model &model);

struct TraceEntry {
  int iter = 0;
  double residual = 0.0;
  double energy = 0.0;
};

struct ScfReport {
  EnergyBreakdown energy;
  double mu = 0.0;
  EpsilonFlag epsilon_flag = EpsilonFlag::zero;
  bool shell_empty = true;
  int iterations = 0;
  std::vector<TraceEntry> trace;
  bool converged = false;
  double residual = 0.0;
  double projector_residual = 0.0;
  int shell_escapes = 0; // symmetry-breaking restarts from a fractional shell
};

struct ScfResult {
  ScfReport report;
  Model model;
  PeriodicState state;
  SpectrumTable spectrum;
  std::vector<RVector> occupations; // <u_k, gamma u_k> per fiber and band
};

ScfResult run_scf(const ScfConfig &config);

/// Same loop with an already computed model (lets callers share h and v0).
ScfResult run_scf(const ScfConfig &config, const Model &model);

/// <u_k(xi), gamma_xi u_k(xi)> for every eigenpair.
std::vector<RVector> band_occupations(const PeriodicState &state,
                                      const SpectrumTable &spectrum);

} // namespace perhf
