#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "perhf/meanfield.hpp"
#include "perhf/state.hpp"
#include "perhf/types.hpp"

namespace perhf {

enum class EpsilonFlag { zero, one, mixed };
std::string to_string(EpsilonFlag f);

struct FermiShellReport {
  EpsilonFlag flag = EpsilonFlag::zero;
  bool empty = true;
  std::vector<double> occupations; // shell occupations, fiber by fiber
  std::string note;
};

/// max_xi ||gamma_xi^2 - gamma_xi|| (operator norm).
double projector_residual(const PeriodicState &state);

/// Occupations of the eigenstates with |lambda - mu| <= tol. Inside a
/// degenerate shell the occupations are the eigenvalues of gamma compressed
/// to the shell, so the answer does not depend on the eigenvector choice.
FermiShellReport fermi_shell_report(const PeriodicState &state,
                                    const SpectrumTable &spectrum, double mu,
                                    double degeneracy_tol);

struct InequalityReport {
  double exchange_G_margin = 0.0;  // D(rho, rho) - X_G(gamma, gamma)
  double pointwise_margin = 0.0;   // min_{x,y} rho(x) rho(y) - |gamma~(x,y)|^2
  double kinetic_margin = 0.0;     // 2 T - int |grad rho|^2 / (4 rho)
  int grid = 0;                    // real-space resolution used
  bool passed(double tol = 1e-8) const {
    return exchange_G_margin >= -tol && pointwise_margin >= -tol &&
           kinetic_margin >= -tol;
  }
};

/// The three margins are evaluated on a grid that integrates every
/// band-limited term exactly; the kinetic check compares the grid mean of
/// |grad rho|^2/(4 rho) against the pointwise upper bound tau(x), whose grid
/// mean is exactly 2 T.
InequalityReport inequality_suite(const PeriodicState &state, double h);

struct ProbeLevel {
  double lambda = 0.0;
  int points1 = 0; // k-points in the neighbourhood of xi1
  int points2 = 0;
  double I0 = 0.0, I1 = 0.0, I2 = 0.0, Q = 0.0;
};

struct ProbeResult {
  Vec3 xi1 = Vec3::Zero();
  Vec3 xi2 = Vec3::Zero();
  double v0 = 0.0;
  std::vector<ProbeLevel> levels;
};

/// Charge-transfer perturbation R = eta |phi><phi| - eta' |phi'><phi'| built
/// from Fermi-shell eigenvectors at fibers k1, k2, continued by maximal
/// overlap over the grid points within distance lambda. Weights are
/// 1/(w * #points) so both parts carry unit charge. I1 (I2) is minus the
/// zero-transfer exchange self term of the first (second) part,
/// Q = D(rho_R, rho_R) - X(R, R), and I0 = Q - I1 - I2.
/// Throws probe-not-applicable when either fiber has no partially occupied
/// shell state.
ProbeResult charge_transfer_probe(const PeriodicState &state,
                                  const SpectrumTable &spectrum,
                                  const Model &model, double mu,
                                  double degeneracy_tol, std::size_t k1,
                                  std::size_t k2,
                                  const std::vector<double> &lambdas);

/// Random unitary rotation of random occupations in [0, 1]; when Z >= 0 the
/// occupations are shifted and clipped so the electron count equals Z.
PeriodicState random_admissible_state(int ngrid,
                                      const std::vector<PlaneWaveBasis> &bases,
                                      double Z, std::mt19937_64 &rng);

/// Random Hermitian direction with entries of order one.
PeriodicState random_hermitian_direction(const PeriodicState &like,
                                         std::mt19937_64 &rng);

/// Euclidean projection of a spectrum onto {0 <= x <= 1, sum_i w_i x_i = Z}
/// by a common shift (bisection).
std::vector<RVector> project_occupations(const std::vector<RVector> &values,
                                         const std::vector<double> &weights,
                                         double Z);

struct VerificationCheck {
  std::string name;
  std::string anchor; // the property being checked, in words
  double margin = 0.0; // >= 0 means pass
  bool pass = false;
  std::string note;
};

/// Names accepted by run_checks, in report order.
const std::vector<std::string> &check_names();

struct CheckContext {
  const PeriodicState *state = nullptr;
  const Model *model = nullptr;
  double degeneracy_tol = 1e-7;
  double tol_residual = 1e-10;
  std::uint64_t seed = 0;
};

/// Runs the named checks (each at most once, in check_names() order).
/// Unknown names throw invalid-parameter.
std::vector<VerificationCheck> run_checks(const CheckContext &ctx,
                                          const std::vector<std::string> &names);

} // namespace perhf
