#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "perhf/scf.hpp"
#include "perhf/verify.hpp"

namespace perhf::cli {

enum ExitCode : int {
  ok = 0,
  bad_config = 2,
  not_converged = 3,
  check_failed = 4,
};

struct RunManifest {
  ScfConfig config;
  std::filesystem::path report; // JSON
  std::filesystem::path bands;  // CSV
  std::filesystem::path state;  // snapshot
  std::vector<std::string> verify_flags;
};

/// Flat `key = value` text, one pair per line, `#` starts a comment.
/// Keys: Z, ecut, ngrid, mode (hf|reduced), nuclei (point|smeared), sigma,
/// max_iter, tol_residual, tol_energy, damping (oda|fixed), damping_t,
/// degeneracy_tol, seed, potentials (on|off), verify (all|none|name,name,...).
/// Throws invalid-parameter on unknown keys, bad values or failed validation.
ScfConfig parse_config(const std::string &text,
                       std::vector<std::string> *verify_flags = nullptr);
ScfConfig load_config(const std::filesystem::path &path,
                      std::vector<std::string> *verify_flags = nullptr);

/// "all", "none" or a comma-separated list of check names.
std::vector<std::string> parse_checks(const std::string &list);

/// Report, band and snapshot files inside out_dir; config read from disk.
RunManifest make_manifest(const std::filesystem::path &config,
                          const std::filesystem::path &out_dir);

void write_bands_csv(std::ostream &os, const ScfResult &result);

nlohmann::json report_json(const ScfConfig &config, const ScfResult &result,
                           const std::vector<VerificationCheck> &checks);

/// Solve, verify, write the three outputs. Returns an ExitCode.
int run(const RunManifest &manifest, std::ostream &log);

/// Solves in both modes on identical settings.
nlohmann::json compare_modes(const ScfConfig &config);
int run_compare(const ScfConfig &config, std::ostream &out);

/// Re-runs checks on a saved snapshot.
int run_verify(const std::filesystem::path &snapshot,
               const std::vector<std::string> &checks, std::uint64_t seed,
               std::ostream &out);

} // namespace perhf::cli
