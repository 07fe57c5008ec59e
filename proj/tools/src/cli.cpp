#include "perhf/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "perhf/error.hpp"
#include "perhf/snapshot.hpp"

namespace perhf::cli {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string &what) {
  throw Error(ErrorKind::invalid_parameter, what);
}

double to_double(const std::string &key, const std::string &v) {
  double x = 0.0;
  const auto *end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc{} || p != end || !std::isfinite(x))
    bad(fmt::format("{}: not a number: '{}'", key, v));
  return x;
}

long long to_integer(const std::string &key, const std::string &v) {
  long long x = 0;
  const auto *end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc{} || p != end)
    bad(fmt::format("{}: not an integer: '{}'", key, v));
  return x;
}

std::string fmt17(double x) { return fmt::format("{:.16e}", x); }

} // namespace

std::vector<std::string> parse_checks(const std::string &list) {
  const std::string s = trim(list);
  if (s == "all")
    return check_names();
  if (s == "none" || s.empty())
    return {};
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (std::find(check_names().begin(), check_names().end(), item) ==
        check_names().end())
      bad("unknown check: " + item);
    if (std::find(out.begin(), out.end(), item) == out.end())
      out.push_back(item);
  }
  return out;
}

ScfConfig parse_config(const std::string &text,
                       std::vector<std::string> *verify_flags) {
  ScfConfig c;
  std::string sigma, damping_t, verify = "all";
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::map<std::string, int> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.resize(hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      bad(fmt::format("line {}: expected key = value", lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (seen[key]++)
      bad(fmt::format("line {}: duplicate key {}", lineno, key));
    if (key == "Z")
      c.Z = to_double(key, val);
    else if (key == "ecut")
      c.ecut = to_double(key, val);
    else if (key == "ngrid")
      c.ngrid = int(to_integer(key, val));
    else if (key == "mode") {
      if (val == "hf")
        c.mode = Mode::hf;
      else if (val == "reduced")
        c.mode = Mode::reduced;
      else
        bad("mode must be hf or reduced");
    } else if (key == "nuclei") {
      if (val == "point")
        c.nuclei.kind = Nuclei::Kind::point;
      else if (val == "smeared")
        c.nuclei.kind = Nuclei::Kind::smeared;
      else
        bad("nuclei must be point or smeared");
    } else if (key == "sigma")
      sigma = val;
    else if (key == "max_iter")
      c.max_iter = int(to_integer(key, val));
    else if (key == "tol_residual")
      c.tol_residual = to_double(key, val);
    else if (key == "tol_energy")
      c.tol_energy = to_double(key, val);
    else if (key == "damping") {
      if (val == "oda")
        c.damping.kind = Damping::Kind::oda;
      else if (val == "fixed")
        c.damping.kind = Damping::Kind::fixed;
      else
        bad("damping must be oda or fixed");
    } else if (key == "damping_t")
      damping_t = val;
    else if (key == "degeneracy_tol")
      c.degeneracy_tol = to_double(key, val);
    else if (key == "seed") {
      const auto s = to_integer(key, val);
      if (s < 0)
        bad("seed must be nonnegative");
      c.seed = static_cast<std::uint64_t>(s);
    } else if (key == "potentials") {
      if (val == "on")
        c.potentials = true;
      else if (val == "off")
        c.potentials = false;
      else
        bad("potentials must be on or off");
    } else if (key == "verify")
      verify = val;
    else
      bad(fmt::format("line {}: unknown key {}", lineno, key));
  }
  if (!sigma.empty())
    c.nuclei.sigma = to_double("sigma", sigma);
  if (!damping_t.empty())
    c.damping.t = to_double("damping_t", damping_t);
  validate(c);
  const auto flags = parse_checks(verify);
  if (verify_flags)
    *verify_flags = flags;
  return c;
}

ScfConfig load_config(const std::filesystem::path &path,
                      std::vector<std::string> *verify_flags) {
  std::ifstream in(path);
  if (!in)
    bad("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), verify_flags);
}

RunManifest make_manifest(const std::filesystem::path &config,
                          const std::filesystem::path &out_dir) {
  RunManifest m;
  m.config = load_config(config, &m.verify_flags);
  m.report = out_dir / "report.json";
  m.bands = out_dir / "bands.csv";
  m.state = out_dir / "state.txt";
  return m;
}

void write_bands_csv(std::ostream &os, const ScfResult &result) {
  os << "k_index,xi_x,xi_y,xi_z,band_index,eigenvalue_hartree,occupation\n";
  const auto &sp = result.spectrum;
  for (std::size_t k = 0; k < sp.nk(); ++k) {
    const Vec3 &xi = sp.bases[k].xi();
    for (Eigen::Index b = 0; b < sp.values[k].size(); ++b) {
      double occ = result.occupations[k][b];
      if (std::abs(occ) < 1e-15)
        occ = 0.0; // keep -0 and round-off noise out of the file
      os << k << ',' << fmt17(xi.x()) << ',' << fmt17(xi.y()) << ','
         << fmt17(xi.z()) << ',' << b << ',' << fmt17(sp.values[k][b]) << ','
         << fmt17(occ) << '\n';
    }
  }
}

namespace {

nlohmann::json config_json(const ScfConfig &c) {
  return {{"Z", c.Z},
          {"ecut", c.ecut},
          {"ngrid", c.ngrid},
          {"mode", c.mode == Mode::hf ? "hf" : "reduced"},
          {"nuclei", c.nuclei.kind == Nuclei::Kind::point ? "point" : "smeared"},
          {"sigma", c.nuclei.sigma},
          {"max_iter", c.max_iter},
          {"tol_residual", c.tol_residual},
          {"tol_energy", c.tol_energy},
          {"damping", c.damping.kind == Damping::Kind::oda ? "oda" : "fixed"},
          {"damping_t", c.damping.t},
          {"degeneracy_tol", c.degeneracy_tol},
          {"seed", c.seed},
          {"potentials", c.potentials}};
}

nlohmann::json energy_json(const EnergyBreakdown &e) {
  return {{"kinetic", e.kinetic},
          {"external", e.external},
          {"hartree", e.hartree},
          {"exchange", e.exchange},
          {"total", e.total}};
}

/// Lowest unoccupied minus highest occupied eigenvalue relative to mu.
double band_gap(const ScfResult &r, double tol) {
  double homo = -std::numeric_limits<double>::infinity();
  double lumo = std::numeric_limits<double>::infinity();
  for (const auto &v : r.spectrum.values)
    for (Eigen::Index b = 0; b < v.size(); ++b) {
      if (v[b] <= r.report.mu + tol)
        homo = std::max(homo, v[b]);
      else
        lumo = std::min(lumo, v[b]);
    }
  return lumo - homo;
}

} // namespace

nlohmann::json report_json(const ScfConfig &config, const ScfResult &result,
                           const std::vector<VerificationCheck> &checks) {
  const auto &rep = result.report;
  nlohmann::json j;
  j["config"] = config_json(config);
  j["model"] = {{"h", result.model.h}, {"v0", result.model.v0}};
  j["converged"] = rep.converged;
  j["iterations"] = rep.iterations;
  j["energy"] = energy_json(rep.energy);
  j["mu"] = rep.mu;
  j["epsilon_flag"] = to_string(rep.epsilon_flag);
  j["shell_empty"] = rep.shell_empty;
  j["residual"] = rep.residual;
  j["projector_residual"] = rep.projector_residual;
  j["shell_escapes"] = rep.shell_escapes;
  auto trace = nlohmann::json::array();
  for (const auto &t : rep.trace)
    trace.push_back({{"iter", t.iter}, {"residual", t.residual}, {"energy", t.energy}});
  j["trace"] = trace;
  auto bands = nlohmann::json::array();
  for (std::size_t k = 0; k < result.spectrum.nk(); ++k) {
    const auto &v = result.spectrum.values[k];
    const Vec3 &xi = result.spectrum.bases[k].xi();
    bands.push_back({{"k_index", k},
                     {"xi", {xi.x(), xi.y(), xi.z()}},
                     {"basis_size", v.size()},
                     {"lowest", v.size() ? v[0] : 0.0},
                     {"highest", v.size() ? v[v.size() - 1] : 0.0}});
  }
  j["bands"] = bands;
  j["band_gap"] = band_gap(result, config.degeneracy_tol);
  auto cj = nlohmann::json::array();
  for (const auto &c : checks)
    cj.push_back({{"name", c.name},
                  {"anchor", c.anchor},
                  {"margin", c.margin},
                  {"pass", c.pass},
                  {"note", c.note}});
  j["checks"] = cj;
  return j;
}

int run(const RunManifest &m, std::ostream &log) {
  if (m.report == m.bands || m.report == m.state || m.bands == m.state) {
    fmt::print(log, "error: output paths must be distinct\n");
    return bad_config;
  }
  const ScfResult result = run_scf(m.config);
  CheckContext ctx;
  ctx.state = &result.state;
  ctx.model = &result.model;
  ctx.degeneracy_tol = m.config.degeneracy_tol;
  ctx.tol_residual = m.config.tol_residual;
  ctx.seed = m.config.seed;
  const auto checks = run_checks(ctx, m.verify_flags);

  for (const auto &p : {m.report, m.bands, m.state})
    if (p.has_parent_path())
      std::filesystem::create_directories(p.parent_path());
  {
    std::ofstream out(m.report);
    out << report_json(m.config, result, checks).dump(2) << '\n';
    if (!out)
      throw Error(ErrorKind::io_error, "cannot write " + m.report.string());
  }
  {
    std::ofstream out(m.bands);
    write_bands_csv(out, result);
    if (!out)
      throw Error(ErrorKind::io_error, "cannot write " + m.bands.string());
  }
  save_snapshot(m.state.string(), {result.state, result.model, m.config.ecut});

  const auto &rep = result.report;
  fmt::print(log, "{} after {} iterations: E = {:.12f} Ha, residual {:.3e}, eps {}\n",
             rep.converged ? "converged" : "NOT converged", rep.iterations,
             rep.energy.total, rep.residual, to_string(rep.epsilon_flag));
  bool all_pass = true;
  for (const auto &c : checks) {
    fmt::print(log, "  {:<26} {} margin {:+.3e}\n", c.name, c.pass ? "pass" : "FAIL",
               c.margin);
    all_pass = all_pass && c.pass;
  }
  if (!rep.converged)
    return not_converged;
  return all_pass ? ok : check_failed;
}

nlohmann::json compare_modes(const ScfConfig &config) {
  ScfConfig hf_cfg = config, red_cfg = config;
  hf_cfg.mode = Mode::hf;
  red_cfg.mode = Mode::reduced;
  const Model hf_model = make_model(hf_cfg);
  Model red_model = hf_model;
  red_model.mode = Mode::reduced;
  const auto hf = run_scf(hf_cfg, hf_model);
  const auto red = run_scf(red_cfg, red_model);
  const auto hf_at_red = total_energy(red.state, hf_model);
  const double gap_hf = band_gap(hf, config.degeneracy_tol);
  const double gap_red = band_gap(red, config.degeneracy_tol);
  nlohmann::json j;
  j["config"] = config_json(config);
  j["hf"] = {{"converged", hf.report.converged},
             {"energy", energy_json(hf.report.energy)},
             {"epsilon_flag", to_string(hf.report.epsilon_flag)},
             {"shell_empty", hf.report.shell_empty},
             {"band_gap", gap_hf}};
  j["reduced"] = {{"converged", red.report.converged},
                  {"energy", energy_json(red.report.energy)},
                  {"epsilon_flag", to_string(red.report.epsilon_flag)},
                  {"shell_empty", red.report.shell_empty},
                  {"band_gap", gap_red}};
  j["hf_energy_at_reduced_minimizer"] = hf_at_red.total;
  j["energy_difference"] = red.report.energy.total - hf_at_red.total;
  j["half_exchange_at_reduced_minimizer"] = hf_at_red.exchange;
  j["gap_shift"] = gap_hf - gap_red;
  j["hf_minimum_below_reduced_state"] =
      hf.report.energy.total <= hf_at_red.total + 1e-10;
  j["reduced_shell_ok"] = red.report.epsilon_flag == EpsilonFlag::zero;
  return j;
}

int run_compare(const ScfConfig &config, std::ostream &out) {
  const auto j = compare_modes(config);
  out << j.dump(2) << '\n';
  if (!j["hf"]["converged"].get<bool>() || !j["reduced"]["converged"].get<bool>())
    return not_converged;
  if (!j["reduced_shell_ok"].get<bool>() ||
      !j["hf_minimum_below_reduced_state"].get<bool>())
    return check_failed;
  return ok;
}

int run_verify(const std::filesystem::path &snapshot,
               const std::vector<std::string> &checks, std::uint64_t seed,
               std::ostream &out) {
  const Snapshot snap = load_snapshot(snapshot.string());
  CheckContext ctx;
  ctx.state = &snap.state;
  ctx.model = &snap.model;
  ctx.seed = seed;
  const auto results = run_checks(ctx, checks);
  nlohmann::json j = nlohmann::json::array();
  bool all_pass = true;
  for (const auto &c : results) {
    j.push_back({{"name", c.name},
                 {"anchor", c.anchor},
                 {"margin", c.margin},
                 {"pass", c.pass},
                 {"note", c.note}});
    all_pass = all_pass && c.pass;
  }
  out << nlohmann::json{{"snapshot", snapshot.string()}, {"checks", j}}.dump(2)
      << '\n';
  return all_pass ? ok : check_failed;
}

} // namespace perhf::cli
