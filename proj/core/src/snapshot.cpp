#include "perhf/snapshot.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "perhf/error.hpp"

namespace perhf {

namespace {

void expect(std::istream &in, const std::string &token) {
  std::string got;
  if (!(in >> got) || got != token)
    throw Error(ErrorKind::io_error,
                "snapshot: expected '" + token + "', found '" + got + "'");
}

template <class T> T read_value(std::istream &in, const char *what) {
  T v{};
  if (!(in >> v))
    throw Error(ErrorKind::io_error, std::string("snapshot: cannot read ") + what);
  return v;
}

} // namespace

void write_snapshot(std::ostream &out, const Snapshot &snap) {
  const auto &s = snap.state;
  const auto &m = snap.model;
  out << std::setprecision(17);
  out << "perhf-state 1\n";
  out << "ngrid " << s.ngrid << "\n";
  out << "ecut " << snap.ecut << "\n";
  out << "model " << m.Z << ' ' << (m.mode == Mode::hf ? "hf" : "reduced") << ' '
      << (m.nuclei.kind == Nuclei::Kind::point ? "point" : "smeared") << ' '
      << m.nuclei.sigma << ' ' << (m.potentials ? 1 : 0) << ' ' << m.h << ' '
      << m.v0 << "\n";
  out << "nk " << s.nk() << "\n";
  for (std::size_t k = 0; k < s.nk(); ++k) {
    const auto &b = s.bases[k];
    out << "fiber " << k << ' ' << b.xi()[0] << ' ' << b.xi()[1] << ' '
        << b.xi()[2] << ' ' << b.weight() << ' ' << b.size() << "\n";
    for (const auto &mm : b.kvecs())
      out << mm[0] << ' ' << mm[1] << ' ' << mm[2] << "\n";
    const auto &g = s.fibers[k];
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      for (Eigen::Index j = 0; j < g.cols(); ++j)
        out << (j ? " " : "") << g(i, j).real() << ' ' << g(i, j).imag();
      out << "\n";
    }
  }
  out << "end\n";
}

Snapshot read_snapshot(std::istream &in) {
  Snapshot snap;
  expect(in, "perhf-state");
  if (read_value<int>(in, "version") != 1)
    throw Error(ErrorKind::io_error, "snapshot: unsupported version");
  expect(in, "ngrid");
  snap.state.ngrid = read_value<int>(in, "ngrid");
  expect(in, "ecut");
  snap.ecut = read_value<double>(in, "ecut");
  expect(in, "model");
  snap.model.Z = read_value<double>(in, "Z");
  const auto mode = read_value<std::string>(in, "mode");
  if (mode != "hf" && mode != "reduced")
    throw Error(ErrorKind::io_error, "snapshot: bad mode " + mode);
  snap.model.mode = mode == "hf" ? Mode::hf : Mode::reduced;
  const auto nuclei = read_value<std::string>(in, "nuclei");
  const double sigma = read_value<double>(in, "sigma");
  if (nuclei == "point")
    snap.model.nuclei = Nuclei::point();
  else if (nuclei == "smeared")
    snap.model.nuclei = Nuclei::smeared(sigma);
  else
    throw Error(ErrorKind::io_error, "snapshot: bad nuclei " + nuclei);
  snap.model.potentials = read_value<int>(in, "potentials") != 0;
  snap.model.h = read_value<double>(in, "h");
  snap.model.v0 = read_value<double>(in, "v0");
  expect(in, "nk");
  const auto nk = read_value<std::size_t>(in, "nk");
  for (std::size_t k = 0; k < nk; ++k) {
    expect(in, "fiber");
    if (read_value<std::size_t>(in, "fiber index") != k)
      throw Error(ErrorKind::io_error, "snapshot: fibers out of order");
    KPoint kp;
    for (int d = 0; d < 3; ++d)
      kp.xi[d] = read_value<double>(in, "xi");
    kp.weight = read_value<double>(in, "weight");
    const auto B = read_value<std::size_t>(in, "basis size");
    std::vector<Miller> kvecs(B);
    for (auto &m : kvecs)
      for (int d = 0; d < 3; ++d)
        m[d] = read_value<int>(in, "Miller index");
    CMatrix g(B, B);
    for (std::size_t i = 0; i < B; ++i)
      for (std::size_t j = 0; j < B; ++j) {
        const double re = read_value<double>(in, "matrix element");
        const double im = read_value<double>(in, "matrix element");
        g(i, j) = {re, im};
      }
    snap.state.bases.emplace_back(kp, snap.ecut, std::move(kvecs));
    snap.state.fibers.push_back(std::move(g));
  }
  expect(in, "end");
  return snap;
}

void save_snapshot(const std::string &path, const Snapshot &snap) {
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorKind::io_error, "cannot open " + path + " for writing");
  write_snapshot(out, snap);
}

Snapshot load_snapshot(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorKind::io_error, "cannot open " + path);
  return read_snapshot(in);
}

} // namespace perhf
