#include "perhf/lattice_bz.hpp"

#include <algorithm>
#include <cmath>

#include "perhf/error.hpp"

namespace perhf {

std::vector<KPoint> build_kgrid(int n) {
  if (n < 1)
    throw Error(ErrorKind::invalid_parameter, "k-grid order must be >= 1");
  const double weight = 1.0 / (static_cast<double>(n) * n * n);
  auto coord = [n](int j) { return -pi + (2 * j + 1) * pi / n; };
  std::vector<KPoint> grid;
  grid.reserve(static_cast<std::size_t>(n) * n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        grid.push_back({Vec3(coord(a), coord(b), coord(c)), weight});
  return grid;
}

PlaneWaveBasis::PlaneWaveBasis(KPoint kpoint, double ecut,
                               std::vector<Miller> kvecs)
    : kpoint_(std::move(kpoint)), ecut_(ecut), kvecs_(std::move(kvecs)) {
  index_.reserve(kvecs_.size());
  for (std::size_t i = 0; i < kvecs_.size(); ++i)
    index_.emplace(miller_key(kvecs_[i]), static_cast<int>(i));
}

std::optional<int> PlaneWaveBasis::find(const Miller &m) const {
  auto it = index_.find(miller_key(m));
  if (it == index_.end())
    return std::nullopt;
  return it->second;
}

Vec3 PlaneWaveBasis::wavevector(std::size_t i) const {
  return kpoint_.xi + to_cartesian(kvecs_[i]);
}

double PlaneWaveBasis::kinetic(std::size_t i) const {
  return 0.5 * wavevector(i).squaredNorm();
}

PlaneWaveBasis build_basis(const KPoint &kpoint, double ecut) {
  if (!(ecut > 0.0))
    throw Error(ErrorKind::invalid_parameter, "ecut must be positive");
  const double kmax = std::sqrt(2.0 * ecut);
  struct Entry {
    double k2;
    Miller m;
  };
  std::vector<Entry> entries;
  int lo[3], hi[3];
  for (int d = 0; d < 3; ++d) {
    lo[d] = static_cast<int>(std::floor((-kmax - kpoint.xi[d]) / two_pi));
    hi[d] = static_cast<int>(std::ceil((kmax - kpoint.xi[d]) / two_pi));
  }
  for (int a = lo[0]; a <= hi[0]; ++a)
    for (int b = lo[1]; b <= hi[1]; ++b)
      for (int c = lo[2]; c <= hi[2]; ++c) {
        const Miller m{a, b, c};
        const double k2 = (kpoint.xi + to_cartesian(m)).squaredNorm();
        if (0.5 * k2 <= ecut)
          entries.push_back({k2, m});
      }
  std::sort(entries.begin(), entries.end(), [](const Entry &x, const Entry &y) {
    if (x.k2 != y.k2)
      return x.k2 < y.k2;
    return x.m < y.m;
  });
  std::vector<Miller> kvecs;
  kvecs.reserve(entries.size());
  for (const auto &e : entries)
    kvecs.push_back(e.m);
  return PlaneWaveBasis(kpoint, ecut, std::move(kvecs));
}

std::vector<PlaneWaveBasis> build_bases(const std::vector<KPoint> &grid,
                                        double ecut) {
  std::vector<PlaneWaveBasis> bases;
  bases.reserve(grid.size());
  for (const auto &k : grid)
    bases.push_back(build_basis(k, ecut));
  return bases;
}

double zone_distance(const Vec3 &a, const Vec3 &b) {
  Vec3 d = a - b;
  for (int i = 0; i < 3; ++i)
    d[i] -= two_pi * std::round(d[i] / two_pi);
  return d.norm();
}

} // namespace perhf
