#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "perhf/types.hpp"

namespace perhf {

/// A Brillouin-zone sample xi in [-pi, pi)^3 with its quadrature weight.
struct KPoint {
  Vec3 xi = Vec3::Zero();
  double weight = 1.0;
};

/// Uniform n^3 grid xi_j = -pi + (2j+1)pi/n, every weight 1/n^3.
/// Points are ordered with the x index slowest.
std::vector<KPoint> build_kgrid(int n);

/// Plane waves e^{i(xi+K).x} of one Bloch fiber with |xi+K|^2/2 <= ecut.
class PlaneWaveBasis {
public:
  PlaneWaveBasis() = default;
  PlaneWaveBasis(KPoint kpoint, double ecut, std::vector<Miller> kvecs);

  const KPoint &kpoint() const { return kpoint_; }
  const Vec3 &xi() const { return kpoint_.xi; }
  double weight() const { return kpoint_.weight; }
  double ecut() const { return ecut_; }
  const std::vector<Miller> &kvecs() const { return kvecs_; }
  std::size_t size() const { return kvecs_.size(); }

  /// Position of K = 2*pi*m in this basis, if present.
  std::optional<int> find(const Miller &m) const;
  /// xi + K for basis function i.
  Vec3 wavevector(std::size_t i) const;
  /// |xi + K|^2 / 2 for basis function i.
  double kinetic(std::size_t i) const;

  friend bool operator==(const PlaneWaveBasis &a, const PlaneWaveBasis &b) {
    return a.kvecs_ == b.kvecs_ && a.kpoint_.xi == b.kpoint_.xi &&
           a.kpoint_.weight == b.kpoint_.weight;
  }

private:
  KPoint kpoint_;
  double ecut_ = 0.0;
  std::vector<Miller> kvecs_;
  std::unordered_map<std::uint64_t, int> index_;
};

/// Ordering: ascending |xi+K|^2, ties broken lexicographically on m.
PlaneWaveBasis build_basis(const KPoint &kpoint, double ecut);

std::vector<PlaneWaveBasis> build_bases(const std::vector<KPoint> &grid,
                                        double ecut);

/// Minimum-image distance between two zone points on the torus R^3/2piZ^3.
double zone_distance(const Vec3 &a, const Vec3 &b);

} // namespace perhf
