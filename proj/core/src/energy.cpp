#include "perhf/energy.hpp"

#include <map>

#include "perhf/error.hpp"
#include "perhf/kernels.hpp"

namespace perhf {

double coulomb_bilinear(const DensityCoeffs &f, const DensityCoeffs &g, double h) {
  double d = 0.0;
  for (const auto &[m, fv] : f.coeffs()) {
    const cplx gv = g.at(m);
    d += green_fourier(m, h) * (fv * std::conj(gv)).real();
  }
  return d;
}

double external_energy(const DensityCoeffs &rho, double Z, double h,
                       const Nuclei &nuclei) {
  if (nuclei.kind == Nuclei::Kind::smeared && !(nuclei.sigma > 0.0))
    throw Error(ErrorKind::invalid_parameter, "smeared nuclei need sigma > 0");
  double e = 0.0;
  for (const auto &[m, v] : rho.coeffs())
    e += green_fourier(m, h) * nuclei.form_factor(m) * v.real();
  return -Z * e;
}

TransferGroups transfer_groups(const PlaneWaveBasis &a, const PlaneWaveBasis &b) {
  std::map<Miller, std::vector<std::pair<int, int>>> by_shift;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      by_shift[a.kvecs()[i] - b.kvecs()[j]].emplace_back(int(i), int(j));
  TransferGroups g;
  g.shifts.reserve(by_shift.size());
  g.pairs.reserve(by_shift.size());
  for (auto &[d, p] : by_shift) {
    g.shifts.push_back(d);
    g.pairs.push_back(std::move(p));
  }
  return g;
}

double exchange_form(const PeriodicState &a, const PeriodicState &b,
                     const ExchangeKernel &kernel) {
  require_same_layout(a, b);
  double total = 0.0;
  for (std::size_t k = 0; k < a.nk(); ++k) {
    const auto &ba = a.bases[k];
    const CMatrix &ga = a.fibers[k];
    if (ga.size() == 0 || ga.isZero(0.0))
      continue;
    for (std::size_t kp = 0; kp < b.nk(); ++kp) {
      const auto &bb = b.bases[kp];
      const CMatrix &gb = b.fibers[kp];
      if (gb.size() == 0 || gb.isZero(0.0))
        continue;
      const auto groups = transfer_groups(ba, bb);
      const Vec3 dxi = ba.xi() - bb.xi();
      cplx pair_sum = 0.0;
      for (std::size_t s = 0; s < groups.shifts.size(); ++s) {
        const auto &D = groups.shifts[s];
        const double V = kernel(dxi + to_cartesian(D), D);
        cplx acc = 0.0;
        for (const auto &[i, ip] : groups.pairs[s])
          for (const auto &[j, jp] : groups.pairs[s])
            acc += ga(i, j) * std::conj(gb(ip, jp));
        pair_sum += V * acc;
      }
      total += ba.weight() * bb.weight() * pair_sum.real();
    }
  }
  return total;
}

double exchange_energy(const PeriodicState &a, const PeriodicState &b, double v0) {
  return exchange_form(a, b, [v0](const Vec3 &q, const Miller &) {
    return coulomb_factor(q, v0);
  });
}

double exchange_energy_G(const PeriodicState &a, double h) {
  const auto basis = union_basis(a);
  const CMatrix A = reduced_fourier_matrix(a, basis);
  std::map<Miller, std::vector<std::pair<int, int>>> by_shift;
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j)
      by_shift[basis[i] - basis[j]].emplace_back(int(i), int(j));
  double total = 0.0;
  for (const auto &[D, pairs] : by_shift) {
    cplx acc = 0.0;
    for (const auto &[i, ip] : pairs)
      for (const auto &[j, jp] : pairs)
        acc += A(i, j) * std::conj(A(ip, jp));
    total += green_fourier(D, h) * acc.real();
  }
  return total;
}

double exchange_energy_G_realspace(const PeriodicState &a, double h, int N) {
  const int M = (sampling_resolution(a) - 1) / 4;
  if (N < 4 * M + 1)
    throw Error(ErrorKind::invalid_parameter,
                "real-space exchange grid below the Nyquist resolution");
  const CMatrix kernel = reduced_kernel_on_grid(a, N);
  // G truncated to the transfers that can occur, |D|_inf <= 2M.
  DensityCoeffs g;
  for (int x = -2 * M; x <= 2 * M; ++x)
    for (int y = -2 * M; y <= 2 * M; ++y)
      for (int z = -2 * M; z <= 2 * M; ++z)
        g.add({x, y, z}, green_fourier(Miller{x, y, z}, h));
  const auto gvals = synthesize(g, N);
  auto index = [N](int a, int b, int c) {
    return (static_cast<std::size_t>(a) * N + b) * N + c;
  };
  double total = 0.0;
  for (int xa = 0; xa < N; ++xa)
    for (int xb = 0; xb < N; ++xb)
      for (int xc = 0; xc < N; ++xc) {
        const auto ix = index(xa, xb, xc);
        for (int ya = 0; ya < N; ++ya)
          for (int yb = 0; yb < N; ++yb)
            for (int yc = 0; yc < N; ++yc) {
              const auto iy = index(ya, yb, yc);
              const auto id = index((xa - ya + N) % N, (xb - yb + N) % N,
                                    (xc - yc + N) % N);
              total += gvals[id].real() * std::norm(kernel(ix, iy));
            }
      }
  const double n3 = static_cast<double>(N) * N * N;
  return total / (n3 * n3);
}

EnergyBreakdown total_energy(const PeriodicState &state, const Model &model) {
  EnergyBreakdown e;
  e.kinetic = kinetic_energy(state);
  if (model.potentials) {
    const auto rho = density_from_state(state);
    e.external = external_energy(rho, model.Z, model.h, model.nuclei);
    e.hartree = 0.5 * coulomb_bilinear(rho, rho, model.h);
    if (model.with_exchange())
      e.exchange = 0.5 * exchange_energy(state, state, model.v0);
  }
  e.total = e.kinetic + e.external + e.hartree - e.exchange;
  return e;
}

double curvature(const PeriodicState &delta, const Model &model) {
  if (!model.potentials)
    return 0.0;
  const auto rho = density_from_state(delta);
  double c = coulomb_bilinear(rho, rho, model.h);
  if (model.with_exchange())
    c -= exchange_energy(delta, delta, model.v0);
  return c;
}

} // namespace perhf
