#include <catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "perhf/error.hpp"
#include "perhf/lattice_bz.hpp"

using namespace perhf;
using Catch::Approx;

TEST_CASE("Gamma-point grid") {
  const auto g = build_kgrid(1);
  REQUIRE(g.size() == 1);
  CHECK(g[0].xi.norm() == 0.0);
  CHECK(g[0].weight == 1.0);
}

TEST_CASE("n = 2 grid has all components at +-pi/2") {
  const auto g = build_kgrid(2);
  REQUIRE(g.size() == 8);
  std::set<std::array<int, 3>> signs;
  for (const auto &k : g) {
    CHECK(k.weight == 0.125);
    std::array<int, 3> s{};
    for (int d = 0; d < 3; ++d) {
      CHECK(std::abs(std::abs(k.xi[d]) - pi / 2) < 1e-15);
      s[d] = k.xi[d] > 0 ? 1 : -1;
    }
    signs.insert(s);
  }
  CHECK(signs.size() == 8);
  // x index slowest
  CHECK(g[0].xi.x() < 0);
  CHECK(g[3].xi.x() < 0);
  CHECK(g[4].xi.x() > 0);
}

TEST_CASE("grids lie in the zone, sum to one and are symmetric under xi -> -xi") {
  for (int n = 1; n <= 6; ++n) {
    const auto g = build_kgrid(n);
    REQUIRE(g.size() == std::size_t(n * n * n));
    double w = 0.0;
    for (const auto &k : g) {
      w += k.weight;
      for (int d = 0; d < 3; ++d) {
        CHECK(k.xi[d] >= -pi);
        CHECK(k.xi[d] < pi);
      }
      bool found = false;
      for (const auto &m : g)
        if (zone_distance(m.xi, -k.xi) < 1e-12)
          found = true;
      CHECK(found);
    }
    CHECK(std::abs(w - 1.0) < 1e-14);
  }
}

TEST_CASE("grid order must be positive") {
  CHECK_THROWS_AS(build_kgrid(0), Error);
  try {
    build_kgrid(-1);
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::invalid_parameter);
  }
}

TEST_CASE("basis at Gamma below the first shell has only K = 0") {
  const auto b = build_basis(build_kgrid(1)[0], 1.0);
  REQUIRE(b.size() == 1);
  CHECK(b.kvecs()[0] == Miller{0, 0, 0});
}

TEST_CASE("basis at Gamma with ecut = 2 pi^2 + 0.1 has the seven vectors 0, +-e_i") {
  const auto b = build_basis(build_kgrid(1)[0], 2 * pi * pi + 0.1);
  REQUIRE(b.size() == 7);
  CHECK(b.kvecs()[0] == Miller{0, 0, 0});
  std::set<Miller> rest(b.kvecs().begin() + 1, b.kvecs().end());
  CHECK(rest == std::set<Miller>{{-1, 0, 0}, {1, 0, 0}, {0, -1, 0},
                                 {0, 1, 0}, {0, 0, -1}, {0, 0, 1}});
  // lexicographic tie-break inside the shell
  CHECK(b.kvecs()[1] == Miller{-1, 0, 0});
  CHECK(b.kvecs()[6] == Miller{1, 0, 0});
}

TEST_CASE("basis membership, ordering and lookup") {
  const auto grid = build_kgrid(3);
  const double ecut = 3 * pi * pi;
  for (const auto &kp : grid) {
    const auto b = build_basis(kp, ecut);
    // brute-force count of the lattice points inside the sphere
    std::size_t count = 0;
    for (int x = -5; x <= 5; ++x)
      for (int y = -5; y <= 5; ++y)
        for (int z = -5; z <= 5; ++z)
          if ((kp.xi + to_cartesian({x, y, z})).squaredNorm() / 2 <= ecut)
            ++count;
    CHECK(b.size() == count);
    for (std::size_t i = 0; i < b.size(); ++i) {
      CHECK(b.kinetic(i) <= ecut);
      CHECK(b.find(b.kvecs()[i]) == int(i));
      if (i > 0) {
        const double a = b.wavevector(i - 1).squaredNorm();
        const double c = b.wavevector(i).squaredNorm();
        CHECK((a < c || (a == c && b.kvecs()[i - 1] < b.kvecs()[i])));
      }
    }
    CHECK_FALSE(b.find({9, 9, 9}).has_value());
    if (ecut >= kp.xi.squaredNorm() / 2)
      CHECK(b.find({0, 0, 0}).has_value());
  }
}

TEST_CASE("basis construction is deterministic") {
  const auto kp = build_kgrid(2)[5];
  CHECK(build_basis(kp, 40.0) == build_basis(kp, 40.0));
}

TEST_CASE("basis size follows the ball volume") {
  const KPoint gamma = build_kgrid(1)[0];
  for (double r : {4.0, 6.0, 8.0}) {
    const double ecut = 0.5 * std::pow(two_pi * r, 2);
    const double expected = 4.0 / 3.0 * pi * r * r * r;
    const double n = double(build_basis(gamma, ecut).size());
    CHECK(std::abs(n - expected) / expected < 0.1);
  }
}

TEST_CASE("nonpositive cutoff is rejected") {
  CHECK_THROWS_AS(build_basis(build_kgrid(1)[0], 0.0), Error);
  CHECK_THROWS_AS(build_basis(build_kgrid(1)[0], -1.0), Error);
}

TEST_CASE("zone distance uses the minimum image") {
  CHECK(zone_distance(Vec3(-3.0, 0, 0), Vec3(3.0, 0, 0)) ==
        Approx(two_pi - 6.0).margin(1e-14));
  CHECK(zone_distance(Vec3(0.1, 0.2, 0.3), Vec3(0.1, 0.2, 0.3)) == 0.0);
}
