#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace gip;
using namespace gip::testing;

namespace {

constexpr double kCatalan = 0.915965594177219015;
// 4 * int_{-pi/4}^{pi/4} -log cos = 2 pi log 2 - 4 G.
const double kSquarePhi = 2 * kPi * std::log(2.0) - 4 * kCatalan;

DualPolytope unit_square() { return canonicalize(DualPolytope::make(square_dirs(), {1, 1, 1, 1})); }

}  // namespace

TEST(Partition, SquareQuarterArcs) {
  const auto [mu, lam] = square();
  const auto part = compute_partition(unit_square(), lam);
  const double eps = quadrature_tolerance(lam, 4);
  for (double g : part.cell_masses) EXPECT_NEAR(g, kPi / 2, eps);
  EXPECT_EQ(part.assignment.size(), lam.size());
  EXPECT_EQ(part.assignment[0], 0u);  // node at angle 0
}

TEST(Partition, MatchesArcOracleAfterRescale) {
  const auto [mu, lam] = square();
  const auto p = partial_rescale(unit_square(), IndexSet({0}, 4), 0.5, RescaleSide::members);
  const auto grid_g = compute_partition(p, lam).cell_masses;
  const auto arc_g = arc_cell_masses(p, lam);
  const double eps = quadrature_tolerance(lam, 4);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(grid_g[i], arc_g[i], eps) << i;
  EXPECT_GT(grid_g[0], kPi / 2);
  EXPECT_NEAR(arc_g[0], 2 * std::atan(2.0), 1e-9);
}

TEST(Partition, ZeroDensityCellHasZeroMass) {
  const auto model = DensityModel::caps(0.0, {Cap{UnitVector::from_angle(kPi / 2), 0.3, 1.0}});
  const auto lam = QuadratureMeasure::sample(grid(2, 20000), model);
  const auto g = compute_partition(unit_square(), lam).cell_masses;
  EXPECT_EQ(g[0], 0.0);
  EXPECT_EQ(g[2], 0.0);
  EXPECT_EQ(g[3], 0.0);
  EXPECT_NEAR(g[1], lam.total(), 1e-12);
}

TEST(Phi, SquareClosedForm) {
  const auto [mu, lam] = square();
  const auto v = phi(unit_square(), mu, lam);
  EXPECT_EQ(v.mu_part, 0.0);
  EXPECT_NEAR(v.lambda_part, kSquarePhi, 1e-4);
  EXPECT_NEAR(v.phi, v.mu_part + v.lambda_part, 1e-15);
  EXPECT_THROW(phi(DualPolytope::make(square_dirs(), {1, 1, 1, 1}), mu, lam), Error);
}

TEST(Phi, RotationInvariant) {
  const auto lam = QuadratureMeasure::sample(grid(2, 100000), DensityModel::uniform());
  std::vector<double> values;
  for (double rot : {0.0, 0.3, 1.234}) {
    std::vector<double> th;
    for (int i = 0; i < 5; ++i) th.push_back(rot + 2 * kPi * i / 5);
    const auto dirs = angles(th);
    const DiscreteMeasure mu(dirs, std::vector<double>(5, 2 * kPi / 5));
    values.push_back(phi(canonicalize(DualPolytope::make(dirs, std::vector<double>(5, 1.0))), mu, lam).phi);
  }
  EXPECT_NEAR(values[0], values[1], quadrature_tolerance(lam, 5));
  EXPECT_NEAR(values[0], values[2], quadrature_tolerance(lam, 5));
}

TEST(Phi, InvariantUnderDilationWhenBalanced) {
  std::mt19937_64 rng(4);
  const auto g = grid(2, 20000);
  const auto pr = random_problem(rng, 2, 6, g);
  const auto p = random_polytope(rng, pr.mu.atoms());
  const double a = phi(p, pr.mu, pr.lam).phi, b = phi(p.dilated(0.37), pr.mu, pr.lam).phi;
  EXPECT_NEAR(a, b, 1e-9);
}

TEST(Surrogate, EqualsPhiAtCanonicalPoint) {
  const auto [mu, lam] = square();
  const std::vector<double> t(4, 0.0);
  EXPECT_NEAR(surrogate_objective(t, mu, lam), phi(unit_square(), mu, lam).phi, 1e-12);
  const SurrogateTable table(mu.atoms(), lam);
  EXPECT_NEAR(table.lambda_part(t), phi(unit_square(), mu, lam).lambda_part, 1e-12);
}

TEST(Surrogate, ShiftInvariantWhenBalanced) {
  const auto [mu, lam] = square();
  const std::vector<double> t{0.1, -0.2, 0.3, 0.0};
  std::vector<double> s = t;
  for (double& x : s) x += 0.77;
  EXPECT_NEAR(surrogate_objective(t, mu, lam), surrogate_objective(s, mu, lam), 1e-10);
}

TEST(Surrogate, BelowPhiOffCanonical) {
  const auto dirs = angles({0.0, kPi / 2, kPi, 3 * kPi / 2, kPi / 4});
  const auto lam = QuadratureMeasure::sample(grid(2, 100000), DensityModel::uniform());
  const DiscreteMeasure mu(dirs, std::vector<double>(5, 2 * kPi / 5));
  const std::vector<double> t{0, 0, 0, 0, std::log(2.0)};
  const auto canon = canonicalize(DualPolytope::make(dirs, {1, 1, 1, 1, 2}));
  EXPECT_LT(surrogate_objective(t, mu, lam), phi(canon, mu, lam).phi);
}

TEST(Surrogate, ConcaveAlongRandomSegments) {
  std::mt19937_64 rng(9);
  const auto g = grid(2, 5000);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pr = random_problem(rng, 2, 5, g);
    std::vector<double> a(5), b(5), mid(5);
    for (std::size_t i = 0; i < 5; ++i) {
      a[i] = u(rng);
      b[i] = u(rng);
      mid[i] = 0.5 * (a[i] + b[i]);
    }
    const double fa = surrogate_objective(a, pr.mu, pr.lam), fb = surrogate_objective(b, pr.mu, pr.lam);
    EXPECT_GE(surrogate_objective(mid, pr.mu, pr.lam), 0.5 * (fa + fb) - 1e-12);
  }
}

TEST(Subgradient, ZeroAtSymmetricSquare) {
  const auto [mu, lam] = square();
  for (double s : subgradient(unit_square(), mu, lam)) EXPECT_NEAR(s, 0.0, quadrature_tolerance(lam, 4));
}

TEST(Subgradient, SupergradientInequality) {
  // F(t') <= F(t) + <g - mu, t' - t> for a concave F.
  std::mt19937_64 rng(12);
  const auto g = grid(2, 20000);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto pr = random_problem(rng, 2, 5, g);
    const auto p = random_polytope(rng, pr.mu.atoms(), 0.5);
    const auto t = detail::log_alphas(p);
    const auto s = subgradient(p, pr.mu, pr.lam);
    const double f0 = surrogate_objective(t, pr.mu, pr.lam);
    for (int k = 0; k < 10; ++k) {
      auto t2 = t;
      double lin = 0.0;
      for (std::size_t i = 0; i < t.size(); ++i) {
        t2[i] += u(rng);
        lin += s[i] * (t2[i] - t[i]);
      }
      EXPECT_LE(surrogate_objective(t2, pr.mu, pr.lam), f0 + lin + 1e-10);
    }
  }
}

TEST(Subgradient, FiniteDifferenceAtSmoothPoint) {
  const auto lam = QuadratureMeasure::sample(grid(2, 200000), DensityModel::uniform());
  std::mt19937_64 rng(2);
  // Smooth means every atom owns a facet with a cell of positive mass.
  DirectionSet dirs = random_circle_dirs(rng, 5);
  DualPolytope p = random_polytope(rng, dirs, 0.3);
  for (;;) {
    const auto g = compute_partition(p, lam).cell_masses;
    if (*std::min_element(g.begin(), g.end()) > 0.2) break;
    dirs = random_circle_dirs(rng, 5);
    p = random_polytope(rng, dirs, 0.3);
  }
  const DiscreteMeasure mu(dirs, std::vector<double>(5, 2 * kPi / 5));
  const auto t = detail::log_alphas(p);
  const auto s = subgradient(p, mu, lam);
  const double h = 1e-3;
  for (std::size_t i = 0; i < 5; ++i) {
    auto tp = t, tm = t;
    tp[i] += h;
    tm[i] -= h;
    const double fd = (surrogate_objective(tp, mu, lam) - surrogate_objective(tm, mu, lam)) / (2 * h);
    EXPECT_NEAR(fd, s[i], 1e-3) << i;
  }
}

TEST(Pushforward, Examples) {
  const auto [mu, lam] = square();
  const auto p = unit_square();
  const auto one = pushforward_integral(p, lam, [](std::size_t) { return 1.0; });
  EXPECT_NEAR(one.by_atoms, lam.total(), 1e-9);
  EXPECT_NEAR(one.by_nodes, lam.total(), 1e-9);
  const auto g = compute_partition(p, lam).cell_masses;
  const auto ind = pushforward_integral(p, lam, [](std::size_t i) { return i == 0 ? 1.0 : 0.0; });
  EXPECT_NEAR(ind.by_atoms, g[0], 1e-12);
  EXPECT_NEAR(ind.by_nodes, g[0], 1e-9);
  const auto e1 = pushforward_integral(p, lam, [&](std::size_t i) { return p.directions()[i][0]; });
  EXPECT_NEAR(e1.by_atoms, 0.0, quadrature_tolerance(lam, 4));
  EXPECT_NEAR(e1.by_nodes, e1.by_atoms, 1e-9);
}

TEST(Pushforward, AgreesOnRandomPolytopes) {
  std::mt19937_64 rng(31);
  for (std::size_t n : {2u, 3u}) {
    const auto g = grid(n, 20000);
    const auto lam = QuadratureMeasure::sample(g, random_density(rng, n));
    const auto p = random_polytope(rng, random_dirs(rng, n, 8));
    const auto r = pushforward_integral(p, lam, [](std::size_t i) { return std::sin(1.0 + i); });
    EXPECT_NEAR(r.by_atoms, r.by_nodes, 1e-9);
  }
}
