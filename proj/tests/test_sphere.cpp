#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace gip;
using namespace gip::testing;

TEST(UnitVector, RejectsNonUnitInput) {
  EXPECT_THROW(UnitVector({1.0, 1.0}), Error);
  EXPECT_NO_THROW(UnitVector({0.6, 0.8}));
  const auto v = UnitVector::normalized({3.0, 4.0});
  EXPECT_NEAR(v[0], 0.6, 1e-15);
  EXPECT_THROW(UnitVector::normalized({0.0, 0.0}), Error);
}

TEST(DirectionSet, RejectsDuplicatesAndMixedDimensions) {
  EXPECT_THROW(DirectionSet({UnitVector::from_angle(0.0), UnitVector::from_angle(1e-12)}), Error);
  EXPECT_THROW(DirectionSet({UnitVector::from_angle(0.0), UnitVector({0.0, 0.0, 1.0})}), Error);
  const auto d = square_dirs();
  EXPECT_EQ(d.size(), 4u);
  std::vector<std::size_t> idx{1, 3};
  const auto s = d.subset(idx);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_NEAR(s[1][1], -1.0, 1e-15);
}

TEST(HemisphereWitness, Examples) {
  const auto w = hemisphere_witness(angles({0.0, kPi / 2}));
  ASSERT_TRUE(w);
  EXPECT_GE((*w)[0], -1e-9);
  EXPECT_GE((*w)[1], -1e-9);
  EXPECT_FALSE(hemisphere_witness(square_dirs()));
  const DirectionSet ortho({UnitVector({1, 0, 0}), UnitVector({0, 1, 0}), UnitVector({0, 0, 1})});
  const auto w3 = hemisphere_witness(ortho);
  ASSERT_TRUE(w3);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_GE((*w3)[k], -1e-9);
}

TEST(HemisphereWitness, BoundaryCasesNeedNonzeroWitness) {
  // Antipodal pair: contained only in closed half-planes through both.
  const auto w = hemisphere_witness(angles({0.0, kPi}));
  ASSERT_TRUE(w);
  EXPECT_NEAR((*w)[0], 0.0, 1e-9);
  // Three directions on a closed half-circle.
  EXPECT_TRUE(hemisphere_witness(angles({0.0, kPi / 2, kPi})));
  EXPECT_FALSE(hemisphere_witness(angles({0.0, 2 * kPi / 3, 4 * kPi / 3})));
}

TEST(HemisphereWitness, AgreesWithBruteForceScanOnCircle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 2 * kPi);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 2 + trial % 5;
    std::vector<double> th(m);
    for (double& t : th) t = u(rng);
    const auto dirs = angles(th);
    bool scan = false;
    for (int k = 0; k < 10000 && !scan; ++k) {
      const auto c = UnitVector::from_angle(2 * kPi * k / 10000.0);
      bool all = true;
      for (std::size_t i = 0; i < m; ++i) all = all && dot(c, dirs[i]) >= -1e-9;
      scan = all;
    }
    const auto w = hemisphere_witness(dirs);
    // The scan only sees strictly interior witnesses up to its resolution;
    // skip configurations whose largest gap is within it of pi.
    std::sort(th.begin(), th.end());
    double gap = th.front() + 2 * kPi - th.back();
    for (std::size_t i = 1; i < m; ++i) gap = std::max(gap, th[i] - th[i - 1]);
    if (std::abs(gap - kPi) < 1e-3) continue;
    EXPECT_EQ(w.has_value(), scan) << "trial " << trial;
    if (w) {
      for (std::size_t i = 0; i < m; ++i) EXPECT_GE(dot(*w, dirs[i]), -1e-9);
    }
  }
}

TEST(ParallelSet, ExamplesAndStrictness) {
  const DirectionSet up = angles({kPi / 2});
  const std::vector<double> e1{1.0, 0.0};
  EXPECT_FALSE(in_outer_parallel_set(e1, up, kPi / 2));
  EXPECT_TRUE(in_outer_parallel_set(e1, angles({0.0}), 0.1));
  const std::vector<double> e2{0.0, 1.0};
  EXPECT_TRUE(in_outer_parallel_set(e2, angles({kPi / 4}), kPi / 4 + 0.01));
  EXPECT_THROW(in_outer_parallel_set(e1, up, 0.0), Error);
  EXPECT_THROW(in_outer_parallel_set(e1, up, kPi), Error);
}

TEST(ParallelSet, MonotoneNesting) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 2 * kPi), a(0.01, kPi - 0.01);
  for (int trial = 0; trial < 500; ++trial) {
    const auto omega = angles({u(rng), u(rng) + 0.2});
    const auto pt = UnitVector::from_angle(u(rng));
    double a1 = a(rng), a2 = a(rng);
    if (a1 > a2) std::swap(a1, a2);
    if (in_outer_parallel_set(pt, omega, a1)) {
      EXPECT_TRUE(in_outer_parallel_set(pt, omega, a2));
    }
  }
}

TEST(PolarSet, Examples) {
  EXPECT_TRUE(in_polar_set(std::vector<double>{-1, 0}, angles({0.0})));
  EXPECT_FALSE(in_polar_set(std::vector<double>{0, 1}, angles({0.0, kPi / 2})));
  const double h = std::sqrt(0.5);
  EXPECT_TRUE(in_polar_set(std::vector<double>{-h, -h}, angles({0.0, kPi / 2})));
  // An element of omega is never in its own polar set.
  const auto omega = angles({0.3, 1.1, 2.0});
  for (std::size_t i = 0; i < omega.size(); ++i) EXPECT_FALSE(in_polar_set(omega[i], omega));
}

TEST(GeneratedCone, ArcBetweenGenerators) {
  const auto dirs = angles({0.0, kPi / 2, kPi});
  std::vector<std::size_t> gens{0, 1};
  EXPECT_TRUE(in_generated_cone(UnitVector::from_angle(kPi / 4), dirs, gens));
  EXPECT_TRUE(in_generated_cone(dirs[1], dirs, gens));
  EXPECT_FALSE(in_generated_cone(dirs[2], dirs, gens));
}

TEST(BuildGrid, Examples) {
  const auto g4 = build_grid(2, 4, GridScheme::uniform_angles);
  ASSERT_EQ(g4.size(), 4u);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR(std::atan2(g4.node(k)[1], g4.node(k)[0]), std::remainder(k * kPi / 2, 2 * kPi), 1e-12);
    EXPECT_DOUBLE_EQ(g4.weights()[k], kPi / 2);
  }
  const auto f = build_grid(3, 1000, GridScheme::fibonacci);
  ASSERT_EQ(f.size(), 1000u);
  for (double w : f.weights()) EXPECT_DOUBLE_EQ(w, 4 * kPi / 1000);
  const auto big = build_grid(2, 100000, GridScheme::uniform_angles);
  EXPECT_NEAR(big.weight_sum(), 2 * kPi, 1e-9);
}

TEST(BuildGrid, WeightsSumToSurfaceArea) {
  for (auto s : {GridScheme::uniform_angles, GridScheme::latlong, GridScheme::fibonacci})
    EXPECT_NEAR(build_grid(2, 777, s).weight_sum(), 2 * kPi, 1e-9);
  EXPECT_NEAR(build_grid(3, 5000, GridScheme::fibonacci).weight_sum(), 4 * kPi, 1e-9);
  EXPECT_NEAR(build_grid(3, 5000, GridScheme::latlong).weight_sum(), 4 * kPi, 1e-9);
  EXPECT_THROW(build_grid(3, 100, GridScheme::uniform_angles), Error);
  EXPECT_THROW(build_grid(2, 3, GridScheme::uniform_angles), Error);
  EXPECT_THROW(build_grid(4, 100, GridScheme::fibonacci), Error);
}

TEST(BuildGrid, IntegratesSmoothFunctions) {
  const auto g2 = build_grid(2, 10000, GridScheme::uniform_angles);
  double s = 0.0;
  for (std::size_t k = 0; k < g2.size(); ++k) s += g2.weights()[k] * g2.node(k)[0] * g2.node(k)[0];
  EXPECT_NEAR(s, kPi, 1e-9);
  for (auto scheme : {GridScheme::fibonacci, GridScheme::latlong}) {
    const auto g3 = build_grid(3, 20000, scheme);
    double z2 = 0.0;
    for (std::size_t k = 0; k < g3.size(); ++k) z2 += g3.weights()[k] * g3.node(k)[2] * g3.node(k)[2];
    EXPECT_NEAR(z2, 4 * kPi / 3, 2e-3) << to_string(scheme);
  }
}

TEST(BuildGrid, SchemeNamesRoundTrip) {
  for (auto s : {GridScheme::uniform_angles, GridScheme::latlong, GridScheme::fibonacci})
    EXPECT_EQ(grid_scheme_from_string(to_string(s)), s);
  EXPECT_THROW(grid_scheme_from_string("hexagonal"), Error);
}

TEST(LinearProgram, SmallMaximization) {
  // max x + y s.t. x + 2y <= 4, 3x + y <= 6.
  lp::Problem p;
  p.cols = 2;
  p.objective = {1.0, 1.0};
  p.add_row({1.0, 2.0}, 4.0);
  p.add_row({3.0, 1.0}, 6.0);
  const auto r = lp::maximize(p);
  ASSERT_EQ(r.status, lp::Status::optimal);
  EXPECT_NEAR(r.value, 2.8, 1e-12);
  EXPECT_NEAR(r.x[0], 1.6, 1e-12);
  lp::Problem q;
  q.cols = 1;
  q.objective = {1.0};
  q.add_row({-1.0}, 1.0);
  EXPECT_EQ(lp::maximize(q).status, lp::Status::unbounded);
}
