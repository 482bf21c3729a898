#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace gip;
using namespace gip::testing;

TEST(DiscreteMeasure, Validation) {
  EXPECT_THROW(DiscreteMeasure(square_dirs(), {1.0, 1.0, 0.0, 1.0}), Error);
  EXPECT_THROW(DiscreteMeasure(square_dirs(), {1.0, 1.0, 1.0}), Error);
  EXPECT_THROW(DiscreteMeasure(angles({0.0, 0.5, 1.0}), {1.0, 1.0, 1.0}), Error);  // half-plane
  EXPECT_THROW(DiscreteMeasure(angles({0.0, kPi}), {1.0, 1.0}), Error);            // fewer than n+1
  const DiscreteMeasure mu(square_dirs(), std::vector<double>(4, kPi / 2));
  EXPECT_NEAR(total_mass(mu), 2 * kPi, 1e-15);
}

TEST(QuadratureMeasure, TotalMassExamples) {
  const auto g = grid(2, 100000);
  EXPECT_NEAR(total_mass(QuadratureMeasure::sample(g, DensityModel::uniform())), 2 * kPi, 1e-9);
  const auto lin = QuadratureMeasure::sample(
      g, DensityModel::function([](std::span<const double> u) { return 1.0 + u[0]; }));
  EXPECT_NEAR(total_mass(lin), 2 * kPi, 1e-9);
  std::vector<double> neg(g->size(), 1.0);
  neg[5] = -1.0;
  EXPECT_THROW(QuadratureMeasure(g, neg), Error);
  EXPECT_THROW(QuadratureMeasure(g, std::vector<double>(g->size(), 0.0)), Error);
  EXPECT_THROW(QuadratureMeasure(g, std::vector<double>(3, 1.0)), Error);
}

TEST(NormalizeTo, Examples) {
  const auto g = grid(2, 1000);
  const auto lam = QuadratureMeasure::sample(g, DensityModel::uniform());
  const auto unit = normalize_to(lam, 1.0);
  EXPECT_NEAR(unit.total(), 1.0, 1e-12);
  for (double d : unit.density()) EXPECT_NEAR(d, 1.0 / (2 * kPi), 1e-13);
  const auto same = normalize_to(lam, lam.total());
  for (std::size_t k = 0; k < g->size(); ++k) EXPECT_DOUBLE_EQ(same.density()[k], lam.density()[k]);
  const auto caps = QuadratureMeasure::sample(g, DensityModel::caps(0.5, {Cap{UnitVector::from_angle(1.0), 0.7, 2.0}}));
  const auto scaled = normalize_to(caps, 2 * kPi);
  EXPECT_NEAR(scaled.total(), 2 * kPi, 1e-12 * 2 * kPi);
  const double f = 2 * kPi / caps.total();
  for (std::size_t k = 0; k < g->size(); ++k) EXPECT_NEAR(scaled.density()[k], f * caps.density()[k], 1e-14);
  // The analytic model is rescaled along with the samples.
  EXPECT_NEAR(scaled.model()(g->node(0)), scaled.density()[0], 1e-14);
  EXPECT_THROW(normalize_to(lam, 0.0), Error);
}

TEST(ParallelSetMass, Examples) {
  const auto g = grid(2, 100000);
  const auto lam = QuadratureMeasure::sample(g, DensityModel::uniform());
  const double eps = quadrature_tolerance(lam, 2);
  EXPECT_NEAR(parallel_set_mass(lam, angles({0.0}), kPi / 2), kPi, eps);
  EXPECT_NEAR(parallel_set_mass(lam, angles({0.0, kPi / 2}), kPi / 4), kPi, eps);
  EXPECT_NEAR(parallel_set_mass(lam, angles({0.3}), kPi - 1e-9), lam.total(), eps);
}

TEST(ParallelSetMass, MonotoneInAngleAndSet) {
  std::mt19937_64 rng(5);
  const auto g = grid(2, 20000);
  const auto lam = QuadratureMeasure::sample(g, random_density(rng, 2));
  std::uniform_real_distribution<double> u(0.0, 2 * kPi);
  for (int t = 0; t < 50; ++t) {
    const double a = u(rng), b = u(rng);
    const auto small = angles({a});
    const auto large = angles({a, b + 0.01});
    double prev = 0.0;
    for (double ang = 0.1; ang < kPi; ang += 0.3) {
      const double m1 = parallel_set_mass(lam, small, ang);
      EXPECT_GE(m1, prev);
      EXPECT_LE(m1, parallel_set_mass(lam, large, ang));
      prev = m1;
    }
  }
}

TEST(ParallelSetMass, ConvergesToArcIntegral) {
  // Cap density: exact arc integral vs grid sums at increasing resolution.
  const auto model = DensityModel::caps(0.2, {Cap{UnitVector::from_angle(0.4), 0.9, 1.5}});
  const auto omega = angles({1.0, 2.5});
  const double exact = dense_parallel_set_mass([&](std::span<const double> x) { return model(x); }, omega, 0.6,
                                               model.angular_breakpoints());
  double prev_err = 1.0;
  for (std::size_t n : {1000u, 10000u, 100000u}) {
    const auto lam = QuadratureMeasure::sample(grid(2, n, GridScheme::latlong), model);
    const double err = std::abs(parallel_set_mass(lam, omega, 0.6) - exact);
    EXPECT_LE(err, quadrature_tolerance(lam, 2)) << n;
    EXPECT_LE(err, prev_err * 1.01);
    prev_err = err;
  }
}

TEST(QuadratureTolerance, ScalesWithGrid) {
  const auto coarse = QuadratureMeasure::sample(grid(2, 1000), DensityModel::uniform());
  const auto fine = QuadratureMeasure::sample(grid(2, 100000), DensityModel::uniform());
  EXPECT_NEAR(quadrature_tolerance(coarse, 4) / quadrature_tolerance(fine, 4), 100.0, 1e-6);
  EXPECT_GT(quadrature_tolerance(fine, 4), 0.0);
  const auto caps = QuadratureMeasure::sample(grid(2, 1000), DensityModel::caps(0.0, {Cap{UnitVector::from_angle(0), 0.5, 1}}));
  EXPECT_EQ(caps.model().discontinuity_count(2), 2u);
}

TEST(DensityFunction, TableUsesNearestNode) {
  const auto g = grid(2, 8);
  std::vector<double> vals{1, 2, 3, 4, 5, 6, 7, 8};
  const QuadratureMeasure lam(g, vals);
  const auto f = lam.density_function();
  EXPECT_DOUBLE_EQ(f(UnitVector::from_angle(0.1)), 1.0);
  EXPECT_DOUBLE_EQ(f(UnitVector::from_angle(kPi / 4 - 0.1)), 2.0);
  EXPECT_DOUBLE_EQ(f(UnitVector::from_angle(-0.1)), 1.0);
  EXPECT_DOUBLE_EQ(f(UnitVector::from_angle(-kPi / 4 + 0.1)), 8.0);
  EXPECT_THROW(lam.model()(g->node(0)), Error);
}
