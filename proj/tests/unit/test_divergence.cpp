#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "zk/distributions.hpp"
#include "zk/divergence.hpp"
#include "zk/models.hpp"

using namespace zk;

namespace {

const double kLn2 = std::log(2.0);

std::vector<int> first_coords(int K) {
  std::vector<int> out;
  for (int i = 0; i < K; ++i) out.push_back(i);
  return out;
}

}  // namespace

TEST(Projection, MembersProjectToThemselves) {
  const Partition rho(2, {{0, 1}, {2, 3}});
  const Dist p = partition_model_member(rho, {0.3, 0.7});
  const auto r = kl_to_partition(p, rho);
  EXPECT_NEAR(r.divergence, 0.0, 1e-15);
  EXPECT_LT(sup_norm(r.projection, p), 1e-15);
}

TEST(Projection, HandExample) {
  const Partition rho(2, {{0, 1}, {2, 3}});
  const auto r = kl_to_partition(Dist(2, {0.5, 0.0, 0.25, 0.25}), rho);
  for (double q : r.projection.probs()) EXPECT_NEAR(q, 0.25, 1e-15);
  EXPECT_NEAR(r.divergence, 0.5 * kLn2, 1e-15);
}

TEST(Projection, MinimisesOverTheModel) {
  // The projection beats every other member on a weight grid.
  auto rng = make_rng(1);
  const Partition rho = Partition::cylinder(3, {1});
  for (int t = 0; t < 10; ++t) {
    const Dist p = sample_dirichlet(DirichletParams::symmetric(3, 1.0), rng);
    const double best = kl_to_partition(p, rho).divergence;
    for (double a = 0.01; a < 1.0; a += 0.01) EXPECT_LE(best, kl(p, partition_model_member(rho, {a, 1 - a})) + 1e-12);
  }
}

TEST(Projection, PointMeasuresAttainTheMaximum) {
  for (int n = 1; n <= 6; ++n)
    for (int K = 0; K <= n; ++K) {
      const Partition rho = Partition::cylinder(n, first_coords(K));
      EXPECT_NEAR(max_kl_partition(rho), (n - K) * kLn2, 1e-14);
      for (StateIndex x = 0; x < (StateIndex{1} << n); ++x) {
        EXPECT_NEAR(kl_to_partition(Dist::point(n, x), rho).divergence, (n - K) * kLn2, 1e-12);
      }
    }
  EXPECT_THROW(max_kl_partition(Partition(2, {{0}, {1, 2, 3}})), std::invalid_argument);
}

TEST(Harmonic, SmallValues) {
  EXPECT_EQ(harmonic(0), 0.0);
  EXPECT_EQ(harmonic(1), 1.0);
  EXPECT_EQ(harmonic(2), 1.5);
  EXPECT_NEAR(harmonic(4), 25.0 / 12, 1e-15);
  EXPECT_NEAR(harmonic(1000000), std::log(1e6) + 0.5772156649015329 + 0.5e-6, 1e-12);
}

TEST(ExpectedDivergence, ClosedForms) {
  const auto e21 = expected_kl_partition_dirichlet(DirichletParams::symmetric(2, 1.0), Partition::cylinder(2, {0}));
  EXPECT_NEAR(e21, kLn2 - 0.5, 1e-14);
  const auto e31 = expected_kl_partition_dirichlet(DirichletParams::symmetric(3, 1.0), Partition::cylinder(3, {0}));
  EXPECT_NEAR(e31, 2 * kLn2 - 13.0 / 12, 1e-14);
  for (double a : {1.0, 2.0, 5.0}) {
    EXPECT_NEAR(expected_kl_partition_dirichlet(DirichletParams::symmetric(3, a), Partition::singletons(3)), 0.0, 1e-14);
  }
  EXPECT_THROW(expected_kl_partition_dirichlet(DirichletParams::symmetric(2, 0.5), Partition::whole(2)),
               std::invalid_argument);
}

TEST(ExpectedDivergence, MonteCarloAgreement) {
  const struct {
    int n, K;
  } cases[] = {{2, 1}, {3, 2}};
  for (const auto& c : cases) {
    const Partition rho = Partition::cylinder(c.n, first_coords(c.K));
    const DirichletParams a = DirichletParams::symmetric(c.n, 1.0);
    const auto est = monte_carlo_expected_kl(rho, a, 200000, 7);
    const double exact = expected_kl_partition_dirichlet(a, rho);
    EXPECT_LT(std::abs(est.mean - exact), 3 * est.se);
  }
}

TEST(ExpectedDivergence, IrregularPartitionAgainstMonteCarlo) {
  const Partition rho(3, {{0}, {1, 2}, {3, 4, 5, 6, 7}});
  std::vector<double> alpha{1, 2, 1, 3, 1, 1, 2, 1};
  const DirichletParams a(3, alpha);
  const auto est = monte_carlo_expected_kl(rho, a, 100000, 3);
  EXPECT_LT(std::abs(est.mean - expected_kl_partition_dirichlet(a, rho)), 4 * est.se);
}

TEST(MonteCarlo, EdgeCasesAndScaling) {
  const DirichletParams a = DirichletParams::symmetric(2, 1.0);
  const auto zero = monte_carlo_expected_kl(Partition::singletons(2), a, 1000, 1);
  EXPECT_EQ(zero.mean, 0.0);
  EXPECT_EQ(zero.se, 0.0);

  const Partition rho = Partition::cylinder(2, {0});
  const auto small = monte_carlo_expected_kl(rho, a, 20000, 1);
  const auto large = monte_carlo_expected_kl(rho, a, 80000, 1);
  EXPECT_NEAR(large.se / small.se, 0.5, 0.05);
  EXPECT_EQ(monte_carlo_expected_kl(rho, a, 5000, 4).mean, monte_carlo_expected_kl(rho, a, 5000, 4).mean);
  EXPECT_THROW(monte_carlo_expected_kl(rho, a, 999, 1), std::invalid_argument);
}

TEST(Bounds, Examples) {
  EXPECT_FALSE(dbn_error_bounds(6, 2).has_value());

  const auto b5 = dbn_error_bounds(6, 5);
  ASSERT_TRUE(b5.has_value());
  EXPECT_EQ(b5->k, 1);
  EXPECT_EQ(b5->K, 4);
  EXPECT_NEAR(b5->max_nats, 2 * kLn2, 1e-15);
  EXPECT_NEAR(b5->max_bits, 2.0, 1e-15);
  EXPECT_NEAR(b5->expected_nats, 1 + 2 * kLn2 - 25.0 / 12, 1e-14);

  const auto b3 = dbn_error_bounds(6, 3);
  EXPECT_EQ(b3->K, 2);
  EXPECT_NEAR(b3->max_nats, 4 * kLn2, 1e-14);

  const auto b17 = dbn_error_bounds(6, 17);
  EXPECT_EQ(b17->K_raw, 7);
  EXPECT_EQ(b17->K, 6);
  EXPECT_EQ(b17->max_nats, 0.0);
  EXPECT_EQ(b17->expected_nats, 0.0);

  const auto b = dbn_error_bounds(4, 17);
  EXPECT_EQ(b->max_nats, 0.0);
  EXPECT_EQ(b->expected_nats, 0.0);
}

TEST(Bounds, ExpectedBoundIsTheDirichletExpectation) {
  for (int n = 1; n <= 8; ++n)
    for (int K = 0; K <= n; ++K) {
      const double closed = expected_bound_nats(n, K);
      const double direct = expected_kl_partition_dirichlet(DirichletParams::symmetric(n, 1.0),
                                                            Partition::cylinder(n, first_coords(K)));
      EXPECT_NEAR(closed, direct, 1e-12);
    }
}
