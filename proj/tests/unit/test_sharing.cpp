#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "zk/distributions.hpp"
#include "zk/hypercube.hpp"
#include "zk/models.hpp"
#include "zk/sharing.hpp"

using namespace zk;

namespace {

Dist weights_on(int n, const std::vector<StateIndex>& states, std::mt19937_64& rng) {
  std::gamma_distribution<double> gamma(1.0, 1.0);
  std::vector<double> w(std::size_t{1} << n, 0.0);
  for (StateIndex x : states) w[x] = gamma(rng) + 1e-3;
  return Dist::from_weights(n, w);
}

}  // namespace

TEST(Compatibility, Rules) {
  EXPECT_TRUE(sharing_compatible(PathFamily(3, {reflected_gray_code(3)})));

  // Two paths leave 000 along different bits.
  EXPECT_FALSE(sharing_compatible(PathFamily(3, {Path(3, {0, 1}), Path(3, {0, 2})})));
  // One path enters 001 while another leaves it.
  EXPECT_FALSE(sharing_compatible(PathFamily(3, {Path(3, {0, 1}), Path(3, {1, 3})})));
  // Three paths flip bit 0 at once.
  EXPECT_FALSE(sharing_compatible(PathFamily(3, {Path(3, {0, 1}), Path(3, {2, 3}), Path(3, {4, 5})})));
  // Two paths flip bit 0 along a common edge, and two paths merge.
  EXPECT_TRUE(sharing_compatible(PathFamily(3, {Path(3, {0, 1}), Path(3, {2, 3})})));
  EXPECT_TRUE(sharing_compatible(PathFamily(3, {Path(3, {1, 3}), Path(3, {2, 3})})));
}

TEST(BackwardMasses, ConservesAndEndsAtTarget) {
  auto rng = make_rng(1);
  const PathFamily fam(3, {Path(3, {0, 1, 3, 7})});
  const Dist target = weights_on(3, {0, 1, 3, 7}, rng);
  const auto masses = backward_masses(fam, target);
  ASSERT_EQ(masses.size(), 4u);
  EXPECT_EQ(masses.back().probs(), target.probs());
  EXPECT_NEAR(masses.front()[0], 1.0, 1e-15);
  EXPECT_NEAR(masses[1][0] + masses[1][1], 1.0, 1e-15);
  EXPECT_NEAR(masses[1][0], target[0], 1e-15);

  const Dist off = Dist::point(3, 5);
  EXPECT_THROW(backward_masses(fam, off), std::invalid_argument);
}

TEST(PathLayers, ConstantPaths) {
  auto rng = make_rng(2);
  const PathFamily fam(3, {Path(3, {0, 0, 0}), Path(3, {1, 1, 1}), Path(3, {6, 6, 6})});
  const Dist target = weights_on(3, {0, 1, 6}, rng);
  const DbnParams p = layers_from_path_family(fam, target, 30.0);
  EXPECT_EQ(p.widths, (std::vector<int>{3, 3, 3, 3}));
  EXPECT_LT(total_variation(dbn_dist(p), target), 1e-3);
}

TEST(PathLayers, GrayPath) {
  auto rng = make_rng(3);
  const PathFamily fam(3, {Path(3, {0, 1, 3, 2})});
  for (int t = 0; t < 5; ++t) {
    const Dist target = weights_on(3, {0, 1, 3, 2}, rng);
    EXPECT_LT(total_variation(dbn_dist(layers_from_path_family(fam, target)), target), 1e-3);
  }
}

TEST(PathLayers, PointTargets) {
  const PathFamily fam(3, {Path(3, {0, 1, 3, 7})});
  for (StateIndex x : {0u, 1u, 3u, 7u}) {
    EXPECT_LT(total_variation(dbn_dist(layers_from_path_family(fam, Dist::point(3, x))), Dist::point(3, x)), 1e-3);
  }
}

TEST(PathLayers, SeveralPaths) {
  auto rng = make_rng(4);
  // Paths meet on a common edge at step 1 and then go their own ways.
  const PathFamily fam(3, {Path(3, {0, 0, 2, 6}), Path(3, {1, 1, 3, 3}), Path(3, {5, 4, 4, 4})});
  ASSERT_TRUE(is_valid_path_family(fam, true));
  ASSERT_TRUE(sharing_compatible(fam));
  for (int t = 0; t < 5; ++t) {
    const Dist target = weights_on(3, fam.visited_states(), rng);
    EXPECT_LT(total_variation(dbn_dist(layers_from_path_family(fam, target)), target), 1e-3);
  }
}

TEST(PathLayers, RejectsIncompatibleFamilies) {
  const PathFamily fam(3, {Path(3, {0, 1}), Path(3, {0, 2})});
  EXPECT_THROW(layers_from_path_family(fam, Dist::point(3, 1)), std::invalid_argument);
}

TEST(FaceCover, SquareInTwoStates) {
  const PathFamily fam = face_cover_family({CubeFace::whole(2)});
  EXPECT_EQ(fam.length(), 2);
  EXPECT_EQ(fam.visited_states().size(), 4u);
  EXPECT_TRUE(is_valid_path_family(fam, true));
}

TEST(FaceCover, WholeFourCube) {
  const PathFamily fam = face_cover_family({CubeFace::whole(4)});
  EXPECT_EQ(fam.length(), 4);
  EXPECT_EQ(fam.visited_states().size(), 16u);
  EXPECT_TRUE(is_valid_path_family(fam, true));
  EXPECT_TRUE(sharing_compatible(fam));

  auto rng = make_rng(5);
  const Dist target = sample_dirichlet(DirichletParams::symmetric(4, 1.0), rng);
  EXPECT_LT(total_variation(dbn_dist(layers_from_path_family(fam, target)), target), 1e-3);
}

TEST(FaceCover, DisjointFaces) {
  const CubeFace a(4, {2, 3}, {0, 1});
  const CubeFace b(4, {0, 1}, {1, 0});
  const PathFamily fam = face_cover_family({a, b});
  const auto visited = fam.visited_states();
  for (const auto& f : {a, b})
    for (StateIndex x : f.member_indices()) EXPECT_TRUE(std::binary_search(visited.begin(), visited.end(), x));
  EXPECT_TRUE(is_valid_path_family(fam, true));
  EXPECT_TRUE(sharing_compatible(fam));
}

TEST(FaceCover, PaddingAndRejections) {
  const PathFamily fam = face_cover_family({CubeFace(3, {2}, {1})}, 5);
  EXPECT_EQ(fam.length(), 5);
  for (const auto& p : fam.paths()) EXPECT_EQ(p.transitions().back(), kNoChange);

  EXPECT_THROW(face_cover_family({CubeFace(3, {0}, {0}), CubeFace(3, {2}, {0})}), std::invalid_argument);
  EXPECT_THROW(face_cover_family({CubeFace::whole(3)}), std::invalid_argument);
  EXPECT_THROW(face_cover_family({CubeFace::whole(4)}, 3), std::invalid_argument);
  EXPECT_EQ(face_cover_order(2), 0);
  EXPECT_EQ(face_cover_order(4), 1);
  EXPECT_EQ(face_cover_order(7), 2);
  EXPECT_FALSE(face_cover_order(5).has_value());
}

TEST(Depth, KFromLayers) {
  EXPECT_FALSE(depth_to_K(2).has_value());
  const auto three = depth_to_K(3);
  EXPECT_EQ(three->k, 0);
  EXPECT_EQ(three->K, 2);
  EXPECT_EQ(depth_to_K(4)->K, 2);
  EXPECT_EQ(depth_to_K(5)->k, 1);
  EXPECT_EQ(depth_to_K(5)->K, 4);
  EXPECT_EQ(depth_to_K(16)->K, 4);
  EXPECT_EQ(depth_to_K(17)->k, 2);
  EXPECT_EQ(depth_to_K(17)->K, 7);
}

TEST(Depth, UniversalLayerCount) {
  EXPECT_EQ(min_layers_universal(4), 4);
  EXPECT_EQ(min_layers_universal(2), 2);
  for (int n = 4; n < 30; ++n) EXPECT_LE(min_layers_universal(n), min_layers_universal(n + 1));
  EXPECT_NEAR(min_layers_universal_alt(4), 16.0, 1e-12);
}

TEST(PartitionRealisation, SixUnitsThreeLayers) {
  auto rng = make_rng(6);
  std::gamma_distribution<double> gamma(1.0, 1.0);
  for (int t = 0; t < 3; ++t) {
    std::vector<double> w(4);
    double s = 0.0;
    for (double& x : w) s += (x = gamma(rng));
    for (double& x : w) x /= s;
    const DbnParams p = realize_partition_model(6, 3, {0, 1}, {2, 3}, w);
    EXPECT_EQ(p.widths, (std::vector<int>{6, 6, 6, 6}));
    const Dist want = partition_model_member(Partition::cylinder(6, {0, 1}), w);
    EXPECT_LT(total_variation(dbn_dist(p), want), 1e-3);
  }
}

TEST(PartitionRealisation, DepthLimits) {
  const std::vector<double> w(8, 0.125);
  EXPECT_THROW(realize_partition_model(5, 3, {0, 1, 2}, {0, 1, 2}, w), std::invalid_argument);
  EXPECT_THROW(realize_partition_model(4, 3, {0}, {0, 1}, {0.5, 0.5}), std::invalid_argument);
}
