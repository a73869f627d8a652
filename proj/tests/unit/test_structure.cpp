#include <gtest/gtest.h>

#include <algorithm>

#include "prism/error.hpp"
#include "prism/graph.hpp"
#include "prism/structure.hpp"

using namespace prism;

namespace {

CrystalStructure rocksalt() {
  return CrystalStructure(LatticeMatrix::cubic(4.0), {{Vec3(0, 0, 0), 11}, {Vec3(0.5, 0.5, 0.5), 17}}, "nacl", 1.5);
}

}  // namespace

TEST(Structure, WrapsAndValidates) {
  CrystalStructure s(LatticeMatrix::cubic(3.0), {{Vec3(1.2, -0.1, 0.5), 6}});
  EXPECT_NEAR(s.site(0).frac[0], 0.2, 1e-12);
  EXPECT_NEAR(s.site(0).frac[1], 0.9, 1e-12);
  EXPECT_THROW(CrystalStructure(LatticeMatrix::cubic(3.0), {}), EmptyInput);
  EXPECT_THROW(CrystalStructure(LatticeMatrix::cubic(3.0), {{Vec3::Zero(), 0}}), UnknownElement);
  EXPECT_THROW(CrystalStructure(LatticeMatrix::cubic(3.0), {{Vec3::Zero(), 119}}), UnknownElement);
  EXPECT_THROW(CrystalStructure(LatticeMatrix::cubic(3.0), {{Vec3(NAN, 0, 0), 1}}), NonFinite);
}

TEST(Structure, AccessorsAndCopies) {
  const auto s = rocksalt();
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.atomic_numbers(), (std::vector<int>{11, 17}));
  EXPECT_TRUE(s.cart(1).isApprox(Vec3(2, 2, 2)));
  EXPECT_EQ(*s.target(), 1.5);
  EXPECT_FALSE(s.with_target(std::nullopt).target().has_value());
  EXPECT_EQ(s.with_id("x").id(), "x");
}

TEST(Structure, PermutedReordersSites) {
  const auto s = rocksalt().permuted({1, 0});
  EXPECT_EQ(s.site(0).atomic_number, 17);
  EXPECT_EQ(s.site(1).atomic_number, 11);
}

TEST(Unimodular, RejectsNonUnimodular) {
  EXPECT_THROW(UnimodularTransform({{{2, 0, 0}, {0, 1, 0}, {0, 0, 1}}}), NotUnimodular);
  EXPECT_THROW(UnimodularTransform({{{1, 1, 0}, {1, 1, 0}, {0, 0, 1}}}), NotUnimodular);
  const UnimodularTransform neg({{{0, 1, 0}, {1, 0, 0}, {0, 0, 1}}});
  EXPECT_EQ(neg.determinant(), -1);
}

TEST(Unimodular, InverseIsExact) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto m = random_unimodular(seed, 8);
    EXPECT_EQ(std::abs(m.determinant()), 1);
    const Mat3 prod = m.as_real() * m.inverse().as_real();
    EXPECT_EQ(prod, Mat3::Identity());
  }
}

TEST(CellTransform, IdentityKeepsStructure) {
  const auto s = rocksalt();
  const auto t = apply_cell_transform(s, UnimodularTransform());
  EXPECT_EQ(t.lattice().matrix(), s.lattice().matrix());
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(t.site(i).frac, s.site(i).frac);
}

TEST(CellTransform, PreservesVolumeAndMinImageDistances) {
  const CrystalStructure s(LatticeMatrix::from_vectors(Vec3(4, 0, 0), Vec3(0.7, 3.6, 0), Vec3(0.3, 0.4, 5.2)),
                           {{Vec3(0.1, 0.2, 0.3), 8}, {Vec3(0.6, 0.55, 0.9), 14}, {Vec3(0.35, 0.8, 0.1), 26}});
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto t = apply_cell_transform(s, random_unimodular(seed, 6));
    EXPECT_NEAR(t.lattice().volume(), s.lattice().volume(), 1e-9);
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = 0; j < s.size(); ++j) {
        const double a = min_image_displacement(s.lattice(), s.cart(i), s.cart(j)).norm();
        const double b = min_image_displacement(t.lattice(), t.cart(i), t.cart(j)).norm();
        EXPECT_NEAR(a, b, 1e-9);
      }
  }
}

TEST(Supercell, SizeOrderAndTarget) {
  const auto s = rocksalt();
  const auto sc = build_supercell(s, {2, 1, 3});
  ASSERT_EQ(sc.size(), 12u);
  EXPECT_NEAR(sc.lattice().volume(), 6 * s.lattice().volume(), 1e-9);
  // Site index varies fastest.
  EXPECT_EQ(sc.site(0).atomic_number, 11);
  EXPECT_EQ(sc.site(1).atomic_number, 17);
  EXPECT_THROW(build_supercell(s, {0, 1, 1}), DimensionMismatch);
}

TEST(Supercell, NeighborDistancesConsistent) {
  // Every atom of the supercell sees the same radius-graph distances as its
  // parent atom in the primitive cell.
  const CrystalStructure s(LatticeMatrix::from_vectors(Vec3(3.1, 0, 0), Vec3(0.4, 3.3, 0), Vec3(0.2, 0.1, 3.6)),
                           {{Vec3(0.1, 0.2, 0.3), 8}, {Vec3(0.6, 0.55, 0.9), 14}});
  const double r_c = 4.5;
  const auto sc = build_supercell(s, {2, 2, 1});
  const auto g = build_atomistic_graph(s, r_c);
  const auto gs = build_atomistic_graph(sc, r_c);
  auto per_source = [](const PeriodicGraph& graph, int src) {
    std::vector<double> d;
    for (const auto& e : graph.edges)
      if (e.src == src) d.push_back(e.dist);
    std::sort(d.begin(), d.end());
    return d;
  };
  for (int i = 0; i < int(sc.size()); ++i) {
    const auto a = per_source(gs, i);
    const auto b = per_source(g, i % int(s.size()));
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-9);
  }
}

TEST(Rotation, IsProperOrthogonal) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Mat3 r = random_rotation(seed);
    EXPECT_LT((r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
  }
  EXPECT_EQ(random_rotation(3), random_rotation(3));
}
