#include <gtest/gtest.h>

#include <cmath>

#include "prism/error.hpp"
#include "prism/graph.hpp"
#include "prism/invariance.hpp"
#include "prism/structure_io.hpp"
#include "prism/synthetic.hpp"

using namespace prism;

namespace {

// Independent recomputation of the closed-form targets: pairs by plain image
// enumeration, spacing from the cell height along the layer normal.
double lj(double d) {
  const double x = 1.5 / d;
  const double x6 = x * x * x * x * x * x;
  return 4.0 * (x6 * x6 - x6);
}

double short_range_oracle(const CrystalStructure& s) {
  double e = 0.0;
  for (const auto& edge : oracle_atomistic_edges(s, 4.0)) e += lj(edge.dist);
  return e / (2.0 * double(s.size()));
}

double spacing_oracle(const CrystalStructure& s) {
  const Mat3& L = s.lattice().matrix();
  const Vec3 normal = L.col(0).cross(L.col(1)).normalized();
  return std::abs(normal.dot(L.col(2))) / 2.0;
}

}  // namespace

TEST(Synthetic, KindNames) {
  for (auto k : {SyntheticKind::ShortRange, SyntheticKind::LongRange, SyntheticKind::Mixed})
    EXPECT_EQ(parse_synthetic_kind(to_string(k)), k);
  EXPECT_FALSE(parse_synthetic_kind("other").has_value());
}

TEST(Synthetic, SizesAndDeterminism) {
  for (auto k : {SyntheticKind::ShortRange, SyntheticKind::LongRange, SyntheticKind::Mixed}) {
    const auto a = generate_synthetic(k, 40, 3);
    ASSERT_EQ(a.size(), 40u);
    for (const auto& s : a) {
      EXPECT_GE(s.size(), 1u);
      EXPECT_LE(s.size(), 8u);
      EXPECT_TRUE(s.target().has_value());
    }
    EXPECT_EQ(serialize_structures(a), serialize_structures(generate_synthetic(k, 40, 3)));
    EXPECT_NE(serialize_structures(a), serialize_structures(generate_synthetic(k, 40, 4)));
  }
  EXPECT_THROW(generate_synthetic(SyntheticKind::Mixed, 0, 1), EmptyInput);
}

TEST(Synthetic, TargetsMatchIndependentRecomputation) {
  for (const auto& s : generate_synthetic(SyntheticKind::ShortRange, 100, 5))
    EXPECT_NEAR(*s.target(), short_range_oracle(s), 1e-10) << s.id();
  for (const auto& s : generate_synthetic(SyntheticKind::LongRange, 100, 5))
    EXPECT_NEAR(*s.target(), 10.0 / spacing_oracle(s), 1e-10) << s.id();
  for (const auto& s : generate_synthetic(SyntheticKind::Mixed, 100, 5))
    EXPECT_NEAR(*s.target(), 0.5 * short_range_oracle(s) + 0.5 * 10.0 / spacing_oracle(s), 1e-10) << s.id();
}

TEST(Synthetic, TargetsSurviveSerialization) {
  const auto a = generate_synthetic(SyntheticKind::Mixed, 30, 8);
  std::istringstream in(serialize_structures(a));
  const auto b = parse_structures(in);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(*a[k].target(), *b[k].target());
    EXPECT_NEAR(*b[k].target(), 0.5 * short_range_oracle(b[k]) + 0.5 * 10.0 / spacing_oracle(b[k]), 1e-10);
  }
}

TEST(Synthetic, LongRangeLayersAreDisconnectedAtomistically) {
  for (const auto& s : generate_synthetic(SyntheticKind::LongRange, 200, 9)) {
    EXPECT_GT(spacing_oracle(s), 4.0);
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : oracle_atomistic_edges(s, 4.0)) edges.emplace_back(e.src, e.dst);
    EXPECT_GE(count_components(int(s.size()), edges), 2) << s.id();
  }
}

TEST(Synthetic, MinimumSeparationRespected) {
  for (const auto& s : generate_synthetic(SyntheticKind::ShortRange, 50, 10))
    for (const auto& e : oracle_atomistic_edges(s, 1.59)) ADD_FAILURE() << s.id() << " has a pair at " << e.dist;
}
