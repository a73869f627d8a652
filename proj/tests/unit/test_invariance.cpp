#include <gtest/gtest.h>

#include "prism/error.hpp"
#include "prism/graph.hpp"
#include "prism/invariance.hpp"

using namespace prism;

TEST(OracleMinImage, Examples) {
  const CrystalStructure s(LatticeMatrix::cubic(5.0), {{Vec3(0, 0, 0), 1}, {Vec3(0.98, 0, 0), 1}});
  EXPECT_TRUE(oracle_min_image(s, 0, 1, 2).isApprox(Vec3(0.1, 0, 0), 1e-12));
  EXPECT_EQ(oracle_min_image(s, 1, 1, 2), Vec3::Zero());
  EXPECT_THROW(oracle_min_image(s, 0, 1, 1), ConfigError);
}

TEST(OracleMinImage, AgreesWithProduction) {
  const auto r = check_min_image_oracle(1000, 17);
  ASSERT_EQ(r.checks.size(), 1u);
  EXPECT_EQ(r.checks[0].trials, 1000);
  EXPECT_TRUE(r.all_pass()) << r.to_csv();
}

TEST(OracleMinImage, SameTieBreak) {
  const CrystalStructure s(LatticeMatrix::cubic(4.0), {{Vec3(0, 0, 0), 1}, {Vec3(0.5, 0, 0), 1}});
  const Vec3 o = oracle_min_image(s, 0, 1, 3);
  const auto m = min_image_displacement(s.lattice(), s.cart(0), s.cart(1));
  EXPECT_EQ(o, m.disp);
}

TEST(Components, UnionFind) {
  EXPECT_EQ(count_components(4, {}), 4);
  EXPECT_EQ(count_components(4, {{0, 1}, {2, 3}}), 2);
  EXPECT_EQ(count_components(4, {{0, 1}, {1, 2}, {3, 2}}), 1);
  EXPECT_EQ(count_components(3, {{1, 1}}), 3);
}

TEST(Report, PassRuleAndCsv) {
  InvarianceReport r;
  r.record("b", 1e-7, 1e-6);
  r.record("b", 2e-7, 1e-6);
  r.record("a", 0.0, 0.0);
  EXPECT_TRUE(r.all_pass());
  r.record("a", 1e-300, 0.0);
  EXPECT_FALSE(r.all_pass());
  r.record("c", NAN, 1.0);
  EXPECT_FALSE(r.find("c")->pass);
  InvarianceReport merged;
  merged.merge(r);
  EXPECT_EQ(merged.checks.front().name, "a");
  EXPECT_EQ(merged.find("b")->trials, 2);
  EXPECT_EQ(merged.to_csv().rfind("check,trials,max_dev,tol,pass\n", 0), 0u);
}

TEST(CellInvariance, IdentityAndRandomTransforms) {
  Rng rng(30);
  const auto model = PrismModel::initialize(ModelConfig{}, 2);
  for (int k = 0; k < 3; ++k) {
    auto s = random_structure(rng, 4);
    const auto r = check_cell_invariance(model, s, 20, kForwardTolerance, 100 + std::uint64_t(k));
    EXPECT_TRUE(r.all_pass()) << r.to_csv();
    ASSERT_NE(r.find("cell.multiscale_exact"), nullptr);
    EXPECT_EQ(r.find("cell.multiscale_exact")->max_dev, 0.0);
    EXPECT_EQ(r.find("cell.readout")->trials, 20);
  }
}

TEST(CellInvariance, MultiscaleRowOnlyWhenEnabled) {
  ModelConfig c;
  c.experts.multiscale = false;
  const auto model = PrismModel::initialize(c, 2);
  Rng rng(4);
  const auto r = check_cell_invariance(model, random_structure(rng, 3), 2, kForwardTolerance, 1);
  EXPECT_EQ(r.find("cell.multiscale_exact"), nullptr);
  EXPECT_THROW(check_cell_invariance(model, random_structure(rng, 3), 0, 1e-6, 1), ConfigError);
}

TEST(Permutation, SwapOfIdenticalAtomsIsExact) {
  const CrystalStructure s(LatticeMatrix::cubic(4.5),
                           {{Vec3(0, 0, 0), 8}, {Vec3(0.5, 0.5, 0), 8}, {Vec3(0.25, 0.1, 0.6), 14}});
  const auto model = PrismModel::initialize(ModelConfig{}, 3);
  const auto base = model.predict(s);
  EXPECT_EQ(model.predict(s.permuted({1, 0, 2})), base);
  const auto r = check_permutation(model, s, 20, kPermutationTolerance, 5);
  EXPECT_TRUE(r.all_pass()) << r.to_csv();
}

TEST(Pathology, LayeredGapDisconnects) {
  const auto scenarios = build_pathology_scenarios();
  ASSERT_EQ(scenarios.size(), 2u);
  const auto& a = scenarios[0];
  EXPECT_EQ(a.name, "layered-gap");
  const auto g = build_atomistic_graph(a.structure, a.r_c);
  EXPECT_GT(g.num_edges(), 0u);
  EXPECT_GE(count_components(g), 2);
  // The superatom star reconnects everything.
  auto m = build_multiscale_graph(a.structure);
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : g.edges) edges.emplace_back(e.src, e.dst);
  for (const auto& e : m.edges) edges.emplace_back(e.src, e.dst);
  EXPECT_EQ(count_components(m.num_nodes, edges), 1);
}

TEST(Pathology, IsolatedSpeciesHasEmptyFeatureGraph) {
  const auto scenarios = build_pathology_scenarios();
  const auto& b = scenarios[1];
  EXPECT_EQ(b.name, "isolated-species");
  const auto sim = build_similarity_graph(b.structure, one_hot_embeddings(b.structure), b.r_f, 8);
  EXPECT_EQ(sim.num_edges(), 0u);
  const auto cell = build_cell_graph(b.structure, b.R_c);
  EXPECT_GT(cell.num_edges(), 0u);
  EXPECT_EQ(cell.num_edges(), oracle_cell_edge_count(b.structure.lattice(), b.R_c));
  // Default-initialised element embeddings are also far apart.
  const auto model = PrismModel::initialize(ModelConfig{}, 0);
  Matrix h(2, model.config().dim);
  h.row(0) = model.params().value("embedding").row(10);
  h.row(1) = model.params().value("embedding").row(16);
  EXPECT_EQ(build_similarity_graph(b.structure, h, b.r_f, 8).num_edges(), 0u);
}
