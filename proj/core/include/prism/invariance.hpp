#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "prism/model.hpp"
#include "prism/random.hpp"
#include "prism/structure.hpp"

namespace prism {

struct InvarianceCheck {
  std::string name;
  int trials = 0;
  double max_dev = 0.0;
  double tol = 0.0;
  bool pass = true;
  /// False for informational rows (e.g. rotation with direction features).
  bool asserted = true;
};

struct InvarianceReport {
  std::vector<InvarianceCheck> checks;

  bool all_pass() const;
  /// Accumulates a deviation into the named row, creating it on first use.
  void record(const std::string& name, double deviation, double tol, bool asserted = true);
  /// Rows are kept sorted by name so merged reports do not depend on check order.
  void merge(const InvarianceReport& other);
  const InvarianceCheck* find(const std::string& name) const;
  /// check,trials,max_dev,tol,pass
  std::string to_csv() const;
};

inline constexpr double kGeometryTolerance = 1e-9;
inline constexpr double kForwardTolerance = 1e-6;
inline constexpr double kPermutationTolerance = 1e-10;

/// Exhaustive minimum of |r_i - r_j + L n| over n in [-R, R]^3, ties to the
/// lexicographically smallest n. Throws ConfigError for R < 2.
Vec3 oracle_min_image(const CrystalStructure& s, std::size_t i, std::size_t j, int search_radius);

struct OracleEdge {
  int src = 0;
  int dst = 0;
  std::array<int, 3> shift{0, 0, 0};
  double dist = 0.0;
  auto operator<=>(const OracleEdge&) const = default;
};

/// Brute-force radius graph by image enumeration, bounded through plane spacings.
/// Sorted by (src, dst, shift).
std::vector<OracleEdge> oracle_atomistic_edges(const CrystalStructure& s, double r_c);

/// Nonzero lattice translations shorter than R_c, by enumeration.
std::size_t oracle_cell_edge_count(const LatticeMatrix& lattice, double R_c);

/// Union-find over the undirected version of the edge list.
int count_components(int num_nodes, const std::vector<std::pair<int, int>>& edges);
int count_components(const PeriodicGraph& g);

/// Random cell with 1..max_atoms sites, mildly skewed, separations >= 1 A.
CrystalStructure random_structure(Rng& rng, int max_atoms);

/// Rows: cell.atomistic_distances, cell.cell_distances, cell.similarity_distances,
/// cell.multiscale_exact, cell.readout.
InvarianceReport check_cell_invariance(const PrismModel& model, const CrystalStructure& s, int trials,
                                       double tol, std::uint64_t seed,
                                       double geometry_tol = kGeometryTolerance);

/// Rows: permutation.readout, permutation.atoms.
InvarianceReport check_permutation(const PrismModel& model, const CrystalStructure& s, int trials,
                                   double tol, std::uint64_t seed);

/// Row rotation.readout; asserted only when edge features are distance-only.
InvarianceReport check_rotation(const PrismModel& model, const CrystalStructure& s, int trials,
                                double tol, std::uint64_t seed);

/// Row min_image.oracle over random lattices and pairs.
InvarianceReport check_min_image_oracle(int cases, std::uint64_t seed, double tol = kGeometryTolerance);

struct PathologyScenario {
  std::string name;
  CrystalStructure structure;
  double r_c = 0.0;
  double R_c = 0.0;
  double r_f = 0.0;
};

/// layered-gap: two layers 5 A apart probed at r_c = 3.
/// isolated-species: one atom per species, probed with one-hot embeddings.
std::vector<PathologyScenario> build_pathology_scenarios();

/// Rows of unit vectors, one per site, keyed by atomic number. Distinct species
/// sit sqrt(2) apart; identical species coincide.
Matrix one_hot_embeddings(const CrystalStructure& s);

}  // namespace prism
