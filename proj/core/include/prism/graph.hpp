#pragma once

#include <Eigen/Core>
#include <array>
#include <string_view>
#include <vector>

#include "prism/lattice.hpp"
#include "prism/structure.hpp"

namespace prism {

enum class GraphKind { Atomistic, Similarity, Cell, Multiscale };

std::string_view to_string(GraphKind kind);

/// Directed edge src -> dst through image `shift`. disp = r_dst - r_src + L shift.
struct PeriodicEdge {
  int src = 0;
  int dst = 0;
  ShiftVector shift;
  Vec3 disp = Vec3::Zero();
  double dist = 0.0;

  // Canonical order: (src, dst, shift).
  friend bool operator<(const PeriodicEdge& a, const PeriodicEdge& b) {
    if (a.src != b.src) return a.src < b.src;
    if (a.dst != b.dst) return a.dst < b.dst;
    return a.shift < b.shift;
  }
};

struct PeriodicGraph {
  GraphKind kind = GraphKind::Atomistic;
  int num_nodes = 0;
  std::vector<PeriodicEdge> edges;
  /// Set when a builder produced zero edges. Not an error.
  bool empty_warning = false;

  /// Multiscale edges are connectivity only; disp/dist are zero and meaningless.
  bool has_geometry() const { return kind != GraphKind::Multiscale; }
  std::size_t num_edges() const { return edges.size(); }
  std::vector<double> sorted_distances() const;
};

struct ShiftBounds {
  std::array<int, 3> max_n{0, 0, 0};
};

/// max_n[k] = ceil(cutoff * ||row_k(L^-1)||). For wrapped fractional coordinates,
/// every image within the cutoff lies in [-max_n, max_n]^3.
ShiftBounds shift_bounds(const LatticeMatrix& lattice, double cutoff);

/// Multi-edge radius graph: one edge per (i, j, n) with 0 < |r_j - r_i + L n| < r_c.
/// Periodic self-images (i == j, n != 0) are included.
PeriodicGraph build_atomistic_graph(const CrystalStructure& s, double r_c);

/// One superatom node (index 0) linked to every replica L n, n != 0, with |L n| < R_c.
PeriodicGraph build_cell_graph(const CrystalStructure& s, double R_c);

/// Atoms are nodes 0..N-1 and the superatom is node N. 2N edges, no geometry.
PeriodicGraph build_multiscale_graph(const CrystalStructure& s);

/// Feature-space graph: i -> j (i != j) when ||h_i - h_j|| < r_f, keeping the
/// max_degree nearest in feature space per source (ties to the smaller index).
/// Each edge carries the minimum-image displacement r_j - r_i + L n.
/// Throws DimensionMismatch when embeddings.rows() != N.
PeriodicGraph build_similarity_graph(const CrystalStructure& s, const Eigen::MatrixXd& embeddings,
                                     double r_f, int max_degree);

}  // namespace prism
