#include "prism/graph.hpp"

#include <algorithm>
#include <cmath>

#include "prism/error.hpp"

namespace prism {

std::string_view to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::Atomistic: return "atomistic";
    case GraphKind::Similarity: return "similarity";
    case GraphKind::Cell: return "cell";
    case GraphKind::Multiscale: return "multiscale";
  }
  return "unknown";
}

std::vector<double> PeriodicGraph::sorted_distances() const {
  std::vector<double> d;
  d.reserve(edges.size());
  for (const auto& e : edges) d.push_back(e.dist);
  std::sort(d.begin(), d.end());
  return d;
}

namespace {

void require_positive(double cutoff, const char* what) {
  if (!(cutoff > 0.0) || !std::isfinite(cutoff))
    throw ConfigError(std::string(what) + " must be a positive finite number");
}

void finalize(PeriodicGraph& g) {
  std::sort(g.edges.begin(), g.edges.end());
  g.empty_warning = g.edges.empty();
}

}  // namespace

ShiftBounds shift_bounds(const LatticeMatrix& lattice, double cutoff) {
  require_positive(cutoff, "cutoff");
  ShiftBounds b;
  for (int k = 0; k < 3; ++k)
    b.max_n[std::size_t(k)] = static_cast<int>(std::ceil(cutoff * lattice.inverse().row(k).norm()));
  return b;
}

PeriodicGraph build_atomistic_graph(const CrystalStructure& s, double r_c) {
  require_positive(r_c, "r_c");
  const auto& L = s.lattice();
  const auto bounds = shift_bounds(L, r_c);
  const auto& mx = bounds.max_n;
  const int n_atoms = static_cast<int>(s.size());

  std::vector<Vec3> pos(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) pos[i] = s.cart(i);

  PeriodicGraph g;
  g.kind = GraphKind::Atomistic;
  g.num_nodes = n_atoms;
  for (int i = 0; i < n_atoms; ++i) {
    for (int j = 0; j < n_atoms; ++j) {
      const Vec3 base = pos[std::size_t(j)] - pos[std::size_t(i)];
      for (int a = -mx[0]; a <= mx[0]; ++a)
        for (int b = -mx[1]; b <= mx[1]; ++b)
          for (int c = -mx[2]; c <= mx[2]; ++c) {
            const ShiftVector n(a, b, c);
            const Vec3 disp = base + L * n;
            const double dist = disp.norm();
            if (dist > 0.0 && dist < r_c) g.edges.push_back({i, j, n, disp, dist});
          }
    }
  }
  finalize(g);
  return g;
}

PeriodicGraph build_cell_graph(const CrystalStructure& s, double R_c) {
  require_positive(R_c, "R_c");
  const auto& L = s.lattice();
  const auto& mx = shift_bounds(L, R_c).max_n;

  PeriodicGraph g;
  g.kind = GraphKind::Cell;
  g.num_nodes = 1;
  for (int a = -mx[0]; a <= mx[0]; ++a)
    for (int b = -mx[1]; b <= mx[1]; ++b)
      for (int c = -mx[2]; c <= mx[2]; ++c) {
        const ShiftVector n(a, b, c);
        if (n.is_zero()) continue;
        const Vec3 disp = L * n;
        const double dist = disp.norm();
        if (dist < R_c) g.edges.push_back({0, 0, n, disp, dist});
      }
  finalize(g);
  return g;
}

PeriodicGraph build_multiscale_graph(const CrystalStructure& s) {
  const int n = static_cast<int>(s.size());
  PeriodicGraph g;
  g.kind = GraphKind::Multiscale;
  g.num_nodes = n + 1;
  g.edges.reserve(std::size_t(2 * n));
  for (int i = 0; i < n; ++i) g.edges.push_back({i, n, {}, Vec3::Zero(), 0.0});
  for (int i = 0; i < n; ++i) g.edges.push_back({n, i, {}, Vec3::Zero(), 0.0});
  finalize(g);
  return g;
}

PeriodicGraph build_similarity_graph(const CrystalStructure& s, const Eigen::MatrixXd& embeddings,
                                     double r_f, int max_degree) {
  require_positive(r_f, "r_f");
  if (max_degree < 1) throw ConfigError("max_degree must be >= 1");
  const int n = static_cast<int>(s.size());
  if (embeddings.rows() != n)
    throw DimensionMismatch("similarity graph: " + std::to_string(embeddings.rows()) +
                            " embeddings for " + std::to_string(n) + " atoms");

  std::vector<Vec3> pos(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) pos[i] = s.cart(i);

  PeriodicGraph g;
  g.kind = GraphKind::Similarity;
  g.num_nodes = n;
  std::vector<std::pair<double, int>> candidates;
  for (int i = 0; i < n; ++i) {
    candidates.clear();
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double fd = (embeddings.row(i) - embeddings.row(j)).norm();
      if (fd < r_f) candidates.emplace_back(fd, j);
    }
    std::sort(candidates.begin(), candidates.end());
    const auto keep = std::min<std::size_t>(candidates.size(), std::size_t(max_degree));
    for (std::size_t k = 0; k < keep; ++k) {
      const int j = candidates[k].second;
      const auto mi = min_image_displacement(s.lattice(), pos[std::size_t(j)], pos[std::size_t(i)]);
      g.edges.push_back({i, j, mi.shift, mi.disp, mi.disp.norm()});
    }
  }
  finalize(g);
  return g;
}

}  // namespace prism
