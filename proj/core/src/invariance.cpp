#include "prism/invariance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

#include "prism/error.hpp"
#include "prism/graph.hpp"

namespace prism {

bool InvarianceReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass || !c.asserted; });
}

void InvarianceReport::record(const std::string& name, double deviation, double tol, bool asserted) {
  auto it = std::find_if(checks.begin(), checks.end(), [&](const auto& c) { return c.name == name; });
  if (it == checks.end()) {
    checks.push_back({name, 0, 0.0, tol, true, asserted});
    it = std::prev(checks.end());
  }
  it->trials += 1;
  // NaN must fail, so compare through the negation.
  if (!(deviation <= it->max_dev)) it->max_dev = deviation;
  it->pass = it->max_dev <= it->tol;
}

void InvarianceReport::merge(const InvarianceReport& other) {
  for (const auto& row : other.checks) {
    auto it = std::find_if(checks.begin(), checks.end(), [&](const auto& c) { return c.name == row.name; });
    if (it == checks.end()) {
      checks.push_back(row);
      continue;
    }
    it->trials += row.trials;
    if (!(row.max_dev <= it->max_dev)) it->max_dev = row.max_dev;
    it->tol = std::min(it->tol, row.tol);
    it->pass = it->max_dev <= it->tol;
    it->asserted = it->asserted || row.asserted;
  }
  std::sort(checks.begin(), checks.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
}

const InvarianceCheck* InvarianceReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::string InvarianceReport::to_csv() const {
  std::string out = "check,trials,max_dev,tol,pass\n";
  char buf[256];
  for (const auto& c : checks) {
    std::snprintf(buf, sizeof buf, "%s,%d,%.17g,%.17g,%d\n", c.name.c_str(), c.trials, c.max_dev, c.tol,
                  c.pass ? 1 : 0);
    out += buf;
  }
  return out;
}

// The oracles below deliberately avoid lattice-core's search and graph-construction's
// bounds: plane spacings come from cross products and the enumeration is plain.

namespace {

std::array<double, 3> plane_spacings(const Mat3& L) {
  const double vol = std::abs(L.determinant());
  const Vec3 a = L.col(0), b = L.col(1), c = L.col(2);
  return {vol / b.cross(c).norm(), vol / c.cross(a).norm(), vol / a.cross(b).norm()};
}

}  // namespace

Vec3 oracle_min_image(const CrystalStructure& s, std::size_t i, std::size_t j, int search_radius) {
  if (search_radius < 2) throw ConfigError("oracle search radius must be >= 2");
  const Mat3& L = s.lattice().matrix();
  const Vec3 d = L * (s.site(i).frac - s.site(j).frac);
  Vec3 best = d;
  double best_sq = std::numeric_limits<double>::infinity();
  const int R = search_radius;
  for (int a = -R; a <= R; ++a)
    for (int b = -R; b <= R; ++b)
      for (int c = -R; c <= R; ++c) {
        const Vec3 v = d + L * Vec3(a, b, c);
        const double sq = v.squaredNorm();
        if (sq < best_sq) best_sq = sq, best = v;
      }
  return best;
}

std::vector<OracleEdge> oracle_atomistic_edges(const CrystalStructure& s, double r_c) {
  const Mat3& L = s.lattice().matrix();
  const auto spacing = plane_spacings(L);
  std::array<int, 3> R{};
  for (int k = 0; k < 3; ++k) R[std::size_t(k)] = int(std::ceil(r_c / spacing[std::size_t(k)])) + 1;
  std::vector<OracleEdge> out;
  const int n = int(s.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec3 d = L * (s.site(std::size_t(j)).frac - s.site(std::size_t(i)).frac);
      for (int a = -R[0]; a <= R[0]; ++a)
        for (int b = -R[1]; b <= R[1]; ++b)
          for (int c = -R[2]; c <= R[2]; ++c) {
            const double dist = (d + L * Vec3(a, b, c)).norm();
            if (dist > 0.0 && dist < r_c) out.push_back({i, j, {a, b, c}, dist});
          }
    }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t oracle_cell_edge_count(const LatticeMatrix& lattice, double R_c) {
  const Mat3& L = lattice.matrix();
  const auto spacing = plane_spacings(L);
  std::array<int, 3> R{};
  for (int k = 0; k < 3; ++k) R[std::size_t(k)] = int(std::ceil(R_c / spacing[std::size_t(k)]));
  std::size_t count = 0;
  for (int a = -R[0]; a <= R[0]; ++a)
    for (int b = -R[1]; b <= R[1]; ++b)
      for (int c = -R[2]; c <= R[2]; ++c) {
        if (a == 0 && b == 0 && c == 0) continue;
        if ((L * Vec3(a, b, c)).norm() < R_c) ++count;
      }
  return count;
}

int count_components(int num_nodes, const std::vector<std::pair<int, int>>& edges) {
  std::vector<int> parent(static_cast<std::size_t>(num_nodes));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[std::size_t(x)] != x) {
      parent[std::size_t(x)] = parent[std::size_t(parent[std::size_t(x)])];
      x = parent[std::size_t(x)];
    }
    return x;
  };
  int components = num_nodes;
  for (auto [a, b] : edges) {
    const int ra = find(a), rb = find(b);
    if (ra != rb) parent[std::size_t(std::max(ra, rb))] = std::min(ra, rb), --components;
  }
  return components;
}

int count_components(const PeriodicGraph& g) {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(g.edges.size());
  for (const auto& e : g.edges) edges.emplace_back(e.src, e.dst);
  return count_components(g.num_nodes, edges);
}

CrystalStructure random_structure(Rng& rng, int max_atoms) {
  constexpr double deg = std::numbers::pi / 180.0;
  const double a = rng.uniform(3.0, 6.0), b = rng.uniform(3.0, 6.0), c = rng.uniform(3.0, 6.0);
  const double al = rng.uniform(70, 110) * deg, be = rng.uniform(70, 110) * deg, ga = rng.uniform(70, 110) * deg;
  const double cx = c * std::cos(be);
  const double cy = c * (std::cos(al) - std::cos(be) * std::cos(ga)) / std::sin(ga);
  const LatticeMatrix L = LatticeMatrix::from_vectors(
      Vec3(a, 0, 0), Vec3(b * std::cos(ga), b * std::sin(ga), 0),
      Vec3(cx, cy, std::sqrt(std::max(c * c - cx * cx - cy * cy, 1e-6))));
  const auto wanted = rng.integer(1, max_atoms);
  std::vector<AtomSite> sites;
  for (int attempt = 0; attempt < 500 && std::ssize(sites) < wanted; ++attempt) {
    const Vec3 f(rng.uniform(), rng.uniform(), rng.uniform());
    bool ok = true;
    for (const auto& other : sites)
      ok = ok && min_image_displacement(L, L.matrix() * f, L.matrix() * other.frac).norm() >= 1.0;
    if (ok) sites.push_back({f, int(rng.integer(1, 30))});
  }
  return CrystalStructure(L, std::move(sites));
}

namespace {

double list_deviation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double dev = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) dev = std::max(dev, std::abs(a[k] - b[k]));
  return dev;
}

double matrix_deviation(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return std::numeric_limits<double>::infinity();
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

Matrix layer0_embeddings(const PrismModel& model, const CrystalStructure& s) {
  const Matrix& table = model.params().value("embedding");
  Matrix h(Eigen::Index(s.size()), table.cols());
  for (std::size_t i = 0; i < s.size(); ++i) h.row(Eigen::Index(i)) = table.row(s.site(i).atomic_number - 1);
  return h;
}

struct Probe {
  std::vector<double> atomistic;
  std::vector<double> cell;
  std::vector<double> similarity;
  Matrix multiscale_atoms;
  Matrix multiscale_super;
  double readout = 0.0;
};

Probe probe(const PrismModel& model, const CrystalStructure& s) {
  const auto& cfg = model.config();
  const StaticGraphs graphs = prepare_graphs(s, cfg);
  Probe p;
  p.atomistic = build_atomistic_graph(s, cfg.r_c).sorted_distances();
  p.cell = build_cell_graph(s, cfg.R_c).sorted_distances();
  p.similarity = build_similarity_graph(s, layer0_embeddings(model, s), cfg.r_f, cfg.max_degree).sorted_distances();
  if (cfg.experts.multiscale) {
    ad::Tape t(&model.params(), false);
    const LayerState state = model.initial_state(t, s);
    const LayerState out = experts::multiscale_forward(t, state, layer_prefix(0) + ".multiscale");
    p.multiscale_atoms = out.h_atoms.value();
    p.multiscale_super = out.h_super.value();
  }
  p.readout = model.predict(s, graphs);
  return p;
}

}  // namespace

InvarianceReport check_cell_invariance(const PrismModel& model, const CrystalStructure& s, int trials,
                                       double tol, std::uint64_t seed, double geometry_tol) {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  InvarianceReport report;
  const Probe base = probe(model, s);
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    const auto m = random_unimodular(rng.next(), 6);
    const Probe other = probe(model, apply_cell_transform(s, m));
    report.record("cell.atomistic_distances", list_deviation(base.atomistic, other.atomistic), geometry_tol);
    report.record("cell.cell_distances", list_deviation(base.cell, other.cell), geometry_tol);
    report.record("cell.similarity_distances", list_deviation(base.similarity, other.similarity), geometry_tol);
    if (model.config().experts.multiscale)
      report.record("cell.multiscale_exact",
                    std::max(matrix_deviation(base.multiscale_atoms, other.multiscale_atoms),
                             matrix_deviation(base.multiscale_super, other.multiscale_super)),
                    0.0);
    report.record("cell.readout", std::abs(base.readout - other.readout), tol);
  }
  return report;
}

InvarianceReport check_permutation(const PrismModel& model, const CrystalStructure& s, int trials, double tol,
                                   std::uint64_t seed) {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  auto run = [&](const CrystalStructure& x) {
    ad::Tape t(&model.params(), false);
    const auto graphs = prepare_graphs(x, model.config());
    const auto f = model.forward(t, x, graphs);
    return std::pair<double, Matrix>(f.prediction.scalar(), f.final_state.h_atoms.value());
  };
  InvarianceReport report;
  const auto [base_out, base_atoms] = run(s);
  Rng rng(seed);
  std::vector<std::size_t> perm(s.size());
  for (int t = 0; t < trials; ++t) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(perm);
    const auto [out, atoms] = run(s.permuted(perm));
    double dev = 0.0;
    for (std::size_t k = 0; k < perm.size(); ++k)
      dev = std::max(dev, (atoms.row(Eigen::Index(k)) - base_atoms.row(Eigen::Index(perm[k]))).cwiseAbs().maxCoeff());
    report.record("permutation.readout", std::abs(out - base_out), tol);
    report.record("permutation.atoms", dev, tol);
  }
  return report;
}

InvarianceReport check_rotation(const PrismModel& model, const CrystalStructure& s, int trials, double tol,
                                std::uint64_t seed) {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  const bool asserted = !model.config().direction_features;
  InvarianceReport report;
  const double base = model.predict(s);
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    const double other = model.predict(s.rotated(random_rotation(rng.next())));
    report.record(asserted ? "rotation.readout" : "rotation.readout_directional", std::abs(other - base),
                  asserted ? tol : std::numeric_limits<double>::infinity(), asserted);
  }
  return report;
}

InvarianceReport check_min_image_oracle(int cases, std::uint64_t seed, double tol) {
  constexpr double deg = std::numbers::pi / 180.0;
  InvarianceReport report;
  Rng rng(seed);
  for (int k = 0; k < cases; ++k) {
    // Deliberately skewed cells so the floor candidate is sometimes wrong.
    const double a = rng.uniform(2.0, 8.0), b = rng.uniform(2.0, 8.0), c = rng.uniform(2.0, 8.0);
    const double al = rng.uniform(50, 130) * deg, be = rng.uniform(50, 130) * deg, ga = rng.uniform(50, 130) * deg;
    const double cx = c * std::cos(be);
    const double cy = c * (std::cos(al) - std::cos(be) * std::cos(ga)) / std::sin(ga);
    const double cz2 = c * c - cx * cx - cy * cy;
    if (cz2 < 0.25) {
      --k;
      continue;
    }
    const LatticeMatrix L = LatticeMatrix::from_vectors(Vec3(a, 0, 0), Vec3(b * std::cos(ga), b * std::sin(ga), 0),
                                                        Vec3(cx, cy, std::sqrt(cz2)));
    const CrystalStructure s(L, {{Vec3(rng.uniform(), rng.uniform(), rng.uniform()), 1},
                                 {Vec3(rng.uniform(), rng.uniform(), rng.uniform()), 1}});
    // Any minimum image is no longer than half the sum of the cell edges.
    const double bound = 0.5 * (a + b + c);
    const auto spacing = plane_spacings(L.matrix());
    const double thinnest = std::min({spacing[0], spacing[1], spacing[2]});
    const int R = std::max(2, int(std::ceil(bound / thinnest)) + 1);
    const Vec3 expected = oracle_min_image(s, 0, 1, R);
    const Vec3 got = min_image_displacement(L, s.cart(0), s.cart(1)).disp;
    report.record("min_image.oracle", std::abs(got.norm() - expected.norm()), tol);
  }
  return report;
}

Matrix one_hot_embeddings(const CrystalStructure& s) {
  Matrix h = Matrix::Zero(Eigen::Index(s.size()), kMaxAtomicNumber);
  for (std::size_t i = 0; i < s.size(); ++i) h(Eigen::Index(i), s.site(i).atomic_number - 1) = 1.0;
  return h;
}

std::vector<PathologyScenario> build_pathology_scenarios() {
  std::vector<PathologyScenario> out;
  {
    // Square-net layers 2.5 A apart in plane, 5 A apart along c.
    const auto L = LatticeMatrix::from_vectors(Vec3(2.5, 0, 0), Vec3(0, 2.5, 0), Vec3(0, 0, 10.0));
    CrystalStructure s(L, {{Vec3(0, 0, 0), 6}, {Vec3(0.5, 0.5, 0.5), 6}}, "layered-gap");
    out.push_back({"layered-gap", std::move(s), 3.0, 9.0, 0.5});
  }
  {
    // Rock-salt-like pair: every species appears once, so no two atoms share an embedding.
    const double a = 4.0;
    const auto L = LatticeMatrix::cubic(a);
    CrystalStructure s(L, {{Vec3(0, 0, 0), 11}, {Vec3(0.5, 0.5, 0.5), 17}}, "isolated-species");
    out.push_back({"isolated-species", std::move(s), 3.0, 3.0 * a, 0.5});
  }
  return out;
}

}  // namespace prism
