#include "prism/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "prism/error.hpp"
#include "prism/graph.hpp"
#include "prism/random.hpp"

namespace prism {

std::string_view to_string(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::ShortRange: return "short-range";
    case SyntheticKind::LongRange: return "long-range";
    case SyntheticKind::Mixed: return "mixed";
  }
  return "unknown";
}

std::optional<SyntheticKind> parse_synthetic_kind(std::string_view name) {
  if (name == "short-range") return SyntheticKind::ShortRange;
  if (name == "long-range") return SyntheticKind::LongRange;
  if (name == "mixed") return SyntheticKind::Mixed;
  return std::nullopt;
}

namespace synthetic {

double lj_kernel(double d) {
  const double x6 = std::pow(kLjSigma / d, 6);
  return 4.0 * kLjEpsilon * (x6 * x6 - x6);
}

double short_range_energy(const CrystalStructure& s) {
  const auto g = build_atomistic_graph(s, kPairCutoff);
  double e = 0.0;
  for (const auto& edge : g.edges) e += lj_kernel(edge.dist);
  return e / (2.0 * double(s.size()));
}

double layer_spacing(const CrystalStructure& s) {
  const auto& L = s.lattice();
  const double height = L.volume() / L.column(0).cross(L.column(1)).norm();
  return height / 2.0;
}

double long_range_term(const CrystalStructure& s) { return kLongRangeScale / layer_spacing(s); }

}  // namespace synthetic

namespace {

constexpr int kSpecies[] = {3, 6, 8, 11, 14, 26};
constexpr double kDeg = std::numbers::pi / 180.0;

int random_species(Rng& rng) {
  return kSpecies[rng.integer(0, std::ssize(kSpecies) - 1)];
}

LatticeMatrix lattice_from_parameters(double a, double b, double c, double alpha, double beta,
                                      double gamma) {
  const double ca = std::cos(alpha), cb = std::cos(beta), cg = std::cos(gamma), sg = std::sin(gamma);
  const Vec3 l1(a, 0.0, 0.0);
  const Vec3 l2(b * cg, b * sg, 0.0);
  const double cx = c * cb;
  const double cy = c * (ca - cb * cg) / sg;
  const double cz = std::sqrt(std::max(c * c - cx * cx - cy * cy, 1e-6));
  return LatticeMatrix::from_vectors(l1, l2, Vec3(cx, cy, cz));
}

bool far_enough(const LatticeMatrix& L, const std::vector<AtomSite>& sites, const Vec3& f) {
  const Vec3 r = L.matrix() * f;
  for (const auto& s : sites)
    if (min_image_displacement(L, r, L.matrix() * s.frac).norm() < synthetic::kMinSeparation) return false;
  return true;
}

CrystalStructure bulk_cell(Rng& rng) {
  const LatticeMatrix L = lattice_from_parameters(
      rng.uniform(3.5, 6.0), rng.uniform(3.5, 6.0), rng.uniform(3.5, 6.0), rng.uniform(75, 105) * kDeg,
      rng.uniform(75, 105) * kDeg, rng.uniform(75, 105) * kDeg);
  const auto wanted = rng.integer(1, 8);
  std::vector<AtomSite> sites;
  for (int attempt = 0; attempt < 200 && std::ssize(sites) < wanted; ++attempt) {
    const Vec3 f(rng.uniform(), rng.uniform(), rng.uniform());
    if (far_enough(L, sites, f)) sites.push_back({f, random_species(rng)});
  }
  return CrystalStructure(L, std::move(sites));
}

// Two layers at fractional heights 0 and 1/2 of a cell whose third vector is
// normal to the layer plane, so the spacing is exactly c / 2.
CrystalStructure layered_cell(Rng& rng, double spacing_min, double spacing_max) {
  const double a = rng.uniform(3.0, 4.5), b = rng.uniform(3.0, 4.5);
  const double gamma = rng.uniform(60, 120) * kDeg;
  const double spacing = rng.uniform(spacing_min, spacing_max);
  const LatticeMatrix L = LatticeMatrix::from_vectors(
      Vec3(a, 0, 0), Vec3(b * std::cos(gamma), b * std::sin(gamma), 0), Vec3(0, 0, 2.0 * spacing));
  std::vector<AtomSite> sites;
  for (double z : {0.0, 0.5}) {
    const auto wanted = rng.integer(1, 4);
    std::vector<AtomSite> layer;
    for (int attempt = 0; attempt < 200 && std::ssize(layer) < wanted; ++attempt) {
      const Vec3 f(rng.uniform(), rng.uniform(), z);
      if (far_enough(L, layer, f)) layer.push_back({f, random_species(rng)});
    }
    sites.insert(sites.end(), layer.begin(), layer.end());
  }
  return CrystalStructure(L, std::move(sites));
}

}  // namespace

std::vector<CrystalStructure> generate_synthetic(SyntheticKind kind, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw EmptyInput("generate_synthetic needs n >= 1");
  Rng rng(seed);
  std::vector<CrystalStructure> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    char id[64];
    std::snprintf(id, sizeof id, "%s-%06zu", std::string(to_string(kind)).c_str(), i);
    double target = 0.0;
    std::optional<CrystalStructure> s;
    switch (kind) {
      case SyntheticKind::ShortRange:
        s.emplace(bulk_cell(rng));
        target = synthetic::short_range_energy(*s);
        break;
      case SyntheticKind::LongRange:
        s.emplace(layered_cell(rng, synthetic::kLayerSpacingMin, synthetic::kLayerSpacingMax));
        target = synthetic::long_range_term(*s);
        break;
      case SyntheticKind::Mixed:
        s.emplace(layered_cell(rng, synthetic::kMixedSpacingMin, synthetic::kLayerSpacingMax));
        target = synthetic::kMixedShortWeight * synthetic::short_range_energy(*s) +
                 synthetic::kMixedLongWeight * synthetic::long_range_term(*s);
        break;
    }
    out.push_back(CrystalStructure(s->lattice(), s->sites(), id, target));
  }
  return out;
}

}  // namespace prism
