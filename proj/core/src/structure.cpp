#include "prism/structure.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <numeric>

#include "prism/error.hpp"
#include "prism/random.hpp"

namespace prism {

CrystalStructure::CrystalStructure(LatticeMatrix lattice, std::vector<AtomSite> sites,
                                   std::string id, std::optional<double> target)
    : lattice_(std::move(lattice)), sites_(std::move(sites)), id_(std::move(id)), target_(target) {
  if (sites_.empty()) throw EmptyInput("a crystal structure needs at least one site");
  for (auto& site : sites_) {
    if (site.atomic_number < 1 || site.atomic_number > kMaxAtomicNumber)
      throw UnknownElement("atomic number " + std::to_string(site.atomic_number) +
                           " outside [1, 118]");
    site.frac = wrap_to_cell(site.frac);
  }
  if (target_ && !std::isfinite(*target_)) throw NonFinite("structure target is not finite");
}

std::vector<int> CrystalStructure::atomic_numbers() const {
  std::vector<int> z;
  z.reserve(sites_.size());
  for (const auto& s : sites_) z.push_back(s.atomic_number);
  return z;
}

CrystalStructure CrystalStructure::with_target(std::optional<double> target) const {
  return CrystalStructure(lattice_, sites_, id_, target);
}

CrystalStructure CrystalStructure::with_id(std::string id) const {
  return CrystalStructure(lattice_, sites_, std::move(id), target_);
}

CrystalStructure CrystalStructure::rotated(const Mat3& rotation) const {
  return CrystalStructure(LatticeMatrix(rotation * lattice_.matrix()), sites_, id_, target_);
}

CrystalStructure CrystalStructure::permuted(const std::vector<std::size_t>& perm) const {
  if (perm.size() != sites_.size()) throw DimensionMismatch("permutation length differs from N");
  std::vector<AtomSite> out;
  out.reserve(perm.size());
  for (auto p : perm) out.push_back(sites_.at(p));
  return CrystalStructure(lattice_, std::move(out), id_, target_);
}

namespace {

int det3(const UnimodularTransform::Matrix& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

}  // namespace

UnimodularTransform::UnimodularTransform(const Matrix& m) : m_(m) {
  const int d = det3(m_);
  if (d != 1 && d != -1)
    throw NotUnimodular("transform determinant is " + std::to_string(d) + ", expected +-1");
}

int UnimodularTransform::determinant() const { return det3(m_); }

UnimodularTransform UnimodularTransform::inverse() const {
  const auto& m = m_;
  const int d = determinant();
  Matrix adj{};
  adj[0][0] = m[1][1] * m[2][2] - m[1][2] * m[2][1];
  adj[0][1] = m[0][2] * m[2][1] - m[0][1] * m[2][2];
  adj[0][2] = m[0][1] * m[1][2] - m[0][2] * m[1][1];
  adj[1][0] = m[1][2] * m[2][0] - m[1][0] * m[2][2];
  adj[1][1] = m[0][0] * m[2][2] - m[0][2] * m[2][0];
  adj[1][2] = m[0][2] * m[1][0] - m[0][0] * m[1][2];
  adj[2][0] = m[1][0] * m[2][1] - m[1][1] * m[2][0];
  adj[2][1] = m[0][1] * m[2][0] - m[0][0] * m[2][1];
  adj[2][2] = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  for (auto& row : adj)
    for (auto& v : row) v *= d;  // d = +-1, so adj / d == adj * d
  return UnimodularTransform(adj);
}

Mat3 UnimodularTransform::as_real() const {
  Mat3 out;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out(r, c) = at(r, c);
  return out;
}

CrystalStructure apply_cell_transform(const CrystalStructure& s, const UnimodularTransform& m) {
  const Mat3 inv = m.inverse().as_real();
  LatticeMatrix lattice(s.lattice().matrix() * m.as_real());
  std::vector<AtomSite> sites = s.sites();
  for (auto& site : sites) site.frac = wrap_to_cell(inv * site.frac);
  return CrystalStructure(std::move(lattice), std::move(sites), s.id(), s.target());
}

CrystalStructure build_supercell(const CrystalStructure& s, std::array<int, 3> reps) {
  for (int r : reps)
    if (r < 1) throw DimensionMismatch("supercell repetitions must be >= 1");
  Mat3 cols = s.lattice().matrix();
  for (int k = 0; k < 3; ++k) cols.col(k) *= reps[std::size_t(k)];

  std::vector<AtomSite> sites;
  sites.reserve(s.size() * std::size_t(reps[0] * reps[1] * reps[2]));
  for (int a = 0; a < reps[0]; ++a)
    for (int b = 0; b < reps[1]; ++b)
      for (int c = 0; c < reps[2]; ++c)
        for (const auto& site : s.sites()) {
          const Vec3 f = (site.frac + Vec3(a, b, c)).cwiseQuotient(Vec3(reps[0], reps[1], reps[2]));
          sites.push_back({f, site.atomic_number});
        }
  return CrystalStructure(LatticeMatrix(cols), std::move(sites), s.id(), s.target());
}

UnimodularTransform random_unimodular(std::uint64_t seed, int steps) {
  Rng rng(seed);
  auto m = UnimodularTransform::identity();
  for (int step = 0; step < steps; ++step) {
    const auto from = static_cast<std::size_t>(rng.integer(0, 2));
    auto to = static_cast<std::size_t>(rng.integer(0, 1));
    if (to >= from) ++to;
    if (rng.integer(0, 3) == 0) {
      std::swap(m[from], m[to]);
    } else {
      const int sign = rng.integer(0, 1) == 0 ? 1 : -1;
      for (std::size_t c = 0; c < 3; ++c) m[to][c] += sign * m[from][c];
    }
  }
  return UnimodularTransform(m);
}

Mat3 random_rotation(std::uint64_t seed) {
  Rng rng(seed);
  Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  q.normalize();
  return q.toRotationMatrix();
}

}  // namespace prism
