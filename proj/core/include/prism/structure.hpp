#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "prism/lattice.hpp"

namespace prism {

inline constexpr int kMaxAtomicNumber = 118;

struct AtomSite {
  Vec3 frac = Vec3::Zero();
  int atomic_number = 1;
};

/// A periodic crystal: lattice, N >= 1 sites wrapped into the fundamental cell,
/// an identifier and an optional regression target.
class CrystalStructure {
 public:
  /// Wraps every fractional coordinate into [0, 1). Throws EmptyInput for N = 0,
  /// UnknownElement for Z outside [1, 118], NonFinite for NaN/inf coordinates.
  CrystalStructure(LatticeMatrix lattice, std::vector<AtomSite> sites, std::string id = {},
                   std::optional<double> target = std::nullopt);

  const LatticeMatrix& lattice() const { return lattice_; }
  const std::vector<AtomSite>& sites() const { return sites_; }
  const AtomSite& site(std::size_t i) const { return sites_[i]; }
  std::size_t size() const { return sites_.size(); }
  const std::string& id() const { return id_; }
  const std::optional<double>& target() const { return target_; }

  Vec3 cart(std::size_t i) const { return lattice_.matrix() * sites_[i].frac; }
  std::vector<int> atomic_numbers() const;

  CrystalStructure with_target(std::optional<double> target) const;
  CrystalStructure with_id(std::string id) const;
  /// Rigid rotation of the whole crystal: L' = R L, fractional coordinates kept.
  CrystalStructure rotated(const Mat3& rotation) const;
  /// Reorders sites so that new site k is old site perm[k].
  CrystalStructure permuted(const std::vector<std::size_t>& perm) const;

 private:
  LatticeMatrix lattice_;
  std::vector<AtomSite> sites_;
  std::string id_;
  std::optional<double> target_;
};

/// Integer change of basis with det = +-1.
class UnimodularTransform {
 public:
  using Matrix = std::array<std::array<int, 3>, 3>;

  UnimodularTransform() : UnimodularTransform(identity()) {}
  /// Throws NotUnimodular when |det| != 1.
  explicit UnimodularTransform(const Matrix& m);

  static Matrix identity() { return {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}; }

  const Matrix& matrix() const { return m_; }
  int at(int r, int c) const { return m_[std::size_t(r)][std::size_t(c)]; }
  int determinant() const;
  /// Exact integer inverse (adjugate times det).
  UnimodularTransform inverse() const;
  Mat3 as_real() const;

  bool operator==(const UnimodularTransform&) const = default;

 private:
  Matrix m_;
};

/// Same crystal in the cell L' = L M with f' = wrap(M^-1 f). Site order is kept.
CrystalStructure apply_cell_transform(const CrystalStructure& s, const UnimodularTransform& m);

/// reps = (a, b, c) >= 1. Images are enumerated with the site index varying fastest.
CrystalStructure build_supercell(const CrystalStructure& s, std::array<int, 3> reps);

/// Product of `steps` random elementary row operations (add +-row to another, or swap).
UnimodularTransform random_unimodular(std::uint64_t seed, int steps);

/// Uniformly distributed proper rotation drawn from the seed.
Mat3 random_rotation(std::uint64_t seed);

}  // namespace prism
