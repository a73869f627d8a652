#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/LU>
#include <array>
#include <compare>

namespace prism {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Integer lattice image index n. The zero vector is the home cell.
struct ShiftVector {
  std::array<int, 3> n{0, 0, 0};

  constexpr ShiftVector() = default;
  constexpr ShiftVector(int a, int b, int c) : n{a, b, c} {}

  constexpr int operator[](int k) const { return n[static_cast<std::size_t>(k)]; }
  constexpr bool is_zero() const { return n[0] == 0 && n[1] == 0 && n[2] == 0; }
  constexpr ShiftVector operator-() const { return {-n[0], -n[1], -n[2]}; }
  Vec3 as_vector() const { return {double(n[0]), double(n[1]), double(n[2])}; }

  // Lexicographic on (n1, n2, n3); this is also the minimum-image tie-break.
  constexpr auto operator<=>(const ShiftVector&) const = default;
};

/// Lattice matrix L = [l1 l2 l3] with the lattice vectors as columns, in Angstrom.
class LatticeMatrix {
 public:
  static constexpr double kMinAbsDeterminant = 1e-8;

  /// Throws SingularLattice when |det L| <= 1e-8 or the inverse is not accurate
  /// to 1e-10 elementwise.
  explicit LatticeMatrix(const Mat3& columns);

  static LatticeMatrix from_vectors(const Vec3& l1, const Vec3& l2, const Vec3& l3);
  static LatticeMatrix cubic(double a) { return LatticeMatrix(Mat3::Identity() * a); }

  const Mat3& matrix() const { return m_; }
  const Mat3& inverse() const { return inv_; }
  Vec3 column(int k) const { return m_.col(k); }
  double determinant() const { return det_; }
  double volume() const { return std::abs(det_); }

  /// Spacing between the lattice planes that index k counts, 1 / ||row_k(L^-1)||.
  double plane_spacing(int k) const { return 1.0 / inv_.row(k).norm(); }

  Vec3 operator*(const ShiftVector& n) const { return m_ * n.as_vector(); }

 private:
  Mat3 m_;
  Mat3 inv_;
  double det_;
};

Vec3 frac_to_cart(const LatticeMatrix& lattice, const Vec3& f);
Vec3 cart_to_frac(const LatticeMatrix& lattice, const Vec3& r);

struct MinImage {
  Vec3 disp;          // r_i - r_j + L n
  ShiftVector shift;  // the minimizing n
  double norm() const { return disp.norm(); }
};

/// Shortest periodic displacement r_i - r_j + L n over all integer n.
///
/// Starts from the fractional floor construction (d_frac - floor(d_frac + 1/2))
/// and then scans every shift that could possibly beat it: the +-1 block around
/// the floor candidate, widened per axis to |f_k + n_k| <= ||c|| * ||row_k(L^-1)||
/// where c is the candidate. The widening only triggers for skewed cells.
/// Equal norms resolve to the lexicographically smallest shift.
MinImage min_image_displacement(const LatticeMatrix& lattice, const Vec3& r_i, const Vec3& r_j);

/// Maps each component into [0, 1) by an integer translation. Throws NonFinite.
Vec3 wrap_to_cell(const Vec3& f);

}  // namespace prism
