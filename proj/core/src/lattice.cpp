#include "prism/lattice.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "prism/error.hpp"

namespace prism {

LatticeMatrix::LatticeMatrix(const Mat3& columns) : m_(columns) {
  if (!m_.allFinite()) throw SingularLattice("lattice matrix has non-finite entries");
  det_ = m_.determinant();
  if (!(std::abs(det_) > kMinAbsDeterminant)) {
    std::ostringstream os;
    os << "lattice determinant " << det_ << " is below " << kMinAbsDeterminant;
    throw SingularLattice(os.str());
  }
  inv_ = m_.inverse();
  const double err = (m_ * inv_ - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (!(err < 1e-10)) {
    std::ostringstream os;
    os << "lattice inverse inaccurate (|L L^-1 - I| = " << err << ")";
    throw SingularLattice(os.str());
  }
}

LatticeMatrix LatticeMatrix::from_vectors(const Vec3& l1, const Vec3& l2, const Vec3& l3) {
  Mat3 m;
  m.col(0) = l1;
  m.col(1) = l2;
  m.col(2) = l3;
  return LatticeMatrix(m);
}

Vec3 frac_to_cart(const LatticeMatrix& lattice, const Vec3& f) { return lattice.matrix() * f; }

Vec3 cart_to_frac(const LatticeMatrix& lattice, const Vec3& r) { return lattice.inverse() * r; }

MinImage min_image_displacement(const LatticeMatrix& lattice, const Vec3& r_i, const Vec3& r_j) {
  const Mat3& L = lattice.matrix();
  const Mat3& inv = lattice.inverse();
  const Vec3 d = r_i - r_j;
  const Vec3 f = inv * d;

  std::array<int, 3> n0{};
  for (int k = 0; k < 3; ++k) n0[k] = -static_cast<int>(std::floor(f[k] + 0.5));
  const ShiftVector floor_shift(n0[0], n0[1], n0[2]);
  const double radius = (d + lattice * floor_shift).norm();

  std::array<int, 3> lo{}, hi{};
  for (int k = 0; k < 3; ++k) {
    const double reach = radius * inv.row(k).norm() * (1.0 + 1e-12) + 1e-12;
    lo[k] = std::min(n0[k] - 1, static_cast<int>(std::ceil(-f[k] - reach)));
    hi[k] = std::max(n0[k] + 1, static_cast<int>(std::floor(-f[k] + reach)));
  }

  MinImage best{d + lattice * floor_shift, floor_shift};
  double best_sq = std::numeric_limits<double>::infinity();
  for (int a = lo[0]; a <= hi[0]; ++a) {
    for (int b = lo[1]; b <= hi[1]; ++b) {
      for (int c = lo[2]; c <= hi[2]; ++c) {
        const ShiftVector n(a, b, c);
        const Vec3 v = d + L * n.as_vector();
        const double sq = v.squaredNorm();
        if (sq < best_sq) {
          best_sq = sq;
          best = {v, n};
        }
      }
    }
  }
  return best;
}

Vec3 wrap_to_cell(const Vec3& f) {
  if (!f.allFinite()) throw NonFinite("cannot wrap a non-finite fractional coordinate");
  Vec3 out;
  for (int k = 0; k < 3; ++k) {
    double w = f[k] - std::floor(f[k]);
    // f = -1e-17 gives 1 - 1e-17 == 1.0 in double.
    if (w >= 1.0) w = 0.0;
    out[k] = w;
  }
  return out;
}

}  // namespace prism
