#include <gtest/gtest.h>

#include <cmath>

#include "prism/error.hpp"
#include "prism/lattice.hpp"
#include "prism/random.hpp"

using namespace prism;

namespace {

LatticeMatrix random_lattice(Rng& rng) {
  for (;;) {
    Mat3 m;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m(r, c) = rng.uniform(-6.0, 6.0);
    const double skew = std::abs(m.determinant()) / (m.col(0).norm() * m.col(1).norm() * m.col(2).norm());
    if (skew > 0.2 && m.col(0).norm() > 1.0 && m.col(1).norm() > 1.0 && m.col(2).norm() > 1.0)
      return LatticeMatrix(m);
  }
}

// Brute force over a generous box; independent of the production search.
Vec3 brute_min_image(const LatticeMatrix& L, const Vec3& ri, const Vec3& rj) {
  const Mat3& m = L.matrix();
  const double bound = 0.5 * (m.col(0).norm() + m.col(1).norm() + m.col(2).norm()) + (ri - rj).norm();
  double thinnest = INFINITY;
  for (int k = 0; k < 3; ++k)
    thinnest = std::min(thinnest, L.volume() / m.col((k + 1) % 3).cross(m.col((k + 2) % 3)).norm());
  const int R = int(std::ceil(bound / thinnest)) + 1;
  Vec3 best = ri - rj;
  double best_sq = INFINITY;
  for (int a = -R; a <= R; ++a)
    for (int b = -R; b <= R; ++b)
      for (int c = -R; c <= R; ++c) {
        const Vec3 v = ri - rj + L.matrix() * Vec3(a, b, c);
        if (v.squaredNorm() < best_sq) best_sq = v.squaredNorm(), best = v;
      }
  return best;
}

}  // namespace

TEST(Lattice, CubicRoundTrip) {
  const auto L = LatticeMatrix::cubic(4.0);
  EXPECT_DOUBLE_EQ(L.volume(), 64.0);
  const Vec3 r = frac_to_cart(L, Vec3(0.5, 0.25, 0.0));
  EXPECT_TRUE(r.isApprox(Vec3(2.0, 1.0, 0.0)));
  EXPECT_TRUE(cart_to_frac(L, r).isApprox(Vec3(0.5, 0.25, 0.0)));
}

TEST(Lattice, SingularRejected) {
  Mat3 m = Mat3::Identity();
  m.col(2) = m.col(0) + m.col(1);
  EXPECT_THROW(LatticeMatrix{m}, SingularLattice);
  EXPECT_THROW(LatticeMatrix{Mat3::Zero()}, SingularLattice);
  EXPECT_THROW(LatticeMatrix{Mat3::Identity() * 1e-3}, SingularLattice);
}

TEST(Lattice, InverseAccuracy) {
  Rng rng(11);
  for (int k = 0; k < 200; ++k) {
    const auto L = random_lattice(rng);
    EXPECT_LT((L.matrix() * L.inverse() - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Lattice, FracCartRoundTripProperty) {
  Rng rng(3);
  for (int k = 0; k < 1000; ++k) {
    const auto L = random_lattice(rng);
    const Vec3 f(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
    EXPECT_LT((cart_to_frac(L, frac_to_cart(L, f)) - f).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Lattice, PlaneSpacingMatchesCrossProduct) {
  const auto L = LatticeMatrix::from_vectors(Vec3(4, 0, 0), Vec3(1, 3, 0), Vec3(0.5, 0.5, 5));
  for (int k = 0; k < 3; ++k) {
    const Vec3 a = L.column((k + 1) % 3), b = L.column((k + 2) % 3);
    EXPECT_NEAR(L.plane_spacing(k), L.volume() / a.cross(b).norm(), 1e-12);
  }
}

TEST(MinImage, CubicExamples) {
  const auto L = LatticeMatrix::cubic(5.0);
  auto m = min_image_displacement(L, Vec3(0, 0, 0), Vec3(4.9, 0, 0));
  EXPECT_TRUE(m.disp.isApprox(Vec3(0.1, 0, 0), 1e-12)) << m.disp.transpose();
  EXPECT_EQ(m.shift, ShiftVector(1, 0, 0));
  m = min_image_displacement(L, Vec3(1, 2, 3), Vec3(1, 2, 3));
  EXPECT_EQ(m.norm(), 0.0);
  EXPECT_TRUE(m.shift.is_zero());
}

TEST(MinImage, HalfTieTakesSmallestShift) {
  const auto L = LatticeMatrix::cubic(4.0);
  const auto m = min_image_displacement(L, Vec3(0, 0, 0), Vec3(2, 0, 0));
  EXPECT_NEAR(m.norm(), 2.0, 1e-12);
  // Candidates n = (0,0,0) and (1,0,0) tie; the lexicographically smaller wins.
  EXPECT_EQ(m.shift, ShiftVector(0, 0, 0));
}

TEST(MinImage, MatchesBruteForceOnSkewedCells) {
  Rng rng(5);
  for (int k = 0; k < 1000; ++k) {
    const auto L = random_lattice(rng);
    const Vec3 ri = L.matrix() * Vec3(rng.uniform(), rng.uniform(), rng.uniform());
    const Vec3 rj = L.matrix() * Vec3(rng.uniform(), rng.uniform(), rng.uniform());
    const auto got = min_image_displacement(L, ri, rj);
    const Vec3 want = brute_min_image(L, ri, rj);
    ASSERT_NEAR(got.norm(), want.norm(), 1e-9) << "case " << k;
    EXPECT_LT((got.disp - (ri - rj + L * got.shift)).norm(), 1e-9);
  }
}

TEST(MinImage, AntisymmetricAwayFromTies) {
  Rng rng(8);
  for (int k = 0; k < 500; ++k) {
    const auto L = random_lattice(rng);
    const Vec3 ri = L.matrix() * Vec3(rng.uniform(), rng.uniform(), rng.uniform());
    const Vec3 rj = L.matrix() * Vec3(rng.uniform(), rng.uniform(), rng.uniform());
    const auto a = min_image_displacement(L, ri, rj);
    const auto b = min_image_displacement(L, rj, ri);
    EXPECT_LT((a.disp + b.disp).norm(), 1e-9);
    EXPECT_EQ(a.shift, -b.shift);
  }
}

TEST(MinImage, NormNeverExceedsFloorCandidate) {
  Rng rng(9);
  for (int k = 0; k < 300; ++k) {
    const auto L = random_lattice(rng);
    const Vec3 df(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const Vec3 floor_frac = df.unaryExpr([](double x) { return x - std::floor(x + 0.5); });
    const auto m = min_image_displacement(L, L.matrix() * df, Vec3::Zero());
    EXPECT_LE(m.norm(), (L.matrix() * floor_frac).norm() + 1e-12);
  }
}

TEST(Wrap, IntoUnitInterval) {
  EXPECT_TRUE(wrap_to_cell(Vec3(1.2, -0.25, 3.0)).isApprox(Vec3(0.2, 0.75, 0.0)));
  const Vec3 w = wrap_to_cell(Vec3(-1e-18, 0.999999999999, 0.5));
  for (int k = 0; k < 3; ++k) {
    EXPECT_GE(w[k], 0.0);
    EXPECT_LT(w[k], 1.0);
  }
  EXPECT_THROW(wrap_to_cell(Vec3(NAN, 0, 0)), NonFinite);
  EXPECT_THROW(wrap_to_cell(Vec3(0, INFINITY, 0)), NonFinite);
}

TEST(ShiftVectorOps, OrderAndNegation) {
  EXPECT_LT(ShiftVector(-1, 5, 5), ShiftVector(0, -5, -5));
  EXPECT_EQ(-ShiftVector(1, -2, 3), ShiftVector(-1, 2, -3));
  const auto L = LatticeMatrix::cubic(2.0);
  EXPECT_TRUE((L * ShiftVector(1, 2, 3)).isApprox(Vec3(2, 4, 6)));
}
