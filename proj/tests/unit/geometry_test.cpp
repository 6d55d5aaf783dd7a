#include "fairwrite/geometry.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "support.hpp"

namespace fairwrite {
namespace {

TEST(EmbeddingTest, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(Embedding(std::vector<double>{}), InvalidArgument);
  EXPECT_THROW(Embedding({1.0, std::numeric_limits<double>::quiet_NaN()}), InvalidArgument);
  EXPECT_THROW(Embedding({std::numeric_limits<double>::infinity()}), InvalidArgument);
  EXPECT_EQ(Embedding({1.0, 2.0}).dim(), 2u);
}

TEST(GeometryTest, KnownValues) {
  const Embedding a{1.0, 2.0, 3.0};
  const Embedding b{4.0, 5.0, 6.0};
  EXPECT_DOUBLE_EQ(dot(a, b), 32.0);
  EXPECT_DOUBLE_EQ(norm(a), std::sqrt(14.0));
  EXPECT_NEAR(cosine(a, b), 32.0 / (std::sqrt(14.0) * std::sqrt(77.0)), 1e-15);
  EXPECT_DOUBLE_EQ(cosine(Embedding{1.0, 0.0}, Embedding{0.0, 3.0}), 0.0);
  EXPECT_DOUBLE_EQ(cosine(Embedding{2.0, 0.0}, Embedding{-5.0, 0.0}), -1.0);
}

TEST(GeometryTest, CosineIsClampedToUnitInterval) {
  const Embedding a{0.1, 0.2, 0.7};
  EXPECT_LE(cosine(a, a), 1.0);
  EXPECT_GE(cosine(a, scale(a, -3.0)), -1.0);
}

TEST(GeometryTest, DimensionMismatchAndZeroVector) {
  EXPECT_THROW(dot(Embedding{1.0}, Embedding{1.0, 2.0}), InvalidArgument);
  EXPECT_THROW(cosine(Embedding{0.0, 0.0}, Embedding{1.0, 2.0}), InvalidArgument);
  EXPECT_THROW(normalize(Embedding{0.0, 0.0}), InvalidArgument);
}

TEST(GeometryTest, NormalizeAddScale) {
  const Embedding n = normalize(Embedding{3.0, 4.0});
  EXPECT_DOUBLE_EQ(n[0], 0.6);
  EXPECT_DOUBLE_EQ(n[1], 0.8);
  EXPECT_EQ(add(Embedding{1.0, 2.0}, Embedding{3.0, -2.0}), (Embedding{4.0, 0.0}));
  EXPECT_EQ(scale(Embedding{1.0, -2.0}, 2.0), (Embedding{2.0, -4.0}));
}

// v_r = (1, 0), w = (1, 1): cos = 1/sqrt2, v2 = (1,1)/sqrt2,
// u1 = (1/2, 1/2) - (1, 0) = (-1/2, 1/2), u* = (-1/sqrt2 - 1, 1/sqrt2).
TEST(RepairVectorTest, WorkedExampleInTwoDimensions) {
  const Embedding u = repair_vector(Embedding{1.0, 0.0}, Embedding{1.0, 1.0});
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(u[0], -r - 1.0, 1e-12);
  EXPECT_NEAR(u[1], r, 1e-12);
  // u* + v1 is orthogonal to the unpleasant direction.
  EXPECT_NEAR(u[0] + 1.0 + u[1], 0.0, 1e-12);
}

TEST(RepairVectorTest, DegenerateWhenParallelOrAntiParallel) {
  EXPECT_THROW(repair_vector(Embedding{1.0, 2.0}, Embedding{2.0, 4.0}), DegenerateRepair);
  EXPECT_THROW(repair_vector(Embedding{1.0, 2.0}, Embedding{-1.0, -2.0}), DegenerateRepair);
  // Just outside the tolerance band is still fine.
  EXPECT_NO_THROW(repair_vector(Embedding{1.0, 0.0}, Embedding{1.0, 0.01}));
  // A wider delta turns that case degenerate too.
  EXPECT_THROW(repair_vector(Embedding{1.0, 0.0}, Embedding{1.0, 0.01}, 1e-3), DegenerateRepair);
}

TEST(RepairVectorTest, OrthogonalInputs) {
  // cos = 0: u1 = -v1, u* = -2 v1, so u* + v1 = -v1, orthogonal to v2.
  const Embedding u = repair_vector(Embedding{0.0, 2.0}, Embedding{5.0, 0.0});
  EXPECT_NEAR(u[0], 0.0, 1e-15);
  EXPECT_NEAR(u[1], -2.0, 1e-15);
}

TEST(RepairVectorTest, MatchesRejectionOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t dim = 2 + trial % 20;
    const auto r = testing_support::gaussian_vector(dim, rng);
    const auto w = testing_support::gaussian_vector(dim, rng);
    const auto expected = oracle::repair(r, w);
    ASSERT_TRUE(expected.has_value());
    const Embedding got = repair_vector(Embedding(r), Embedding(w));
    for (std::size_t i = 0; i < dim; ++i) EXPECT_NEAR(got[i], (*expected)[i], 1e-9);
  }
}

TEST(NearestTest, TiesGoToLowestIndex) {
  const std::vector<Embedding> candidates{Embedding{0.0, 1.0}, Embedding{1.0, 0.0},
                                          Embedding{2.0, 0.0}, Embedding{1.0, 0.0}};
  EXPECT_EQ(nearest(Embedding{1.0, 0.0}, candidates), 1u);
  EXPECT_EQ(nearest(Embedding{0.0, 5.0}, candidates), 0u);
  EXPECT_THROW(nearest(Embedding{1.0, 0.0}, std::span<const Embedding>{}), InvalidArgument);
}

TEST(NearestTest, NegativeSimilaritiesStillPickMaximum) {
  const std::vector<Embedding> candidates{Embedding{-1.0, 0.0}, Embedding{-1.0, -1.0}};
  EXPECT_EQ(nearest(Embedding{1.0, 0.0}, candidates), 1u);
}

}  // namespace
}  // namespace fairwrite
