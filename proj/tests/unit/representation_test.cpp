#include <random>

#include <gtest/gtest.h>

#include "gsc/error.hpp"
#include "gsc/representation.hpp"
#include "oracles.hpp"

namespace gsc {
namespace {

TEST(GridEnumeration, Counts) {
  EXPECT_EQ(enumerate_grid(FillerRoleSpec::with_counts(2, 2)).size(), 4u);
  const auto single = enumerate_grid(FillerRoleSpec::with_counts(1, 3));
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].assignment, (std::vector<int>{0, 0, 0}));
}

TEST(GridEnumeration, MatchesRecursiveEnumeration) {
  for (int F = 1; F <= 4; ++F) {
    for (int R = 1; R <= 4; ++R) {
      const auto spec = FillerRoleSpec::with_counts(F, R);
      const auto grid = enumerate_grid(spec);
      const auto expected = testing::all_assignments(F, R);
      ASSERT_EQ(grid.size(), expected.size());
      for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_EQ(grid[i].assignment, expected[i]);
        EXPECT_EQ(grid_rank(grid[i], spec), i);
      }
    }
  }
}

TEST(GridEnumeration, ThreeByTwoIsLexicographic) {
  const auto grid = enumerate_grid(FillerRoleSpec::with_counts(3, 2));
  ASSERT_EQ(grid.size(), 9u);
  EXPECT_TRUE(std::is_sorted(grid.begin(), grid.end()));
}

TEST(GridEnumeration, CapIsEnforced) {
  const auto spec = FillerRoleSpec::with_counts(10, 7);
  try {
    enumerate_grid(spec);
    FAIL() << "expected GridTooLarge";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GridTooLarge);
  }
  EXPECT_EQ(enumerate_grid(FillerRoleSpec::with_counts(10, 3), 1000).size(), 1000u);
  EXPECT_FALSE(grid_size(FillerRoleSpec::with_counts(100, 20)).has_value());
}

TEST(Embed, OneHotColumns) {
  const auto spec = FillerRoleSpec::with_counts(2, 2);
  const auto y = embed(GridPoint{{0, 1}}, spec);
  EXPECT_EQ(y.matrix(), (Eigen::Matrix2d() << 1, 0, 0, 1).finished());
  const auto z = embed(GridPoint{{1}}, FillerRoleSpec::with_counts(2, 1));
  EXPECT_EQ(z.flat(), Eigen::Vector2d(0, 1));
}

TEST(Quantize, Examples) {
  EXPECT_EQ(quantize(CoefficientState(2, 1, Eigen::Vector2d(0.9, 0.2))).assignment, std::vector<int>{0});
  EXPECT_EQ(quantize(CoefficientState(2, 1, Eigen::Vector2d(0.5, 0.5))).assignment, std::vector<int>{0});
}

TEST(Quantize, RoundTripsEveryGridPoint) {
  for (int F = 1; F <= 4; ++F) {
    for (int R = 1; R <= 4; ++R) {
      const auto spec = FillerRoleSpec::with_counts(F, R);
      for (const auto& p : enumerate_grid(spec)) EXPECT_EQ(quantize(embed(p, spec)), p);
    }
  }
}

TEST(Quantize, AgreesWithNearestGridPoint) {
  std::mt19937_64 rng(42);
  const auto spec = FillerRoleSpec::with_counts(3, 2);
  const auto grid = enumerate_grid(spec);
  for (int trial = 0; trial < 500; ++trial) {
    const CoefficientState y(3, 2, testing::random_vector(rng, 6, -0.5, 1.5));
    double best = 1e300;
    GridPoint nearest;
    for (const auto& p : grid) {
      const double d = (embed(p, spec).flat() - y.flat()).squaredNorm();
      if (d < best) {
        best = d;
        nearest = p;
      }
    }
    EXPECT_EQ(quantize(y), nearest);
  }
}

TEST(GridResidual, Examples) {
  const auto r = grid_residual(CoefficientState(2, 1, Eigen::Vector2d(0.5, 0.5)));
  EXPECT_DOUBLE_EQ(r.binary(0, 0), 0.25);
  EXPECT_DOUBLE_EQ(r.binary(1, 0), 0.25);
  EXPECT_DOUBLE_EQ(r.norm[0], -0.5);
  EXPECT_FALSE(r.on_grid());

  const auto both = grid_residual(CoefficientState(2, 1, Eigen::Vector2d(1, 1)));
  EXPECT_EQ(both.binary, Eigen::MatrixXd::Zero(2, 1));
  EXPECT_DOUBLE_EQ(both.norm[0], 1.0);

  const auto spec = FillerRoleSpec::with_counts(3, 3);
  for (const auto& p : enumerate_grid(spec)) EXPECT_TRUE(grid_residual(embed(p, spec)).on_grid());
}

TEST(AmbientEmbedding, IdentityAndScalar) {
  const auto spec = FillerRoleSpec::with_counts(2, 2);
  EXPECT_EQ(embed_to_ambient(embed(GridPoint{{0, 1}}, spec), spec), Eigen::Vector4d(1, 0, 0, 1));

  FillerRoleSpec scalar({"a"}, {"r"}, Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::MatrixXd::Constant(1, 1, 3.0));
  EXPECT_DOUBLE_EQ(embed_to_ambient(CoefficientState(1, 1, Eigen::VectorXd::Ones(1)), scalar)[0], 6.0);
}

TEST(AmbientEmbedding, MatchesKroneckerOracle) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd Fb = Eigen::MatrixXd::Identity(2, 2) + 0.3 * testing::random_symmetric(rng, 2, 1.0);
    Eigen::MatrixXd Rb = Eigen::MatrixXd::Identity(2, 2) + 0.3 * testing::random_symmetric(rng, 2, 1.0);
    FillerRoleSpec spec({"a", "b"}, {"x", "y"}, Fb, Rb);
    const CoefficientState y(2, 2, testing::random_vector(rng, 4, -1, 1));
    EXPECT_LT((embed_to_ambient(y, spec) - testing::kronecker_embed(Fb, Rb, y.flat())).norm(), 1e-12);
  }
}

TEST(FillerRoleSpec, RejectsBadInput) {
  auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::ValidationError;
  };
  EXPECT_EQ(kind_of([] { FillerRoleSpec({"a", "a"}, {"r"}); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { FillerRoleSpec({}, {"r"}); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { FillerRoleSpec({"a", "b"}, {"r"}, Eigen::MatrixXd::Ones(2, 2)); }),
            ErrorKind::SingularBasis);
  EXPECT_EQ(kind_of([] { FillerRoleSpec({"a", "b"}, {"r"}, Eigen::MatrixXd::Identity(3, 3)); }),
            ErrorKind::DimensionMismatch);
}

TEST(Labels, UseNames) {
  FillerRoleSpec spec({"dog", "cat"}, {"subj", "obj"});
  EXPECT_EQ(grid_label(GridPoint{{1, 0}}, spec), "cat·subj|dog·obj");
  EXPECT_EQ(spec.coefficient_name(0, 1), "y_dog_obj");
  EXPECT_EQ(spec.flat_index(1, 1), 3);
}

TEST(Barycenter, IsUniform) {
  const auto y = barycenter(FillerRoleSpec::with_counts(4, 2));
  EXPECT_TRUE((y.flat().array() == 0.25).all());
}

}  // namespace
}  // namespace gsc
