#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "sse/error.hpp"
#include "sse/input_model.hpp"
#include "sse/poly_basis.hpp"

using namespace sse;

namespace {

// Gram matrix of degrees 0..n under the uniform probability measure on
// [a, b], integrated with an independent rule of the given size.
Eigen::MatrixXd gram(int max_degree, double a, double b, int points) {
  const auto rule = gauss_legendre(points);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(max_degree + 1, max_degree + 1);
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double u = a + 0.5 * (rule.nodes[q] + 1) * (b - a);
    for (int i = 0; i <= max_degree; ++i) {
      for (int j = 0; j <= max_degree; ++j) {
        g(i, j) += 0.5 * rule.weights[q] * legendre_orthonormal(i, u, a, b) * legendre_orthonormal(j, u, a, b);
      }
    }
  }
  return g;
}

std::vector<MultiIndex> brute_force(std::size_t dim, int p, double q, int r) {
  std::vector<MultiIndex> out;
  std::vector<int> a(dim, 0);
  while (true) {
    const MultiIndex m(a);
    if (m.rank() <= r && q_norm(m, q) <= p + 1e-10 * std::max(1, p)) out.push_back(m);
    std::size_t d = 0;
    while (d < dim && ++a[d] > p) a[d++] = 0;
    if (d == dim) break;
  }
  std::sort(out.begin(), out.end(), graded_lex_less);
  return out;
}

} // namespace

TEST(Legendre, ClosedForms) {
  EXPECT_DOUBLE_EQ(legendre_orthonormal(0, 0.37, 0, 1), 1.0);
  EXPECT_NEAR(legendre_orthonormal(1, 1.0, 0, 1), std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(legendre_orthonormal(1, 0.0, 0, 1), -std::sqrt(3.0), 1e-15);
  // psi_2(u) = sqrt(5) (6u^2 - 6u + 1) on [0,1]
  EXPECT_NEAR(legendre_orthonormal(2, 0.3, 0, 1), std::sqrt(5.0) * (6 * 0.09 - 1.8 + 1), 1e-14);
  EXPECT_THROW(legendre_orthonormal(kDegreeCap + 1, 0.5, 0, 1), Error);
}

TEST(Legendre, GramIdentityOnSubinterval) {
  const Eigen::MatrixXd g = gram(5, 0.25, 0.5, 64);
  EXPECT_LT((g - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Legendre, GramIdentityUpToDegreeTen) {
  for (auto [a, b] : {std::pair{0.0, 1.0}, std::pair{0.5, 0.75}, std::pair{0.125, 0.1875}}) {
    const Eigen::MatrixXd g = gram(10, a, b, 11);
    EXPECT_LT((g - Eigen::MatrixXd::Identity(11, 11)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Legendre, AllMatchesSingle) {
  std::vector<double> out(9);
  legendre_orthonormal_all(8, 0.61, 0.5, 0.75, out);
  for (int k = 0; k <= 8; ++k) EXPECT_NEAR(out[k], legendre_orthonormal(k, 0.61, 0.5, 0.75), 1e-13);
}

TEST(Legendre, AffineInvariance) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const double a = 0.5 * unif(rng);
    const double b = a + 0.01 + 0.49 * unif(rng);
    const double t = unif(rng);
    const double u = a + t * (b - a);
    for (int deg = 0; deg <= 7; ++deg) {
      EXPECT_NEAR(legendre_orthonormal(deg, u, a, b), legendre_orthonormal(deg, t, 0, 1), 1e-9);
    }
  }
}

TEST(GaussLegendre, WeightsAndExactness) {
  for (int n : {1, 2, 5, 11, 64}) {
    const auto rule = gauss_legendre(n);
    double s = 0;
    for (double w : rule.weights) s += w;
    EXPECT_NEAR(s, 2.0, 1e-13);
    // integral of x^(2n-2) over [-1, 1]
    double m = 0;
    for (int q = 0; q < n; ++q) m += rule.weights[q] * std::pow(rule.nodes[q], 2 * n - 2);
    EXPECT_NEAR(m, 2.0 / (2 * n - 1), 1e-13);
  }
}

TEST(DesignMatrix, ClosedForm) {
  const std::vector<MultiIndex> ts{MultiIndex({0}), MultiIndex({1})};
  Eigen::MatrixXd pts(2, 1);
  pts << 0.0, 1.0;
  const Eigen::MatrixXd d = eval_design_matrix(ts, Box::unit(1), pts);
  EXPECT_DOUBLE_EQ(d(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(d(1, 0), 1.0);
  EXPECT_NEAR(d(0, 1), -std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(d(1, 1), std::sqrt(3.0), 1e-15);
}

TEST(DesignMatrix, ConstantColumn) {
  const std::vector<MultiIndex> ts{MultiIndex::zero(3)};
  Eigen::MatrixXd pts = Eigen::MatrixXd::Constant(4, 3, 0.3);
  const Eigen::MatrixXd d = eval_design_matrix(ts, Box::unit(3), pts);
  EXPECT_EQ(d, Eigen::MatrixXd::Ones(4, 1));
}

TEST(DesignMatrix, OutsideBoxRejected) {
  Box b{{0.0, 0.0}, {0.5, 0.5}};
  Eigen::MatrixXd pts(1, 2);
  pts << 0.75, 0.25;
  const std::vector<MultiIndex> ts{MultiIndex({1, 0})};
  try {
    eval_design_matrix(ts, b, pts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "point not in subdomain");
  }
  EXPECT_NO_THROW(eval_design_matrix(ts, b, pts, true));
}

TEST(DesignMatrix, EmpiricalOrthonormality) {
  const auto ts = generate_truncation(2, 2, 1.0, 2);
  const Box box{{0.25, 0.5}, {0.75, 1.0}};
  constexpr int n = 1'000'000;
  std::mt19937_64 rng(3);
  Eigen::MatrixXd pts(n, 2);
  for (int i = 0; i < n; ++i) {
    pts(i, 0) = 0.25 + 0.5 * uniform_open01(rng());
    pts(i, 1) = 0.5 + 0.5 * uniform_open01(rng());
  }
  const Eigen::MatrixXd d = eval_design_matrix(ts.indices, box, pts);
  const Eigen::MatrixXd g = d.transpose() * d / n;
  for (Eigen::Index j = 0; j < g.rows(); ++j) {
    const double var = (d.col(j).array().square() - g(j, j)).square().mean();
    EXPECT_NEAR(g(j, j), 1.0, 3 * std::sqrt(var / n) + 1e-12);
  }
}

TEST(Box, SplitAndContains) {
  const Box u = Box::unit(2);
  EXPECT_DOUBLE_EQ(u.volume(), 1.0);
  const auto [lo, hi] = u.split(1);
  EXPECT_DOUBLE_EQ(lo.volume(), 0.5);
  EXPECT_DOUBLE_EQ(hi.volume(), 0.5);
  const std::vector<double> seam{0.3, 0.5};
  EXPECT_FALSE(lo.contains(seam));
  EXPECT_TRUE(hi.contains(seam));
  const std::vector<double> top{1.0, 1.0};
  EXPECT_TRUE(hi.contains(top));
  EXPECT_FALSE(lo.contains(top));
}

TEST(Truncation, SmallExamples) {
  const auto a = generate_truncation(2, 2, 1.0, 2);
  const std::vector<MultiIndex> expected{MultiIndex({0, 0}), MultiIndex({1, 0}), MultiIndex({0, 1}),
                                         MultiIndex({2, 0}), MultiIndex({1, 1}), MultiIndex({0, 2})};
  EXPECT_EQ(a.indices, expected);

  const auto b = generate_truncation(2, 2, 0.8, 2);
  EXPECT_EQ(b.size(), 5u);
  EXPECT_EQ(std::count(b.indices.begin(), b.indices.end(), MultiIndex({1, 1})), 0);

  EXPECT_EQ(generate_truncation(100, 2, 0.8, 2).size(), 201u);
}

TEST(Truncation, MatchesBruteForce) {
  for (std::size_t dim : {1u, 2u, 3u, 4u}) {
    for (int p : {0, 1, 3, 5}) {
      for (double q : {0.5, 0.6, 0.7, 0.8, 1.0}) {
        for (int r : {1, 2, 3}) {
          const auto ts = generate_truncation(dim, p, q, r);
          EXPECT_EQ(ts.indices, brute_force(dim, p, q, r)) << dim << ' ' << p << ' ' << q << ' ' << r;
        }
      }
    }
  }
}

TEST(Truncation, Invariants) {
  const auto ts = generate_truncation(5, 6, 0.7, 2);
  EXPECT_TRUE(ts.indices.front().is_zero());
  std::set<MultiIndex> seen(ts.indices.begin(), ts.indices.end());
  EXPECT_EQ(seen.size(), ts.size());
  EXPECT_TRUE(std::is_sorted(ts.indices.begin(), ts.indices.end(), graded_lex_less));
  for (const auto& a : ts.indices) {
    EXPECT_LE(a.rank(), 2);
    EXPECT_LE(q_norm(a, 0.7), 6 + 1e-9);
  }
}

TEST(Truncation, Monotone) {
  const auto small = generate_truncation(4, 3, 0.5, 1);
  for (int p : {3, 4}) {
    for (double q : {0.5, 0.8, 1.0}) {
      for (int r : {1, 2, 4}) {
        const auto big = generate_truncation(4, p, q, r);
        const std::set<MultiIndex> s(big.indices.begin(), big.indices.end());
        for (const auto& a : small.indices) EXPECT_TRUE(s.count(a));
      }
    }
  }
}

TEST(Truncation, SizeCap) {
  try {
    generate_truncation(50, 6, 1.0, 3, 1000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "basis too large");
  }
}

TEST(Reprojection, RestrictionIsExact) {
  // psi_k on [0.2, 0.9] restricted to [0.4, 0.55] equals sum_j T(k, j) psi_j.
  const Eigen::MatrixXd t = reprojection_matrix(6, 0.2, 0.9, 0.4, 0.55);
  for (double u : {0.4, 0.43, 0.5, 0.549}) {
    for (int k = 0; k <= 6; ++k) {
      double s = 0;
      for (int j = 0; j <= 6; ++j) s += t(k, j) * legendre_orthonormal(j, u, 0.4, 0.55);
      EXPECT_NEAR(s, legendre_orthonormal(k, u, 0.2, 0.9), 1e-11);
    }
  }
  for (int k = 0; k <= 6; ++k) {
    for (int j = k + 1; j <= 6; ++j) EXPECT_EQ(t(k, j), 0.0);
  }
}
