#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace sse {

// Hard cap on univariate degree; the three-term recurrence is still accurate
// well beyond this but coefficients of such bases are meaningless in practice.
inline constexpr int kDegreeCap = 60;

struct MultiIndex {
  std::vector<int> degrees;

  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> d) : degrees(std::move(d)) {}
  static MultiIndex zero(std::size_t dim) { return MultiIndex(std::vector<int>(dim, 0)); }

  std::size_t dim() const { return degrees.size(); }
  int operator[](std::size_t i) const { return degrees[i]; }
  int total_degree() const;
  int max_degree() const;
  // Number of non-zero entries (interaction order).
  int rank() const;
  bool is_zero() const { return rank() == 0; }

  auto operator<=>(const MultiIndex&) const = default;
};

// Graded-lexicographic order: total degree first, then the index with the
// larger leading entries comes first, e.g. (0,0) (1,0) (0,1) (2,0) (1,1) (0,2).
bool graded_lex_less(const MultiIndex& a, const MultiIndex& b);

// Axis-aligned box in the unit hypercube. Boxes are half-open [lo, hi) in every
// dimension, except that an upper edge equal to 1 is closed.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  static Box unit(std::size_t dim);

  std::size_t dim() const { return lower.size(); }
  double edge(std::size_t d) const { return upper[d] - lower[d]; }
  double volume() const;
  bool contains(std::span<const double> u) const;
  // Equal-mass split along dimension d: the midpoint in quantile space.
  std::pair<Box, Box> split(std::size_t d) const;
  double midpoint(std::size_t d) const { return 0.5 * (lower[d] + upper[d]); }

  bool operator==(const Box&) const = default;
};

struct TruncationSet {
  std::size_t dim = 0;
  int max_degree = 0;
  double q = 1.0;
  int max_rank = 1;
  std::vector<MultiIndex> indices;

  std::size_t size() const { return indices.size(); }
};

// q-quasi-norm of a multi-index.
double q_norm(const MultiIndex& alpha, double q);

// Orthonormal Legendre polynomial of the given degree w.r.t. the uniform
// probability measure on [a, b]. Points outside [a, b] are evaluated by
// polynomial continuation.
double legendre_orthonormal(int degree, double u, double a, double b);

// Writes psi_0 .. psi_max_degree at u into out (size max_degree + 1).
void legendre_orthonormal_all(int max_degree, double u, double a, double b, std::span<double> out);

// Design matrix of the basis {Psi_alpha} on box, one row per point (rows of
// points are quantile-space coordinates). Throws if a point lies outside the
// box unless extrapolate is set.
Eigen::MatrixXd eval_design_matrix(std::span<const MultiIndex> indices, const Box& box,
                                   const Eigen::MatrixXd& points, bool extrapolate = false);

// Evaluates sum_j coefficients[j] * Psi_{indices[j]}(u) on the box.
double eval_expansion(std::span<const MultiIndex> indices, const Eigen::VectorXd& coefficients,
                      const Box& box, std::span<const double> u);

// Enumerates {alpha : ||alpha||_q <= p, ||alpha||_0 <= r} in graded-lex order.
TruncationSet generate_truncation(std::size_t dim, int max_degree, double q, int max_rank,
                                  std::size_t max_size = 2'000'000);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1] (weights sum to 2); exact for
// polynomials up to degree 2n - 1.
QuadratureRule gauss_legendre(int n);

// T(k, j) = <psi_k^[from], psi_j^[to]> under the uniform measure on [to], for
// k, j = 0..max_degree. The restriction of psi_k^[from] to [to] equals
// sum_j T(k, j) psi_j^[to] exactly (T is lower triangular).
Eigen::MatrixXd reprojection_matrix(int max_degree, double from_lo, double from_hi, double to_lo,
                                    double to_hi);

} // namespace sse
