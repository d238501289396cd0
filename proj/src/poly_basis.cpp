#include "sse/poly_basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "sse/error.hpp"

namespace sse {

int MultiIndex::total_degree() const { return std::accumulate(degrees.begin(), degrees.end(), 0); }

int MultiIndex::max_degree() const {
  return degrees.empty() ? 0 : *std::max_element(degrees.begin(), degrees.end());
}

int MultiIndex::rank() const {
  return static_cast<int>(std::count_if(degrees.begin(), degrees.end(), [](int d) { return d > 0; }));
}

bool graded_lex_less(const MultiIndex& a, const MultiIndex& b) {
  const int da = a.total_degree();
  const int db = b.total_degree();
  if (da != db) {
    return da < db;
  }
  return a.degrees > b.degrees;
}

Box Box::unit(std::size_t dim) {
  return Box{std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
}

double Box::volume() const {
  double v = 1.0;
  for (std::size_t d = 0; d < dim(); ++d) {
    v *= edge(d);
  }
  return v;
}

bool Box::contains(std::span<const double> u) const {
  if (u.size() != dim()) {
    return false;
  }
  for (std::size_t d = 0; d < dim(); ++d) {
    if (u[d] < lower[d]) return false;
    if (u[d] >= upper[d] && !(upper[d] == 1.0 && u[d] == 1.0)) return false;
  }
  return true;
}

std::pair<Box, Box> Box::split(std::size_t d) const {
  const double mid = midpoint(d);
  Box lo = *this;
  Box hi = *this;
  lo.upper[d] = mid;
  hi.lower[d] = mid;
  return {std::move(lo), std::move(hi)};
}

double q_norm(const MultiIndex& alpha, double q) {
  double s = 0.0;
  for (int a : alpha.degrees) {
    if (a > 0) s += std::pow(static_cast<double>(a), q);
  }
  return s == 0.0 ? 0.0 : std::pow(s, 1.0 / q);
}

void legendre_orthonormal_all(int max_degree, double u, double a, double b, std::span<double> out) {
  if (max_degree < 0 || max_degree > kDegreeCap) {
    throw Error("polynomial degree outside [0, " + std::to_string(kDegreeCap) + "]");
  }
  if (!(b > a)) {
    throw Error("empty interval");
  }
  const double t = 2.0 * (u - a) / (b - a) - 1.0;
  // Plain Legendre recurrence, normalized afterwards.
  double p_prev = 1.0;
  double p_cur = t;
  out[0] = 1.0;
  if (max_degree >= 1) out[1] = std::sqrt(3.0) * t;
  for (int n = 1; n < max_degree; ++n) {
    const double p_next = ((2.0 * n + 1.0) * t * p_cur - n * p_prev) / (n + 1.0);
    p_prev = p_cur;
    p_cur = p_next;
    out[n + 1] = std::sqrt(2.0 * (n + 1) + 1.0) * p_cur;
  }
}

double legendre_orthonormal(int degree, double u, double a, double b) {
  if (degree < 0 || degree > kDegreeCap) {
    throw Error("polynomial degree outside [0, " + std::to_string(kDegreeCap) + "]");
  }
  std::vector<double> values(degree + 1);
  legendre_orthonormal_all(degree, u, a, b, values);
  return values[degree];
}

namespace {

// Non-zero entries of a multi-index as (dimension, degree) pairs.
struct SparseTerm {
  std::vector<std::pair<std::size_t, int>> factors;
};

std::vector<SparseTerm> sparsify(std::span<const MultiIndex> indices) {
  std::vector<SparseTerm> terms(indices.size());
  for (std::size_t j = 0; j < indices.size(); ++j) {
    for (std::size_t d = 0; d < indices[j].dim(); ++d) {
      if (indices[j][d] > 0) terms[j].factors.emplace_back(d, indices[j][d]);
    }
  }
  return terms;
}

} // namespace

Eigen::MatrixXd eval_design_matrix(std::span<const MultiIndex> indices, const Box& box,
                                   const Eigen::MatrixXd& points, bool extrapolate) {
  const std::size_t dim = box.dim();
  if (static_cast<std::size_t>(points.cols()) != dim) {
    throw Error("dimension mismatch");
  }
  std::vector<int> max_deg(dim, 0);
  for (const auto& alpha : indices) {
    if (alpha.dim() != dim) throw Error("dimension mismatch");
    for (std::size_t d = 0; d < dim; ++d) max_deg[d] = std::max(max_deg[d], alpha[d]);
  }
  const auto terms = sparsify(indices);
  std::vector<std::size_t> offset(dim + 1, 0);
  for (std::size_t d = 0; d < dim; ++d) offset[d + 1] = offset[d] + max_deg[d] + 1;
  std::vector<double> values(offset[dim]);

  Eigen::MatrixXd design(points.rows(), static_cast<Eigen::Index>(indices.size()));
  std::vector<double> row(dim);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (std::size_t d = 0; d < dim; ++d) row[d] = points(i, d);
    if (!extrapolate && !box.contains(row)) {
      throw Error("point not in subdomain");
    }
    for (std::size_t d = 0; d < dim; ++d) {
      legendre_orthonormal_all(max_deg[d], row[d], box.lower[d], box.upper[d],
                               std::span<double>(values.data() + offset[d], max_deg[d] + 1));
    }
    for (std::size_t j = 0; j < terms.size(); ++j) {
      double v = 1.0;
      for (const auto& [d, k] : terms[j].factors) v *= values[offset[d] + k];
      design(i, static_cast<Eigen::Index>(j)) = v;
    }
  }
  return design;
}

double eval_expansion(std::span<const MultiIndex> indices, const Eigen::VectorXd& coefficients,
                      const Box& box, std::span<const double> u) {
  const std::size_t dim = box.dim();
  std::vector<int> max_deg(dim, 0);
  for (const auto& alpha : indices) {
    for (std::size_t d = 0; d < dim; ++d) max_deg[d] = std::max(max_deg[d], alpha[d]);
  }
  std::vector<std::vector<double>> values(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    if (max_deg[d] == 0) continue;
    values[d].resize(max_deg[d] + 1);
    legendre_orthonormal_all(max_deg[d], u[d], box.lower[d], box.upper[d], values[d]);
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < indices.size(); ++j) {
    double v = coefficients[static_cast<Eigen::Index>(j)];
    for (std::size_t d = 0; d < dim; ++d) {
      const int k = indices[j][d];
      if (k > 0) v *= values[d][k];
    }
    sum += v;
  }
  return sum;
}

namespace {

void enumerate(std::size_t dim, std::size_t start, int remaining_rank, double budget, double tol,
               double q, int max_degree, std::vector<int>& current, std::vector<MultiIndex>& out,
               std::size_t max_size) {
  for (std::size_t d = start; d < dim && remaining_rank > 0; ++d) {
    for (int k = 1; k <= max_degree; ++k) {
      const double cost = std::pow(static_cast<double>(k), q);
      if (cost > budget + tol) break;
      current[d] = k;
      out.emplace_back(current);
      if (out.size() > max_size) {
        throw Error("basis too large");
      }
      enumerate(dim, d + 1, remaining_rank - 1, budget - cost, tol, q, max_degree, current, out,
                max_size);
      current[d] = 0;
    }
  }
}

} // namespace

TruncationSet generate_truncation(std::size_t dim, int max_degree, double q, int max_rank,
                                  std::size_t max_size) {
  if (dim == 0) throw Error("dimension must be at least 1");
  if (max_degree < 0) throw Error("max degree must be non-negative");
  if (max_degree > kDegreeCap) throw Error("polynomial degree outside [0, " + std::to_string(kDegreeCap) + "]");
  if (!(q > 0.0 && q <= 1.0)) throw Error("q-norm parameter must lie in (0, 1]");
  if (max_rank < 1) throw Error("rank must be at least 1");

  TruncationSet ts{dim, max_degree, q, max_rank, {}};
  ts.indices.push_back(MultiIndex::zero(dim));
  if (max_degree > 0) {
    std::vector<int> current(dim, 0);
    const double budget = std::pow(static_cast<double>(max_degree), q);
    enumerate(dim, 0, max_rank, budget, 1e-10 * budget, q, max_degree, current, ts.indices,
              max_size);
  }
  std::sort(ts.indices.begin(), ts.indices.end(), graded_lex_less);
  return ts;
}

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw Error("quadrature needs at least one node");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi initial guess followed by Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 1; k < n; ++k) {
        const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 1; k < n; ++k) {
      const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) {
    rule.nodes[n / 2] = 0.0;
  }
  return rule;
}

Eigen::MatrixXd reprojection_matrix(int max_degree, double from_lo, double from_hi, double to_lo,
                                    double to_hi) {
  const int n = max_degree + 1;
  const auto rule = gauss_legendre(n);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> from_vals(n);
  std::vector<double> to_vals(n);
  for (int q = 0; q < n; ++q) {
    const double u = to_lo + 0.5 * (rule.nodes[q] + 1.0) * (to_hi - to_lo);
    // Uniform probability measure on [to]: weights / 2.
    const double w = 0.5 * rule.weights[q];
    legendre_orthonormal_all(max_degree, u, from_lo, from_hi, from_vals);
    legendre_orthonormal_all(max_degree, u, to_lo, to_hi, to_vals);
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j <= k; ++j) {
        t(k, j) += w * from_vals[k] * to_vals[j];
      }
    }
  }
  return t;
}

} // namespace sse
