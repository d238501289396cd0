#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "sse/poly_basis.hpp"

namespace sse {

// Hat-matrix diagonal entries at or above 1 - kLeverageCap make the LOO
// denominator degenerate; those terms use kLeverageCap instead.
inline constexpr double kLeverageCap = 1e-10;

struct OlsResult {
  Eigen::VectorXd coefficients;
  // (1/N) sum ((y_i - yhat_i) / (1 - h_ii))^2
  double loo = 0.0;
  // Set when at least one leverage hit the cap.
  bool unstable = false;
};

// Least squares by column-pivoted Householder QR with the analytic
// leave-one-out error. Throws "ill-conditioned basis" on numerical rank loss.
OlsResult ols_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& y);

struct Selection {
  std::vector<Eigen::Index> active;  // columns of the design, in selection order
  Eigen::VectorXd coefficients;      // one per active column
  double loo = 0.0;
  bool unstable = false;
};

// Sparse solvers choose a column subset and fit it. The selection criterion
// is always the analytic LOO error.
class SparseSolver {
public:
  virtual ~SparseSolver() = default;
  virtual Selection select(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                           Eigen::Index max_terms) const = 0;
};

// Forward stepwise selection: at every step the column most correlated with
// the current residual joins the active set and the model is refit; the path
// model with the smallest LOO is returned (the empty model included).
class StepwiseSolver final : public SparseSolver {
public:
  Selection select(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                   Eigen::Index max_terms) const override;
};

Selection sparse_select(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                        Eigen::Index max_terms);

// A truncated orthonormal expansion living on a box of the quantile space.
// Only active terms are stored; an expansion without terms is the null
// function.
struct Expansion {
  Box box;
  std::vector<MultiIndex> indices;
  Eigen::VectorXd coefficients;
  double loo = 0.0;
  int degree = 0;   // degree of the selected candidate basis
  double q = 1.0;   // q-norm of the selected candidate basis
  bool unstable = false;

  static Expansion null(Box box);

  std::size_t size() const { return indices.size(); }
  double evaluate(std::span<const double> u) const;
  Eigen::VectorXd evaluate(const Eigen::MatrixXd& points, bool extrapolate = false) const;
  // Coefficient of the constant term (0 if inactive).
  double constant() const;
  // Sum of squared non-constant coefficients (the variance on the box).
  double variance() const;
};

struct AdaptiveOptions {
  int max_degree = 3;
  std::vector<double> q_grid{0.5, 0.6, 0.7, 0.8};
  int max_rank = 2;
};

// Degree- and q-norm-adaptive sparse fit. Candidate bases larger than
// |points| - 1 are skipped; the raising of the degree stops after the best
// LOO increased for two consecutive degrees.
Expansion adaptive_fit(const Eigen::MatrixXd& points, const Eigen::VectorXd& y, const Box& box,
                       const AdaptiveOptions& options, const SparseSolver& solver = StepwiseSolver{});

} // namespace sse
